#include "sbc/brandes.hpp"

#include <cmath>

namespace sbc {

ScoreDeviation compare_scores(const CentralityScores& a, const CentralityScores& b) {
  ScoreDeviation dev;
  if (a.vbc.size() != b.vbc.size()) {
    dev.vbc = INFINITY;
  } else {
    for (std::size_t v = 0; v < a.vbc.size(); ++v) {
      dev.vbc = std::max(dev.vbc, relative_gap(a.vbc[v], b.vbc[v]));
    }
  }
  if (a.ebc.size() != b.ebc.size()) dev.same_edge_set = false;
  for (const auto& [e, value] : a.ebc) {
    auto it = b.ebc.find(e);
    if (it == b.ebc.end()) {
      dev.same_edge_set = false;
      continue;
    }
    dev.ebc = std::max(dev.ebc, relative_gap(value, it->second));
  }
  if (!dev.same_edge_set) dev.ebc = INFINITY;
  return dev;
}

void brandes_single_source(const DynamicGraph& g, VertexId source, SourceData& out,
                           ScoreSink& sink) {
  const std::size_t n = g.vertex_count();
  out.d.assign(n, kUnreachable);
  out.sigma.assign(n, 0);
  out.delta.assign(n, 0.0);

  std::vector<VertexId> order;
  order.reserve(n);
  std::vector<std::size_t> level_begin;
  out.d[source] = 0;
  out.sigma[source] = 1;
  order.push_back(source);
  for (std::size_t head = 0; head < order.size(); ++head) {
    VertexId v = order[head];
    if (out.d[v] == level_begin.size()) level_begin.push_back(head);
    for (VertexId w : g.neighbors(v)) {
      if (out.d[w] == kUnreachable) {
        out.d[w] = out.d[v] + 1;
        order.push_back(w);
      }
      if (out.d[w] == out.d[v] + 1) out.sigma[w] += out.sigma[v];
    }
  }
  level_begin.push_back(order.size());

  for (std::size_t level = level_begin.size() - 2; level >= 1; --level) {
    for (std::size_t i = level_begin[level]; i < level_begin[level + 1]; ++i) {
      VertexId w = order[i];
      const double coeff = (1.0 + out.delta[w]) / static_cast<double>(out.sigma[w]);
      for (VertexId v : g.neighbors(w)) {
        if (out.d[v] + 1 != out.d[w]) continue;
        double c = static_cast<double>(out.sigma[v]) * coeff;
        if (v != source) out.delta[v] += c;
        sink.add_edge(Edge(v, w), c);
      }
      sink.add_vertex(w, out.delta[w]);
    }
  }
}

SourceData brandes_single_source(const DynamicGraph& g, VertexId source, ScoreSink& sink) {
  SourceData out;
  brandes_single_source(g, source, out, sink);
  return out;
}

CentralityScores brandes_full(const DynamicGraph& g, const SourceCallback& on_source) {
  CentralityScores scores;
  scores.vbc.assign(g.vertex_count(), 0.0);
  scores.ebc.reserve(g.edge_count());
  for (const Edge& e : g.edges()) scores.ebc.emplace(e, 0.0);
  DirectSink sink(scores);
  SourceData data;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    brandes_single_source(g, s, data, sink);
    if (on_source) on_source(s, data);
  }
  return scores;
}

FullResult brandes_full_with_data(const DynamicGraph& g) {
  FullResult out;
  out.sources.reserve(g.vertex_count());
  out.scores = brandes_full(g, [&](VertexId, const SourceData& d) { out.sources.push_back(d); });
  return out;
}

std::vector<Distance> bfs_distances(const DynamicGraph& g, VertexId source) {
  std::vector<Distance> d(g.vertex_count(), kUnreachable);
  std::vector<VertexId> queue{source};
  d[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId v = queue[head];
    for (VertexId w : g.neighbors(v)) {
      if (d[w] == kUnreachable) {
        d[w] = d[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return d;
}

}  // namespace sbc
