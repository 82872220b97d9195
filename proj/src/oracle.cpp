#include "sbc/oracle.hpp"

#include <deque>
#include <string>
#include <vector>

namespace sbc {
namespace {

struct AllPairs {
  std::size_t n = 0;
  std::vector<std::uint32_t> dist;  // n*n, UINT32_MAX when unreachable
  std::vector<double> count;        // n*n

  std::uint32_t d(std::size_t s, std::size_t t) const { return dist[s * n + t]; }
  double sigma(std::size_t s, std::size_t t) const { return count[s * n + t]; }
};

AllPairs all_pairs(const DynamicGraph& g) {
  AllPairs ap;
  ap.n = g.vertex_count();
  ap.dist.assign(ap.n * ap.n, UINT32_MAX);
  ap.count.assign(ap.n * ap.n, 0.0);
  for (std::size_t s = 0; s < ap.n; ++s) {
    std::uint32_t* dist = &ap.dist[s * ap.n];
    double* count = &ap.count[s * ap.n];
    std::deque<VertexId> frontier{static_cast<VertexId>(s)};
    dist[s] = 0;
    count[s] = 1.0;
    while (!frontier.empty()) {
      VertexId v = frontier.front();
      frontier.pop_front();
      for (VertexId w : g.neighbors(v)) {
        if (dist[w] == UINT32_MAX) {
          dist[w] = dist[v] + 1;
          frontier.push_back(w);
        }
        if (dist[w] == dist[v] + 1) count[w] += count[v];
      }
    }
  }
  return ap;
}

}  // namespace

CentralityScores oracle_scores(const DynamicGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n > kOracleMaxVertices) {
    throw InvalidArgument("oracle limited to " + std::to_string(kOracleMaxVertices) +
                          " vertices, graph has " + std::to_string(n));
  }
  AllPairs ap = all_pairs(g);
  CentralityScores out;
  out.vbc.assign(n, 0.0);

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || ap.d(s, t) == UINT32_MAX) continue;
      const std::uint32_t dst = ap.d(s, t);
      const double total = ap.sigma(s, t);
      for (std::size_t v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        std::uint32_t dsv = ap.d(s, v);
        std::uint32_t dvt = ap.d(v, t);
        if (dsv == UINT32_MAX || dvt == UINT32_MAX || dsv + dvt != dst) continue;
        out.vbc[v] += ap.sigma(s, v) * ap.sigma(v, t) / total;
      }
    }
  }

  for (const Edge& e : g.edges()) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = 0; t < n; ++t) {
        if (s == t || ap.d(s, t) == UINT32_MAX) continue;
        const std::uint32_t dst = ap.d(s, t);
        // Traversal u -> v, then v -> u.
        for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
          std::uint32_t dsa = ap.d(s, a);
          std::uint32_t dbt = ap.d(b, t);
          if (dsa == UINT32_MAX || dbt == UINT32_MAX || dsa + 1 + dbt != dst) continue;
          sum += ap.sigma(s, a) * ap.sigma(b, t) / ap.sigma(s, t);
        }
      }
    }
    out.ebc.emplace(e, sum);
  }
  return out;
}

PairTotals reachable_pair_totals(const DynamicGraph& g) {
  PairTotals totals;
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> dist(n);
  std::vector<VertexId> queue;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    queue.assign(1, static_cast<VertexId>(s));
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId v = queue[head];
      for (VertexId w : g.neighbors(v)) {
        if (dist[w] != UINT32_MAX) continue;
        dist[w] = dist[v] + 1;
        queue.push_back(w);
        totals.distance_sum += dist[w];
        totals.pair_count += 1.0;
      }
    }
  }
  return totals;
}

}  // namespace sbc
