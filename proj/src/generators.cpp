#include "sbc/generators.hpp"

#include <algorithm>
#include <random>

namespace sbc {

namespace {

VertexId pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<VertexId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
}

}  // namespace

DynamicGraph random_gnm(std::size_t n, std::size_t m, std::uint64_t seed) {
  DynamicGraph g(n);
  if (n < 2) return g;
  m = std::min(m, n * (n - 1) / 2);
  std::mt19937_64 rng(seed);
  while (g.edge_count() < m) {
    VertexId a = pick(rng, n);
    VertexId b = pick(rng, n);
    if (a != b) g.add_edge(a, b);
  }
  return g;
}

DynamicGraph small_world(std::size_t n, std::size_t k, double beta, std::uint64_t seed) {
  if (n <= 2 * k) throw InvalidArgument("small_world needs n > 2k");
  DynamicGraph g(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t j = 1; j <= k; ++j) g.add_edge(VertexId(v), VertexId((v + j) % n));
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution rewire(beta);
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t v = 0; v < n; ++v) {
      const VertexId a = VertexId(v);
      const VertexId b = VertexId((v + j) % n);
      if (!rewire(rng) || !g.has_edge(a, b)) continue;
      if (g.degree(a) + 1 >= n) continue;
      VertexId c;
      do {
        c = pick(rng, n);
      } while (c == a || g.has_edge(a, c));
      g.remove_edge(a, b);
      g.add_edge(a, c);
    }
  }
  return g;
}

std::vector<std::uint32_t> connected_components(const DynamicGraph& g) {
  const std::size_t n = g.vertex_count();
  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<std::uint32_t> comp(n, kNone);
  std::vector<VertexId> stack;
  std::uint32_t next = 0;
  for (VertexId s = 0; s < n; ++s) {
    if (comp[s] != kNone) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : g.neighbors(v)) {
        if (comp[w] == kNone) {
          comp[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return comp;
}

std::vector<EdgeEvent> random_event_stream(const DynamicGraph& start, std::size_t count,
                                           std::uint64_t seed, const StreamOptions& options) {
  DynamicGraph g = start;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<EdgeEvent> out;
  out.reserve(count);

  while (out.size() < count) {
    const std::size_t n = g.vertex_count();
    const bool full = g.edge_count() >= n * (n - 1) / 2;
    const bool add = g.edge_count() == 0 || (!full && coin(rng) < options.add_probability);

    if (!add) {
      const auto edges = g.edges();
      const Edge e = edges[pick(rng, edges.size())];
      g.remove_edge(e.u, e.v);
      out.push_back(EdgeEvent::remove(e.u, e.v));
      continue;
    }

    if (n == 0 || coin(rng) < options.new_vertex_probability) {
      const VertexId fresh = g.add_vertex();
      if (fresh == 0) continue;
      const VertexId a = pick(rng, fresh);
      g.add_edge(a, fresh);
      out.push_back(coin(rng) < 0.5 ? EdgeEvent::add(a, fresh) : EdgeEvent::add(fresh, a));
      continue;
    }
    if (n < 2 || full) continue;

    if (coin(rng) < options.merge_probability) {
      const auto comp = connected_components(g);
      if (*std::max_element(comp.begin(), comp.end()) > 0) {
        VertexId a;
        VertexId b;
        do {
          a = pick(rng, n);
          b = pick(rng, n);
        } while (comp[a] == comp[b]);
        g.add_edge(a, b);
        out.push_back(EdgeEvent::add(a, b));
        continue;
      }
    }

    VertexId a;
    VertexId b;
    do {
      a = pick(rng, n);
      b = pick(rng, n);
    } while (a == b || g.has_edge(a, b));
    g.add_edge(a, b);
    out.push_back(EdgeEvent::add(a, b));
  }
  return out;
}

}  // namespace sbc
