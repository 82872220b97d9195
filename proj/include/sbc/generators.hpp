#pragma once

#include <cstdint>
#include <vector>

#include "sbc/graph.hpp"
#include "sbc/incremental.hpp"

namespace sbc {

/// Uniform random simple graph with exactly `m` edges (capped at n(n-1)/2).
DynamicGraph random_gnm(std::size_t n, std::size_t m, std::uint64_t seed);

/// Ring lattice where each vertex links to its `k` nearest neighbors on each
/// side, then every lattice edge is rewired with probability `beta`.
DynamicGraph small_world(std::size_t n, std::size_t k, double beta, std::uint64_t seed);

struct StreamOptions {
  double add_probability = 0.5;
  /// Chance that an addition attaches a brand new vertex (id == current n).
  double new_vertex_probability = 0.05;
  /// Chance that an addition is forced between two different components,
  /// when the graph has more than one.
  double merge_probability = 0.05;
};

/// Random stream of valid events starting from `g`: removals pick an existing
/// edge, additions a missing one. `g` is left untouched.
std::vector<EdgeEvent> random_event_stream(const DynamicGraph& g, std::size_t count,
                                           std::uint64_t seed, const StreamOptions& options = {});

/// Connected-component id of every vertex (ids in order of smallest member).
std::vector<std::uint32_t> connected_components(const DynamicGraph& g);

}  // namespace sbc
