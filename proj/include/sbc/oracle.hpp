#pragma once

#include "sbc/graph.hpp"
#include "sbc/scores.hpp"

namespace sbc {

inline constexpr std::size_t kOracleMaxVertices = 2000;

/// Betweenness computed straight from the definitions: all-pairs BFS gives
/// d(s, t) and sigma(s, t), and a vertex or edge lies on a shortest s-t path
/// exactly when the distances add up. Shares no code with brandes_full.
/// Throws InvalidArgument above kOracleMaxVertices.
CentralityScores oracle_scores(const DynamicGraph& g);

/// Sum over ordered reachable pairs (s, t), s != t, of d(s, t).
/// Equals the total edge betweenness and, minus the pair count, the total
/// vertex betweenness.
struct PairTotals {
  double distance_sum = 0.0;
  double pair_count = 0.0;
};
PairTotals reachable_pair_totals(const DynamicGraph& g);

}  // namespace sbc
