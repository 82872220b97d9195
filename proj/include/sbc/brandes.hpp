#pragma once

#include <functional>
#include <vector>

#include "sbc/graph.hpp"
#include "sbc/scores.hpp"
#include "sbc/source_data.hpp"

namespace sbc {

/// Single-source Brandes pass without predecessor lists.
///
/// The search phase is a plain BFS in ascending-neighbor order. The
/// accumulation phase walks levels from the deepest to level 1 and, inside a
/// level, vertices in discovery order; each vertex scans all its neighbors and
/// picks those one level closer to the source. Contributions
/// (sigma[v] / sigma[w]) * (1 + delta[w]) go to delta[v] and to the edge
/// (v, w); delta[w] goes to the vertex score of w. delta[source] stays 0.
///
/// `out` is resized to the vertex count and overwritten.
void brandes_single_source(const DynamicGraph& g, VertexId source, SourceData& out,
                           ScoreSink& sink);

SourceData brandes_single_source(const DynamicGraph& g, VertexId source, ScoreSink& sink);

using SourceCallback = std::function<void(VertexId, const SourceData&)>;

/// Full static computation, sources processed in ascending order. When
/// `on_source` is set it receives the data of every source as it completes.
CentralityScores brandes_full(const DynamicGraph& g, const SourceCallback& on_source = {});

struct FullResult {
  CentralityScores scores;
  std::vector<SourceData> sources;
};

FullResult brandes_full_with_data(const DynamicGraph& g);

/// Fresh BFS distances from one source (kUnreachable for other components).
std::vector<Distance> bfs_distances(const DynamicGraph& g, VertexId source);

}  // namespace sbc
