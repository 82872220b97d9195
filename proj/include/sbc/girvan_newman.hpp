#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "sbc/graph.hpp"
#include "sbc/partition.hpp"

namespace sbc {

struct DendrogramStep {
  std::size_t step = 0;  // 1-based
  Edge edge;
  double ebc = 0.0;      // score of the edge when it was removed
  std::size_t components = 0;
};

struct Dendrogram {
  std::size_t initial_components = 0;
  std::vector<DendrogramStep> steps;
  /// Component id of every vertex right after each split, keyed by step.
  std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> splits;
};

struct GnOptions {
  /// Stop once this many components exist; 0 runs until no edge is left.
  std::size_t target_components = 0;
  /// Stop after this many removals; 0 means no limit.
  std::size_t max_steps = 0;
  /// Scores within this relative distance of the maximum count as tied; the
  /// smallest edge among them is removed.
  double tie_tolerance = 1e-6;
  EngineOptions engine;
  /// Called after every removal with the engine state.
  std::function<void(const PartitionEngine&, const DendrogramStep&)> on_step;
};

inline constexpr std::size_t kReferenceMaxVertices = 5000;

/// Repeatedly removes the top edge, keeping scores current incrementally.
Dendrogram girvan_newman(const DynamicGraph& g, const GnOptions& options = {});

/// Same loop, recomputing all scores from scratch after each removal.
/// Throws InvalidArgument above kReferenceMaxVertices.
Dendrogram gn_reference(const DynamicGraph& g, const GnOptions& options = {});

/// Edge with the highest score; ties broken by the smallest edge.
Edge select_top_edge(const CentralityScores& scores, double tie_tolerance);

/// `step,edge_u,edge_v,ebc,components` rows; vertex labels when given.
void write_dendrogram_csv(std::ostream& out, const Dendrogram& d,
                          const VertexLabels* labels = nullptr);

}  // namespace sbc
