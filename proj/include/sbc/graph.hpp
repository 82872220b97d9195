#pragma once

#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbc/types.hpp"

namespace sbc {

/// Simple undirected unweighted graph with dense vertex ids.
///
/// Neighbor lists are kept sorted ascending; every traversal in the library
/// walks them in that order, which pins BFS discovery order and therefore the
/// floating-point summation order of all downstream accumulations.
class DynamicGraph {
 public:
  DynamicGraph() = default;
  explicit DynamicGraph(std::size_t n) : adjacency_(n) {}

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  /// Returns false when the edge already exists. Throws on self-loops.
  bool add_edge(VertexId u, VertexId v);
  /// Returns false when the edge is absent.
  bool remove_edge(VertexId u, VertexId v);
  bool has_edge(VertexId u, VertexId v) const;

  VertexId add_vertex();

  std::span<const VertexId> neighbors(VertexId v) const {
    check(v);
    return adjacency_[v];
  }
  std::size_t degree(VertexId v) const { return neighbors(v).size(); }

  /// All edges in ascending (u, v) order.
  std::vector<Edge> edges() const;

  friend bool operator==(const DynamicGraph&, const DynamicGraph&) = default;

 private:
  void check(VertexId v) const {
    if (v >= adjacency_.size()) {
      throw InvalidArgument("vertex id " + std::to_string(v) + " out of range (n=" +
                            std::to_string(adjacency_.size()) + ")");
    }
  }

  std::vector<std::vector<VertexId>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Maps external vertex labels to dense ids in first-seen order.
class VertexLabels {
 public:
  VertexId intern(const std::string& label);
  const VertexId* find(const std::string& label) const;
  const std::string& label(VertexId v) const { return labels_.at(v); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& all() const { return labels_; }

 private:
  std::unordered_map<std::string, VertexId> ids_;
  std::vector<std::string> labels_;
};

struct LabeledGraph {
  DynamicGraph graph;
  VertexLabels labels;
};

/// Parses `u v` lines; `#` starts a comment, blank lines are skipped.
/// Duplicate edges are ignored; self-loops are rejected.
LabeledGraph read_edge_list(std::istream& in);
LabeledGraph read_edge_list_file(const std::string& path);

}  // namespace sbc
