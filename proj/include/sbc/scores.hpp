#pragma once

#include <unordered_map>
#include <vector>

#include "sbc/types.hpp"

namespace sbc {

/// Vertex and edge betweenness, summed over ordered (s, t) pairs with no
/// halving for undirectedness.
struct CentralityScores {
  std::vector<double> vbc;
  std::unordered_map<Edge, double> ebc;

  double edge(VertexId u, VertexId v) const {
    auto it = ebc.find(Edge(u, v));
    return it == ebc.end() ? 0.0 : it->second;
  }
};

/// Receiver of per-source score contributions. The incremental updater and
/// static Brandes both report through this interface so that the caller
/// decides the merge order.
class ScoreSink {
 public:
  virtual ~ScoreSink() = default;
  virtual void add_vertex(VertexId v, double amount) = 0;
  virtual void add_edge(Edge e, double amount) = 0;
};

/// Sink that adds straight into a CentralityScores.
class DirectSink final : public ScoreSink {
 public:
  explicit DirectSink(CentralityScores& target) : target_(&target) {}
  void add_vertex(VertexId v, double amount) override { target_->vbc[v] += amount; }
  void add_edge(Edge e, double amount) override { target_->ebc[e] += amount; }

 private:
  CentralityScores* target_;
};

/// Largest absolute deviation of `b` from `a`, normalised by max(1, |a|, |b|).
struct ScoreDeviation {
  double vbc = 0.0;
  double ebc = 0.0;
  bool same_edge_set = true;
  double worst() const { return vbc > ebc ? vbc : ebc; }
};

ScoreDeviation compare_scores(const CentralityScores& a, const CentralityScores& b);

inline double relative_gap(double a, double b) {
  double diff = a > b ? a - b : b - a;
  double scale = 1.0;
  if (a > scale || -a > scale) scale = a > 0 ? a : -a;
  if (b > scale || -b > scale) scale = b > 0 ? b : -b;
  return diff / scale;
}

}  // namespace sbc
