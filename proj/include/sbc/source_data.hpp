#pragma once

#include <vector>

#include "sbc/types.hpp"

namespace sbc {

/// Per-source betweenness data: hop distance, shortest-path count and
/// accumulated dependency of every vertex with respect to one source.
///
/// Unreachable vertices carry d = kUnreachable, sigma = 0, delta = 0.
/// The source itself carries d = 0, sigma = 1, delta = 0.
struct SourceData {
  std::vector<Distance> d;
  std::vector<PathCount> sigma;
  std::vector<double> delta;

  std::size_t size() const { return d.size(); }

  /// Data of a source that reaches nothing but itself.
  static SourceData isolated(std::size_t n, VertexId source) {
    SourceData out;
    out.d.assign(n, kUnreachable);
    out.sigma.assign(n, 0);
    out.delta.assign(n, 0.0);
    if (source < n) {
      out.d[source] = 0;
      out.sigma[source] = 1;
    }
    return out;
  }

  void append_unreached_vertex() {
    d.push_back(kUnreachable);
    sigma.push_back(0);
    delta.push_back(0.0);
  }

  friend bool operator==(const SourceData&, const SourceData&) = default;
};

}  // namespace sbc
