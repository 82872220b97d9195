#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace sbc {

using VertexId = std::uint32_t;
using Distance = std::uint32_t;
using PathCount = std::uint64_t;

// Distance of a vertex that no shortest path from the source reaches.
inline constexpr Distance kUnreachable = std::numeric_limits<Distance>::max();

// Undirected edge stored with the smaller endpoint first.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  Edge() = default;
  Edge(VertexId a, VertexId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  std::uint64_t key() const { return (std::uint64_t{u} << 32) | v; }
  static Edge from_key(std::uint64_t k) {
    return Edge(static_cast<VertexId>(k >> 32), static_cast<VertexId>(k & 0xffffffffu));
  }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a documented precondition (bad ids, invalid events).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// On-disk data that cannot be decoded or does not fit the configured layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbc

template <>
struct std::hash<sbc::Edge> {
  std::size_t operator()(const sbc::Edge& e) const noexcept {
    return std::hash<std::uint64_t>{}(e.key());
  }
};
