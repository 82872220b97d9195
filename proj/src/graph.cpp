#include "sbc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sbc {

bool DynamicGraph::add_edge(VertexId u, VertexId v) {
  check(u);
  check(v);
  if (u == v) {
    throw InvalidArgument("self-loop on vertex " + std::to_string(u));
  }
  auto& nu = adjacency_[u];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it != nu.end() && *it == v) return false;
  nu.insert(it, v);
  auto& nv = adjacency_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++edge_count_;
  return true;
}

bool DynamicGraph::remove_edge(VertexId u, VertexId v) {
  check(u);
  check(v);
  auto& nu = adjacency_[u];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it == nu.end() || *it != v) return false;
  nu.erase(it);
  auto& nv = adjacency_[v];
  nv.erase(std::lower_bound(nv.begin(), nv.end(), u));
  --edge_count_;
  return true;
}

bool DynamicGraph::has_edge(VertexId u, VertexId v) const {
  check(u);
  check(v);
  const auto& nu = adjacency_[u];
  return std::binary_search(nu.begin(), nu.end(), v);
}

VertexId DynamicGraph::add_vertex() {
  adjacency_.emplace_back();
  return static_cast<VertexId>(adjacency_.size() - 1);
}

std::vector<Edge> DynamicGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (VertexId u = 0; u < adjacency_.size(); ++u) {
    for (VertexId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

VertexId VertexLabels::intern(const std::string& label) {
  auto [it, inserted] = ids_.try_emplace(label, static_cast<VertexId>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

const VertexId* VertexLabels::find(const std::string& label) const {
  auto it = ids_.find(label);
  return it == ids_.end() ? nullptr : &it->second;
}

LabeledGraph read_edge_list(std::istream& in) {
  LabeledGraph out;
  std::vector<std::pair<VertexId, VertexId>> pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a)) continue;
    if (!(fields >> b)) {
      throw InvalidArgument("edge list line " + std::to_string(line_no) + ": expected two vertex ids");
    }
    if (a == b) {
      throw InvalidArgument("edge list line " + std::to_string(line_no) + ": self-loop on " + a);
    }
    VertexId u = out.labels.intern(a);
    VertexId v = out.labels.intern(b);
    pending.emplace_back(u, v);
  }
  out.graph = DynamicGraph(out.labels.size());
  for (auto [u, v] : pending) out.graph.add_edge(u, v);
  return out;
}

LabeledGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list " + path);
  return read_edge_list(in);
}

}  // namespace sbc
