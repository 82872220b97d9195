#include "sbc/state.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

namespace sbc {

namespace fs = std::filesystem;

namespace {

constexpr int kStateFormat = 1;

template <typename Fn>
void write_file(const fs::path& path, Fn&& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    body(out);
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string() + " (is this a state directory?)");
  return in;
}

std::vector<Edge> sorted_edges(const CentralityScores& scores) {
  std::vector<Edge> edges;
  edges.reserve(scores.ebc.size());
  for (const auto& [e, x] : scores.ebc) edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

std::string stores_dir(const std::string& dir) { return (fs::path(dir) / "stores").string(); }

void save_state(const std::string& dir, const State& state) {
  const fs::path root(dir);
  fs::create_directories(root);
  const auto& g = state.graph.graph;

  write_file(root / "labels.txt", [&](std::ostream& out) {
    for (const auto& label : state.graph.labels.all()) out << label << '\n';
  });
  write_file(root / "edges.txt", [&](std::ostream& out) {
    for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
  });
  write_file(root / "scores.state", [&](std::ostream& out) {
    for (std::size_t v = 0; v < state.scores.vbc.size(); ++v) {
      fmt::print(out, "v {} {:.17g}\n", v, state.scores.vbc[v]);
    }
    for (const Edge& e : sorted_edges(state.scores)) {
      fmt::print(out, "e {} {} {:.17g}\n", e.u, e.v, state.scores.ebc.at(e));
    }
  });
  write_file(root / "scores.csv", [&](std::ostream& out) { write_scores_csv(out, state); });

  std::vector<Partition> relative = state.partitions;
  for (auto& p : relative) {
    p.store_path = (fs::path("stores") / fs::path(p.store_path).filename()).string();
  }
  const fs::path manifest_tmp = root / "manifest.tmp";
  write_manifest(manifest_tmp.string(), relative);
  fs::rename(manifest_tmp, root / "manifest");

  nlohmann::json meta = {
      {"format", kStateFormat},
      {"vertices", g.vertex_count()},
      {"edges", g.edge_count()},
      {"partitions", state.partitions.size()},
      {"sigma_width", state.sigma_width},
      {"committed_events", state.committed_events},
  };
  write_file(root / "state.json", [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
}

State load_state(const std::string& dir) {
  const fs::path root(dir);
  State state;

  nlohmann::json meta;
  {
    auto in = open_input(root / "state.json");
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("state.json: " + std::string(e.what()));
    }
  }
  if (meta.value("format", 0) != kStateFormat) throw FormatError("unsupported state format");
  state.sigma_width = meta.at("sigma_width").get<std::uint8_t>();
  state.committed_events = meta.at("committed_events").get<std::uint64_t>();

  {
    auto in = open_input(root / "labels.txt");
    std::string label;
    while (std::getline(in, label)) state.graph.labels.intern(label);
  }
  const std::size_t n = state.graph.labels.size();
  if (n != meta.at("vertices").get<std::size_t>()) {
    throw FormatError("labels.txt lists " + std::to_string(n) + " vertices, state.json " +
                      meta.at("vertices").dump());
  }
  state.graph.graph = DynamicGraph(n);
  {
    auto in = open_input(root / "edges.txt");
    VertexId u, v;
    while (in >> u >> v) state.graph.graph.add_edge(u, v);
  }

  state.scores.vbc.assign(n, 0.0);
  {
    auto in = open_input(root / "scores.state");
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream f(line);
      char kind;
      f >> kind;
      if (kind == 'v') {
        std::size_t v;
        double x;
        f >> v >> x;
        if (!f || v >= n) throw FormatError("scores.state: bad line '" + line + "'");
        state.scores.vbc[v] = x;
      } else {
        VertexId u, v;
        double x;
        f >> u >> v >> x;
        if (!f || kind != 'e') throw FormatError("scores.state: bad line '" + line + "'");
        state.scores.ebc[Edge(u, v)] = x;
      }
    }
  }
  if (state.scores.ebc.size() != state.graph.graph.edge_count()) {
    throw FormatError("scores.state does not cover the graph's edges");
  }

  state.partitions = read_manifest((root / "manifest").string());
  for (auto& p : state.partitions) {
    if (fs::path(p.store_path).is_relative()) p.store_path = (root / p.store_path).string();
  }
  return state;
}

void write_scores_csv(std::ostream& out, const State& state) {
  const auto& labels = state.graph.labels;
  for (std::size_t v = 0; v < state.scores.vbc.size(); ++v) {
    fmt::print(out, "v,{},{:.12g}\n", labels.label(VertexId(v)), state.scores.vbc[v]);
  }
  for (const Edge& e : sorted_edges(state.scores)) {
    fmt::print(out, "e,{},{},{:.12g}\n", labels.label(e.u), labels.label(e.v),
               state.scores.ebc.at(e));
  }
}

}  // namespace sbc
