#include "sbc/girvan_newman.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>

#include "sbc/brandes.hpp"
#include "sbc/generators.hpp"

namespace sbc {

namespace {

std::size_t count_components(const std::vector<std::uint32_t>& comp) {
  return comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
}

bool finished(const GnOptions& options, std::size_t steps, std::size_t components,
              std::size_t edges) {
  if (edges == 0) return true;
  if (options.max_steps != 0 && steps >= options.max_steps) return true;
  return options.target_components != 0 && components >= options.target_components;
}

}  // namespace

Edge select_top_edge(const CentralityScores& scores, double tie_tolerance) {
  if (scores.ebc.empty()) throw InvalidArgument("graph has no edges");
  double best = -1.0;
  for (const auto& [e, x] : scores.ebc) best = std::max(best, x);
  bool found = false;
  Edge pick;
  for (const auto& [e, x] : scores.ebc) {
    if (relative_gap(x, best) > tie_tolerance) continue;
    if (!found || e < pick) pick = e;
    found = true;
  }
  return pick;
}

Dendrogram girvan_newman(const DynamicGraph& g, const GnOptions& options) {
  if (g.vertex_count() == 0) throw InvalidArgument("empty graph");
  PartitionEngine engine(g, options.engine);
  Dendrogram out;
  out.initial_components = count_components(connected_components(g));
  std::size_t components = out.initial_components;

  while (!finished(options, out.steps.size(), components, engine.graph().edge_count())) {
    const Edge e = select_top_edge(engine.scores(), options.tie_tolerance);
    const double score = engine.scores().edge(e.u, e.v);
    const auto stats = engine.apply(EdgeEvent::remove(e.u, e.v));
    DendrogramStep step{out.steps.size() + 1, e, score, components};
    if (stats.disconnected) {
      step.components = ++components;
      out.splits.emplace_back(step.step, connected_components(engine.graph()));
    }
    out.steps.push_back(step);
    if (options.on_step) options.on_step(engine, step);
  }
  return out;
}

Dendrogram gn_reference(const DynamicGraph& g, const GnOptions& options) {
  if (g.vertex_count() == 0) throw InvalidArgument("empty graph");
  if (g.vertex_count() > kReferenceMaxVertices) {
    throw InvalidArgument("reference run limited to " + std::to_string(kReferenceMaxVertices) +
                          " vertices");
  }
  DynamicGraph current = g;
  Dendrogram out;
  out.initial_components = count_components(connected_components(g));
  std::size_t components = out.initial_components;

  while (!finished(options, out.steps.size(), components, current.edge_count())) {
    const CentralityScores scores = brandes_full(current);
    const Edge e = select_top_edge(scores, options.tie_tolerance);
    current.remove_edge(e.u, e.v);
    auto comp = connected_components(current);
    const std::size_t now = count_components(comp);
    DendrogramStep step{out.steps.size() + 1, e, scores.edge(e.u, e.v), now};
    if (now > components) out.splits.emplace_back(step.step, std::move(comp));
    components = now;
    out.steps.push_back(step);
  }
  return out;
}

void write_dendrogram_csv(std::ostream& out, const Dendrogram& d, const VertexLabels* labels) {
  auto name = [&](VertexId v) { return labels ? labels->label(v) : std::to_string(v); };
  out << "step,edge_u,edge_v,ebc,components\n";
  for (const auto& s : d.steps) {
    fmt::print(out, "{},{},{},{:.12g},{}\n", s.step, name(s.edge.u), name(s.edge.v), s.ebc,
               s.components);
  }
}

}  // namespace sbc
