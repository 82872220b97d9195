// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit status is nonzero when any selected criterion fails.

#include <fmt/format.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <thread>

#include "sbc/bd_store.hpp"
#include "sbc/brandes.hpp"
#include "sbc/generators.hpp"
#include "sbc/girvan_newman.hpp"
#include "sbc/latency.hpp"
#include "sbc/oracle.hpp"
#include "sbc/partition.hpp"

using namespace sbc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr double kExactTolerance = 1e-9;      // relative, dependencies and scores
constexpr double kConservationScale = 1e-6;   // absolute, multiplied by n^2
constexpr double kWorkerTolerance = 1e-12;    // relative, across worker counts
constexpr std::uint64_t kRouteMinimum = 50;
constexpr double kStrongEfficiency = 0.60;
constexpr double kWeakBand = 0.25;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / fmt::format("sbc_accept_{}_{}", ::getpid(), name);
  fs::remove_all(p);
  return p;
}

EngineOptions disk(const fs::path& dir, std::size_t workers, std::uint8_t width) {
  EngineOptions o;
  o.mode = StorageMode::disk;
  o.store_dir = dir.string();
  o.workers = workers;
  o.sigma_width = width;
  return o;
}

// First difference between the engine's per-source data and a fresh static
// run, or an empty string. Distances and path counts must match exactly.
std::string compare_with_static(PartitionEngine& engine, double tol) {
  const auto full = brandes_full_with_data(engine.graph());
  const auto n = engine.graph().vertex_count();
  for (VertexId s = 0; s < n; ++s) {
    const auto bd = engine.source_data(s);
    const auto& want = full.sources[s];
    for (VertexId v = 0; v < n; ++v) {
      if (bd.d[v] != want.d[v]) return fmt::format("d mismatch at source {} vertex {}", s, v);
      if (bd.sigma[v] != want.sigma[v]) {
        return fmt::format("sigma mismatch at source {} vertex {}", s, v);
      }
      if (!(relative_gap(bd.delta[v], want.delta[v]) <= tol)) {
        return fmt::format("delta mismatch at source {} vertex {}", s, v);
      }
    }
  }
  const auto dev = compare_scores(full.scores, engine.scores());
  if (!dev.same_edge_set) return "edge set differs";
  if (!(dev.worst() <= tol)) return fmt::format("score deviation {:.3e}", dev.worst());
  return {};
}

std::vector<EdgeEvent> random_additions(const DynamicGraph& g, std::size_t count,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, VertexId(g.vertex_count() - 1));
  DynamicGraph shadow = g;
  std::vector<EdgeEvent> out;
  while (out.size() < count) {
    const VertexId a = pick(rng), b = pick(rng);
    if (a == b || !shadow.add_edge(a, b)) continue;
    out.push_back(EdgeEvent::add(a, b));
  }
  return out;
}

std::vector<EdgeEvent> random_removals(const DynamicGraph& g, std::size_t count,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto edges = g.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  std::vector<EdgeEvent> out;
  for (std::size_t i = 0; i < count && i < edges.size(); ++i) {
    out.push_back(EdgeEvent::remove(edges[i].u, edges[i].v));
  }
  return out;
}

// 1. Oracle equivalence over random graphs and mixed streams.
Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(10, 200);
  const auto dir = scratch("c1");
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = size(rng);
    const auto g = random_gnm(n, 3 * n, rng());
    const auto events = random_event_stream(g, 100, rng());
    // Alternate storage modes and worker counts across graphs.
    EngineOptions o = i % 2 ? disk(dir / std::to_string(i), 1 + i % 4, 8) : EngineOptions{};
    PartitionEngine engine(g, o);
    for (const auto& ev : events) engine.apply(ev);
    const auto problem = compare_with_static(engine, kExactTolerance);
    if (!problem.empty()) {
      return {false, fmt::format("graph {} (n={}): {}", i, n, problem)};
    }
    if (o.mode == StorageMode::disk) fs::remove_all(o.store_dir);
  }
  fs::remove_all(dir);
  const double seconds = seconds_since(t0);
  return {seconds < 600.0, fmt::format("200 graphs x 100 events, {:.1f} s (budget 600 s)", seconds)};
}

// 2. Every update route fires often, each event followed by an oracle check.
Outcome route_coverage() {
  RouteCounts totals{};
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> size(6, 40);
  StreamOptions opts;
  opts.add_probability = 0.45;
  opts.new_vertex_probability = 0.08;
  opts.merge_probability = 0.25;
  std::size_t checks = 0;
  for (int i = 0; i < 400; ++i) {
    const std::size_t n = size(rng);
    // Sparse graphs so removals disconnect and additions merge.
    const auto g = random_gnm(n, n + n / 3, rng());
    PartitionEngine engine(g, EngineOptions{});
    for (const auto& ev : random_event_stream(g, 40, rng(), opts)) {
      const auto stats = engine.apply(ev);
      for (std::size_t r = 0; r < kRouteCount; ++r) totals[r] += stats.routes[r];
      auto problem = compare_with_static(engine, kExactTolerance);
      if (problem.empty()) {
        const auto dev = compare_scores(oracle_scores(engine.graph()), engine.scores());
        if (!(dev.worst() <= kExactTolerance)) problem = "pair oracle disagrees";
      }
      if (!problem.empty()) return {false, fmt::format("graph {}: {}", i, problem)};
      ++checks;
    }
  }
  bool ok = true;
  std::string counts;
  for (std::size_t r = 0; r < kRouteCount; ++r) {
    ok = ok && totals[r] >= kRouteMinimum;
    counts += fmt::format(" {}={}", route_name(UpdateRoute(r)), totals[r]);
  }
  return {ok, fmt::format("{} checked events, minimum {} per route:{}", checks, kRouteMinimum,
                          counts)};
}

// 3. Adding then removing an edge restores the full state.
Outcome inverse_property() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> size(8, 120);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = size(rng);
    auto g = random_gnm(n, std::min(2 * n, n * (n - 1) / 2 - 1), rng());
    const auto before = brandes_full_with_data(g);
    PartitionEngine engine(g, EngineOptions{});
    const auto add = random_additions(g, 1, rng()).front();
    engine.apply(add);
    engine.apply(EdgeEvent::remove(add.u1, add.u2));
    for (VertexId s = 0; s < n; ++s) {
      const auto bd = engine.source_data(s);
      for (VertexId v = 0; v < n; ++v) {
        if (bd.d[v] != before.sources[s].d[v] || bd.sigma[v] != before.sources[s].sigma[v] ||
            !(relative_gap(bd.delta[v], before.sources[s].delta[v]) <= kExactTolerance)) {
          return {false, fmt::format("case {}: source {} vertex {} not restored", i, s, v)};
        }
      }
    }
    const auto dev = compare_scores(before.scores, engine.scores());
    if (!dev.same_edge_set || !(dev.worst() <= kExactTolerance)) {
      return {false, fmt::format("case {}: scores not restored ({:.3e})", i, dev.worst())};
    }
  }
  return {true, "100 add/remove round trips restore d, sigma exactly and scores within 1e-9"};
}

// 4. Score totals equal pair-distance totals after every event.
Outcome conservation() {
  const std::size_t n = 300;
  const auto g = random_gnm(n, 900, 404);
  StreamOptions opts;
  opts.new_vertex_probability = 0.0;
  PartitionEngine engine(g, EngineOptions{});
  double worst = 0.0;
  std::size_t k = 0;
  for (const auto& ev : random_event_stream(g, 500, 405, opts)) {
    engine.apply(ev);
    ++k;
    const auto totals = reachable_pair_totals(engine.graph());
    double ebc = 0.0, vbc = 0.0;
    for (const auto& [e, x] : engine.scores().ebc) ebc += x;
    for (double x : engine.scores().vbc) vbc += x;
    worst = std::max({worst, std::abs(ebc - totals.distance_sum),
                      std::abs(vbc - (totals.distance_sum - totals.pair_count))});
    const double limit = kConservationScale * double(n) * double(n);
    if (!(worst <= limit)) {
      return {false, fmt::format("event {}: deviation {:.3e} > {:.3e}", k, worst, limit)};
    }
  }
  return {true, fmt::format("500 events on n=300, worst deviation {:.3e} (limit {:.3e})", worst,
                            kConservationScale * double(n) * double(n))};
}

// 5. Store layout, random access and skip I/O.
Outcome store_format() {
  const auto dir = scratch("c5");
  fs::create_directories(dir);
  std::mt19937_64 rng(505);

  // Round trip with random access at every width.
  for (std::uint8_t width : {2, 4, 8}) {
    const std::size_t n = 37;
    const auto g = random_gnm(n, 80, rng());
    const auto full = brandes_full_with_data(g);
    const auto path = (dir / fmt::format("w{}.sbc", width)).string();
    BdStore::create(path, n, 5, 30, width,
                    [&](VertexId s, SourceData& out) { out = full.sources[s]; });
    auto store = BdStore::open(path);
    std::vector<VertexId> order;
    for (VertexId s = 5; s < 30; ++s) order.push_back(s);
    std::shuffle(order.begin(), order.end(), rng);
    for (VertexId s : order) {
      const auto got = store.load_source(s);
      if (got.d != full.sources[s].d || got.sigma != full.sources[s].sigma ||
          got.delta != full.sources[s].delta) {
        return {false, fmt::format("width {} source {} differs after reload", int(width), s)};
      }
    }
  }

  // Layout: n=1000, one source, 2-byte path counts.
  const auto big = (dir / "n1000.sbc").string();
  BdStore::create(big, 1000, 0, 1, 2,
                  [](VertexId s, SourceData& out) { out = SourceData::isolated(1000, s); });
  const auto block = BdStore::open(big).header().block_bytes();
  const auto file = fs::file_size(big);
  if (block != 11000 || file != StoreHeader::kSize + 11000) {
    return {false, fmt::format("n=1000 block {} bytes, file {} bytes", block, file)};
  }

  // Skipped sources read exactly their n-byte distance column.
  const std::size_t n = 150;
  const auto g = small_world(n, 3, 0.1, rng());
  PartitionEngine engine(g, disk(dir / "engine", 3, 2));
  std::uint64_t skipped_total = 0;
  for (const auto& ev : random_additions(g, 40, rng())) {
    engine.reset_io();
    const auto stats = engine.apply(ev);
    const auto io = engine.io();
    const std::uint64_t skipped = stats.sources_processed - stats.sources_updated;
    skipped_total += skipped;
    const std::uint64_t expected = stats.sources_processed * n + stats.sources_updated * n * 11;
    if (io.bytes_read != expected || io.distance_reads != stats.sources_processed) {
      return {false, fmt::format("event ({},{}): read {} bytes, expected {}", ev.u1, ev.u2,
                                 io.bytes_read, expected)};
    }
  }
  fs::remove_all(dir);
  return {true, fmt::format("round trip at widths 2/4/8, n=1000 block = {} bytes, {} skipped "
                            "sources read n bytes each",
                            block, skipped_total)};
}

// 6. Scores do not depend on the worker count.
Outcome worker_independence() {
  const auto g = random_gnm(200, 600, 606);
  const auto events = random_event_stream(g, 100, 607);
  const auto dir = scratch("c6");
  std::vector<CentralityScores> results;
  std::string modes;
  for (StorageMode mode : {StorageMode::memory, StorageMode::disk}) {
    for (std::size_t p : {1, 2, 4, 8}) {
      EngineOptions o = mode == StorageMode::disk ? disk(dir / std::to_string(p), p, 8)
                                                  : EngineOptions{};
      o.workers = p;
      PartitionEngine engine(g, o);
      for (const auto& ev : events) engine.apply(ev);
      results.push_back(engine.scores());
    }
  }
  fs::remove_all(dir);
  double worst = 0.0;
  bool identical = true;
  for (const auto& r : results) {
    const auto dev = compare_scores(results.front(), r);
    identical = identical && dev.same_edge_set && r.vbc == results.front().vbc;
    worst = std::max(worst, dev.worst());
  }
  return {worst <= kWorkerTolerance && identical,
          fmt::format("workers 1/2/4/8 in memory and disk mode, max deviation {:.3e}{}", worst,
                      identical ? ", bit-identical" : "")};
}

// 7. Per-event update beats full recomputation on a 10k-vertex graph.
Outcome relative_speed() {
  const auto g = small_world(10000, 3, 0.1, 707);
  const auto dir = scratch("c7");
  const auto t0 = Clock::now();
  brandes_full(g);
  const double full = seconds_since(t0);

  PartitionEngine engine(g, disk(dir, 1, 8));
  std::vector<double> add_times, remove_times;
  for (const auto& ev : random_additions(g, 10, 708)) add_times.push_back(engine.apply(ev).seconds);
  for (const auto& ev : random_removals(engine.graph(), 10, 709)) {
    remove_times.push_back(engine.apply(ev).seconds);
  }
  fs::remove_all(dir);
  const double add_med = median(add_times);
  const double remove_med = median(remove_times);
  return {add_med < full && remove_med < full,
          fmt::format("n=10000 m={} disk mode: full {:.3f} s, median addition {:.4f} s "
                      "(speedup {:.1f}, context value 34), median removal {:.4f} s (speedup {:.1f}, "
                      "context value 35)",
                      g.edge_count(), full, add_med, full / add_med, remove_med,
                      full / remove_med)};
}

// 8. Strong and weak scaling of the worker pool.
Outcome scaling() {
  auto stream_seconds = [](const DynamicGraph& g, std::size_t p, const std::vector<EdgeEvent>& evs) {
    EngineOptions o;
    o.workers = p;
    PartitionEngine engine(g, o);
    const auto t0 = Clock::now();
    for (const auto& ev : evs) engine.apply(ev);
    return seconds_since(t0);
  };
  const auto g = small_world(4000, 3, 0.1, 808);
  const auto evs = random_additions(g, 40, 809);
  std::map<std::size_t, double> strong;
  for (std::size_t p : {1, 2, 4}) strong[p] = stream_seconds(g, p, evs);
  const bool monotone = strong[2] < strong[1] && strong[4] < strong[2];
  const double efficiency = strong[1] / (4.0 * strong[4]);

  // Weak: 1000 sources per worker.
  std::map<std::size_t, double> weak;
  for (std::size_t p : {1, 2, 4}) {
    const auto gw = small_world(1000 * p, 3, 0.1, 810 + p);
    weak[p] = stream_seconds(gw, p, random_additions(gw, 40, 820 + p));
  }
  bool weak_ok = true;
  for (std::size_t p : {2, 4}) weak_ok = weak_ok && std::abs(weak[p] / weak[1] - 1.0) <= kWeakBand;

  return {monotone && efficiency >= kStrongEfficiency && weak_ok,
          fmt::format("{} hardware threads; strong n=4000: p1 {:.3f} s, p2 {:.3f} s, p4 {:.3f} s, "
                      "efficiency {:.0f}% (need {:.0f}%); weak 1000/worker: {:.3f} / {:.3f} / "
                      "{:.3f} s (band +-{:.0f}%)",
                      std::thread::hardware_concurrency(), strong[1], strong[2], strong[4],
                      100 * efficiency, 100 * kStrongEfficiency, weak[1], weak[2], weak[4],
                      100 * kWeakBand)};
}

// 9. Community detection matches the recompute baseline and is faster.
Outcome girvan_newman_check() {
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<std::size_t> size(10, 100);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = size(rng);
    const auto g = random_gnm(n, 2 * n, rng());
    const auto inc = girvan_newman(g);
    const auto ref = gn_reference(g);
    if (inc.steps.size() != ref.steps.size()) {
      return {false, fmt::format("graph {}: {} vs {} steps", i, inc.steps.size(), ref.steps.size())};
    }
    for (std::size_t k = 0; k < inc.steps.size(); ++k) {
      if (inc.steps[k].edge != ref.steps[k].edge ||
          inc.steps[k].components != ref.steps[k].components) {
        return {false, fmt::format("graph {}: dendrograms differ at step {}", i, k + 1)};
      }
    }
  }
  const auto g = small_world(1000, 3, 0.1, 910);
  GnOptions opts;
  opts.max_steps = 150;
  auto t0 = Clock::now();
  const auto inc = girvan_newman(g, opts);
  const double inc_s = seconds_since(t0);
  t0 = Clock::now();
  const auto ref = gn_reference(g, opts);
  const double ref_s = seconds_since(t0);
  bool same = inc.steps.size() == ref.steps.size();
  for (std::size_t k = 0; same && k < inc.steps.size(); ++k) {
    same = inc.steps[k].edge == ref.steps[k].edge;
  }
  return {same && inc_s < ref_s,
          fmt::format("50 graphs identical; n=1000 first {} removals: incremental {:.2f} s, "
                      "recompute {:.2f} s (ratio {:.1f}){}",
                      opts.max_steps, inc_s, ref_s, ref_s / inc_s,
                      same ? "" : ", 1k dendrograms differ")};
}

// 10. Latency formulas.
Outcome latency_math() {
  bool ok = true;
  std::string detail;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += " " + what;
    }
  };
  const LatencyModel m{1e-3, 0.05, 10000, 10};
  expect(estimate_update_latency(m) == 1.05, "t_U(1e-3,1e4,10,0.05) != 1.05");
  LatencyModel all = m;
  all.p = all.n;
  expect(estimate_update_latency(all) == 1e-3 + 0.05, "p=n limit");
  LatencyModel twice = m;
  twice.p = 20;
  expect(estimate_update_latency(twice) - 0.05 == (estimate_update_latency(m) - 0.05) / 2,
         "doubling p");
  expect(plan_workers(m, 0.5) == std::optional<std::size_t>(23), "plan(t_I=0.5) != 23");
  expect(!plan_workers(m, 1e-3 + 0.05).has_value(), "boundary feasible");
  expect(plan_workers(m, 1e9) == std::optional<std::size_t>(1), "huge t_I != 1");

  // Infeasible exactly when t_I <= t_S + t_M; a found count satisfies the
  // strict inequality and is the smallest that does.
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const LatencyModel lm{1e-4 + 1e-2 * unit(rng), 0.1 * unit(rng), 1 + std::size_t(5000 * unit(rng)),
                          1};
    const double t_i = 2.0 * unit(rng);
    const auto p = plan_workers(lm, t_i);
    const bool feasible = t_i > lm.t_source + lm.t_merge;
    if (p.has_value() != feasible) {
      expect(false, fmt::format("feasibility wrong at case {}", i));
      break;
    }
    if (p) {
      const double bound = lm.t_source * double(lm.n) / (t_i - lm.t_merge);
      if (!(double(*p) > bound) || (*p > 1 && double(*p - 1) > bound)) {
        expect(false, fmt::format("case {}: p'={} bound {}", i, *p, bound));
        break;
      }
    }
  }
  return {ok, ok ? "hand-computed values exact; infeasible iff t_I <= t_S + t_M over 10000 "
                   "random models"
                 : "failed:" + detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("-c,--criterion", selected, "Criteria to run (default: all)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "route coverage", route_coverage},
      {3, "add/remove inverse", inverse_property},
      {4, "conservation", conservation},
      {5, "store format", store_format},
      {6, "worker independence", worker_independence},
      {7, "relative speed", relative_speed},
      {8, "scaling", scaling},
      {9, "girvan-newman", girvan_newman_check},
      {10, "latency math", latency_math},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    fmt::print("{} criterion {:>2} {}: {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
               o.detail, seconds_since(t0));
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
