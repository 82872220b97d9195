#include "sbc/partition.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "sbc/brandes.hpp"

namespace sbc {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::vector<Partition> partition_sources(std::size_t n, std::size_t p) {
  if (p < 1) throw InvalidArgument("need at least one partition");
  if (p > n) {
    throw InvalidArgument("cannot split " + std::to_string(n) + " sources into " +
                          std::to_string(p) + " partitions");
  }
  std::vector<Partition> out;
  out.reserve(p);
  const std::size_t base = n / p;
  const std::size_t extra = n % p;
  VertexId lo = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const auto size = static_cast<VertexId>(base + (i < extra ? 1 : 0));
    out.push_back({static_cast<std::uint32_t>(i), lo, lo + size, {}});
    lo += size;
  }
  return out;
}

void write_manifest(const std::string& path, const std::vector<Partition>& parts) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest " + path);
  for (const auto& p : parts) {
    out << p.worker_id << ' ' << p.lo << ' ' << p.hi << ' '
        << (p.store_path.empty() ? "-" : p.store_path) << '\n';
  }
  if (!out) throw Error("cannot write manifest " + path);
}

std::vector<Partition> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read manifest " + path);
  std::vector<Partition> parts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Partition p;
    if (!(fields >> p.worker_id >> p.lo >> p.hi >> p.store_path) || p.lo >= p.hi) {
      throw FormatError("manifest " + path + " line " + std::to_string(line_no) + " is malformed");
    }
    if (p.store_path == "-") p.store_path.clear();
    if (!parts.empty() && p.lo != parts.back().hi) {
      throw FormatError("manifest " + path + " ranges are not contiguous at line " +
                        std::to_string(line_no));
    }
    parts.push_back(std::move(p));
  }
  if (parts.empty() || parts.front().lo != 0) throw FormatError("manifest " + path + " is empty");
  return parts;
}

// ---------------------------------------------------------------------------

struct PartitionEngine::Worker final : ScoreSink {
  struct Record {
    std::uint64_t key;
    double amount;
    bool edge;
  };

  Partition part;
  SourceUpdater updater;
  std::vector<SourceData> memory;  // memory mode, indexed by s - lo
  std::optional<BdStore> store;    // disk mode

  SourceData buffer;
  std::vector<Distance> distances;
  std::vector<std::pair<VertexId, SourceUndo>> undo;  // memory mode
  std::size_t undo_used = 0;
  SourceUndo scratch_undo;

  PartitionEngine* direct = nullptr;  // write straight into the engine accumulator
  std::vector<Record> log;

  RouteCounts routes{};
  std::size_t updated = 0;
  std::exception_ptr error;

  Worker(Partition p, UpdateOptions options) : part(std::move(p)), updater(options) {}

  void add_vertex(VertexId v, double amount) override {
    if (direct) {
      direct->vbc_delta_[v] += amount;
    } else {
      log.push_back({v, amount, false});
    }
  }
  void add_edge(Edge e, double amount) override {
    if (direct) {
      direct->ebc_delta_[e] += amount;
    } else {
      log.push_back({e.key(), amount, true});
    }
  }

  void reset() {
    routes.fill(0);
    updated = 0;
    undo_used = 0;
    log.clear();
    error = nullptr;
  }

  SourceUndo& next_undo(VertexId s) {
    if (undo_used == undo.size()) undo.emplace_back();
    auto& slot = undo[undo_used++];
    slot.first = s;
    slot.second.entries.clear();
    return slot.second;
  }
};

PartitionEngine::PartitionEngine(DynamicGraph g, EngineOptions options)
    : g_(std::move(g)), options_(std::move(options)) {
  const std::size_t n = g_.vertex_count();
  parts_ = partition_sources(n, std::max<std::size_t>(1, std::min(options_.workers, n)));
  initialise_workers();

  if (options_.mode == StorageMode::memory) {
    auto full = brandes_full_with_data(g_);
    scores_ = std::move(full.scores);
    for (auto& w : workers_) {
      w->memory.assign(std::make_move_iterator(full.sources.begin() + w->part.lo),
                       std::make_move_iterator(full.sources.begin() + w->part.hi));
    }
  } else {
    fs::create_directories(options_.store_dir);
    scores_.vbc.assign(n, 0.0);
    for (const Edge& e : g_.edges()) scores_.ebc.emplace(e, 0.0);
    DirectSink sink(scores_);
    for (auto& w : workers_) {
      w->part.store_path =
          (fs::path(options_.store_dir) / ("part-" + std::to_string(w->part.worker_id) + ".sbc"))
              .string();
      w->store = BdStore::create(w->part.store_path, n, w->part.lo, w->part.hi,
                                 options_.sigma_width, [&](VertexId s, SourceData& out) {
                                   brandes_single_source(g_, s, out, sink);
                                 });
    }
    for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i] = workers_[i]->part;
    write_commit_record();
  }
}

PartitionEngine::PartitionEngine(DynamicGraph g, CentralityScores scores,
                                 std::vector<Partition> parts, EngineOptions options)
    : g_(std::move(g)), options_(std::move(options)), scores_(std::move(scores)),
      parts_(std::move(parts)) {
  if (options_.mode != StorageMode::disk) {
    throw InvalidArgument("attaching to existing partitions needs disk mode");
  }
  if (parts_.empty() || parts_.back().hi != g_.vertex_count()) {
    throw FormatError("partitions do not cover the " + std::to_string(g_.vertex_count()) +
                      " vertices of the graph");
  }
  if (options_.store_dir.empty()) {
    options_.store_dir = fs::path(parts_.front().store_path).parent_path().string();
  }
  options_.workers = parts_.size();
  initialise_workers();
  sequence_ = read_commit_record();
  for (auto& w : workers_) {
    w->store = BdStore::open(w->part.store_path);
    const auto& h = w->store->header();
    if (h.lo != w->part.lo || h.hi != w->part.hi || h.n != g_.vertex_count()) {
      throw FormatError("store " + w->part.store_path + " does not match its manifest entry");
    }
    if (auto pending = w->store->pending_journal()) w->store->recover(*pending <= sequence_);
  }
  options_.sigma_width = workers_.front()->store->header().sigma_width;
}

PartitionEngine::~PartitionEngine() = default;

void PartitionEngine::initialise_workers() {
  workers_.clear();
  for (const auto& p : parts_) workers_.push_back(std::make_unique<Worker>(p, options_.update));
}

PartitionEngine::Worker& PartitionEngine::owner(VertexId s) {
  for (auto& w : workers_) {
    if (s >= w->part.lo && s < w->part.hi) return *w;
  }
  throw InvalidArgument("source " + std::to_string(s) + " is not owned by any partition");
}

SourceData PartitionEngine::source_data(VertexId s) {
  Worker& w = owner(s);
  if (w.store) return w.store->load_source(s);
  return w.memory[s - w.part.lo];
}

IoCounters PartitionEngine::io() const {
  IoCounters total;
  for (const auto& w : workers_) {
    if (!w->store) continue;
    const auto& c = w->store->io();
    total.bytes_read += c.bytes_read;
    total.bytes_written += c.bytes_written;
    total.distance_reads += c.distance_reads;
    total.block_reads += c.block_reads;
    total.block_writes += c.block_writes;
  }
  return total;
}

void PartitionEngine::reset_io() {
  for (auto& w : workers_) {
    if (w->store) w->store->reset_io();
  }
}

std::string PartitionEngine::commit_record_path() const {
  return (fs::path(options_.store_dir) / "commit").string();
}

void PartitionEngine::write_commit_record() {
  const std::string path = commit_record_path();
  {
    std::ofstream out(path + ".tmp", std::ios::trunc);
    out << sequence_ << '\n';
    if (!out) throw Error("cannot write commit record " + path);
  }
  fs::rename(path + ".tmp", path);
}

std::uint64_t PartitionEngine::read_commit_record() const {
  std::ifstream in(commit_record_path());
  std::uint64_t seq = 0;
  if (!(in >> seq)) throw FormatError("missing or unreadable " + commit_record_path());
  return seq;
}

// New vertices join as unreachable everywhere and as a source of their own,
// owned by the last partition. This step commits on its own.
VertexId PartitionEngine::add_vertex() {
  const VertexId v = g_.add_vertex();
  const std::size_t n = g_.vertex_count();
  for (auto& w : workers_) {
    const bool last = w.get() == workers_.back().get();
    if (w->store) {
      w->store->grow(n, last);
    } else {
      for (auto& bd : w->memory) bd.append_unreached_vertex();
      if (last) w->memory.push_back(SourceData::isolated(n, v));
    }
    if (last) ++w->part.hi;
  }
  parts_.back().hi = static_cast<VertexId>(n);
  scores_.vbc.push_back(0.0);
  return v;
}

void PartitionEngine::run_worker(Worker& w, const AppliedEvent& ev) {
  try {
    for (VertexId s = w.part.lo; s < w.part.hi; ++s) {
      if (fault_hook_) fault_hook_(s);
      UpdateRoute route;
      if (w.store) {
        w.store->read_distances(s, w.distances);
        const Distance d1 = w.distances[ev.u1];
        const Distance d2 = w.distances[ev.u2];
        if (source_unaffected(d1, d2)) {
          route = d1 == kUnreachable ? UpdateRoute::skip_unreachable : UpdateRoute::skip_same_level;
        } else {
          w.store->load_source(s, w.buffer);
          w.scratch_undo.entries.clear();
          route = w.updater.update(g_, ev, s, w.buffer, w, &w.scratch_undo);
          w.store->write_source_logged(s, w.buffer, w.scratch_undo);
          ++w.updated;
        }
      } else {
        SourceData& bd = w.memory[s - w.part.lo];
        if (source_unaffected(bd.d[ev.u1], bd.d[ev.u2])) {
          route = bd.d[ev.u1] == kUnreachable ? UpdateRoute::skip_unreachable
                                              : UpdateRoute::skip_same_level;
        } else {
          route = w.updater.update(g_, ev, s, bd, w, &w.next_undo(s));
          ++w.updated;
        }
      }
      ++w.routes[static_cast<std::size_t>(route)];
    }
  } catch (...) {
    w.error = std::current_exception();
  }
}

void PartitionEngine::rollback(const AppliedEvent& ev) {
  for (auto& w : workers_) {
    if (w->store) {
      w->store->rollback();
    } else {
      for (std::size_t i = w->undo_used; i-- > 0;) {
        auto& [s, undo] = w->undo[i];
        undo.restore(w->memory[s - w->part.lo]);
      }
    }
  }
  if (ev.is_add()) {
    g_.remove_edge(ev.u1, ev.u2);
  } else {
    g_.add_edge(ev.u1, ev.u2);
  }
}

EventStats PartitionEngine::apply(const EdgeEvent& ev) {
  const auto t0 = Clock::now();
  const auto n = static_cast<VertexId>(g_.vertex_count());
  const std::string where = "(" + std::to_string(ev.u1) + "," + std::to_string(ev.u2) + ")";
  if (ev.u1 == ev.u2) throw InvalidArgument("self-loop " + where);

  EventStats stats;
  if (ev.kind == EventKind::add) {
    if (ev.u1 > n || ev.u2 > n || (ev.u1 == n && ev.u2 == n)) {
      throw InvalidArgument("edge " + where + " names an unknown vertex (n=" + std::to_string(n) +
                            ")");
    }
    stats.new_vertex = ev.u1 == n || ev.u2 == n;
    if (!stats.new_vertex && g_.has_edge(ev.u1, ev.u2)) {
      throw InvalidArgument("edge " + where + " is already present");
    }
  } else {
    if (ev.u1 >= n || ev.u2 >= n || !g_.has_edge(ev.u1, ev.u2)) {
      throw InvalidArgument("edge " + where + " is not present");
    }
  }

  if (stats.new_vertex) add_vertex();
  const AppliedEvent applied{ev.kind, ev.u1, ev.u2, stats.new_vertex};
  if (applied.is_add()) {
    g_.add_edge(ev.u1, ev.u2);
  } else {
    g_.remove_edge(ev.u1, ev.u2);
  }

  vbc_delta_.assign(g_.vertex_count(), 0.0);
  ebc_delta_.clear();
  for (auto& w : workers_) {
    w->reset();
    w->direct = w.get() == workers_.front().get() ? this : nullptr;
    if (w->store) w->store->begin_transaction(sequence_ + 1);
  }

  std::vector<std::thread> threads;
  threads.reserve(workers_.size() - 1);
  for (std::size_t i = 1; i < workers_.size(); ++i) {
    threads.emplace_back([this, &applied, i] { run_worker(*workers_[i], applied); });
  }
  run_worker(*workers_.front(), applied);
  for (auto& t : threads) t.join();

  for (auto& w : workers_) {
    if (w->error) {
      const auto error = w->error;
      rollback(applied);
      std::rethrow_exception(error);
    }
  }

  // Everything below only touches memory, apart from the commit record.
  const auto t_merge = Clock::now();
  for (std::size_t i = 1; i < workers_.size(); ++i) {
    for (const auto& r : workers_[i]->log) {
      if (r.edge) {
        ebc_delta_[Edge::from_key(r.key)] += r.amount;
      } else {
        vbc_delta_[r.key] += r.amount;
      }
    }
  }
  const Edge changed(ev.u1, ev.u2);
  if (applied.is_add()) scores_.ebc.emplace(changed, 0.0);
  for (std::size_t v = 0; v < vbc_delta_.size(); ++v) scores_.vbc[v] += vbc_delta_[v];
  for (const auto& [e, amount] : ebc_delta_) scores_.ebc[e] += amount;
  if (!applied.is_add()) scores_.ebc.erase(changed);

  ++sequence_;
  if (options_.mode == StorageMode::disk) {
    write_commit_record();
    for (auto& w : workers_) w->store->commit();
  }

  for (const auto& w : workers_) {
    for (std::size_t r = 0; r < kRouteCount; ++r) stats.routes[r] += w->routes[r];
    stats.sources_updated += w->updated;
  }
  for (std::size_t r = 0; r < kRouteCount; ++r) {
    stats.sources_processed += stats.routes[r];
    route_totals_[r] += stats.routes[r];
  }
  stats.disconnected = stats.routes[std::size_t(UpdateRoute::remove_disconnect)] > 0;
  stats.merge_seconds = seconds_since(t_merge);
  stats.seconds = seconds_since(t0);
  return stats;
}

OnlineReport replay_stream(PartitionEngine& engine, const std::vector<EdgeEvent>& events) {
  std::vector<double> arrivals;
  std::vector<double> processing;
  arrivals.reserve(events.size());
  processing.reserve(events.size());
  double last = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double t = events[i].timestamp.value_or(last);
    if (i > 0 && t < last) {
      throw InvalidArgument("timestamps decrease at event " + std::to_string(i));
    }
    last = t;
    arrivals.push_back(t);
  }
  for (const auto& ev : events) processing.push_back(engine.apply(ev).seconds);
  return simulate_online(arrivals, processing);
}

}  // namespace sbc
