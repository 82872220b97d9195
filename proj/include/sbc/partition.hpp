#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sbc/bd_store.hpp"
#include "sbc/graph.hpp"
#include "sbc/incremental.hpp"
#include "sbc/latency.hpp"
#include "sbc/scores.hpp"

namespace sbc {

/// Contiguous source range [lo, hi) owned by one worker.
struct Partition {
  std::uint32_t worker_id = 0;
  VertexId lo = 0;
  VertexId hi = 0;
  std::string store_path;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Balanced contiguous ranges; the first n % p ranges get one extra source.
std::vector<Partition> partition_sources(std::size_t n, std::size_t p);

/// Manifest text: one `worker_id lo hi store_path` line per partition.
void write_manifest(const std::string& path, const std::vector<Partition>& parts);
std::vector<Partition> read_manifest(const std::string& path);

enum class StorageMode { memory, disk };

struct EngineOptions {
  std::size_t workers = 1;
  StorageMode mode = StorageMode::memory;
  /// Directory for partition stores in disk mode.
  std::string store_dir;
  std::uint8_t sigma_width = 2;
  UpdateOptions update;
};

struct EventStats {
  RouteCounts routes{};
  std::size_t sources_processed = 0;  // every source, skipped or not
  std::size_t sources_updated = 0;
  /// True when the event split a component in two.
  bool disconnected = false;
  bool new_vertex = false;
  double seconds = 0.0;
  double merge_seconds = 0.0;
};

/// Keeps the per-source data of a graph split over worker partitions and
/// applies edge events to it.
///
/// Each event runs all workers concurrently over their own sources; their
/// score contributions are replayed in ascending source order, so the result
/// does not depend on the worker count. An event either completes on every
/// worker or leaves graph, scores and data exactly as before.
class PartitionEngine {
 public:
  /// Runs the static computation on `g` and distributes its results.
  PartitionEngine(DynamicGraph g, EngineOptions options);

  /// Attaches to existing disk stores (listed by `parts`) for graph `g`
  /// whose scores are `scores`. A journal left by an interrupted event is
  /// resolved against the commit record in the store directory.
  PartitionEngine(DynamicGraph g, CentralityScores scores, std::vector<Partition> parts,
                  EngineOptions options);

  ~PartitionEngine();
  PartitionEngine(const PartitionEngine&) = delete;
  PartitionEngine& operator=(const PartitionEngine&) = delete;

  /// Applies one event. An addition naming vertex id == vertex_count()
  /// creates that vertex first. Throws InvalidArgument (before any change)
  /// for events that do not fit the current graph.
  EventStats apply(const EdgeEvent& ev);

  /// Adds an isolated vertex (and its source) as a step of its own.
  VertexId add_vertex();

  const DynamicGraph& graph() const { return g_; }
  const CentralityScores& scores() const { return scores_; }
  const std::vector<Partition>& partitions() const { return parts_; }
  const EngineOptions& options() const { return options_; }
  const RouteCounts& route_totals() const { return route_totals_; }
  std::uint64_t committed_events() const { return sequence_; }

  /// Current data of source `s` (loaded from disk in disk mode).
  SourceData source_data(VertexId s);

  /// Summed store I/O counters (zero in memory mode).
  IoCounters io() const;
  void reset_io();

  /// Test hook: called on the worker thread before each source is updated;
  /// throwing from it aborts the event.
  void set_fault_hook(std::function<void(VertexId)> hook) { fault_hook_ = std::move(hook); }

 private:
  struct Worker;

  void initialise_workers();
  void run_worker(Worker& w, const AppliedEvent& ev);
  void rollback(const AppliedEvent& ev);
  void write_commit_record();
  std::uint64_t read_commit_record() const;
  std::string commit_record_path() const;
  Worker& owner(VertexId s);

  DynamicGraph g_;
  EngineOptions options_;
  CentralityScores scores_;
  std::vector<Partition> parts_;
  std::vector<std::unique_ptr<Worker>> workers_;
  RouteCounts route_totals_{};
  std::uint64_t sequence_ = 0;
  std::function<void(VertexId)> fault_hook_;

  std::vector<double> vbc_delta_;
  std::vector<VertexId> vbc_touched_;
  std::unordered_map<Edge, double> ebc_delta_;
};

/// Applies `events` one at a time and replays their timestamps (seconds;
/// events without one arrive together with the previous event) against the
/// measured update times.
OnlineReport replay_stream(PartitionEngine& engine, const std::vector<EdgeEvent>& events);

}  // namespace sbc
