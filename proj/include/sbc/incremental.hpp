#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "sbc/graph.hpp"
#include "sbc/scores.hpp"
#include "sbc/source_data.hpp"

namespace sbc {

enum class EventKind : std::uint8_t { add, remove };

/// One element of the update stream.
struct EdgeEvent {
  EventKind kind = EventKind::add;
  VertexId u1 = 0;
  VertexId u2 = 0;
  std::optional<double> timestamp;

  static EdgeEvent add(VertexId a, VertexId b) { return {EventKind::add, a, b, std::nullopt}; }
  static EdgeEvent remove(VertexId a, VertexId b) { return {EventKind::remove, a, b, std::nullopt}; }
};

/// An event that has already been applied to the graph handed to the
/// updater. `attaches_new_vertex` marks additions whose far endpoint was
/// created for this event.
struct AppliedEvent {
  EventKind kind = EventKind::add;
  VertexId u1 = 0;
  VertexId u2 = 0;
  bool attaches_new_vertex = false;

  bool is_add() const { return kind == EventKind::add; }
  bool touches(VertexId v) const { return v == u1 || v == u2; }
  VertexId other(VertexId v) const { return v == u1 ? u2 : u1; }
};

/// Endpoints of the updated edge relative to one source.
struct EndpointClassification {
  VertexId high = 0;  // closer to the source
  VertexId low = 0;   // farther from the source
  /// d(low) - d(high); kUnreachable when only `low` is unreachable.
  Distance dd = 0;
  bool both_unreachable = false;
};

EndpointClassification classify(Distance d1, Distance d2, VertexId u1, VertexId u2);

inline EndpointClassification classify(const SourceData& bd, VertexId u1, VertexId u2) {
  return classify(bd.d[u1], bd.d[u2], u1, u2);
}

/// True when an event with these endpoint distances leaves the source's data
/// untouched: endpoints on the same level carry no shortest path, and an edge
/// between two unreachable vertices is invisible to the source.
inline bool source_unaffected(Distance d1, Distance d2) { return d1 == d2; }

/// Which update procedure handled one (source, event) pair.
enum class UpdateRoute : std::uint8_t {
  skip_same_level,
  skip_unreachable,
  add_no_level_change,
  remove_no_level_change,
  add_rise,
  remove_pivot_drop,
  remove_one_level_drop,
  remove_disconnect,
  new_vertex,
  component_merge,
};
inline constexpr std::size_t kRouteCount = 10;

std::string_view route_name(UpdateRoute route);

using RouteCounts = std::array<std::uint64_t, kRouteCount>;

struct UpdateOptions {
  /// Use the single-pass procedure for removals where the far endpoint drops
  /// exactly one level. When false those removals take the generic
  /// pivot search + drop route.
  bool one_level_drop = true;
};

/// Old values of the entries an update overwrote, for rollback.
struct SourceUndo {
  struct Entry {
    VertexId vertex;
    Distance d;
    PathCount sigma;
    double delta;
  };
  std::vector<Entry> entries;

  void restore(SourceData& bd) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
      bd.d[it->vertex] = it->d;
      bd.sigma[it->vertex] = it->sigma;
      bd.delta[it->vertex] = it->delta;
    }
  }
};

/// Result of the pivot search for a removal that pushes the far endpoint
/// down. `lost` holds every vertex all of whose shortest paths used the
/// removed edge; pivots are their unaffected neighbors, ordered by level.
struct PivotSearch {
  std::vector<VertexId> lost;
  std::vector<VertexId> pivots;
  Distance first = kUnreachable;

  bool disconnected() const { return pivots.empty(); }
};

/// Updates the data of one source after an edge event.
///
/// An instance owns O(n) scratch space that is reset lazily between calls by
/// an epoch counter, so a pass that touches k vertices costs O(k + their
/// degrees). One instance per worker thread.
///
/// Every route fills new distances and path counts for the vertices whose
/// values may change (they are marked "down" and their dependency is rebuilt
/// from zero), then a shared level-by-level sweep recomputes dependencies of
/// those vertices and corrects the vertices above them ("up"), reporting the
/// vertex and edge score changes to the sink.
class SourceUpdater {
 public:
  explicit SourceUpdater(UpdateOptions options = {}) : options_(options) {}

  /// `g` must already reflect the event; `bd` holds the data from before it.
  /// When `undo` is given it receives the previous value of each entry that
  /// gets rewritten.
  UpdateRoute update(const DynamicGraph& g, const AppliedEvent& ev, VertexId source,
                     SourceData& bd, ScoreSink& sink, SourceUndo* undo = nullptr);

  /// Pivot search on its own, for a removal where `cls.low` lost its only
  /// predecessor. Leaves `bd` untouched.
  PivotSearch find_pivots(const DynamicGraph& g, const AppliedEvent& ev, VertexId source,
                          const SourceData& bd, const EndpointClassification& cls);

  /// Vertices the last update() or find_pivots() visited.
  std::size_t last_touched() const { return touched_.size(); }

  const UpdateOptions& options() const { return options_; }

 private:
  enum Flag : std::uint8_t { kUntouched = 0, kDown = 1, kUp = 2 };
  enum Mark : std::uint8_t { kNoMark = 0, kSeen = 1, kLost = 2, kPivot = 3 };

  void begin(const DynamicGraph& g, const AppliedEvent& ev, VertexId source, const SourceData& bd,
             ScoreSink* sink);
  void touch(VertexId v);
  bool is_touched(VertexId v) const { return stamp_[v] == epoch_; }
  Flag flag(VertexId v) const { return is_touched(v) ? Flag(flag_[v]) : kUntouched; }
  Mark mark(VertexId v) const { return is_touched(v) ? Mark(mark_[v]) : kNoMark; }
  Distance new_distance(VertexId v) const { return is_touched(v) ? dist_[v] : bd_->d[v]; }
  PathCount new_sigma(VertexId v) const { return is_touched(v) ? sigma_[v] : bd_->sigma[v]; }
  void mark_down(VertexId v);
  PathCount sum_predecessor_paths(VertexId v) const;

  void no_level_change(const EndpointClassification& cls);
  void rise(const EndpointClassification& cls);
  void merge(const EndpointClassification& cls);
  void one_level_drop(const EndpointClassification& cls);
  void pivot_drop(const PivotSearch& search);
  void disconnect(const PivotSearch& search);
  void recount_from(std::vector<VertexId> seeds);
  PivotSearch search_pivots(const EndpointClassification& cls);

  void accumulate_dependencies();
  void ensure_up(VertexId v);
  void subtract_old_contributions(VertexId w);
  void emit_edge(VertexId a, VertexId b, double amount);
  void write_back(SourceData& bd, SourceUndo* undo);

  template <typename F>
  void for_each_old_neighbor(VertexId v, F&& f) const;

  std::vector<VertexId>& level(std::vector<std::vector<VertexId>>& buckets, Distance l);

  UpdateOptions options_;

  // Per-call context.
  const DynamicGraph* g_ = nullptr;
  const SourceData* bd_ = nullptr;
  ScoreSink* sink_ = nullptr;
  AppliedEvent ev_;
  VertexId source_ = 0;

  // Lazily reset scratch, valid where stamp_ == epoch_.
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> flag_;
  std::vector<std::uint8_t> mark_;
  std::vector<Distance> dist_;
  std::vector<PathCount> sigma_;
  std::vector<double> delta_;
  std::vector<VertexId> touched_;
  std::vector<VertexId> down_;

  std::vector<std::vector<VertexId>> bfs_levels_;
  std::vector<std::vector<VertexId>> dep_levels_;
  Distance dep_max_level_ = 0;
};

}  // namespace sbc
