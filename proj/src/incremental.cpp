#include "sbc/incremental.hpp"

#include <algorithm>
#include <cassert>

namespace sbc {

EndpointClassification classify(Distance d1, Distance d2, VertexId u1, VertexId u2) {
  EndpointClassification cls;
  if (d1 == kUnreachable && d2 == kUnreachable) {
    cls.high = u1;
    cls.low = u2;
    cls.both_unreachable = true;
    cls.dd = 0;
    return cls;
  }
  if (d1 <= d2) {
    cls.high = u1;
    cls.low = u2;
  } else {
    cls.high = u2;
    cls.low = u1;
  }
  const Distance dh = std::min(d1, d2);
  const Distance dl = std::max(d1, d2);
  cls.dd = dl == kUnreachable ? kUnreachable : dl - dh;
  return cls;
}

std::string_view route_name(UpdateRoute route) {
  switch (route) {
    case UpdateRoute::skip_same_level: return "skip_same_level";
    case UpdateRoute::skip_unreachable: return "skip_unreachable";
    case UpdateRoute::add_no_level_change: return "add_no_level_change";
    case UpdateRoute::remove_no_level_change: return "remove_no_level_change";
    case UpdateRoute::add_rise: return "add_rise";
    case UpdateRoute::remove_pivot_drop: return "remove_pivot_drop";
    case UpdateRoute::remove_one_level_drop: return "remove_one_level_drop";
    case UpdateRoute::remove_disconnect: return "remove_disconnect";
    case UpdateRoute::new_vertex: return "new_vertex";
    case UpdateRoute::component_merge: return "component_merge";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Scratch management
// ---------------------------------------------------------------------------

void SourceUpdater::begin(const DynamicGraph& g, const AppliedEvent& ev, VertexId source,
                          const SourceData& bd, ScoreSink* sink) {
  g_ = &g;
  bd_ = &bd;
  sink_ = sink;
  ev_ = ev;
  source_ = source;

  const std::size_t n = g.vertex_count();
  if (stamp_.size() < n) {
    stamp_.resize(n, 0);
    flag_.resize(n);
    mark_.resize(n);
    dist_.resize(n);
    sigma_.resize(n);
    delta_.resize(n);
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  touched_.clear();
  down_.clear();
  dep_max_level_ = 0;
}

void SourceUpdater::touch(VertexId v) {
  if (stamp_[v] == epoch_) return;
  stamp_[v] = epoch_;
  flag_[v] = kUntouched;
  mark_[v] = kNoMark;
  dist_[v] = bd_->d[v];
  sigma_[v] = bd_->sigma[v];
  delta_[v] = bd_->delta[v];
  touched_.push_back(v);
}

void SourceUpdater::mark_down(VertexId v) {
  touch(v);
  if (flag_[v] == kDown) return;
  flag_[v] = kDown;
  down_.push_back(v);
}

std::vector<VertexId>& SourceUpdater::level(std::vector<std::vector<VertexId>>& buckets,
                                            Distance l) {
  if (buckets.size() <= l) buckets.resize(l + 1);
  return buckets[l];
}

template <typename F>
void SourceUpdater::for_each_old_neighbor(VertexId v, F&& f) const {
  // The graph already reflects the event: an added edge must be hidden and a
  // removed edge must be put back.
  const bool endpoint = ev_.touches(v);
  const VertexId other = ev_.other(v);
  for (VertexId w : g_->neighbors(v)) {
    if (endpoint && ev_.is_add() && w == other) continue;
    f(w);
  }
  if (endpoint && !ev_.is_add()) f(other);
}

PathCount SourceUpdater::sum_predecessor_paths(VertexId v) const {
  const Distance dv = dist_[v];
  PathCount total = 0;
  for (VertexId w : g_->neighbors(v)) {
    if (new_distance(w) + 1 == dv) total += new_sigma(w);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

UpdateRoute SourceUpdater::update(const DynamicGraph& g, const AppliedEvent& ev, VertexId source,
                                  SourceData& bd, ScoreSink& sink, SourceUndo* undo) {
  const EndpointClassification cls = classify(bd, ev.u1, ev.u2);
  if (cls.both_unreachable) {
    touched_.clear();
    return UpdateRoute::skip_unreachable;
  }
  if (cls.dd == 0) {
    touched_.clear();
    return UpdateRoute::skip_same_level;
  }

  begin(g, ev, source, bd, &sink);
  UpdateRoute route;
  if (ev.is_add()) {
    if (cls.dd == kUnreachable) {
      route = ev.attaches_new_vertex ? UpdateRoute::new_vertex : UpdateRoute::component_merge;
      merge(cls);
    } else if (cls.dd == 1) {
      route = UpdateRoute::add_no_level_change;
      no_level_change(cls);
    } else {
      route = UpdateRoute::add_rise;
      rise(cls);
    }
  } else {
    if (cls.dd != 1) {
      throw Error("source " + std::to_string(source) + " holds distances inconsistent with edge (" +
                  std::to_string(ev.u1) + "," + std::to_string(ev.u2) + ")");
    }
    const Distance dl = bd.d[cls.low];
    bool has_predecessor = false;
    bool has_sibling = false;
    for (VertexId w : g.neighbors(cls.low)) {
      has_predecessor |= bd.d[w] + 1 == dl;
      has_sibling |= bd.d[w] == dl;
    }
    if (has_predecessor) {
      route = UpdateRoute::remove_no_level_change;
      no_level_change(cls);
    } else if (has_sibling && options_.one_level_drop) {
      route = UpdateRoute::remove_one_level_drop;
      one_level_drop(cls);
    } else {
      PivotSearch search = search_pivots(cls);
      if (search.disconnected()) {
        route = UpdateRoute::remove_disconnect;
        disconnect(search);
      } else {
        route = UpdateRoute::remove_pivot_drop;
        pivot_drop(search);
      }
    }
  }

  accumulate_dependencies();
  write_back(bd, undo);
  return route;
}

// ---------------------------------------------------------------------------
// Distance / path-count routes
// ---------------------------------------------------------------------------

// The far endpoint keeps its level: only path counts below it change. A BFS
// over successors pushes the change in sigma of each vertex to its children.
void SourceUpdater::no_level_change(const EndpointClassification& cls) {
  const VertexId low = cls.low;
  mark_down(low);
  if (ev_.is_add()) {
    sigma_[low] += bd_->sigma[cls.high];
  } else {
    sigma_[low] -= bd_->sigma[cls.high];
  }
  std::vector<VertexId> queue{low};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId v = queue[head];
    const Distance next = dist_[v] + 1;
    const PathCount gained = sigma_[v] - bd_->sigma[v];  // modular; may encode a loss
    for (VertexId w : g_->neighbors(v)) {
      if (new_distance(w) != next) continue;
      if (flag(w) != kDown) {
        mark_down(w);
        queue.push_back(w);
      }
      sigma_[w] += gained;
    }
  }
}

// The far endpoint was unreachable: the event joins its component to the
// source's. Nothing in the source's component moves, so the new component is
// simply numbered by a BFS hanging below the near endpoint.
void SourceUpdater::merge(const EndpointClassification& cls) {
  const VertexId low = cls.low;
  mark_down(low);
  dist_[low] = bd_->d[cls.high] + 1;
  sigma_[low] = bd_->sigma[cls.high];
  std::vector<VertexId> queue{low};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId v = queue[head];
    const Distance next = dist_[v] + 1;
    for (VertexId w : g_->neighbors(v)) {
      if (new_distance(w) == kUnreachable) {
        mark_down(w);
        dist_[w] = next;
        sigma_[w] = 0;
        queue.push_back(w);
      }
      if (flag(w) == kDown && dist_[w] == next) sigma_[w] += sigma_[v];
    }
  }
}

// Addition that pulls the far endpoint up by two or more levels. Vertices
// are processed level by level in their new distance; each recomputes its
// path count from its final predecessors and hands its deeper neighbors on.
void SourceUpdater::rise(const EndpointClassification& cls) {
  const VertexId low = cls.low;
  mark_down(low);
  const Distance start = bd_->d[cls.high] + 1;
  dist_[low] = start;
  level(bfs_levels_, start).push_back(low);

  // Distances only shrink, so any vertex whose value changes is a deeper
  // neighbor of one that already did.
  for (Distance l = start; l < bfs_levels_.size() && !bfs_levels_[l].empty(); ++l) {
    level(bfs_levels_, l + 1);
    for (std::size_t i = 0; i < bfs_levels_[l].size(); ++i) {
      const VertexId v = bfs_levels_[l][i];
      sigma_[v] = sum_predecessor_paths(v);
      for (VertexId w : g_->neighbors(v)) {
        if (flag(w) == kDown || new_distance(w) <= l) continue;
        mark_down(w);
        dist_[w] = l + 1;
        bfs_levels_[l + 1].push_back(w);
      }
    }
    bfs_levels_[l].clear();
  }
}

// Removal where the far endpoint still has a vertex on its own level: every
// lost vertex drops exactly one level. One pass over the old levels decides
// which successors are lost (all their predecessors are lost) and, in the
// same sweep, finalises path counts of the level that just settled.
void SourceUpdater::one_level_drop(const EndpointClassification& cls) {
  const VertexId low = cls.low;
  Distance l = bd_->d[low];
  mark_down(low);
  mark_[low] = kLost;
  dist_[low] = l + 1;

  std::vector<VertexId> current{low};  // down vertices on old level l
  std::vector<VertexId> lost_above;    // lost vertices from old level l-1 (now at l)
  std::vector<VertexId> next;
  while (!current.empty()) {
    for (VertexId v : lost_above) sigma_[v] = sum_predecessor_paths(v);
    for (VertexId v : current) {
      if (mark_[v] != kLost) sigma_[v] = sum_predecessor_paths(v);
    }

    next.clear();
    for (VertexId v : current) {
      for (VertexId w : g_->neighbors(v)) {
        if (bd_->d[w] != l + 1 || flag(w) == kDown) continue;
        mark_down(w);
        next.push_back(w);
      }
    }
    for (VertexId w : next) {
      bool kept = false;
      for (VertexId z : g_->neighbors(w)) {
        if (bd_->d[z] == l && mark(z) != kLost) {
          kept = true;
          break;
        }
      }
      if (!kept) {
        mark_[w] = kLost;
        dist_[w] = l + 2;
      }
    }

    lost_above.clear();
    for (VertexId v : current) {
      if (mark_[v] == kLost) lost_above.push_back(v);
    }
    current.swap(next);
    ++l;
  }
  for (VertexId v : lost_above) sigma_[v] = sum_predecessor_paths(v);
}

PivotSearch SourceUpdater::find_pivots(const DynamicGraph& g, const AppliedEvent& ev,
                                       VertexId source, const SourceData& bd,
                                       const EndpointClassification& cls) {
  begin(g, ev, source, bd, nullptr);
  return search_pivots(cls);
}

// Collects the sub-dag below the far endpoint whose every shortest path used
// the removed edge, then the untouched neighbors around it. Successors that
// keep another predecessor are recorded as pivots too (their level holds but
// their path count shrinks).
PivotSearch SourceUpdater::search_pivots(const EndpointClassification& cls) {
  PivotSearch out;
  const VertexId low = cls.low;
  touch(low);
  mark_[low] = kLost;
  out.lost.push_back(low);

  std::vector<VertexId> frontier{low};
  std::vector<VertexId> candidates;
  Distance l = bd_->d[low];
  while (!frontier.empty()) {
    candidates.clear();
    for (VertexId v : frontier) {
      for (VertexId w : g_->neighbors(v)) {
        if (bd_->d[w] != l + 1 || mark(w) != kNoMark) continue;
        touch(w);
        mark_[w] = kSeen;
        candidates.push_back(w);
      }
    }
    frontier.clear();
    for (VertexId w : candidates) {
      bool kept = false;
      for (VertexId z : g_->neighbors(w)) {
        if (bd_->d[z] == l && mark(z) != kLost) {
          kept = true;
          break;
        }
      }
      if (!kept) {
        mark_[w] = kLost;
        out.lost.push_back(w);
        frontier.push_back(w);
      }
    }
    ++l;
  }

  for (VertexId v : out.lost) {
    for (VertexId w : g_->neighbors(v)) {
      const Mark m = mark(w);
      if (m == kLost || m == kPivot) continue;
      touch(w);
      mark_[w] = kPivot;
      out.pivots.push_back(w);
    }
  }
  std::stable_sort(out.pivots.begin(), out.pivots.end(),
                   [&](VertexId a, VertexId b) { return bd_->d[a] < bd_->d[b]; });
  if (!out.pivots.empty()) out.first = bd_->d[out.pivots.front()];
  return out;
}

// Second search from the pivots, nearest level first: lost vertices get
// their new distance from the first pivot-side neighbor that reaches them.
void SourceUpdater::pivot_drop(const PivotSearch& search) {
  for (VertexId v : search.lost) dist_[v] = kUnreachable;
  Distance max_level = search.first;
  for (VertexId p : search.pivots) {
    level(bfs_levels_, bd_->d[p]).push_back(p);
    max_level = std::max(max_level, bd_->d[p]);
  }
  for (Distance l = search.first; l < bfs_levels_.size() && (l <= max_level || !bfs_levels_[l].empty());
       ++l) {
    level(bfs_levels_, l + 1);
    for (std::size_t i = 0; i < bfs_levels_[l].size(); ++i) {
      const VertexId v = bfs_levels_[l][i];
      for (VertexId w : g_->neighbors(v)) {
        if (mark(w) != kLost || dist_[w] != kUnreachable) continue;
        dist_[w] = l + 1;
        bfs_levels_[l + 1].push_back(w);
      }
    }
    bfs_levels_[l].clear();
  }

  std::vector<VertexId> seeds;
  for (VertexId v : search.lost) {
    if (dist_[v] != kUnreachable) {
      seeds.push_back(v);
      continue;
    }
    // Part of the lost region may have been cut off entirely.
    mark_down(v);
    sigma_[v] = 0;
  }
  for (VertexId p : search.pivots) {
    // Pivots one level below a lost vertex lost a predecessor.
    for (VertexId z : g_->neighbors(p)) {
      if (mark(z) == kLost && bd_->d[z] + 1 == bd_->d[p]) {
        seeds.push_back(p);
        break;
      }
    }
  }
  recount_from(std::move(seeds));
}

// Marks the seeds and every new-dag descendant as down and recomputes their
// path counts in increasing new distance.
void SourceUpdater::recount_from(std::vector<VertexId> seeds) {
  Distance lo = kUnreachable;
  Distance hi = 0;
  for (VertexId v : seeds) {
    mark_down(v);
    level(bfs_levels_, dist_[v]).push_back(v);
    lo = std::min(lo, dist_[v]);
    hi = std::max(hi, dist_[v]);
  }
  for (Distance l = lo; l < bfs_levels_.size() && (l <= hi || !bfs_levels_[l].empty()); ++l) {
    level(bfs_levels_, l + 1);
    for (std::size_t i = 0; i < bfs_levels_[l].size(); ++i) {
      const VertexId v = bfs_levels_[l][i];
      sigma_[v] = sum_predecessor_paths(v);
      for (VertexId w : g_->neighbors(v)) {
        if (flag(w) == kDown || new_distance(w) != l + 1) continue;
        mark_down(w);
        bfs_levels_[l + 1].push_back(w);
      }
    }
    bfs_levels_[l].clear();
  }
}

// The removal cut the lost sub-dag off from the source.
void SourceUpdater::disconnect(const PivotSearch& search) {
  for (VertexId v : search.lost) {
    mark_down(v);
    dist_[v] = kUnreachable;
    sigma_[v] = 0;
  }
}

// ---------------------------------------------------------------------------
// Dependency sweep
// ---------------------------------------------------------------------------

void SourceUpdater::emit_edge(VertexId a, VertexId b, double amount) {
  if (!ev_.is_add() && ev_.touches(a) && ev_.touches(b)) return;  // entry is dropped
  sink_->add_edge(Edge(a, b), amount);
}

void SourceUpdater::ensure_up(VertexId v) {
  touch(v);
  if (flag_[v] != kUntouched) return;
  flag_[v] = kUp;
  level(dep_levels_, dist_[v]).push_back(v);
  dep_max_level_ = std::max(dep_max_level_, dist_[v]);
}

// Removes what w used to hand to its old predecessors. Predecessors that are
// down rebuild their dependency from scratch, so only their edges change.
void SourceUpdater::subtract_old_contributions(VertexId w) {
  const Distance old_w = bd_->d[w];
  if (old_w == kUnreachable || old_w == 0) return;
  const double coeff = (1.0 + bd_->delta[w]) / static_cast<double>(bd_->sigma[w]);
  for_each_old_neighbor(w, [&](VertexId v) {
    if (bd_->d[v] + 1 != old_w) return;
    const double alpha = static_cast<double>(bd_->sigma[v]) * coeff;
    emit_edge(v, w, -alpha);
    if (v == source_ || flag(v) == kDown) return;
    ensure_up(v);
    delta_[v] -= alpha;
  });
}

void SourceUpdater::accumulate_dependencies() {
  for (VertexId w : down_) delta_[w] = 0.0;
  for (VertexId w : down_) {
    subtract_old_contributions(w);
    if (dist_[w] == kUnreachable) {
      if (w != source_) sink_->add_vertex(w, -bd_->delta[w]);
      continue;
    }
    level(dep_levels_, dist_[w]).push_back(w);
    dep_max_level_ = std::max(dep_max_level_, dist_[w]);
  }

  for (Distance l = dep_max_level_; l >= 1; --l) {
    if (l >= dep_levels_.size()) continue;
    // Predecessors join lower levels only, so this bucket never reallocates.
    auto& current = dep_levels_[l];
    for (std::size_t i = 0; i < current.size(); ++i) {
      const VertexId w = current[i];
      const double coeff = (1.0 + delta_[w]) / static_cast<double>(sigma_[w]);
      for (VertexId v : g_->neighbors(w)) {
        if (new_distance(v) + 1 != l) continue;
        const double c = static_cast<double>(new_sigma(v)) * coeff;
        emit_edge(v, w, c);
        if (v == source_) continue;
        ensure_up(v);
        delta_[v] += c;
      }
      if (flag_[w] == kUp) subtract_old_contributions(w);
      if (w != source_) sink_->add_vertex(w, delta_[w] - bd_->delta[w]);
    }
    current.clear();
  }
}

void SourceUpdater::write_back(SourceData& bd, SourceUndo* undo) {
  for (VertexId v : touched_) {
    if (flag_[v] == kUntouched) continue;
    if (undo) undo->entries.push_back({v, bd.d[v], bd.sigma[v], bd.delta[v]});
    bd.d[v] = dist_[v];
    bd.sigma[v] = sigma_[v];
    bd.delta[v] = delta_[v];
  }
}

}  // namespace sbc
