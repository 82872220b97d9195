#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace sbc {

/// Cost model of one update: every worker handles n/p sources at t_source
/// seconds each, then partial scores are merged in t_merge seconds.
struct LatencyModel {
  double t_source = 0.0;
  double t_merge = 0.0;
  std::size_t n = 0;
  std::size_t p = 1;
};

/// t_source * n / p + t_merge.
double estimate_update_latency(const LatencyModel& model);

/// Smallest worker count whose update latency fits strictly inside the
/// inter-arrival time `t_interarrival`; nullopt when no count can, i.e. when
/// t_interarrival <= t_source + t_merge. `model.p` is ignored.
std::optional<std::size_t> plan_workers(const LatencyModel& model, double t_interarrival);

struct OnlineReport {
  std::size_t events = 0;
  std::size_t missed = 0;
  double missed_fraction = 0.0;
  /// Mean over missed events of how long they waited for the previous update.
  double mean_delay = 0.0;
  double makespan = 0.0;
};

/// Replays arrivals against processing times on a single update pipeline.
/// Event i starts at max(arrival[i], finish[i-1]); it counts as missed when
/// the previous update is still running at its arrival, with delay
/// finish[i-1] - arrival[i]. Throws InvalidArgument on decreasing arrivals
/// or mismatched lengths.
OnlineReport simulate_online(const std::vector<double>& arrivals,
                             const std::vector<double>& processing_seconds);

}  // namespace sbc
