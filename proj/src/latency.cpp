#include "sbc/latency.hpp"

#include <algorithm>
#include <cmath>

#include "sbc/types.hpp"

namespace sbc {

double estimate_update_latency(const LatencyModel& model) {
  if (model.p == 0) throw InvalidArgument("worker count must be positive");
  return model.t_source * static_cast<double>(model.n) / static_cast<double>(model.p) +
         model.t_merge;
}

std::optional<std::size_t> plan_workers(const LatencyModel& model, double t_interarrival) {
  if (!(t_interarrival > model.t_source + model.t_merge)) return std::nullopt;
  const double bound =
      model.t_source * static_cast<double>(model.n) / (t_interarrival - model.t_merge);
  // Strict inequality: an exact integer bound needs one more worker.
  auto p = static_cast<std::size_t>(std::floor(bound)) + 1;
  return std::max<std::size_t>(p, 1);
}

OnlineReport simulate_online(const std::vector<double>& arrivals,
                             const std::vector<double>& processing_seconds) {
  if (arrivals.size() != processing_seconds.size()) {
    throw InvalidArgument("arrivals and processing times differ in length");
  }
  OnlineReport report;
  report.events = arrivals.size();
  double finish = 0.0;
  double delay_sum = 0.0;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (i > 0 && arrivals[i] < arrivals[i - 1]) {
      throw InvalidArgument("timestamps decrease at event " + std::to_string(i));
    }
    double start = arrivals[i];
    if (i > 0 && finish > arrivals[i]) {
      ++report.missed;
      delay_sum += finish - arrivals[i];
      start = finish;
    }
    finish = start + processing_seconds[i];
  }
  if (report.events > 0) {
    report.missed_fraction = static_cast<double>(report.missed) / static_cast<double>(report.events);
    report.makespan = finish - arrivals.front();
  }
  if (report.missed > 0) report.mean_delay = delay_sum / static_cast<double>(report.missed);
  return report;
}

}  // namespace sbc
