#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sbc/graph.hpp"
#include "sbc/partition.hpp"
#include "sbc/scores.hpp"

namespace sbc {

/// A state directory holds everything `sbc` needs between runs:
///
///   labels.txt     vertex labels, one per line, in id order
///   edges.txt      `u v` id pairs
///   scores.state   full-precision scores (`v id x` / `e u v x`)
///   scores.csv     12-significant-digit scores by label
///   manifest       `worker_id lo hi store_path` per partition
///   state.json     counts and store settings
///   stores/        partition files and the commit record
struct State {
  LabeledGraph graph;
  CentralityScores scores;
  std::vector<Partition> partitions;  // store paths resolved against the directory
  std::uint8_t sigma_width = 2;
  std::uint64_t committed_events = 0;
};

std::string stores_dir(const std::string& dir);

void save_state(const std::string& dir, const State& state);
State load_state(const std::string& dir);

/// `v,<label>,<score>` rows by vertex id, then `e,<u>,<v>,<score>` rows by
/// edge, scores with 12 significant digits.
void write_scores_csv(std::ostream& out, const State& state);

}  // namespace sbc
