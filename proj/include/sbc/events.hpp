#pragma once

#include <istream>
#include <optional>
#include <string>

#include "sbc/incremental.hpp"

namespace sbc {

/// One line of an event file: `+ u v [timestamp]` or `- u v [timestamp]`.
struct LabeledEvent {
  EventKind kind = EventKind::add;
  std::string u;
  std::string v;
  std::optional<double> timestamp;
  std::size_t line = 0;
};

/// Reads events lazily so that a bad line is only reported once every
/// event before it has been handled. `#` starts a comment.
class EventReader {
 public:
  explicit EventReader(std::istream& in) : in_(&in) {}

  /// False at end of input. Throws InvalidArgument naming the line on
  /// malformed input or a timestamp smaller than the previous one.
  bool next(LabeledEvent& out);

 private:
  std::istream* in_;
  std::size_t line_ = 0;
  std::optional<double> last_timestamp_;
};

}  // namespace sbc
