#include "sbc/events.hpp"

#include <sstream>

namespace sbc {

bool EventReader::next(LabeledEvent& out) {
  std::string text;
  while (std::getline(*in_, text)) {
    ++line_;
    if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    std::istringstream fields(text);
    std::string op;
    if (!(fields >> op)) continue;

    auto fail = [&](const std::string& why) -> bool {
      throw InvalidArgument("line " + std::to_string(line_) + ": " + why);
    };
    if (op != "+" && op != "-") fail("unknown operation '" + op + "' (expected + or -)");
    out = LabeledEvent{};
    out.kind = op == "+" ? EventKind::add : EventKind::remove;
    out.line = line_;
    if (!(fields >> out.u >> out.v)) fail("expected two endpoints");
    if (out.u == out.v) fail("self-loop on '" + out.u + "'");
    std::string ts;
    if (fields >> ts) {
      std::size_t used = 0;
      double value = 0;
      try {
        value = std::stod(ts, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != ts.size()) fail("bad timestamp '" + ts + "'");
      if (last_timestamp_ && value < *last_timestamp_) fail("timestamp goes backwards");
      last_timestamp_ = value;
      out.timestamp = value;
    }
    std::string extra;
    if (fields >> extra) fail("unexpected field '" + extra + "'");
    return true;
  }
  return false;
}

}  // namespace sbc
