#pragma once

// Trace lines shared by the simulator and the verification witnesses.

#include "brickctl/event.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brickctl {

enum class Cause { Executed, Denied, CollisionBlocked };

struct TraceEvent {
  std::size_t step = 0;
  int robot = 1;
  Event event;
  Cause cause = Cause::Executed;
  std::vector<int> denied_by; // ascending

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

enum class Outcome { Completed, StepLimit, Stuck };

struct Trace {
  std::vector<TraceEvent> events;
  Outcome outcome = Outcome::Completed;
  std::size_t steps = 0;
};

/// The robot acting in an event (the owner for unloads, 0 for tau[o]).
int acting_robot(const Event& e);

std::string to_string(Cause c);
std::string to_string(Outcome o);

/// `step=<n> robot=<i> event=<ev> cause=<c> [denied_by=<i,...>]`
std::string to_string(const TraceEvent& t);
std::string to_text(const Trace& t);

/// Throws ParseError on malformed input.
TraceEvent parse_trace_line(std::string_view line, std::size_t line_no = 1);
Trace parse_trace(std::string_view text);

} // namespace brickctl
