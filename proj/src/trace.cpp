#include "brickctl/trace.hpp"

#include "brickctl/errors.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace brickctl {

int acting_robot(const Event& e) { return e.is_other_unload() ? 0 : e.robot; }

std::string to_string(Cause c) {
  switch (c) {
  case Cause::Executed:
    return "executed";
  case Cause::Denied:
    return "denied";
  case Cause::CollisionBlocked:
    return "collision_blocked";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
  case Outcome::Completed:
    return "completed";
  case Outcome::StepLimit:
    return "step_limit";
  case Outcome::Stuck:
    return "stuck";
  }
  return "?";
}

std::string to_string(const TraceEvent& t) {
  std::string s = "step=" + std::to_string(t.step) + " robot=" + std::to_string(t.robot) +
                  " event=" + to_string(t.event) + " cause=" + to_string(t.cause);
  if (!t.denied_by.empty()) {
    s += " denied_by=";
    for (std::size_t i = 0; i < t.denied_by.size(); ++i)
      s += (i ? "," : "") + std::to_string(t.denied_by[i]);
  }
  return s;
}

std::string to_text(const Trace& t) {
  std::string s;
  for (const auto& e : t.events)
    s += to_string(e) + '\n';
  s += "outcome=" + to_string(t.outcome) + " steps=" + std::to_string(t.steps) + '\n';
  return s;
}

namespace {

std::size_t to_number(std::string_view v, std::size_t line_no) {
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ParseError(line_no, "expected a number, got '" + std::string(v) + "'");
  return n;
}

std::map<std::string, std::string, std::less<>> fields(std::string_view line, std::size_t line_no) {
  std::map<std::string, std::string, std::less<>> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected key=value, got '" + tok + "'");
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

const std::string& field(const std::map<std::string, std::string, std::less<>>& f,
                         std::string_view key, std::size_t line_no) {
  auto it = f.find(key);
  if (it == f.end())
    throw ParseError(line_no, "missing " + std::string(key) + "=");
  return it->second;
}

} // namespace

TraceEvent parse_trace_line(std::string_view line, std::size_t line_no) {
  const auto f = fields(line, line_no);
  TraceEvent t;
  t.step = to_number(field(f, "step", line_no), line_no);
  t.robot = static_cast<int>(to_number(field(f, "robot", line_no), line_no));
  auto ev = parse_event(field(f, "event", line_no));
  if (!ev)
    throw ParseError(line_no, "bad event '" + field(f, "event", line_no) + "'");
  t.event = *ev;
  const auto& c = field(f, "cause", line_no);
  if (c == "executed")
    t.cause = Cause::Executed;
  else if (c == "denied")
    t.cause = Cause::Denied;
  else if (c == "collision_blocked")
    t.cause = Cause::CollisionBlocked;
  else
    throw ParseError(line_no, "bad cause '" + c + "'");
  if (auto it = f.find("denied_by"); it != f.end()) {
    std::string_view rest = it->second;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      t.denied_by.push_back(static_cast<int>(to_number(rest.substr(0, comma), line_no)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  return t;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    if (ended)
      throw ParseError(line_no, "content after outcome line");
    if (line.starts_with("outcome=")) {
      const auto f = fields(line, line_no);
      const auto& o = field(f, "outcome", line_no);
      if (o == "completed")
        t.outcome = Outcome::Completed;
      else if (o == "step_limit")
        t.outcome = Outcome::StepLimit;
      else if (o == "stuck")
        t.outcome = Outcome::Stuck;
      else
        throw ParseError(line_no, "bad outcome '" + o + "'");
      t.steps = to_number(field(f, "steps", line_no), line_no);
      ended = true;
      continue;
    }
    t.events.push_back(parse_trace_line(line, line_no));
  }
  if (!ended)
    throw ParseError(line_no, "missing outcome line");
  return t;
}

} // namespace brickctl
