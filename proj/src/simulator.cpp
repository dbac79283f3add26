#include "brickctl/simulator.hpp"

#include "brickctl/replication.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace brickctl {

std::vector<ScriptLine> parse_script(std::string_view text) {
  std::vector<ScriptLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream fields(line);
    std::string robot, event, extra;
    if (!(fields >> robot))
      continue;
    if (!(fields >> event) || (fields >> extra))
      throw ParseError(line_no, "expected '<robot> <event>'");
    ScriptLine s;
    s.line = line_no;
    auto [p, ec] = std::from_chars(robot.data(), robot.data() + robot.size(), s.robot);
    if (ec != std::errc{} || p != robot.data() + robot.size() || s.robot < 1)
      throw ParseError(line_no, "bad robot index '" + robot + "'");
    auto e = parse_event(event);
    if (!e || e->is_other_unload() || acting_robot(*e) != s.robot)
      throw ParseError(line_no, "bad event '" + event + "' for robot " + robot);
    s.event = *e;
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const StructureSpec& spec, std::vector<Supervisor> supervisors)
    : spec_(spec), supervisors_(std::move(supervisors)) {
  if (supervisors_.empty())
    throw ModelError("simulation needs at least one robot");
  if (supervisors_.size() > 26)
    throw ModelError("at most 26 robots");
  state_.heights.assign(spec_.area(), 0);
  for (std::size_t k = 0; k < supervisors_.size(); ++k) {
    const auto& s = supervisors_[k];
    if (s.automaton.empty())
      throw ModelError("empty supervisor for robot " + std::to_string(k + 1));
    if (s.robot != static_cast<int>(k) + 1)
      throw ModelError("supervisor " + std::to_string(k + 1) + " belongs to robot " +
                       std::to_string(s.robot));
    views_.emplace_back(s.automaton, spec_);
    state_.robots.push_back({s.automaton.initial(), {}});
  }
  for (int r = 1; r <= robots(); ++r)
    sync(r);
}

void Simulator::sync(int robot) {
  auto& st = state_.robots[robot - 1];
  st.config = views_[robot - 1].robot(st.state);
  if (views_[robot - 1].heights(st.state) != state_.heights)
    throw ModelError("supervisor of robot " + std::to_string(robot) + " lost track of the structure");
}

std::vector<Event> Simulator::supervised_actions(int robot) const {
  const auto& a = supervisors_[robot - 1].automaton;
  std::vector<Event> out;
  for (const auto& e : a.out(state_.robots[robot - 1].state))
    if (!a.event(e.event).is_other_unload())
      out.push_back(a.event(e.event));
  return out;
}

bool Simulator::collides(int robot, const Event& e) const {
  const RobotConfig& me = state_.robots[robot - 1].config;
  std::optional<Cell> dest;
  if (e.is_unload()) {
    dest = e.cell;
  } else {
    switch (e.move) {
    case Move::East:
      dest = Cell{me.position.x + 1, me.position.y};
      break;
    case Move::West:
      dest = Cell{me.position.x - 1, me.position.y};
      break;
    case Move::North:
      dest = Cell{me.position.x, me.position.y - 1};
      break;
    case Move::South:
      dest = Cell{me.position.x, me.position.y + 1};
      break;
    case Move::Enter:
      dest = e.cell;
      break;
    case Move::Pick:
    case Move::Exit:
      break;
    }
  }
  if (!dest)
    return false;
  for (int k = 1; k <= robots(); ++k) {
    const RobotConfig& other = state_.robots[k - 1].config;
    if (k != robot && other.inside && other.position == *dest)
      return true;
  }
  return false;
}

std::vector<Event> Simulator::enabled_actions(int robot) const {
  auto out = supervised_actions(robot);
  std::erase_if(out, [&](const Event& e) { return collides(robot, e); });
  return out;
}

bool Simulator::finished(int robot) const {
  return supervisors_[robot - 1].automaton.is_marked(state_.robots[robot - 1].state);
}

bool Simulator::all_finished() const {
  for (int r = 1; r <= robots(); ++r)
    if (!finished(r))
      return false;
  return true;
}

UnloadDecision Simulator::ask(int robot, Cell c) const {
  UnloadDecision d;
  for (int k = 1; k <= robots(); ++k)
    if (k != robot &&
        !supervisors_[k - 1].automaton.successor(state_.robots[k - 1].state, Event::unload_other(c)))
      d.denied_by.push_back(k);
  d.granted = d.denied_by.empty();
  return d;
}

UnloadDecision Simulator::attempt_unload(int robot, Cell c) {
  UnloadDecision d = ask(robot, c);
  if (d.granted)
    execute(robot, Event::unload(robot, c));
  return d;
}

void Simulator::execute(int robot, const Event& e) {
  auto step_one = [&](int k, const Event& ev) {
    auto& st = state_.robots[k - 1];
    auto next = supervisors_[k - 1].automaton.successor(st.state, ev);
    if (!next)
      throw ModelError("supervisor of robot " + std::to_string(k) + " rejects " + to_string(ev));
    st.state = *next;
  };
  step_one(robot, e);
  if (e.is_unload()) {
    for (int k = 1; k <= robots(); ++k)
      if (k != robot)
        step_one(k, Event::unload_other(e.cell));
    ++state_.heights[spec_.index(e.cell)];
    for (int k = 1; k <= robots(); ++k)
      sync(k);
  } else {
    sync(robot);
  }
}

TraceEvent Simulator::act(int robot, const Event& e) {
  TraceEvent t;
  t.step = state_.step;
  t.robot = robot;
  t.event = e;
  if (e.is_unload()) {
    UnloadDecision d = attempt_unload(robot, e.cell);
    t.cause = d.granted ? Cause::Executed : Cause::Denied;
    t.denied_by = std::move(d.denied_by);
  } else {
    execute(robot, e);
  }
  return t;
}

std::optional<TraceEvent> Simulator::random_turn(int robot, std::mt19937_64& rng) {
  std::optional<TraceEvent> t;
  const auto supervised = supervised_actions(robot);
  if (!supervised.empty()) {
    const auto choices = enabled_actions(robot);
    if (choices.empty())
      t = TraceEvent{state_.step, robot, supervised.front(), Cause::CollisionBlocked, {}};
    else
      t = act(robot, choices[rng() % choices.size()]);
  }
  ++state_.step;
  return t;
}

TraceEvent Simulator::scripted_turn(const ScriptLine& line) {
  if (line.robot < 1 || line.robot > robots())
    throw ScriptError(state_.step, "no robot " + std::to_string(line.robot));
  const auto supervised = supervised_actions(line.robot);
  if (std::find(supervised.begin(), supervised.end(), line.event) == supervised.end())
    throw ScriptError(state_.step, to_string(line.event) + " is not enabled for robot " +
                                       std::to_string(line.robot));
  TraceEvent t;
  if (collides(line.robot, line.event))
    t = TraceEvent{state_.step, line.robot, line.event, Cause::CollisionBlocked, {}};
  else
    t = act(line.robot, line.event);
  ++state_.step;
  return t;
}

std::string Simulator::render() const {
  std::string out;
  for (int y = 1; y <= spec_.height(); ++y) {
    for (int x = 1; x <= spec_.width(); ++x) {
      const int h = state_.heights[spec_.index({x, y})];
      char ch = h <= 9 ? static_cast<char>('0' + h) : '*';
      for (int k = 1; k <= robots(); ++k) {
        const auto& c = state_.robots[k - 1].config;
        if (c.inside && c.position == Cell{x, y})
          ch = static_cast<char>('A' + k - 1);
      }
      out += ch;
    }
    out += '\n';
  }
  out += "outside:";
  bool any = false;
  for (int k = 1; k <= robots(); ++k)
    if (!state_.robots[k - 1].config.inside) {
      out += ' ';
      out += static_cast<char>('A' + k - 1);
      any = true;
    }
  if (!any)
    out += " -";
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Supervisor> replicas(const Supervisor& s1, int n) {
  if (n < 1)
    throw ModelError("robot count must be at least 1");
  std::vector<Supervisor> out;
  for (int j = 1; j <= n; ++j)
    out.push_back(replicate(s1, j));
  return out;
}

} // namespace

Trace run(const SimulationConfig& config, const Supervisor& s1, const TraceObserver& observer) {
  if (config.max_steps < 1)
    throw ModelError("max_steps must be at least 1");
  Simulator sim(config.spec, replicas(s1, config.robots));
  Trace trace;
  auto emit = [&](const TraceEvent& t) {
    trace.events.push_back(t);
    if (observer)
      observer(t, sim);
  };
  auto finish = [&](Outcome o) {
    trace.outcome = o;
    trace.steps = sim.state().step;
    return trace;
  };

  if (config.script) {
    for (const auto& line : *config.script) {
      if (sim.all_finished())
        throw ScriptError(sim.state().step, "script continues after completion");
      if (sim.state().step >= config.max_steps)
        return finish(Outcome::StepLimit);
      emit(sim.scripted_turn(line));
    }
    return finish(sim.all_finished() ? Outcome::Completed : Outcome::StepLimit);
  }

  std::mt19937_64 rng(config.seed);
  const int n = config.robots;
  int silent = 0;
  for (int turn = 0;; turn = (turn + 1) % n) {
    if (sim.all_finished())
      return finish(Outcome::Completed);
    if (sim.state().step >= config.max_steps)
      return finish(Outcome::StepLimit);
    const int robot = turn + 1;
    if (sim.finished(robot))
      continue;
    auto t = sim.random_turn(robot, rng);
    if (t && t->cause != Cause::CollisionBlocked)
      silent = 0;
    else
      ++silent;
    if (t)
      emit(*t);
    int active = 0;
    for (int r = 1; r <= n; ++r)
      active += sim.finished(r) ? 0 : 1;
    if (active > 0 && silent >= active)
      return finish(Outcome::Stuck);
  }
}

std::vector<std::string> validate_trace(const Trace& trace, const StructureSpec& spec,
                                        const Supervisor& s1, int robots) {
  std::vector<std::string> bad;
  Simulator sim(spec, replicas(s1, robots));
  for (const auto& t : trace.events) {
    const std::string where = "step " + std::to_string(t.step) + ": ";
    if (t.robot < 1 || t.robot > robots || acting_robot(t.event) != t.robot) {
      bad.push_back(where + "event does not belong to robot " + std::to_string(t.robot));
      return bad;
    }
    const auto supervised = sim.supervised_actions(t.robot);
    if (std::find(supervised.begin(), supervised.end(), t.event) == supervised.end()) {
      bad.push_back(where + to_string(t.event) + " not enabled by the supervisor");
      return bad;
    }
    const bool blocked = sim.collides(t.robot, t.event);
    switch (t.cause) {
    case Cause::CollisionBlocked:
      if (!blocked || !sim.enabled_actions(t.robot).empty())
        bad.push_back(where + "collision_blocked while the robot had a free action");
      break;
    case Cause::Denied: {
      if (!t.event.is_unload() || blocked) {
        bad.push_back(where + "denied event is not a free unload");
        break;
      }
      const auto d = sim.ask(t.robot, t.event.cell);
      if (d.granted || d.denied_by != t.denied_by)
        bad.push_back(where + "denial does not match the supervisors");
      break;
    }
    case Cause::Executed:
      if (blocked)
        bad.push_back(where + to_string(t.event) + " executed onto an occupied cell");
      if (t.event.is_unload()) {
        if (!no_trench_permits(spec, sim.state().heights, t.event.cell))
          bad.push_back(where + to_string(t.event) + " breaks the no-trench rule");
        if (sim.state().heights[spec.index(t.event.cell)] >= spec.target(t.event.cell))
          bad.push_back(where + to_string(t.event) + " overfills the cell");
        if (!sim.ask(t.robot, t.event.cell).granted) {
          bad.push_back(where + to_string(t.event) + " executed without permission");
          return bad;
        }
      }
      sim.execute(t.robot, t.event);
      break;
    }
  }
  const Heights target(spec.targets().begin(), spec.targets().end());
  switch (trace.outcome) {
  case Outcome::Completed:
    if (!sim.all_finished())
      bad.push_back("completed but some supervisor is unmarked");
    if (sim.state().heights != target)
      bad.push_back("completed but heights differ from the target");
    for (int r = 1; r <= robots; ++r)
      if (sim.state().robots[r - 1].config.inside)
        bad.push_back("completed with robot " + std::to_string(r) + " inside");
    break;
  case Outcome::Stuck: {
    bool supervised = false;
    for (int r = 1; r <= robots; ++r)
      supervised = supervised || (!sim.finished(r) && !sim.supervised_actions(r).empty());
    if (!supervised)
      bad.push_back("stuck without any supervised action: not a collision deadlock");
    for (int r = 1; r <= robots; ++r)
      if (!sim.enabled_actions(r).empty() && !sim.finished(r))
        bad.push_back("stuck while robot " + std::to_string(r) + " has a free action");
    break;
  }
  case Outcome::StepLimit:
    break;
  }
  return bad;
}

} // namespace brickctl
