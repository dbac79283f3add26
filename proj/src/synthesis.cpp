#include "brickctl/synthesis.hpp"

#include "brickctl/robot.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace brickctl {

// ---------------------------------------------------------------------------
// Plant

ExplicitAutomaton build_plant(const StructureSpec& spec, int robot, std::size_t state_cap) {
  const ExplicitAutomaton structure = structure_automaton_or_empty(spec, robot, state_cap);
  const std::size_t ncells = spec.task_cells().size();

  // Admit only valuations whose heights are a state of the trimmed structure
  // automaton: flattening the network under this filter is the product with T_i.
  std::unordered_set<std::string> feasible;
  if (!structure.empty()) {
    const StateLabels& l = *structure.labels();
    const std::size_t first = l.components.size();
    for (StateId s = 0; s < structure.num_states(); ++s) {
      auto row = l.row(s);
      std::string k;
      for (std::size_t i = 0; i < ncells; ++i)
        k.append(reinterpret_cast<const char*>(&row[first + i]), sizeof(std::int16_t));
      feasible.insert(std::move(k));
    }
  }

  auto table = plant_variables(spec, robot);
  std::vector<ExtendedAutomaton> net = structure_network(spec, table, robot);
  for (auto& g : robot_network(spec, table, robot))
    net.push_back(std::move(g));

  FlattenOptions opts;
  opts.state_cap = state_cap;
  opts.admit = [&feasible, ncells](std::span<const int> v) {
    std::string k;
    for (std::size_t i = 0; i < ncells; ++i) {
      const auto h = static_cast<std::int16_t>(v[i]);
      k.append(reinterpret_cast<const char*>(&h), sizeof h);
    }
    return feasible.contains(k);
  };
  return flatten(net, opts);
}

// ---------------------------------------------------------------------------
// Structure keys and macrostates

namespace {

bool by_row(Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

std::optional<Cell> cell_of_height_variable(std::string_view name) {
  if (name.size() < 6 || name.substr(0, 2) != "h[" || name.back() != ']')
    return std::nullopt;
  name = name.substr(2, name.size() - 3);
  const auto comma = name.find(',');
  if (comma == std::string_view::npos)
    return std::nullopt;
  Cell c;
  auto r1 = std::from_chars(name.data(), name.data() + comma, c.x);
  auto r2 = std::from_chars(name.data() + comma + 1, name.data() + name.size(), c.y);
  if (r1.ec != std::errc{} || r2.ec != std::errc{})
    return std::nullopt;
  return c;
}

} // namespace

StructureKeys structure_keys(const ExplicitAutomaton& a) {
  StructureKeys k;
  const std::size_t n = a.num_states();
  if (const StateLabels* l = a.labels()) {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < l->variables.size(); ++i)
      if (auto c = cell_of_height_variable(l->variables[i])) {
        k.cells.push_back(*c);
        cols.push_back(l->components.size() + i);
      }
    k.data.reserve(n * cols.size());
    for (StateId s = 0; s < n; ++s) {
      auto row = l->row(s);
      for (std::size_t c : cols)
        k.data.push_back(row[c]);
    }
    return k;
  }

  for (const auto& e : a.alphabet())
    if (e.is_unload())
      k.cells.push_back(e.cell);
  std::sort(k.cells.begin(), k.cells.end(), by_row);
  k.cells.erase(std::unique(k.cells.begin(), k.cells.end()), k.cells.end());
  const std::size_t w = k.cells.size();
  k.data.assign(n * w, 0);
  if (n == 0)
    return k;

  std::vector<int> column(a.alphabet().size(), -1);
  for (EventId e = 0; e < a.alphabet().size(); ++e)
    if (a.event(e).is_unload())
      column[e] = static_cast<int>(std::lower_bound(k.cells.begin(), k.cells.end(), a.event(e).cell,
                                                    by_row) -
                                   k.cells.begin());
  std::vector<char> seen(n, 0);
  std::vector<StateId> stack{a.initial()};
  seen[a.initial()] = 1;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const auto& e : a.out(s)) {
      std::vector<std::int16_t> next(k.key(s).begin(), k.key(s).end());
      if (column[e.event] >= 0)
        ++next[static_cast<std::size_t>(column[e.event])];
      auto dst = k.data.begin() + static_cast<std::ptrdiff_t>(e.target * w);
      if (!seen[e.target]) {
        seen[e.target] = 1;
        std::copy(next.begin(), next.end(), dst);
        stack.push_back(e.target);
      } else if (!std::equal(next.begin(), next.end(), dst)) {
        throw ModelError("state " + std::to_string(e.target) + " has no consistent structure key");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ModelError("structure keys need every state reachable or labeled");
  return k;
}

namespace {

struct Partition {
  std::vector<Macrostate> macros;
  std::vector<std::uint32_t> of; // state -> macrostate
};

Partition partition(const ExplicitAutomaton& a) {
  const StructureKeys keys = structure_keys(a);
  std::map<std::vector<int>, std::vector<StateId>> groups;
  for (StateId s = 0; s < a.num_states(); ++s) {
    auto k = keys.key(s);
    groups[std::vector<int>(k.begin(), k.end())].push_back(s);
  }
  Partition p;
  p.of.assign(a.num_states(), 0);
  for (auto& [key, members] : groups) {
    for (StateId s : members)
      p.of[s] = static_cast<std::uint32_t>(p.macros.size());
    p.macros.push_back({key, std::move(members)});
  }
  return p;
}

bool is_task(const Event& e) {
  return e.is_unload() && (e.owner == Owner::Self || e.owner == Owner::Other);
}

std::vector<EventId> enabled_task_ids(const Macrostate& m, const ExplicitAutomaton& a) {
  std::vector<EventId> ids;
  for (StateId s : m.members)
    for (const auto& e : a.out(s))
      if (is_task(a.event(e.event)))
        ids.push_back(e.event);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

} // namespace

std::vector<Macrostate> compute_macrostates(const ExplicitAutomaton& a) {
  return partition(a).macros;
}

std::vector<Event> enabled_task_events(const Macrostate& m, const ExplicitAutomaton& a) {
  std::vector<Event> events;
  for (EventId e : enabled_task_ids(m, a))
    events.push_back(a.event(e));
  return events;
}

// ---------------------------------------------------------------------------
// Task observer

std::vector<TaskObserverViolation> check_task_observer(const ExplicitAutomaton& a) {
  std::vector<TaskObserverViolation> out;
  if (a.empty())
    return out;
  const Partition p = partition(a);
  const std::size_t n = a.num_states();

  // Reverse local edges; local events never leave a macrostate.
  std::vector<std::uint32_t> offsets(n + 1, 0);
  for (StateId s = 0; s < n; ++s)
    for (const auto& e : a.out(s))
      if (a.event(e.event).is_local())
        ++offsets[e.target + 1];
  for (std::size_t i = 0; i < n; ++i)
    offsets[i + 1] += offsets[i];
  std::vector<StateId> preds(offsets.back());
  {
    std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
    for (StateId s = 0; s < n; ++s)
      for (const auto& e : a.out(s))
        if (a.event(e.event).is_local())
          preds[fill[e.target]++] = s;
  }

  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t round = 0;
  std::vector<StateId> stack;
  for (std::size_t mi = 0; mi < p.macros.size(); ++mi) {
    const Macrostate& m = p.macros[mi];
    for (EventId ev : enabled_task_ids(m, a)) {
      ++round;
      stack.clear();
      for (StateId s : m.members)
        if (a.successor(s, ev)) {
          stamp[s] = round;
          stack.push_back(s);
        }
      while (!stack.empty()) {
        const StateId s = stack.back();
        stack.pop_back();
        for (auto i = offsets[s]; i < offsets[s + 1]; ++i)
          if (stamp[preds[i]] != round && p.of[preds[i]] == mi) {
            stamp[preds[i]] = round;
            stack.push_back(preds[i]);
          }
      }
      std::vector<StateId> offending;
      for (StateId s : m.members)
        if (stamp[s] != round)
          offending.push_back(s);
      if (!offending.empty())
        out.push_back({mi, a.event(ev), std::move(offending)});
    }
  }
  return out;
}

ExplicitAutomaton repair_task_observer(const ExplicitAutomaton& a,
                                       const std::vector<TaskObserverViolation>& violations,
                                       RepairMode mode) {
  if (violations.empty())
    return a;
  if (mode == RepairMode::States) {
    std::vector<char> keep(a.num_states(), 1);
    for (const auto& v : violations)
      for (StateId s : v.offending)
        keep[s] = 0;
    return a.restrict(keep);
  }
  const Partition p = partition(a);
  std::set<std::pair<std::size_t, EventId>> drop;
  for (const auto& v : violations)
    drop.insert({v.macrostate, *a.event_id(v.event)});
  std::vector<char> keep(a.num_states(), 1);
  return a.restrict(keep, [&](StateId s, const ExplicitAutomaton::Edge& e) {
    return !drop.contains({p.of[s], e.event});
  });
}

// ---------------------------------------------------------------------------
// Totally reciprocal

std::vector<ReciprocityViolation> check_totally_reciprocal(const ExplicitAutomaton& a) {
  std::vector<ReciprocityViolation> out;
  if (a.empty())
    return out;
  const Partition p = partition(a);
  for (std::size_t mi = 0; mi < p.macros.size(); ++mi) {
    std::map<Cell, std::pair<std::optional<Event>, std::optional<Event>>, bool (*)(Cell, Cell)> pairs(
        by_row);
    for (EventId id : enabled_task_ids(p.macros[mi], a)) {
      const Event& e = a.event(id);
      auto& slot = pairs[e.cell];
      (e.owner == Owner::Other ? slot.second : slot.first) = e;
    }
    for (const auto& [cell, pr] : pairs)
      if (pr.first.has_value() != pr.second.has_value())
        out.push_back({mi, cell, pr.first ? *pr.first : *pr.second});
  }
  return out;
}

ExplicitAutomaton repair_totally_reciprocal(const ExplicitAutomaton& a,
                                            const std::vector<ReciprocityViolation>& violations) {
  if (violations.empty())
    return a;
  const Partition p = partition(a);
  std::set<std::pair<std::size_t, EventId>> drop;
  for (const auto& v : violations)
    drop.insert({v.macrostate, *a.event_id(v.present)});
  std::vector<char> keep(a.num_states(), 1);
  return a.restrict(keep, [&](StateId s, const ExplicitAutomaton::Edge& e) {
    return !drop.contains({p.of[s], e.event});
  });
}

Certificate certify(const ExplicitAutomaton& a) {
  Certificate c;
  c.trim = is_nonblocking(a);
  c.task_observer = !a.empty() && check_task_observer(a).empty();
  c.totally_reciprocal = !a.empty() && check_totally_reciprocal(a).empty();
  return c;
}

// ---------------------------------------------------------------------------
// Synthesis loop

SynthesisResult synthesize_from(const ExplicitAutomaton& plant, int robot,
                                const SynthesisOptions& options) {
  SynthesisResult r;
  r.plant_states = plant.num_states();
  r.plant_transitions = plant.num_transitions();

  auto size_of = [](const ExplicitAutomaton& a) {
    return std::pair{a.num_states(), a.num_transitions()};
  };

  ExplicitAutomaton current = plant;
  for (std::size_t pass = 0;; ++pass) {
    if (pass >= options.iteration_cap)
      throw SynthesisDivergedError(options.iteration_cap);
    const auto before = size_of(current);
    ExplicitAutomaton next = trim(current);
    if (next.empty())
      return r;
    if (auto v = check_task_observer(next); !v.empty())
      next = repair_task_observer(next, v, options.repair_mode);
    if (next.empty())
      return r;
    if (auto v = check_totally_reciprocal(next); !v.empty())
      next = repair_totally_reciprocal(next, v);
    const bool changed = size_of(next) != before;
    current = std::move(next);
    if (!changed)
      break;
    ++r.passes;
  }

  Supervisor s;
  s.certificate = certify(current);
  s.macrostates = compute_macrostates(current);
  s.automaton = std::move(current);
  s.robot = robot;
  r.supervisor = std::move(s);
  return r;
}

SynthesisResult synthesize(const StructureSpec& spec, int robot, const SynthesisOptions& options) {
  return synthesize_from(build_plant(spec, robot, options.state_cap), robot, options);
}

// ---------------------------------------------------------------------------
// Supervisor files

std::string to_text(const Supervisor& s) {
  std::ostringstream os;
  os << "robot " << s.robot << '\n'
     << to_text(s.automaton) << "certificate trim=" << s.certificate.trim
     << " taskobs=" << s.certificate.task_observer
     << " reciprocal=" << s.certificate.totally_reciprocal << '\n';
  return os.str();
}

Supervisor parse_supervisor(std::string_view text) {
  const auto first_nl = text.find('\n');
  if (first_nl == std::string_view::npos)
    throw ParseError(1, "truncated supervisor file");
  const std::string_view head = text.substr(0, first_nl);
  int robot = 0;
  if (head.substr(0, 6) != "robot " ||
      std::from_chars(head.data() + 6, head.data() + head.size(), robot).ec != std::errc{} ||
      robot < 1)
    throw ParseError(1, "expected 'robot <i>'");

  std::string_view body = text.substr(first_nl + 1);
  while (!body.empty() && body.back() == '\n')
    body.remove_suffix(1);
  const auto last_nl = body.rfind('\n');
  const std::string_view foot = last_nl == std::string_view::npos ? body : body.substr(last_nl + 1);
  const std::size_t foot_line =
      2 + static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));
  Certificate c;
  {
    int t = -1, o = -1, r = -1;
    std::string f(foot);
    if (std::sscanf(f.c_str(), "certificate trim=%d taskobs=%d reciprocal=%d", &t, &o, &r) != 3 ||
        t < 0 || t > 1 || o < 0 || o > 1 || r < 0 || r > 1)
      throw ParseError(foot_line, "expected certificate footer");
    c = {t == 1, o == 1, r == 1};
  }
  Supervisor s;
  s.robot = robot;
  s.automaton = parse_automaton(last_nl == std::string_view::npos ? std::string_view{}
                                                                  : body.substr(0, last_nl + 1));
  s.certificate = c;
  s.macrostates = compute_macrostates(s.automaton);
  return s;
}

// ---------------------------------------------------------------------------
// Plant view

namespace {

std::size_t column_with_prefix(const std::vector<std::string>& names, std::string_view prefix,
                               std::size_t base) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (std::string_view(names[i]).substr(0, prefix.size()) == prefix)
      return base + i;
  throw ModelError("state labels lack " + std::string(prefix) + "...]");
}

} // namespace

PlantView::PlantView(const ExplicitAutomaton& a, const StructureSpec& spec)
    : labels_(a.labels()), spec_(&spec) {
  if (!labels_)
    throw ModelError("automaton has no state labels");
  const std::size_t vbase = labels_->components.size();
  g3_ = column_with_prefix(labels_->components, "G3[", 0);
  g4_ = column_with_prefix(labels_->components, "G4[", 0);
  x_ = column_with_prefix(labels_->variables, "xhat[", vbase);
  y_ = column_with_prefix(labels_->variables, "yhat[", vbase);
  for (std::size_t i = 0; i < labels_->variables.size(); ++i)
    if (auto c = cell_of_height_variable(labels_->variables[i]))
      height_columns_.push_back({vbase + i, spec.index(*c)});
}

RobotConfig PlantView::robot(StateId s) const {
  auto row = labels_->row(s);
  return {row[g3_] == 1, row[g4_] == 1, Cell{row[x_], row[y_]}};
}

Heights PlantView::heights(StateId s) const {
  Heights h(spec_->area(), 0);
  auto row = labels_->row(s);
  for (auto [col, idx] : height_columns_)
    h[idx] = row[col];
  return h;
}

} // namespace brickctl
