#include "brickctl/verification.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace brickctl {

ProductResult joint(std::span<const ExplicitAutomaton> refined, std::size_t state_cap) {
  if (refined.empty())
    throw ModelError("joint of zero supervisors");
  return synchronous_product(refined, state_cap);
}

std::vector<TraceEvent> path_to(const ProductResult& p, StateId s) {
  std::vector<TraceEvent> path;
  for (StateId cur = s; p.parent[cur] != kNoState; cur = p.parent[cur]) {
    TraceEvent t;
    t.event = p.automaton.event(p.parent_event[cur]);
    t.robot = acting_robot(t.event);
    path.push_back(t);
  }
  std::reverse(path.begin(), path.end());
  for (std::size_t i = 0; i < path.size(); ++i)
    path[i].step = i;
  return path;
}

VerificationReport verify_supervisors(std::span<const Supervisor> supervisors,
                                      std::size_t state_cap) {
  const int n = static_cast<int>(supervisors.size());
  std::vector<ExplicitAutomaton> refined;
  for (const auto& s : supervisors)
    refined.push_back(refine(s, n));
  const ProductResult p = joint(refined, state_cap);

  VerificationReport r;
  r.states = p.automaton.num_states();
  r.transitions = p.automaton.num_transitions();
  r.nonblocking = is_nonblocking(p.automaton);
  if (!r.nonblocking && !p.automaton.empty()) {
    const auto co = coaccessible(p.automaton);
    const auto first = std::find(co.begin(), co.end(), 0);
    r.witness = path_to(p, static_cast<StateId>(first - co.begin()));
  }
  return r;
}

namespace {

VerificationReport verify_replicated(const Supervisor& s1, int n, std::size_t cap) {
  if (n < 1)
    throw ModelError("robot count must be at least 1");
  std::vector<Supervisor> all;
  for (int j = 1; j <= n; ++j)
    all.push_back(replicate(s1, j));
  return verify_supervisors(all, cap);
}

} // namespace

VerificationReport verify_theorem(const StructureSpec& spec, int n, const VerifyOptions& opts) {
  SynthesisOptions so;
  so.state_cap = opts.state_cap;
  so.repair_mode = opts.repair_mode;
  auto result = synthesize(spec, 1, so);
  if (!result.supervisor) {
    VerificationReport r;
    r.supervisor_exists = false;
    return r;
  }
  return verify_replicated(*result.supervisor, n, opts.state_cap);
}

VerificationReport verify_plant(const StructureSpec& spec, int n, const VerifyOptions& opts) {
  Supervisor k;
  k.automaton = build_plant(spec, 1, opts.state_cap);
  k.robot = 1;
  if (k.automaton.empty()) {
    VerificationReport r;
    r.supervisor_exists = false;
    return r;
  }
  k.certificate = certify(k.automaton);
  return verify_replicated(k, n, opts.state_cap);
}

std::string to_text(const VerificationReport& r) {
  if (!r.supervisor_exists)
    return "RESULT no supervisor exists\n";
  std::string s = "RESULT nonblocking=" + std::string(r.nonblocking ? "true" : "false") +
                  " states=" + std::to_string(r.states) + " trans=" + std::to_string(r.transitions) +
                  '\n';
  if (r.witness)
    for (const auto& t : *r.witness)
      s += "WITNESS " + to_string(t) + '\n';
  return s;
}

// ---------------------------------------------------------------------------
// Invariants

namespace {

int total(const Heights& h) { return std::accumulate(h.begin(), h.end(), 0); }

std::string at(StateId s) { return "joint state " + std::to_string(s); }

} // namespace

InvariantReport check_joint_invariants(const ProductResult& jp,
                                       std::span<const ExplicitAutomaton> components,
                                       const StructureSpec& spec) {
  InvariantReport r;
  const ExplicitAutomaton& a = jp.automaton;
  if (a.empty()) {
    r.vacuous = true;
    return r;
  }
  if (components.size() != jp.arity)
    throw ModelError("component count does not match the joint");
  std::vector<PlantView> views;
  for (const auto& c : components)
    views.emplace_back(c, spec);

  const Heights target(spec.targets().begin(), spec.targets().end());
  auto heights = [&](StateId s) { return views[0].heights(jp.tuple(s)[0]); };

  for (StateId s = 0; s < a.num_states(); ++s) {
    const Heights h = heights(s);
    for (std::size_t k = 1; k < views.size(); ++k)
      if (views[k].heights(jp.tuple(s)[k]) != h)
        r.violations.push_back(at(s) + ": robots disagree on the structure");
    if (a.is_marked(s)) {
      if (h != target)
        r.violations.push_back(at(s) + ": marked but structure incomplete");
      for (std::size_t k = 0; k < views.size(); ++k)
        if (views[k].robot(jp.tuple(s)[k]).inside)
          r.violations.push_back(at(s) + ": marked with robot " + std::to_string(k + 1) +
                                 " inside");
    }
    for (const auto& e : a.out(s)) {
      const Event& ev = a.event(e.event);
      const Heights next = heights(e.target);
      const int delta = total(next) - total(h);
      if (ev.is_unload()) {
        if (!no_trench_permits(spec, h, ev.cell))
          r.violations.push_back(at(s) + ": " + to_string(ev) + " breaks the no-trench rule");
        if (delta != 1 || next[spec.index(ev.cell)] != h[spec.index(ev.cell)] + 1)
          r.violations.push_back(at(s) + ": " + to_string(ev) + " does not add one brick there");
      } else if (delta != 0) {
        r.violations.push_back(at(s) + ": " + to_string(ev) + " changes the structure");
      }
    }
  }
  return r;
}

InvariantReport check_permission_semantics(const ProductResult& jp,
                                           std::span<const ExplicitAutomaton> components) {
  InvariantReport r;
  const ExplicitAutomaton& a = jp.automaton;
  if (a.empty()) {
    r.vacuous = true;
    return r;
  }
  const int n = static_cast<int>(components.size());
  std::set<Cell> cells;
  for (const auto& c : components)
    for (const auto& e : c.alphabet())
      if (e.is_unload())
        cells.insert(e.cell);

  for (StateId s = 0; s < a.num_states(); ++s) {
    const auto tuple = jp.tuple(s);
    for (int j = 1; j <= n; ++j)
      for (Cell c : cells) {
        bool expect = components[j - 1].successor(tuple[j - 1], Event::unload(j, c)).has_value();
        for (int k = 1; k <= n && expect; ++k)
          if (k != j)
            expect = components[k - 1]
                         .successor(tuple[k - 1], Event::unload_indexed(j, c))
                         .has_value();
        const bool actual = a.successor(s, Event::unload(j, c)).has_value();
        if (expect != actual)
          r.violations.push_back(at(s) + ": " + to_string(Event::unload(j, c)) +
                                 (actual ? " fires without permission" : " blocked despite permission"));
      }
  }
  return r;
}

} // namespace brickctl
