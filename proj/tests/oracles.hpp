#pragma once

// Independent reference implementations used by the tests. They work from the
// rules of the construction problem directly and share nothing with the
// library's model builders beyond the plain data types.

#include "brickctl/efa.hpp"
#include "brickctl/explicit.hpp"
#include "brickctl/structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

using brickctl::Cell;
using brickctl::Event;
using brickctl::Heights;
using brickctl::StructureSpec;

// ---------------------------------------------------------------------------
// Structure rules

inline int h(const StructureSpec& s, const Heights& hs, Cell c) {
  if (c.x < 1 || c.y < 1 || c.x > s.width() || c.y > s.height())
    return 0;
  return hs[static_cast<std::size_t>((c.y - 1) * s.width() + (c.x - 1))];
}

inline bool is_io(const StructureSpec& s, Cell c) {
  for (Cell i : s.io())
    if (i == c)
      return true;
  return false;
}

/// Neighbor relation including the outside region (0,0) next to io cells.
inline bool adjacent(const StructureSpec& s, Cell a, Cell b) {
  const Cell out{0, 0};
  if (a == out)
    return is_io(s, b);
  if (b == out)
    return is_io(s, a);
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1 && b.x >= 1 && b.y >= 1 &&
         b.x <= s.width() && b.y <= s.height();
}

inline std::vector<Cell> all_places(const StructureSpec& s) {
  std::vector<Cell> v{{0, 0}};
  for (int y = 1; y <= s.height(); ++y)
    for (int x = 1; x <= s.width(); ++x)
      v.push_back({x, y});
  return v;
}

/// (a) some neighbor at the same height.
inline bool cond_a(const StructureSpec& s, const Heights& hs, Cell c) {
  for (Cell n : all_places(s))
    if (adjacent(s, c, n) && h(s, hs, n) == h(s, hs, c))
      return true;
  return false;
}

/// (b) of any two neighbors on one line through c, one is not above c.
inline bool cond_b(const StructureSpec& s, const Heights& hs, Cell c) {
  const int hc = h(s, hs, c);
  for (Cell p : all_places(s))
    for (Cell q : all_places(s)) {
      if (p == q || !adjacent(s, c, p) || !adjacent(s, c, q))
        continue;
      const bool same_line = (p.x == c.x && q.x == c.x) || (p.y == c.y && q.y == c.y);
      if (same_line && h(s, hs, p) > hc && h(s, hs, q) > hc)
        return false;
    }
  return true;
}

/// (c) target not reached.
inline bool cond_c(const StructureSpec& s, const Heights& hs, Cell c) {
  return h(s, hs, c) < s.target(c);
}

/// The no-trench specification as stated, heights off the grid taken as 0.
inline bool no_trench(const StructureSpec& s, const Heights& hs, Cell c) {
  const int v = h(s, hs, c);
  const bool a = v < h(s, hs, {c.x - 1, c.y}) && v < h(s, hs, {c.x + 1, c.y});
  const bool b = v < h(s, hs, {c.x, c.y - 1}) && v < h(s, hs, {c.x, c.y + 1});
  return !a && !b;
}

inline bool can_add(const StructureSpec& s, const Heights& hs, Cell c) {
  return cond_a(s, hs, c) && cond_b(s, hs, c) && cond_c(s, hs, c);
}

inline std::vector<Cell> task_cells(const StructureSpec& s) {
  std::vector<Cell> v;
  for (int y = 1; y <= s.height(); ++y)
    for (int x = 1; x <= s.width(); ++x)
      if (s.target({x, y}) >= 1)
        v.push_back({x, y});
  return v;
}

inline Heights target(const StructureSpec& s) { return {s.targets().begin(), s.targets().end()}; }

inline Heights add(const StructureSpec& s, Heights hs, Cell c) {
  ++hs[static_cast<std::size_t>((c.y - 1) * s.width() + (c.x - 1))];
  return hs;
}

/// Valuations of the trimmed structure automaton.
inline std::set<Heights> structure_states(const StructureSpec& s) {
  std::set<Heights> reach;
  std::deque<Heights> q{Heights(s.area(), 0)};
  reach.insert(q.front());
  std::map<Heights, std::vector<Heights>> succ;
  while (!q.empty()) {
    Heights cur = q.front();
    q.pop_front();
    for (Cell c : task_cells(s))
      if (can_add(s, cur, c)) {
        Heights next = add(s, cur, c);
        succ[cur].push_back(next);
        if (reach.insert(next).second)
          q.push_back(next);
      }
  }
  // Backward fixpoint to the target.
  std::set<Heights> good;
  if (reach.contains(target(s)))
    good.insert(target(s));
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& v : reach)
      if (!good.contains(v))
        for (const auto& n : succ[v])
          if (good.contains(n)) {
            good.insert(v);
            grew = true;
            break;
          }
  }
  return good;
}

// ---------------------------------------------------------------------------
// Plant K_i by direct search

struct PlantState {
  Heights hs;
  bool inside = false;
  Cell pos{0, 0};
  bool loaded = false;

  auto key() const { return std::tie(hs, inside, pos, loaded); }
  friend bool operator<(const PlantState& a, const PlantState& b) { return a.key() < b.key(); }
  friend bool operator==(const PlantState& a, const PlantState& b) { return a.key() == b.key(); }
};

struct Plant {
  PlantState initial;
  std::map<PlantState, std::vector<std::pair<Event, PlantState>>> edges;
  std::size_t transitions = 0;

  bool marked(const PlantState& p, const StructureSpec& s) const {
    return !p.inside && p.hs == target(s);
  }
};

inline Plant plant(const StructureSpec& s, int i) {
  const std::set<Heights> ok = structure_states(s);
  Plant k;
  k.initial.hs = Heights(s.area(), 0);
  if (!ok.contains(k.initial.hs))
    return k;
  std::deque<PlantState> q{k.initial};
  k.edges[k.initial];
  auto push = [&](const PlantState& from, const Event& e, const PlantState& to) {
    k.edges[from].push_back({e, to});
    ++k.transitions;
    if (!k.edges.contains(to)) {
      k.edges[to];
      q.push_back(to);
    }
  };
  const Cell out{0, 0};
  using brickctl::Move;
  while (!q.empty()) {
    const PlantState p = q.front();
    q.pop_front();
    const Cell here = p.inside ? p.pos : out;
    if (!p.inside) {
      if (!p.loaded) {
        PlantState n = p;
        n.loaded = true;
        push(p, Event::local(i, Move::Pick), n);
      }
      for (Cell c : s.io())
        if (h(s, p.hs, c) <= 1) {
          PlantState n = p;
          n.inside = true;
          n.pos = c;
          push(p, Event::local(i, Move::Enter, c), n);
        }
    } else {
      const std::pair<Move, Cell> moves[] = {{Move::East, {here.x + 1, here.y}},
                                             {Move::West, {here.x - 1, here.y}},
                                             {Move::North, {here.x, here.y - 1}},
                                             {Move::South, {here.x, here.y + 1}}};
      for (auto [m, to] : moves)
        if (to.x >= 1 && to.y >= 1 && to.x <= s.width() && to.y <= s.height() &&
            std::abs(h(s, p.hs, to) - h(s, p.hs, here)) <= 1) {
          PlantState n = p;
          n.pos = to;
          push(p, Event::local(i, m), n);
        }
      if (is_io(s, here) && h(s, p.hs, here) <= 1) {
        PlantState n = p;
        n.inside = false;
        n.pos = out;
        push(p, Event::local(i, Move::Exit), n);
      }
    }
    for (Cell c : task_cells(s)) {
      if (!can_add(s, p.hs, c) || !ok.contains(add(s, p.hs, c)))
        continue;
      PlantState n = p;
      n.hs = add(s, p.hs, c);
      push(p, Event::unload_other(c), n);
      if (p.loaded && adjacent(s, c, here) && h(s, p.hs, here) == h(s, p.hs, c)) {
        n.loaded = false;
        push(p, Event::unload(i, c), n);
      }
    }
  }
  return k;
}

// ---------------------------------------------------------------------------
// Languages

using Word = std::vector<Event>;

inline void words(const brickctl::ExplicitAutomaton& a, brickctl::StateId s, int depth, Word& w,
                  std::set<Word>& out) {
  out.insert(w);
  if (depth == 0)
    return;
  for (const auto& e : a.out(s)) {
    w.push_back(a.event(e.event));
    words(a, e.target, depth - 1, w, out);
    w.pop_back();
  }
}

inline std::set<Word> language(const brickctl::ExplicitAutomaton& a, int depth) {
  std::set<Word> out;
  if (a.empty())
    return out;
  Word w;
  words(a, a.initial(), depth, w, out);
  return out;
}

/// Isomorphism of deterministic automata, matched from the initial states.
inline bool isomorphic(const brickctl::ExplicitAutomaton& a, const brickctl::ExplicitAutomaton& b) {
  using brickctl::StateId;
  if (a.empty() || b.empty())
    return a.empty() && b.empty();
  if (a.num_states() != b.num_states() || a.num_transitions() != b.num_transitions())
    return false;
  std::vector<StateId> map(a.num_states(), brickctl::kNoState);
  std::vector<char> used(b.num_states(), 0);
  std::deque<StateId> q{a.initial()};
  map[a.initial()] = b.initial();
  used[b.initial()] = 1;
  while (!q.empty()) {
    const StateId s = q.front();
    q.pop_front();
    const StateId t = map[s];
    if (a.is_marked(s) != b.is_marked(t) || a.out(s).size() != b.out(t).size())
      return false;
    for (const auto& e : a.out(s)) {
      auto n = b.successor(t, a.event(e.event));
      if (!n)
        return false;
      if (map[e.target] == brickctl::kNoState) {
        if (used[*n])
          return false;
        map[e.target] = *n;
        used[*n] = 1;
        q.push_back(e.target);
      } else if (map[e.target] != *n) {
        return false;
      }
    }
  }
  return std::find(map.begin(), map.end(), brickctl::kNoState) == map.end();
}

// Plain-data EFAs for random testing: guards are conjunctions of
// `var op const` atoms, actions `var := var + delta` or `var := const`.
struct Atom {
  int var;
  int op; // 0 ==, 1 !=, 2 <, 3 <=, 4 >, 5 >=
  int value;
};

struct Update {
  int var;
  bool relative;
  int value;
};

struct PlainTransition {
  int source;
  int event; // index into a shared event pool
  std::vector<Atom> guard;
  std::vector<Update> actions;
  int target;
};

struct PlainEfa {
  int locations = 1;
  std::vector<char> marked;
  std::vector<int> alphabet; // sorted event indices
  std::vector<PlainTransition> transitions;
};

inline bool holds(const Atom& a, const std::vector<int>& v) {
  switch (a.op) {
  case 0:
    return v[a.var] == a.value;
  case 1:
    return v[a.var] != a.value;
  case 2:
    return v[a.var] < a.value;
  case 3:
    return v[a.var] <= a.value;
  case 4:
    return v[a.var] > a.value;
  default:
    return v[a.var] >= a.value;
  }
}

/// Words of length <= depth of the plain EFAs run side by side: a shared event
/// needs one enabled transition in every owner; updates apply in component
/// order, and a value leaving [0, domain_hi] disables the step.
inline std::set<std::vector<int>> plain_language(const std::vector<PlainEfa>& net,
                                                 const std::vector<int>& init, int domain_hi,
                                                 int depth) {
  std::set<int> events;
  for (const auto& a : net)
    events.insert(a.alphabet.begin(), a.alphabet.end());
  std::set<std::vector<int>> out;
  std::vector<int> word;

  auto rec = [&](auto&& self, const std::vector<int>& locs, const std::vector<int>& v, int d) -> void {
    out.insert(word);
    if (d == 0)
      return;
    for (int e : events) {
      // Every combination of enabled transitions of the owners.
      std::vector<std::pair<std::vector<int>, std::vector<int>>> states{{locs, v}};
      for (std::size_t c = 0; c < net.size(); ++c) {
        if (!std::binary_search(net[c].alphabet.begin(), net[c].alphabet.end(), e))
          continue;
        std::vector<std::pair<std::vector<int>, std::vector<int>>> next;
        for (const auto& [l, val] : states)
          for (const auto& t : net[c].transitions) {
            if (t.source != locs[c] || t.event != e)
              continue;
            bool g = true;
            for (const auto& a : t.guard)
              g = g && holds(a, v);
            if (!g)
              continue;
            auto nl = l;
            auto nv = val;
            nl[c] = t.target;
            bool defined = true;
            for (const auto& u : t.actions) {
              nv[u.var] = u.relative ? nv[u.var] + u.value : u.value;
              defined = defined && nv[u.var] >= 0 && nv[u.var] <= domain_hi;
            }
            if (defined)
              next.push_back({nl, nv});
          }
        states = std::move(next);
      }
      for (const auto& [l, val] : states) {
        word.push_back(e);
        self(self, l, val, d - 1);
        word.pop_back();
      }
    }
  };
  std::vector<int> locs(net.size(), 0);
  rec(rec, locs, init, depth);
  return out;
}

} // namespace oracle
