#include "brickctl/efa.hpp"

#include "brickctl/explicit.hpp"
#include "key_store.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace brickctl {

// ---------------------------------------------------------------------------
// Variables

VarId VariableTable::declare(std::string name, int lo, int hi, int initial) {
  if (index_.contains(name))
    throw ModelError("duplicate variable " + name);
  if (lo > hi)
    throw ModelError("empty domain for variable " + name);
  if (initial < lo || initial > hi)
    throw ModelError("initial value of " + name + " outside its domain");
  if (lo < std::numeric_limits<std::int16_t>::min() || hi > std::numeric_limits<std::int16_t>::max())
    throw ModelError("domain of " + name + " too wide");
  const auto id = static_cast<VarId>(vars_.size());
  index_.emplace(name, id);
  vars_.push_back({std::move(name), lo, hi, initial});
  return id;
}

std::optional<VarId> VariableTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

VarId VariableTable::id(std::string_view name) const {
  if (auto v = find(name))
    return *v;
  throw ModelError("undeclared variable " + std::string(name));
}

Valuation Valuation::initial(const VariableTable& table) {
  std::vector<int> v;
  v.reserve(table.size());
  for (const auto& var : table.variables())
    v.push_back(var.initial);
  return Valuation(std::move(v));
}

// ---------------------------------------------------------------------------
// Guards

struct Guard::Node {
  explicit Node(Kind k, bool v = true) : kind(k), value(v) {}

  Kind kind;
  bool value; // Const
  CmpOp op = CmpOp::Eq;
  Term lhs = Term::constant(0);
  Term rhs = Term::constant(0);
  std::vector<Guard> children;
};

namespace {

bool compare(int a, CmpOp op, int b) {
  switch (op) {
  case CmpOp::Eq: return a == b;
  case CmpOp::Ne: return a != b;
  case CmpOp::Lt: return a < b;
  case CmpOp::Le: return a <= b;
  case CmpOp::Gt: return a > b;
  case CmpOp::Ge: return a >= b;
  }
  return false;
}

const char* op_text(CmpOp op) {
  switch (op) {
  case CmpOp::Eq: return "=";
  case CmpOp::Ne: return "!=";
  case CmpOp::Lt: return "<";
  case CmpOp::Le: return "<=";
  case CmpOp::Gt: return ">";
  case CmpOp::Ge: return ">=";
  }
  return "?";
}

} // namespace

Guard Guard::truth() {
  static const Guard t(std::make_shared<const Node>(Node(Kind::Const, true)));
  return t;
}

Guard Guard::falsity() {
  static const Guard f(std::make_shared<const Node>(Node(Kind::Const, false)));
  return f;
}

Guard Guard::cmp(Term lhs, CmpOp op, Term rhs) {
  if (lhs.is_constant() && rhs.is_constant())
    return compare(lhs.offset(), op, rhs.offset()) ? truth() : falsity();
  Node n{Kind::Cmp};
  n.op = op;
  n.lhs = lhs;
  n.rhs = rhs;
  return Guard(std::make_shared<const Node>(std::move(n)));
}

Guard Guard::all(std::vector<Guard> parts) {
  std::vector<Guard> kept;
  for (auto& p : parts) {
    if (p.is_false())
      return falsity();
    if (p.is_true())
      continue;
    if (p.kind() == Kind::And)
      for (const auto& c : p.node_->children)
        kept.push_back(c);
    else
      kept.push_back(std::move(p));
  }
  if (kept.empty())
    return truth();
  if (kept.size() == 1)
    return kept.front();
  Node n{Kind::And};
  n.children = std::move(kept);
  return Guard(std::make_shared<const Node>(std::move(n)));
}

Guard Guard::any(std::vector<Guard> parts) {
  std::vector<Guard> kept;
  for (auto& p : parts) {
    if (p.is_true())
      return truth();
    if (p.is_false())
      continue;
    if (p.kind() == Kind::Or)
      for (const auto& c : p.node_->children)
        kept.push_back(c);
    else
      kept.push_back(std::move(p));
  }
  if (kept.empty())
    return falsity();
  if (kept.size() == 1)
    return kept.front();
  Node n{Kind::Or};
  n.children = std::move(kept);
  return Guard(std::make_shared<const Node>(std::move(n)));
}

Guard Guard::negate(Guard g) {
  if (g.kind() == Kind::Const)
    return g.is_true() ? falsity() : truth();
  if (g.kind() == Kind::Not)
    return g.node_->children.front();
  Node n{Kind::Not};
  n.children.push_back(std::move(g));
  return Guard(std::make_shared<const Node>(std::move(n)));
}

Guard Guard::exclusive(Guard a, Guard b) {
  if (a.kind() == Kind::Const)
    return a.is_true() ? negate(std::move(b)) : b;
  if (b.kind() == Kind::Const)
    return b.is_true() ? negate(std::move(a)) : a;
  Node n{Kind::Xor};
  n.children = {std::move(a), std::move(b)};
  return Guard(std::make_shared<const Node>(std::move(n)));
}

Guard::Kind Guard::kind() const noexcept { return node_->kind; }
bool Guard::is_true() const noexcept { return node_->kind == Kind::Const && node_->value; }
bool Guard::is_false() const noexcept { return node_->kind == Kind::Const && !node_->value; }

std::vector<Guard> Guard::conjuncts() const {
  if (kind() == Kind::And)
    return node_->children;
  return {*this};
}

bool Guard::eval(std::span<const int> v) const {
  const Node& n = *node_;
  switch (n.kind) {
  case Kind::Const:
    return n.value;
  case Kind::Cmp:
    return compare(n.lhs.eval(v), n.op, n.rhs.eval(v));
  case Kind::And:
    for (const auto& c : n.children)
      if (!c.eval(v))
        return false;
    return true;
  case Kind::Or:
    for (const auto& c : n.children)
      if (c.eval(v))
        return true;
    return false;
  case Kind::Not:
    return !n.children.front().eval(v);
  case Kind::Xor:
    return n.children[0].eval(v) != n.children[1].eval(v);
  }
  return false;
}

std::optional<VarId> Guard::max_var() const {
  const Node& n = *node_;
  std::optional<VarId> best;
  auto take = [&](std::optional<VarId> v) {
    if (v && (!best || *v > *best))
      best = v;
  };
  if (n.kind == Kind::Cmp) {
    if (!n.lhs.is_constant())
      take(n.lhs.var());
    if (!n.rhs.is_constant())
      take(n.rhs.var());
  }
  for (const auto& c : n.children)
    take(c.max_var());
  return best;
}

namespace {

std::string term_text(const Term& t, const VariableTable& table) {
  if (t.is_constant())
    return std::to_string(t.offset());
  std::string s = table[t.var()].name;
  if (t.offset() > 0)
    s += "+" + std::to_string(t.offset());
  else if (t.offset() < 0)
    s += std::to_string(t.offset());
  return s;
}

} // namespace

std::string Guard::to_string(const VariableTable& table) const {
  const Node& n = *node_;
  auto join = [&](const char* sep) {
    std::string s = "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i)
        s += sep;
      s += n.children[i].to_string(table);
    }
    return s + ")";
  };
  switch (n.kind) {
  case Kind::Const: return n.value ? "TRUE" : "FALSE";
  case Kind::Cmp:
    return term_text(n.lhs, table) + " " + op_text(n.op) + " " + term_text(n.rhs, table);
  case Kind::And: return join(" & ");
  case Kind::Or: return join(" | ");
  case Kind::Not: return "!" + n.children.front().to_string(table);
  case Kind::Xor: return join(" ^ ");
  }
  return "?";
}

Guard operator&&(Guard a, Guard b) { return Guard::all({std::move(a), std::move(b)}); }
Guard operator||(Guard a, Guard b) { return Guard::any({std::move(a), std::move(b)}); }
Guard operator!(Guard a) { return Guard::negate(std::move(a)); }

bool eval_guard(const Guard& g, const Valuation& v) { return g.eval(v.values()); }

namespace {

bool apply_in_place(const ActionList& actions, std::span<int> v, const VariableTable& table) {
  for (const auto& a : actions) {
    const int value = a.value.eval(v);
    const auto& var = table[a.target];
    if (value < var.lo || value > var.hi)
      return false;
    v[a.target] = value;
  }
  return true;
}

} // namespace

std::optional<Valuation> apply_actions(const ActionList& actions, const Valuation& v,
                                       const VariableTable& table) {
  std::vector<int> next(v.values().begin(), v.values().end());
  if (!apply_in_place(actions, next, table))
    return std::nullopt;
  return Valuation(std::move(next));
}

// ---------------------------------------------------------------------------
// Extended automata

ExtendedAutomaton::ExtendedAutomaton(std::string name, std::shared_ptr<const VariableTable> vars)
    : name_(std::move(name)), vars_(std::move(vars)) {
  if (!vars_)
    throw ModelError("automaton " + name_ + " has no variable table");
}

LocId ExtendedAutomaton::add_location(std::string name, bool marked) {
  locations_.push_back(std::move(name));
  marked_.push_back(marked ? 1 : 0);
  return static_cast<LocId>(locations_.size() - 1);
}

void ExtendedAutomaton::set_initial(LocId l) {
  if (l >= locations_.size())
    throw ModelError("initial location out of range in " + name_);
  initial_ = l;
}

void ExtendedAutomaton::add_event(const Event& e) {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), e);
  if (it == alphabet_.end() || *it != e)
    alphabet_.insert(it, e);
}

bool ExtendedAutomaton::has_event(const Event& e) const {
  return std::binary_search(alphabet_.begin(), alphabet_.end(), e);
}

void ExtendedAutomaton::add_transition(LocId source, const Event& e, Guard g, ActionList actions,
                                       LocId target) {
  if (source >= locations_.size() || target >= locations_.size())
    throw ModelError("transition endpoint out of range in " + name_);
  const std::size_t nvars = vars_->size();
  if (auto mv = g.max_var(); mv && *mv >= nvars)
    throw ModelError("guard reads an undeclared variable in " + name_);
  for (const auto& a : actions)
    if (a.target >= nvars || (!a.value.is_constant() && a.value.var() >= nvars))
      throw ModelError("action touches an undeclared variable in " + name_);
  add_event(e);
  transitions_.push_back({source, e, std::move(g), std::move(actions), target});
}

namespace {

void require_shared_table(std::span<const ExtendedAutomaton> efas) {
  for (const auto& a : efas)
    if (a.variables() != efas.front().variables())
      throw ModelError("automata " + efas.front().name() + " and " + a.name() +
                       " do not share a variable table");
}

std::set<VarId> written(const ActionList& actions) {
  std::set<VarId> w;
  for (const auto& a : actions)
    w.insert(a.target);
  return w;
}

// For every event shared by several components, at most one of them may write
// any given variable.
void check_write_conflicts(std::span<const ExtendedAutomaton> efas) {
  std::vector<Event> events;
  for (const auto& a : efas)
    events.insert(events.end(), a.alphabet().begin(), a.alphabet().end());
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  for (const auto& e : events) {
    std::vector<std::set<VarId>> writes;
    for (const auto& a : efas) {
      if (!a.has_event(e))
        continue;
      std::set<VarId> w;
      for (const auto& t : a.transitions())
        if (t.event == e)
          w.merge(written(t.actions));
      writes.push_back(std::move(w));
    }
    for (std::size_t i = 0; i < writes.size(); ++i)
      for (std::size_t j = i + 1; j < writes.size(); ++j)
        for (VarId v : writes[i])
          if (writes[j].contains(v))
            throw ModelError("write conflict on " + (*efas.front().variables())[v].name +
                             " for event " + to_string(e));
  }
}

} // namespace

ExtendedAutomaton compose(std::span<const ExtendedAutomaton> efas) {
  if (efas.empty())
    throw ModelError("compose needs at least one automaton");
  require_shared_table(efas);
  check_write_conflicts(efas);

  std::string name;
  for (const auto& a : efas)
    name += (name.empty() ? "" : "||") + a.name();
  ExtendedAutomaton out(name, efas.front().variables());

  const std::size_t k = efas.size();
  std::vector<std::size_t> radix(k);
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    radix[i] = efas[i].num_locations();
    if (radix[i] == 0)
      throw ModelError("automaton " + efas[i].name() + " has no locations");
    total *= radix[i];
  }

  // Location index is mixed-radix over component locations, first component
  // most significant.
  auto encode = [&](const std::vector<LocId>& locs) {
    std::size_t id = 0;
    for (std::size_t i = 0; i < k; ++i)
      id = id * radix[i] + locs[i];
    return static_cast<LocId>(id);
  };
  auto decode = [&](std::size_t id) {
    std::vector<LocId> locs(k);
    for (std::size_t i = k; i-- > 0;) {
      locs[i] = static_cast<LocId>(id % radix[i]);
      id /= radix[i];
    }
    return locs;
  };

  for (std::size_t id = 0; id < total; ++id) {
    const auto locs = decode(id);
    std::string lname;
    bool marked = true;
    for (std::size_t i = 0; i < k; ++i) {
      lname += (i ? "." : "") + efas[i].location_name(locs[i]);
      marked = marked && efas[i].is_marked(locs[i]);
    }
    out.add_location(lname, marked);
  }
  std::vector<LocId> init(k);
  for (std::size_t i = 0; i < k; ++i)
    init[i] = efas[i].initial();
  out.set_initial(encode(init));

  std::vector<Event> events;
  for (const auto& a : efas)
    events.insert(events.end(), a.alphabet().begin(), a.alphabet().end());
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  for (const auto& e : events)
    out.add_event(e);

  for (std::size_t id = 0; id < total; ++id) {
    const auto locs = decode(id);
    for (const auto& e : events) {
      // Cartesian product over the owners' candidate transitions.
      std::vector<std::vector<const EfaTransition*>> choices;
      std::vector<std::size_t> owners;
      bool blocked = false;
      for (std::size_t i = 0; i < k && !blocked; ++i) {
        if (!efas[i].has_event(e))
          continue;
        std::vector<const EfaTransition*> c;
        for (const auto& t : efas[i].transitions())
          if (t.source == locs[i] && t.event == e)
            c.push_back(&t);
        if (c.empty())
          blocked = true;
        owners.push_back(i);
        choices.push_back(std::move(c));
      }
      if (blocked)
        continue;
      std::vector<std::size_t> pick(owners.size(), 0);
      while (true) {
        std::vector<Guard> guards;
        ActionList actions;
        std::vector<LocId> target = locs;
        for (std::size_t j = 0; j < owners.size(); ++j) {
          const EfaTransition& t = *choices[j][pick[j]];
          guards.push_back(t.guard);
          actions.insert(actions.end(), t.actions.begin(), t.actions.end());
          target[owners[j]] = t.target;
        }
        Guard g = Guard::all(std::move(guards));
        if (!g.is_false())
          out.add_transition(static_cast<LocId>(id), e, std::move(g), std::move(actions),
                             encode(target));
        std::size_t j = 0;
        while (j < pick.size() && ++pick[j] == choices[j].size())
          pick[j++] = 0;
        if (j == pick.size())
          break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flattening

ExplicitAutomaton flatten(const ExtendedAutomaton& efa, const FlattenOptions& options) {
  return flatten(std::span<const ExtendedAutomaton>(&efa, 1), options);
}

ExplicitAutomaton flatten(std::span<const ExtendedAutomaton> network, const FlattenOptions& options) {
  if (network.empty())
    throw ModelError("flatten needs at least one automaton");
  require_shared_table(network);
  check_write_conflicts(network);
  const VariableTable& table = *network.front().variables();
  const std::size_t k = network.size();
  const std::size_t nvars = table.size();

  std::vector<Event> events;
  for (const auto& a : network)
    events.insert(events.end(), a.alphabet().begin(), a.alphabet().end());
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  const std::size_t ne = events.size();
  auto event_index = [&](const Event& e) {
    return static_cast<std::size_t>(std::lower_bound(events.begin(), events.end(), e) - events.begin());
  };

  // owners[e]: components having e in their alphabet.
  std::vector<std::vector<std::uint32_t>> owners(ne);
  // index[c][loc * ne + e] .. index[c][loc * ne + e + 1] spans slots[c].
  std::vector<std::vector<std::uint32_t>> index(k), slots(k);
  for (std::size_t c = 0; c < k; ++c) {
    const auto& a = network[c];
    if (a.num_locations() == 0 || a.num_locations() > 32767)
      throw ModelError("automaton " + a.name() + " has an unsupported location count");
    for (const auto& e : a.alphabet())
      owners[event_index(e)].push_back(static_cast<std::uint32_t>(c));
    const std::size_t cells = a.num_locations() * ne;
    std::vector<std::uint32_t> count(cells + 1, 0);
    const auto ts = a.transitions();
    for (const auto& t : ts)
      ++count[t.source * ne + event_index(t.event) + 1];
    for (std::size_t i = 0; i < cells; ++i)
      count[i + 1] += count[i];
    std::vector<std::uint32_t> fill(count.begin(), count.end() - 1);
    std::vector<std::uint32_t> s(ts.size());
    for (std::uint32_t i = 0; i < ts.size(); ++i)
      s[fill[ts[i].source * ne + event_index(ts[i].event)]++] = i;
    index[c] = std::move(count);
    slots[c] = std::move(s);
  }

  detail::KeyStore<std::int16_t> store(k + nvars);
  std::vector<std::int16_t> key(k + nvars);
  for (std::size_t c = 0; c < k; ++c)
    key[c] = static_cast<std::int16_t>(network[c].initial());
  const Valuation init = Valuation::initial(table);
  for (std::size_t v = 0; v < nvars; ++v)
    key[k + v] = static_cast<std::int16_t>(init[static_cast<VarId>(v)]);
  if (options.admit && !options.admit(init.values()))
    return ExplicitAutomaton::build(events, 0, kNoState, {}, {});
  store.intern(key);

  std::vector<LabeledTransition> transitions;
  std::vector<int> vals(nvars), next(nvars);
  std::vector<const EfaTransition*> chosen(k);

  for (std::uint32_t s = 0; s < store.size(); ++s) {
    {
      auto row = store.key(s);
      for (std::size_t v = 0; v < nvars; ++v)
        vals[v] = row[k + v];
    }
    for (std::size_t e = 0; e < ne; ++e) {
      bool enabled = true;
      for (std::uint32_t c : owners[e]) {
        const auto loc = static_cast<std::size_t>(store.key(s)[c]);
        const auto& idx = index[c];
        const EfaTransition* hit = nullptr;
        for (std::uint32_t i = idx[loc * ne + e]; i < idx[loc * ne + e + 1]; ++i) {
          const EfaTransition& t = network[c].transitions()[slots[c][i]];
          if (!t.guard.eval(vals))
            continue;
          if (hit)
            throw ModelError("automaton " + network[c].name() + " is nondeterministic on " +
                             to_string(events[e]) + " at location " +
                             network[c].location_name(static_cast<LocId>(loc)));
          hit = &t;
        }
        if (!hit) {
          enabled = false;
          break;
        }
        chosen[c] = hit;
      }
      if (!enabled)
        continue;
      next = vals;
      bool defined = true;
      for (std::uint32_t c : owners[e])
        if (!apply_in_place(chosen[c]->actions, next, table)) {
          defined = false;
          break;
        }
      if (!defined)
        continue;
      if (options.admit && !options.admit(next))
        continue;
      auto row = store.key(s);
      std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), key.begin());
      for (std::uint32_t c : owners[e])
        key[c] = static_cast<std::int16_t>(chosen[c]->target);
      for (std::size_t v = 0; v < nvars; ++v)
        key[k + v] = static_cast<std::int16_t>(next[v]);
      auto [target, inserted] = store.intern(key);
      if (inserted && store.size() > options.state_cap)
        throw ResourceLimitError(options.state_cap);
      transitions.push_back({s, events[e], target});
    }
  }

  const std::size_t n = store.size();
  std::vector<char> marked(n, 0);
  for (std::uint32_t s = 0; s < n; ++s) {
    bool m = true;
    auto row = store.key(s);
    for (std::size_t c = 0; c < k && m; ++c)
      m = network[c].is_marked(static_cast<LocId>(row[c]));
    marked[s] = m ? 1 : 0;
  }

  auto labels = std::make_shared<StateLabels>();
  for (const auto& a : network)
    labels->components.push_back(a.name());
  for (const auto& v : table.variables())
    labels->variables.push_back(v.name);
  labels->data = std::move(store).release();

  return ExplicitAutomaton::build(std::move(events), n, 0, std::move(marked), std::move(transitions),
                                  std::move(labels));
}

} // namespace brickctl
