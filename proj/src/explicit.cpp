#include "brickctl/explicit.hpp"

#include "key_store.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <sstream>

namespace brickctl {

std::optional<std::size_t> StateLabels::variable_column(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name)
      return components.size() + i;
  return std::nullopt;
}

std::optional<std::size_t> StateLabels::component_column(std::string_view name) const {
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i] == name)
      return i;
  return std::nullopt;
}

ExplicitAutomaton ExplicitAutomaton::build(std::vector<Event> alphabet, std::size_t num_states,
                                           StateId initial, std::vector<char> marked,
                                           std::vector<LabeledTransition> transitions,
                                           std::shared_ptr<const StateLabels> labels) {
  for (const auto& t : transitions)
    alphabet.push_back(t.event);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  ExplicitAutomaton a;
  a.alphabet_ = std::move(alphabet);
  if (num_states == 0)
    return a;
  if (initial >= num_states)
    throw ModelError("initial state out of range");
  if (marked.size() != num_states)
    throw ModelError("marking vector does not match the state count");
  if (labels && labels->data.size() != num_states * labels->stride())
    throw ModelError("state labels do not match the state count");

  a.num_states_ = num_states;
  a.initial_ = initial;
  a.marked_ = std::move(marked);
  a.labels_ = std::move(labels);

  struct Flat {
    StateId s;
    EventId e;
    StateId t;
  };
  std::vector<Flat> flat;
  flat.reserve(transitions.size());
  for (const auto& t : transitions) {
    if (t.source >= num_states || t.target >= num_states)
      throw ModelError("transition endpoint out of range");
    flat.push_back({t.source, *a.event_id(t.event), t.target});
  }
  std::sort(flat.begin(), flat.end(), [](const Flat& x, const Flat& y) {
    return std::tie(x.s, x.e, x.t) < std::tie(y.s, y.e, y.t);
  });
  flat.erase(std::unique(flat.begin(), flat.end(),
                         [](const Flat& x, const Flat& y) {
                           return x.s == y.s && x.e == y.e && x.t == y.t;
                         }),
             flat.end());

  a.offsets_.assign(num_states + 1, 0);
  a.edges_.reserve(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (i > 0 && flat[i].s == flat[i - 1].s && flat[i].e == flat[i - 1].e)
      throw ModelError("nondeterministic transitions on " + to_string(a.alphabet_[flat[i].e]) +
                       " from state " + std::to_string(flat[i].s));
    ++a.offsets_[flat[i].s + 1];
    a.edges_.push_back({flat[i].e, flat[i].t});
  }
  for (std::size_t s = 0; s < num_states; ++s)
    a.offsets_[s + 1] += a.offsets_[s];
  return a;
}

std::size_t ExplicitAutomaton::num_marked() const {
  return static_cast<std::size_t>(std::count(marked_.begin(), marked_.end(), 1));
}

std::optional<EventId> ExplicitAutomaton::event_id(const Event& e) const {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), e);
  if (it == alphabet_.end() || *it != e)
    return std::nullopt;
  return static_cast<EventId>(it - alphabet_.begin());
}

std::optional<StateId> ExplicitAutomaton::successor(StateId s, EventId e) const {
  auto edges = out(s);
  auto it = std::lower_bound(edges.begin(), edges.end(), e,
                             [](const Edge& x, EventId v) { return x.event < v; });
  if (it == edges.end() || it->event != e)
    return std::nullopt;
  return it->target;
}

std::optional<StateId> ExplicitAutomaton::successor(StateId s, const Event& e) const {
  auto id = event_id(e);
  if (!id)
    return std::nullopt;
  return successor(s, *id);
}

std::vector<LabeledTransition> ExplicitAutomaton::transitions() const {
  std::vector<LabeledTransition> ts;
  ts.reserve(edges_.size());
  for (StateId s = 0; s < num_states_; ++s)
    for (const auto& e : out(s))
      ts.push_back({s, alphabet_[e.event], e.target});
  return ts;
}

ExplicitAutomaton ExplicitAutomaton::restrict(std::span<const char> keep_state,
                                              const std::function<bool(StateId, const Edge&)>& keep_edge) const {
  if (empty() || !keep_state[initial_]) {
    ExplicitAutomaton a;
    a.alphabet_ = alphabet_;
    return a;
  }
  std::vector<StateId> remap(num_states_, kNoState);
  std::size_t n = 0;
  for (StateId s = 0; s < num_states_; ++s)
    if (keep_state[s])
      remap[s] = static_cast<StateId>(n++);

  ExplicitAutomaton a;
  a.alphabet_ = alphabet_;
  a.num_states_ = n;
  a.initial_ = remap[initial_];
  a.marked_.reserve(n);
  a.offsets_.assign(n + 1, 0);
  std::shared_ptr<StateLabels> labels;
  if (labels_) {
    labels = std::make_shared<StateLabels>();
    labels->components = labels_->components;
    labels->variables = labels_->variables;
    labels->data.reserve(n * labels_->stride());
  }
  for (StateId s = 0; s < num_states_; ++s) {
    if (!keep_state[s])
      continue;
    const StateId ns = remap[s];
    a.marked_.push_back(marked_[s]);
    if (labels) {
      auto row = labels_->row(s);
      labels->data.insert(labels->data.end(), row.begin(), row.end());
    }
    for (const auto& e : out(s)) {
      if (remap[e.target] == kNoState)
        continue;
      if (keep_edge && !keep_edge(s, e))
        continue;
      a.edges_.push_back({e.event, remap[e.target]});
      ++a.offsets_[ns + 1];
    }
  }
  for (std::size_t s = 0; s < n; ++s)
    a.offsets_[s + 1] += a.offsets_[s];
  a.labels_ = std::move(labels);
  return a;
}

ExplicitAutomaton ExplicitAutomaton::relabel(const std::function<std::vector<Event>(const Event&)>& f,
                                             std::vector<Event> alphabet) const {
  std::vector<LabeledTransition> ts;
  ts.reserve(edges_.size());
  for (StateId s = 0; s < num_states_; ++s)
    for (const auto& e : out(s))
      for (const auto& ev : f(alphabet_[e.event]))
        ts.push_back({s, ev, e.target});
  return build(std::move(alphabet), num_states_, initial_, marked_, std::move(ts), labels_);
}

bool operator==(const ExplicitAutomaton& a, const ExplicitAutomaton& b) {
  if (a.num_states_ != b.num_states_ || a.alphabet_ != b.alphabet_ || a.initial_ != b.initial_ ||
      a.marked_ != b.marked_ || a.offsets_ != b.offsets_ || a.edges_.size() != b.edges_.size())
    return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i)
    if (a.edges_[i].event != b.edges_[i].event || a.edges_[i].target != b.edges_[i].target)
      return false;
  return true;
}

std::vector<char> accessible(const ExplicitAutomaton& a) {
  std::vector<char> seen(a.num_states(), 0);
  if (a.empty())
    return seen;
  std::vector<StateId> stack{a.initial()};
  seen[a.initial()] = 1;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const auto& e : a.out(s))
      if (!seen[e.target]) {
        seen[e.target] = 1;
        stack.push_back(e.target);
      }
  }
  return seen;
}

std::vector<char> coaccessible(const ExplicitAutomaton& a) {
  const std::size_t n = a.num_states();
  std::vector<std::uint32_t> offsets(n + 1, 0);
  for (StateId s = 0; s < n; ++s)
    for (const auto& e : a.out(s))
      ++offsets[e.target + 1];
  for (std::size_t i = 0; i < n; ++i)
    offsets[i + 1] += offsets[i];
  std::vector<StateId> preds(offsets.back());
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (StateId s = 0; s < n; ++s)
    for (const auto& e : a.out(s))
      preds[fill[e.target]++] = s;

  std::vector<char> seen(n, 0);
  std::vector<StateId> stack;
  for (StateId s = 0; s < n; ++s)
    if (a.is_marked(s)) {
      seen[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (auto i = offsets[s]; i < offsets[s + 1]; ++i)
      if (!seen[preds[i]]) {
        seen[preds[i]] = 1;
        stack.push_back(preds[i]);
      }
  }
  return seen;
}

ExplicitAutomaton trim(const ExplicitAutomaton& a) {
  auto acc = accessible(a);
  const auto co = coaccessible(a);
  for (std::size_t s = 0; s < acc.size(); ++s)
    acc[s] = static_cast<char>(acc[s] && co[s]);
  return a.restrict(acc);
}

bool is_nonblocking(const ExplicitAutomaton& a) {
  if (a.empty())
    return false;
  const auto acc = accessible(a);
  const auto co = coaccessible(a);
  for (std::size_t s = 0; s < acc.size(); ++s)
    if (!acc[s] || !co[s])
      return false;
  return true;
}

ProductResult synchronous_product(std::span<const ExplicitAutomaton> components,
                                  std::size_t state_cap) {
  ProductResult r;
  const std::size_t k = components.size();
  r.arity = k;
  if (k == 0)
    throw ModelError("product needs at least one automaton");

  // Shared alphabet over sync identities; local[c][e] maps a product event to
  // the component's own event id.
  std::vector<Event> events;
  for (const auto& c : components)
    for (const auto& e : c.alphabet())
      events.push_back(sync_identity(e));
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  const std::size_t ne = events.size();
  constexpr EventId kAbsent = ~EventId{0};
  std::vector<std::vector<EventId>> local(k, std::vector<EventId>(ne, kAbsent));
  std::vector<std::vector<EventId>> global(k);
  for (std::size_t c = 0; c < k; ++c) {
    const auto alpha = components[c].alphabet();
    global[c].resize(alpha.size());
    for (EventId i = 0; i < alpha.size(); ++i) {
      const auto g = static_cast<EventId>(
          std::lower_bound(events.begin(), events.end(), sync_identity(alpha[i])) - events.begin());
      if (local[c][g] != kAbsent)
        throw ModelError("component alphabet maps two events to one sync identity");
      local[c][g] = i;
      global[c][i] = g;
    }
  }

  for (const auto& c : components)
    if (c.empty()) {
      r.automaton = ExplicitAutomaton::build(events, 0, kNoState, {}, {});
      return r;
    }

  detail::KeyStore<StateId> store(k);
  std::vector<StateId> key(k), next(k);
  for (std::size_t c = 0; c < k; ++c)
    key[c] = components[c].initial();
  store.intern(key);
  r.parent.push_back(kNoState);
  r.parent_event.push_back(0);

  std::vector<LabeledTransition> ts;
  std::vector<EventId> candidates;
  for (StateId s = 0; s < store.size(); ++s) {
    auto cur = store.key(s);
    std::copy(cur.begin(), cur.end(), key.begin());
    candidates.clear();
    for (std::size_t c = 0; c < k; ++c)
      for (const auto& e : components[c].out(key[c]))
        candidates.push_back(global[c][e.event]);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (EventId g : candidates) {
      bool ok = true;
      for (std::size_t c = 0; c < k && ok; ++c) {
        if (local[c][g] == kAbsent) {
          next[c] = key[c];
          continue;
        }
        auto t = components[c].successor(key[c], local[c][g]);
        if (!t)
          ok = false;
        else
          next[c] = *t;
      }
      if (!ok)
        continue;
      auto [id, inserted] = store.intern(next);
      if (inserted) {
        if (store.size() > state_cap)
          throw ResourceLimitError(state_cap);
        r.parent.push_back(s);
        r.parent_event.push_back(g);
      }
      ts.push_back({s, events[g], id});
    }
  }

  const std::size_t n = store.size();
  std::vector<char> marked(n, 0);
  for (StateId s = 0; s < n; ++s) {
    auto t = store.key(s);
    bool m = true;
    for (std::size_t c = 0; c < k && m; ++c)
      m = components[c].is_marked(t[c]);
    marked[s] = m ? 1 : 0;
  }
  r.tuples = std::move(store).release();
  r.automaton = ExplicitAutomaton::build(std::move(events), n, 0, std::move(marked), std::move(ts));
  // build() sorted the alphabet the same way, so parent_event ids stay valid.
  return r;
}

// ---------------------------------------------------------------------------
// Text format

std::string to_text(const ExplicitAutomaton& a) {
  std::ostringstream os;
  os << "states " << a.num_states() << " initial ";
  if (a.empty())
    os << "none";
  else
    os << a.initial();
  os << " alphabet";
  for (const auto& e : a.alphabet())
    os << ' ' << to_string(e);
  os << '\n';
  for (StateId s = 0; s < a.num_states(); ++s)
    if (a.is_marked(s))
      os << "mark " << s << '\n';
  for (StateId s = 0; s < a.num_states(); ++s)
    for (const auto& e : a.out(s))
      os << "trans " << s << ' ' << to_string(a.event(e.event)) << ' ' << e.target << '\n';
  return os.str();
}

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> w;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ')
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ')
      ++j;
    if (j > i)
      w.push_back(line.substr(i, j - i));
    i = j;
  }
  return w;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

} // namespace

ExplicitAutomaton parse_automaton(std::string_view text) {
  std::size_t lineno = 0;
  bool header = false;
  std::size_t n = 0;
  StateId initial = kNoState;
  std::vector<Event> alphabet;
  std::vector<char> marked;
  std::vector<LabeledTransition> ts;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (line.empty())
      continue;
    const auto w = split_words(line);
    auto state = [&](std::string_view s) {
      auto v = to_uint(s);
      if (!v || *v >= n)
        throw ParseError(lineno, "bad state id '" + std::string(s) + "'");
      return static_cast<StateId>(*v);
    };
    auto event = [&](std::string_view s) {
      auto e = parse_event(s);
      if (!e)
        throw ParseError(lineno, "bad event '" + std::string(s) + "'");
      return *e;
    };
    if (!header) {
      if (w.size() < 5 || w[0] != "states" || w[2] != "initial" || w[4] != "alphabet")
        throw ParseError(lineno, "expected header 'states N initial I alphabet ...'");
      auto count = to_uint(w[1]);
      if (!count)
        throw ParseError(lineno, "bad state count");
      n = *count;
      if (n == 0) {
        if (w[3] != "none")
          throw ParseError(lineno, "empty automaton must have initial 'none'");
      } else {
        initial = state(w[3]);
      }
      for (std::size_t i = 5; i < w.size(); ++i)
        alphabet.push_back(event(w[i]));
      marked.assign(n, 0);
      header = true;
    } else if (w[0] == "mark" && w.size() == 2) {
      marked[state(w[1])] = 1;
    } else if (w[0] == "trans" && w.size() == 4) {
      ts.push_back({state(w[1]), event(w[2]), state(w[3])});
    } else {
      throw ParseError(lineno, "unrecognized line");
    }
  }
  if (!header)
    throw ParseError(lineno, "missing header");
  try {
    return ExplicitAutomaton::build(std::move(alphabet), n, initial, std::move(marked), std::move(ts));
  } catch (const ModelError& e) {
    throw ParseError(lineno, e.what());
  }
}

} // namespace brickctl
