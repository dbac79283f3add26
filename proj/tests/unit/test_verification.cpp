#include "brickctl/verification.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <deque>

using namespace brickctl;

namespace {

const StructureSpec kSingle(1, 1, {1}, {{1, 1}});
const StructureSpec kRow(3, 1, {1, 1, 1}, {{1, 1}});
const StructureSpec kTrap(2, 2, {1, 2, 2, 1}, {{1, 1}});

/// Joint behavior of n unsupervised plants straight from the rules: a unload
/// by robot k needs k's own edge and every other robot's foreign-unload edge.
struct JointOracle {
  struct Node {
    Heights hs;
    std::vector<oracle::PlantState> robots;
    auto operator<=>(const Node&) const = default;
  };
  std::map<Node, std::vector<std::pair<std::pair<int, Event>, Node>>> edges;
  std::map<Node, std::size_t> depth;
  std::set<Node> coaccessible;
  std::size_t transitions = 0;

  JointOracle(const StructureSpec& s, int n) {
    const auto k = oracle::plant(s, 1);
    if (k.edges.empty())
      return;
    Node init{k.initial.hs, std::vector<oracle::PlantState>(n, k.initial)};
    std::deque<Node> queue{init};
    depth[init] = 0;
    while (!queue.empty()) {
      Node x = queue.front();
      queue.pop_front();
      auto& out = edges[x];
      for (int r = 0; r < n; ++r)
        for (const auto& [e, next] : k.edges.at(x.robots[r])) {
          if (e.is_other_unload())
            continue;
          Node y = x;
          if (e.is_unload()) {
            bool permitted = true;
            for (int o = 0; o < n; ++o)
              if (o != r) {
                const auto& oe = k.edges.at(x.robots[o]);
                permitted &= std::any_of(oe.begin(), oe.end(), [&](const auto& p) {
                  return p.first == Event::unload_other(e.cell);
                });
              }
            if (!permitted)
              continue;
            for (int o = 0; o < n; ++o)
              if (o != r)
                for (const auto& [oe, on] : k.edges.at(x.robots[o]))
                  if (oe == Event::unload_other(e.cell))
                    y.robots[o] = on;
          }
          y.robots[r] = next;
          y.hs = next.hs;
          out.push_back({{r + 1, e}, y});
          ++transitions;
          if (!depth.contains(y)) {
            depth[y] = depth[x] + 1;
            queue.push_back(y);
          }
        }
    }
    for (const auto& [x, _] : edges)
      if (std::all_of(x.robots.begin(), x.robots.end(), [&](const auto& p) { return k.marked(p, s); }))
        coaccessible.insert(x);
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& [x, out] : edges)
        if (!coaccessible.contains(x))
          for (const auto& [_, y] : out)
            if (coaccessible.contains(y)) {
              grew |= coaccessible.insert(x).second;
              break;
            }
    }
  }

  bool nonblocking() const { return !edges.empty() && coaccessible.size() == edges.size(); }

  std::size_t shortest_blocking() const {
    std::size_t best = SIZE_MAX;
    for (const auto& [x, d] : depth)
      if (!coaccessible.contains(x))
        best = std::min(best, d);
    return best;
  }
};

ExplicitAutomaton mark_everything(const ExplicitAutomaton& a) {
  std::vector<LabeledTransition> ts;
  for (StateId s = 0; s < a.num_states(); ++s)
    for (const auto& e : a.out(s))
      ts.push_back({s, a.event(e.event), e.target});
  return ExplicitAutomaton::build({a.alphabet().begin(), a.alphabet().end()}, a.num_states(), a.initial(),
                                  std::vector<char>(a.num_states(), 1), std::move(ts),
                                  a.shared_labels());
}

} // namespace

TEST_CASE("1x1 joint for two robots agrees with the rule oracle") {
  const auto r = verify_theorem(kSingle, 2);
  const JointOracle o(kSingle, 2);
  CHECK(r.supervisor_exists);
  CHECK(r.nonblocking);
  CHECK(o.nonblocking());
  CHECK(r.states == o.edges.size());
  CHECK(r.transitions == o.transitions);
  CHECK(!r.witness);
}

TEST_CASE("unsupervised plants agree with the rule oracle") {
  for (const auto& s : {kSingle, kRow, kTrap}) {
    const auto r = verify_plant(s, 2);
    const JointOracle o(s, 2);
    CHECK(r.states == o.edges.size());
    CHECK(r.transitions == o.transitions);
    CHECK(r.nonblocking == o.nonblocking());
  }
}

TEST_CASE("a single robot's joint is its refined supervisor") {
  auto s = synthesize(kTrap, 1);
  REQUIRE(s.supervisor);
  std::vector<ExplicitAutomaton> one{refine(*s.supervisor, 1)};
  CHECK(oracle::isomorphic(joint(one).automaton, one.front()));
}

TEST_CASE("negative control: the raw plant as supervisor blocks") {
  const auto r = verify_plant(kTrap, 2);
  CHECK(!r.nonblocking);
  REQUIRE(r.witness);
  const JointOracle o(kTrap, 2);
  CHECK(r.witness->size() == o.shortest_blocking());

  // Replay the witness through the oracle and land in a dead end.
  JointOracle::Node x = o.edges.begin()->first;
  for (const auto& [node, d] : o.depth)
    if (d == 0)
      x = node;
  for (const auto& t : *r.witness) {
    const auto& out = o.edges.at(x);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) {
      return p.first.first == t.robot && p.first.second == reindex(t.event, t.robot, 1);
    });
    REQUIRE(it != out.end());
    x = it->second;
  }
  CHECK(!o.coaccessible.contains(x));
  CHECK(std::any_of(x.robots.begin(), x.robots.end(), [](const auto& p) { return p.inside; }));

  const auto text = to_text(r);
  CHECK(text.starts_with("RESULT nonblocking=false "));
  CHECK(text.find("\nWITNESS step=1 ") != std::string::npos);
}

TEST_CASE("supervisors stay nonblocking where the plant alone blocks") {
  for (int n : {1, 2, 3}) {
    const auto r = verify_theorem(kTrap, n);
    CHECK(r.nonblocking);
  }
}

TEST_CASE("no supervisor") {
  StructureSpec isolated(3, 3, {0, 0, 0, 0, 2, 0, 0, 0, 0}, {{1, 1}});
  const auto r = verify_theorem(isolated, 2);
  CHECK(!r.supervisor_exists);
  CHECK(!r.nonblocking);
  CHECK(to_text(r) == "RESULT no supervisor exists\n");
}

TEST_CASE("report text") {
  VerificationReport r;
  r.nonblocking = true;
  r.states = 12;
  r.transitions = 30;
  CHECK(to_text(r) == "RESULT nonblocking=true states=12 trans=30\n");
}

TEST_CASE("joint invariants") {
  for (const auto& spec : {kSingle, kRow, kTrap}) {
    auto s = synthesize(spec, 1);
    REQUIRE(s.supervisor);
    for (int n : {1, 2}) {
      std::vector<ExplicitAutomaton> parts;
      for (int j = 1; j <= n; ++j)
        parts.push_back(refine(replicate(*s.supervisor, j), n));
      const auto p = joint(parts);
      const auto inv = check_joint_invariants(p, parts, spec);
      CHECK(inv.ok());
      CHECK(!inv.vacuous);
      CHECK(check_permission_semantics(p, parts).ok());
    }
  }

  auto s = synthesize(kSingle, 1);
  REQUIRE(s.supervisor);
  std::vector<ExplicitAutomaton> bad{mark_everything(refine(*s.supervisor, 1))};
  const auto inv = check_joint_invariants(joint(bad), bad, kSingle);
  CHECK(!inv.ok());

  const auto empty = check_joint_invariants(ProductResult{}, {}, kSingle);
  CHECK(empty.vacuous);
  CHECK(empty.ok());
}

TEST_CASE("permission semantics catches a joint built without synchronization") {
  auto s = synthesize(kRow, 1);
  REQUIRE(s.supervisor);
  std::vector<ExplicitAutomaton> parts{refine(replicate(*s.supervisor, 1), 2),
                                       refine(replicate(*s.supervisor, 2), 2)};
  // Robot 2 no longer hears about robot 1's unload.
  std::vector<Event> own;
  for (const auto& e : parts[1].alphabet())
    if (e.owner != Owner::Indexed)
      own.push_back(e);
  auto drop = [](const Event& e) {
    return e.owner == Owner::Indexed ? std::vector<Event>{} : std::vector<Event>{e};
  };
  std::vector<ExplicitAutomaton> deaf{parts[0], parts[1].relabel(drop, own)};
  const auto p = joint(deaf);
  CHECK(!check_permission_semantics(p, parts).ok());
}

TEST_CASE("state cap") {
  VerifyOptions o;
  o.state_cap = 50;
  CHECK_THROWS_AS(verify_theorem(kTrap, 2, o), ResourceLimitError);
}
