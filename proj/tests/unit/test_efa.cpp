#include "brickctl/efa.hpp"
#include "brickctl/robot.hpp"
#include "brickctl/structure.hpp"
#include "random_efa.hpp"

#include <doctest.h>

using namespace brickctl;

namespace {

std::shared_ptr<VariableTable> one_var(int hi, int init = 0) {
  auto t = std::make_shared<VariableTable>();
  t->declare("h[1,1]", 0, hi, init);
  return t;
}

} // namespace

TEST_CASE("variable table validation") {
  VariableTable t;
  t.declare("a", 0, 2, 0);
  CHECK_THROWS_AS(t.declare("a", 0, 2, 0), ModelError);
  CHECK_THROWS_AS(t.declare("b", 2, 1, 2), ModelError);
  CHECK_THROWS_AS(t.declare("c", 0, 2, 3), ModelError);
  CHECK_THROWS_AS(t.id("zz"), ModelError);
  CHECK(!t.find("zz"));
  CHECK(t.id("a") == 0);
}

TEST_CASE("eval_guard examples") {
  auto t = one_var(2);
  Valuation v({0});
  CHECK(eval_guard(Guard::truth(), v));
  CHECK(eval_guard(eq(Term::variable(0), Term::constant(0)), v));
  CHECK(!eval_guard(eq(Term::variable(0), Term::constant(1)), v));
  CHECK(eval_guard(Guard::exclusive(Guard::truth(), Guard::falsity()), v));
  CHECK(!eval_guard(!Guard::truth(), v));
  CHECK(eval_guard(lt(Term::variable(0), Term::constant(1)) || Guard::falsity(), v));

  // Equal-neighbor guard on a 1x1 grid: the only neighbor is the outside at height 0.
  StructureSpec spec(1, 1, {1}, {{1, 1}});
  VariableTable heights;
  declare_heights(spec, heights);
  CHECK(eval_guard(equal_neighbor_guard(spec, heights, {1, 1}), Valuation::initial(heights)));
}

TEST_CASE("guard constant folding") {
  CHECK(Guard::all({}).is_true());
  CHECK(Guard::any({}).is_false());
  CHECK(Guard::cmp(Term::constant(1), CmpOp::Lt, Term::constant(2)).is_true());
  CHECK((Guard::falsity() && eq(Term::variable(0), Term::constant(0))).is_false());
  CHECK((Guard::truth() || eq(Term::variable(0), Term::constant(0))).is_true());
}

TEST_CASE("apply_actions examples") {
  auto t = one_var(2);
  ActionList inc{{0, Term::variable(0, 1)}};
  auto r = apply_actions(inc, Valuation({0}), *t);
  REQUIRE(r);
  CHECK((*r)[0] == 1);
  CHECK(apply_actions({}, Valuation({2}), *t) == Valuation({2}));
  CHECK(!apply_actions(inc, Valuation({2}), *t));
}

TEST_CASE("compose of disjoint alphabets is the shuffle product") {
  auto t = one_var(1);
  ExtendedAutomaton a("A", t), b("B", t);
  for (int i = 0; i < 2; ++i)
    a.add_location("a" + std::to_string(i), i == 0);
  for (int i = 0; i < 3; ++i)
    b.add_location("b" + std::to_string(i), true);
  a.add_transition(0, Event::local(1, Move::East), Guard::truth(), {}, 1);
  b.add_transition(0, Event::local(2, Move::East), Guard::truth(), {}, 1);
  b.add_transition(1, Event::local(2, Move::West), Guard::truth(), {}, 2);
  std::vector<ExtendedAutomaton> v{a, b};
  auto c = compose(v);
  CHECK(c.num_locations() == 6);
  CHECK(c.transitions().size() == 1 * 3 + 2 * 2);
  auto f = flatten(c);
  CHECK(f.num_states() == 6);
  CHECK(f.num_marked() == 3);
}

TEST_CASE("compose conjoins G1 and G2 guards on a 1x1 grid") {
  StructureSpec spec(1, 1, {1}, {{1, 1}});
  auto t = std::make_shared<VariableTable>();
  declare_heights(spec, *t);
  auto net = structure_network(spec, t, 1);
  REQUIRE(net.size() == 2);
  auto c = compose(net);
  int seen = 0;
  for (const auto& tr : c.transitions())
    if (tr.event == Event::unload(1, {1, 1})) {
      ++seen;
      CHECK(tr.guard.eval(std::vector<int>{0}));
      CHECK(tr.guard.conjuncts().size() >= 2);
      CHECK(tr.actions.size() == 1);
    }
  CHECK(seen == 1);
  CHECK(build_g2(spec, t, 1).num_locations() == 2);
}

TEST_CASE("compose with a neutral self-loop preserves the language") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 20; ++round) {
    auto p = testgen::random_pair(rng);
    auto a = testgen::to_efa(p.a, p.table, "A");
    ExtendedAutomaton id("I", p.table);
    id.add_location("only", true);
    for (auto e : a.alphabet())
      id.add_transition(0, e, Guard::truth(), {}, 0);
    std::vector<ExtendedAutomaton> v{a, id};
    CHECK(oracle::language(flatten(compose(v)), 5) == oracle::language(flatten(a), 5));
  }
}

TEST_CASE("compose rejects write conflicts and foreign tables") {
  auto t = one_var(2);
  ExtendedAutomaton a("A", t), b("B", t);
  a.add_location("a", true);
  b.add_location("b", true);
  const Event e = Event::local(1, Move::Pick);
  a.add_transition(0, e, Guard::truth(), {{0, Term::constant(1)}}, 0);
  b.add_transition(0, e, Guard::truth(), {{0, Term::constant(2)}}, 0);
  std::vector<ExtendedAutomaton> v{a, b};
  CHECK_THROWS_AS(compose(v), ModelError);

  ExtendedAutomaton c("C", one_var(2));
  c.add_location("c", true);
  std::vector<ExtendedAutomaton> w{a, c};
  CHECK_THROWS_AS(compose(w), ModelError);
}

TEST_CASE("add_transition rejects undeclared variables") {
  auto t = one_var(1);
  ExtendedAutomaton a("A", t);
  a.add_location("a", true);
  CHECK_THROWS_AS(a.add_transition(0, Event::local(1, Move::Pick),
                                   eq(Term::variable(3), Term::constant(0)), {}, 0),
                  ModelError);
  CHECK_THROWS_AS(
      a.add_transition(0, Event::local(1, Move::Pick), Guard::truth(), {{5, Term::constant(0)}}, 0),
      ModelError);
}

TEST_CASE("flatten examples") {
  auto t = std::make_shared<VariableTable>();
  ExtendedAutomaton a("A", t);
  a.add_location("only", true);
  a.add_transition(0, Event::local(1, Move::Pick), Guard::truth(), {}, 0);
  auto f = flatten(a);
  CHECK(f.num_states() == 1);
  CHECK(f.num_transitions() == 1);

  StructureSpec spec(1, 1, {1}, {{1, 1}});
  auto ht = std::make_shared<VariableTable>();
  declare_heights(spec, *ht);
  auto g = flatten(structure_network(spec, ht, 1));
  CHECK(g.num_states() == 2);
  CHECK(g.num_transitions() == 2);
  CHECK(g.successor(g.initial(), Event::unload(1, {1, 1})));
  CHECK(g.successor(g.initial(), Event::unload_other({1, 1})));
  CHECK(*g.successor(g.initial(), Event::unload(1, {1, 1})) ==
        *g.successor(g.initial(), Event::unload_other({1, 1})));
}

TEST_CASE("flatten of the 1x1 robot tracks the position of every path") {
  StructureSpec spec(1, 1, {1}, {{1, 1}});
  auto t = plant_variables(spec, 1);
  const auto r = flatten(robot_network(spec, t, 1));
  CHECK(r.num_states() == 4);
  CHECK(r.num_marked() == 2);
  const auto& l = *r.labels();
  const std::size_t xc = *l.variable_column("xhat[1]"), yc = *l.variable_column("yhat[1]");

  // Depth-first replay of every path up to length 6.
  auto rec = [&](auto&& self, StateId s, Cell pos, int depth) -> void {
    CHECK(l.row(s)[xc] == pos.x);
    CHECK(l.row(s)[yc] == pos.y);
    if (depth == 0)
      return;
    for (const auto& e : r.out(s)) {
      const Event& ev = r.event(e.event);
      Cell next = pos;
      if (ev.is_local()) {
        if (ev.move == Move::Enter)
          next = ev.cell;
        else if (ev.move == Move::Exit)
          next = kOutside;
        else if (ev.move == Move::East)
          ++next.x;
        else if (ev.move == Move::West)
          --next.x;
        else if (ev.move == Move::North)
          --next.y;
        else if (ev.move == Move::South)
          ++next.y;
      }
      self(self, e.target, next, depth - 1);
    }
  };
  rec(rec, r.initial(), kOutside, 6);
}

TEST_CASE("flatten detects nondeterminism and the state cap") {
  auto t = one_var(3);
  ExtendedAutomaton a("A", t);
  a.add_location("x", true);
  a.add_location("y", true);
  a.add_transition(0, Event::local(1, Move::Pick), Guard::truth(), {}, 0);
  a.add_transition(0, Event::local(1, Move::Pick), Guard::truth(), {}, 1);
  CHECK_THROWS_AS(flatten(a), ModelError);

  ExtendedAutomaton b("B", t);
  b.add_location("x", true);
  b.add_transition(0, Event::local(1, Move::Pick), Guard::truth(), {{0, Term::variable(0, 1)}}, 0);
  CHECK(flatten(b).num_states() == 4);
  FlattenOptions o;
  o.state_cap = 3;
  CHECK_THROWS_AS(flatten(b, o), ResourceLimitError);
  try {
    flatten(b, o);
  } catch (const ResourceLimitError& e) {
    CHECK(e.cap() == 3);
  }
}

TEST_CASE("property: flatten(compose) matches the brute-force interleaver") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 60; ++round) {
    auto p = testgen::random_pair(rng);
    std::vector<ExtendedAutomaton> v{testgen::to_efa(p.a, p.table, "A"),
                                     testgen::to_efa(p.b, p.table, "B")};
    const auto expected = oracle::plain_language({p.a, p.b}, p.init, p.domain_hi, 6);
    CHECK(testgen::indexed_language(flatten(compose(v)), 6) == expected);
    CHECK(testgen::indexed_language(flatten(v), 6) == expected);
  }
}

TEST_CASE("property: flattened automata are deterministic") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 40; ++round) {
    auto p = testgen::random_pair(rng);
    std::vector<ExtendedAutomaton> v{testgen::to_efa(p.a, p.table, "A"),
                                     testgen::to_efa(p.b, p.table, "B")};
    const auto f = flatten(compose(v));
    for (StateId s = 0; s < f.num_states(); ++s)
      for (std::size_t i = 1; i < f.out(s).size(); ++i)
        CHECK(f.out(s)[i - 1].event != f.out(s)[i].event);
  }
}
