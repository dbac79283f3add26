#include "brickctl/robot.hpp"

namespace brickctl {

std::string column_variable(int robot) { return "xhat[" + std::to_string(robot) + "]"; }
std::string row_variable(int robot) { return "yhat[" + std::to_string(robot) + "]"; }

void declare_position(const StructureSpec& spec, VariableTable& table, int robot) {
  table.declare(column_variable(robot), 0, spec.width(), 0);
  table.declare(row_variable(robot), 0, spec.height(), 0);
}

std::shared_ptr<VariableTable> plant_variables(const StructureSpec& spec, int robot) {
  auto t = std::make_shared<VariableTable>();
  declare_heights(spec, *t);
  declare_position(spec, *t, robot);
  return t;
}

std::vector<Event> local_alphabet(const StructureSpec& spec, int robot) {
  std::vector<Event> a;
  for (Move m : {Move::East, Move::West, Move::North, Move::South, Move::Pick, Move::Exit})
    a.push_back(Event::local(robot, m));
  for (Cell c : spec.io())
    a.push_back(Event::local(robot, Move::Enter, c));
  return a;
}

namespace {

struct Position {
  Term x;
  Term y;
};

Position position(const VariableTable& t, int robot) {
  return {Term::variable(t.id(column_variable(robot))), Term::variable(t.id(row_variable(robot)))};
}

Guard at(const Position& p, Cell c) {
  return eq(p.x, Term::constant(c.x)) && eq(p.y, Term::constant(c.y));
}

Guard within_one(Term a, Term b) { return le(a, b + 1) && le(b, a + 1); }

} // namespace

ExtendedAutomaton build_g3(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot) {
  const auto p = position(*table, robot);
  const VarId x = p.x.var(), y = p.y.var();
  ExtendedAutomaton g("G3[" + std::to_string(robot) + "]", table);
  const LocId outside = g.add_location("outside", true);
  const LocId inside = g.add_location("inside", false);
  g.set_initial(outside);

  g.add_transition(outside, Event::local(robot, Move::Pick), Guard::truth(), {}, outside);
  for (Cell c : spec.io())
    g.add_transition(outside, Event::local(robot, Move::Enter, c), Guard::truth(),
                     {{x, Term::constant(c.x)}, {y, Term::constant(c.y)}}, inside);
  g.add_transition(inside, Event::local(robot, Move::Exit), Guard::truth(),
                   {{x, Term::constant(0)}, {y, Term::constant(0)}}, outside);
  g.add_transition(inside, Event::local(robot, Move::East), lt(p.x, Term::constant(spec.width())),
                   {{x, p.x + 1}}, inside);
  g.add_transition(inside, Event::local(robot, Move::West), gt(p.x, Term::constant(1)),
                   {{x, p.x - 1}}, inside);
  g.add_transition(inside, Event::local(robot, Move::South), lt(p.y, Term::constant(spec.height())),
                   {{y, p.y + 1}}, inside);
  g.add_transition(inside, Event::local(robot, Move::North), gt(p.y, Term::constant(1)),
                   {{y, p.y - 1}}, inside);
  return g;
}

ExtendedAutomaton build_g4(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot) {
  ExtendedAutomaton g("G4[" + std::to_string(robot) + "]", table);
  const LocId empty = g.add_location("unloaded", true);
  const LocId loaded = g.add_location("loaded", true);
  g.set_initial(empty);
  g.add_transition(empty, Event::local(robot, Move::Pick), Guard::truth(), {}, loaded);
  for (Cell c : spec.task_cells())
    g.add_transition(loaded, Event::unload(robot, c), Guard::truth(), {}, empty);
  return g;
}

ExtendedAutomaton build_g5_g6(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                              int robot) {
  const VariableTable& t = *table;
  const auto p = position(t, robot);
  ExtendedAutomaton g("G56[" + std::to_string(robot) + "]", table);
  const LocId q = g.add_location("s", true);
  g.set_initial(q);

  struct Step {
    Move move;
    int dx, dy;
  };
  for (Step s : {Step{Move::East, 1, 0}, Step{Move::West, -1, 0}, Step{Move::North, 0, -1},
                 Step{Move::South, 0, 1}}) {
    std::vector<Guard> alts;
    for (int yy = 1; yy <= spec.height(); ++yy)
      for (int xx = 1; xx <= spec.width(); ++xx) {
        const Cell from{xx, yy}, to{xx + s.dx, yy + s.dy};
        if (!spec.in_domain(to))
          continue;
        alts.push_back(at(p, from) &&
                       within_one(height_term(spec, t, from), height_term(spec, t, to)));
      }
    g.add_transition(q, Event::local(robot, s.move), Guard::any(std::move(alts)), {}, q);
  }

  const Term origin_x = p.x, origin_y = p.y;
  for (Cell c : spec.io())
    g.add_transition(q, Event::local(robot, Move::Enter, c),
                     eq(origin_x, Term::constant(0)) && eq(origin_y, Term::constant(0)) &&
                         le(height_term(spec, t, c), Term::constant(1)),
                     {}, q);
  std::vector<Guard> exits;
  for (Cell c : spec.io())
    exits.push_back(at(p, c) && le(height_term(spec, t, c), Term::constant(1)));
  g.add_transition(q, Event::local(robot, Move::Exit), Guard::any(std::move(exits)), {}, q);
  return g;
}

ExtendedAutomaton build_g7(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot) {
  const VariableTable& t = *table;
  const auto p = position(t, robot);
  ExtendedAutomaton g("G7[" + std::to_string(robot) + "]", table);
  const LocId q = g.add_location("s", true);
  g.set_initial(q);
  for (Cell c : spec.task_cells()) {
    std::vector<Guard> alts;
    for (Cell n : spec.neighbors(c))
      alts.push_back(at(p, n) && eq(height_term(spec, t, n), height_term(spec, t, c)));
    g.add_transition(q, Event::unload(robot, c), Guard::any(std::move(alts)), {}, q);
  }
  return g;
}

std::vector<ExtendedAutomaton> robot_network(const StructureSpec& spec,
                                             std::shared_ptr<const VariableTable> table, int robot) {
  std::vector<ExtendedAutomaton> net;
  net.push_back(build_g3(spec, table, robot));
  net.push_back(build_g4(spec, table, robot));
  net.push_back(build_g5_g6(spec, table, robot));
  net.push_back(build_g7(spec, table, robot));
  return net;
}

ExtendedAutomaton build_robot(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                              int robot) {
  return compose(robot_network(spec, table, robot));
}

} // namespace brickctl
