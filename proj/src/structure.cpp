#include "brickctl/structure.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace brickctl {

namespace {

bool by_row(Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

} // namespace

StructureSpec::StructureSpec(int width, int height, std::vector<int> target, std::vector<Cell> io)
    : width_(width), height_(height), target_(std::move(target)), io_(std::move(io)) {
  if (width_ < 1 || height_ < 1)
    throw ModelError("grid dimensions must be positive");
  if (target_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
    throw ModelError("target heights do not cover the grid");
  for (int h : target_)
    if (h < 0 || h > 1000)
      throw ModelError("target height out of range");
  if (io_.empty())
    throw ModelError("io set is empty");
  for (Cell c : io_)
    if (!in_domain(c))
      throw ModelError("io cell outside domain " + to_string(c));
  std::sort(io_.begin(), io_.end(), by_row);
  io_.erase(std::unique(io_.begin(), io_.end()), io_.end());
  for (int y = 1; y <= height_; ++y)
    for (int x = 1; x <= width_; ++x)
      if (this->target({x, y}) >= 1)
        task_cells_.push_back({x, y});
}

int StructureSpec::target(Cell c) const noexcept { return in_domain(c) ? target_[index(c)] : 0; }

bool StructureSpec::is_io(Cell c) const noexcept {
  return std::find(io_.begin(), io_.end(), c) != io_.end();
}

std::vector<Cell> StructureSpec::neighbors(Cell c) const {
  if (c == kOutside)
    return io_;
  std::vector<Cell> n;
  for (Cell d : {Cell{c.x, c.y - 1}, Cell{c.x - 1, c.y}, Cell{c.x + 1, c.y}, Cell{c.x, c.y + 1}})
    if (in_domain(d))
      n.push_back(d);
  if (is_io(c))
    n.push_back(kOutside);
  return n;
}

// ---------------------------------------------------------------------------
// Structure files

namespace {

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> w;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    if (j > i)
      w.push_back(line.substr(i, j - i));
    i = j;
  }
  return w;
}

std::optional<int> integer(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

std::optional<Cell> cell_token(std::string_view s) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
    s = s.substr(1, s.size() - 2);
  const auto comma = s.find(',');
  if (comma == std::string_view::npos)
    return std::nullopt;
  auto x = integer(s.substr(0, comma));
  auto y = integer(s.substr(comma + 1));
  if (!x || !y)
    return std::nullopt;
  return Cell{*x, *y};
}

} // namespace

StructureSpec parse_structure(std::string_view text) {
  enum class Expect { Grid, Io, Heights, Rows } expect = Expect::Grid;
  int nx = 0, ny = 0;
  std::vector<Cell> io;
  std::vector<int> target;
  std::size_t lineno = 0;
  std::size_t io_line = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto w = words(line);
    if (w.empty())
      continue;

    switch (expect) {
    case Expect::Grid: {
      if (w.size() != 3 || w[0] != "grid")
        throw ParseError(lineno, "expected 'grid <n_x> <n_y>'");
      auto x = integer(w[1]), y = integer(w[2]);
      if (!x || !y || *x < 1 || *y < 1 || *x > 64 || *y > 64)
        throw ParseError(lineno, "malformed grid dimensions");
      nx = *x;
      ny = *y;
      expect = Expect::Io;
      break;
    }
    case Expect::Io:
      if (w[0] != "io" || w.size() < 2)
        throw ParseError(lineno, "expected 'io <x,y> ...'");
      for (std::size_t i = 1; i < w.size(); ++i) {
        auto c = cell_token(w[i]);
        if (!c)
          throw ParseError(lineno, "malformed io cell '" + std::string(w[i]) + "'");
        if (c->x < 1 || c->x > nx || c->y < 1 || c->y > ny)
          throw ParseError(lineno, "io cell outside domain " + to_string(*c));
        io.push_back(*c);
      }
      io_line = lineno;
      expect = Expect::Heights;
      break;
    case Expect::Heights:
      if (w.size() != 1 || w[0] != "heights")
        throw ParseError(lineno, "expected 'heights'");
      expect = Expect::Rows;
      break;
    case Expect::Rows: {
      if (target.size() == static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        throw ParseError(lineno, "more than " + std::to_string(ny) + " height rows");
      if (w.size() != static_cast<std::size_t>(nx))
        throw ParseError(lineno, "height row has " + std::to_string(w.size()) + " entries, expected " +
                                     std::to_string(nx));
      for (auto tok : w) {
        auto h = integer(tok);
        if (!h || *h < 0 || *h > 1000)
          throw ParseError(lineno, "malformed height '" + std::string(tok) + "'");
        target.push_back(*h);
      }
      break;
    }
    }
  }
  if (expect != Expect::Rows)
    throw ParseError(lineno, "truncated structure file");
  if (target.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw ParseError(lineno, "expected " + std::to_string(ny) + " height rows");
  try {
    return StructureSpec(nx, ny, std::move(target), std::move(io));
  } catch (const ModelError& e) {
    throw ParseError(io_line, e.what());
  }
}

std::string to_text(const StructureSpec& spec) {
  std::ostringstream os;
  os << "grid " << spec.width() << ' ' << spec.height() << "\nio";
  for (Cell c : spec.io())
    os << ' ' << c.x << ',' << c.y;
  os << "\nheights\n";
  for (int y = 1; y <= spec.height(); ++y) {
    for (int x = 1; x <= spec.width(); ++x)
      os << (x > 1 ? " " : "") << spec.target({x, y});
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Heights and the no-trench rule

int height_at(const StructureSpec& spec, std::span<const int> heights, Cell c) {
  return spec.in_domain(c) ? heights[spec.index(c)] : 0;
}

bool no_trench_permits(const StructureSpec& spec, std::span<const int> heights, Cell c) {
  const int h = height_at(spec, heights, c);
  auto at = [&](int dx, int dy) { return height_at(spec, heights, {c.x + dx, c.y + dy}); };
  const bool trench_x = h < at(-1, 0) && h < at(1, 0);
  const bool trench_y = h < at(0, -1) && h < at(0, 1);
  return !trench_x && !trench_y;
}

std::string height_variable(Cell c) {
  return "h[" + std::to_string(c.x) + "," + std::to_string(c.y) + "]";
}

void declare_heights(const StructureSpec& spec, VariableTable& table) {
  for (Cell c : spec.task_cells())
    table.declare(height_variable(c), 0, spec.target(c), 0);
}

Term height_term(const StructureSpec& spec, const VariableTable& table, Cell c) {
  if (spec.target(c) == 0)
    return Term::constant(0);
  return Term::variable(table.id(height_variable(c)));
}

// ---------------------------------------------------------------------------
// G1, G2

Guard equal_neighbor_guard(const StructureSpec& spec, const VariableTable& table, Cell c) {
  const Term h = height_term(spec, table, c);
  std::vector<Guard> alts;
  for (Cell n : spec.neighbors(c))
    alts.push_back(eq(height_term(spec, table, n), h));
  return Guard::any(std::move(alts));
}

Guard no_trench_guard(const StructureSpec& spec, const VariableTable& table, Cell c) {
  const Term h = height_term(spec, table, c);
  auto side = [&](int dx, int dy) { return height_term(spec, table, {c.x + dx, c.y + dy}); };
  Guard trench_x = lt(h, side(-1, 0)) && lt(h, side(1, 0));
  Guard trench_y = lt(h, side(0, -1)) && lt(h, side(0, 1));
  return !trench_x && !trench_y;
}

ExtendedAutomaton build_g1(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot) {
  const VariableTable& t = *table;
  ExtendedAutomaton g("G1", table);
  const LocId q = g.add_location("s", true);
  g.set_initial(q);
  for (Cell c : spec.task_cells()) {
    const VarId h = t.id(height_variable(c));
    Guard guard = equal_neighbor_guard(spec, t, c) && no_trench_guard(spec, t, c);
    const ActionList inc{{h, Term::variable(h, 1)}};
    g.add_transition(q, Event::unload(robot, c), guard, inc, q);
    g.add_transition(q, Event::unload_other(c), guard, inc, q);
  }
  return g;
}

std::vector<ExtendedAutomaton> build_g2_cells(const StructureSpec& spec,
                                              std::shared_ptr<const VariableTable> table, int robot) {
  std::vector<ExtendedAutomaton> cells;
  for (Cell c : spec.task_cells()) {
    const Term h = Term::variable(table->id(height_variable(c)));
    const int goal = spec.target(c);
    ExtendedAutomaton g("G2" + to_string(c), table);
    const LocId building = g.add_location("building", false);
    const LocId full = g.add_location("full", true);
    g.set_initial(building);
    const Guard below = lt(h, Term::constant(goal - 1));
    const Guard last = eq(h, Term::constant(goal - 1));
    for (const Event& e : {Event::unload(robot, c), Event::unload_other(c)}) {
      if (goal > 1)
        g.add_transition(building, e, below, {}, building);
      g.add_transition(building, e, last, {}, full);
    }
    cells.push_back(std::move(g));
  }
  return cells;
}

ExtendedAutomaton build_g2(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot) {
  auto cells = build_g2_cells(spec, table, robot);
  if (cells.empty()) {
    ExtendedAutomaton g("G2", table);
    g.set_initial(g.add_location("full", true));
    return g;
  }
  return compose(cells);
}

std::vector<ExtendedAutomaton> structure_network(const StructureSpec& spec,
                                                 std::shared_ptr<const VariableTable> table,
                                                 int robot) {
  std::vector<ExtendedAutomaton> net;
  net.push_back(build_g1(spec, table, robot));
  for (auto& g : build_g2_cells(spec, table, robot))
    net.push_back(std::move(g));
  return net;
}

ExplicitAutomaton structure_automaton_or_empty(const StructureSpec& spec, int robot,
                                               std::size_t state_cap) {
  auto table = std::make_shared<VariableTable>();
  declare_heights(spec, *table);
  const auto net = structure_network(spec, table, robot);
  FlattenOptions opts;
  opts.state_cap = state_cap;
  return trim(flatten(net, opts));
}

ExplicitAutomaton build_structure_automaton(const StructureSpec& spec, int robot,
                                            std::size_t state_cap) {
  auto t = structure_automaton_or_empty(spec, robot, state_cap);
  if (t.empty())
    throw UnreachableTargetError();
  return t;
}

} // namespace brickctl
