#include "brickctl/event.hpp"

#include <charconv>

namespace brickctl {

Event sync_identity(const Event& e) {
  if (e.is_unload() && e.owner == Owner::Indexed) {
    Event s = e;
    s.owner = Owner::Self;
    return s;
  }
  return e;
}

Event reindex(const Event& e, int from, int to) {
  Event r = e;
  if (e.robot == from && !(e.is_unload() && e.owner == Owner::Other))
    r.robot = to;
  return r;
}

std::string to_string(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

std::string to_string(const Event& e) {
  if (e.is_unload()) {
    switch (e.owner) {
    case Owner::Self:
      return "tau[" + std::to_string(e.robot) + "]" + to_string(e.cell);
    case Owner::Other:
      return "tau[o]" + to_string(e.cell);
    case Owner::Indexed:
      return "tau[j=" + std::to_string(e.robot) + "]" + to_string(e.cell);
    }
  }
  std::string s = "loc[" + std::to_string(e.robot) + "]:";
  switch (e.move) {
  case Move::East: return s + "e";
  case Move::West: return s + "w";
  case Move::North: return s + "n";
  case Move::South: return s + "s";
  case Move::Pick: return s + "p";
  case Move::Exit: return s + "out";
  case Move::Enter: return s + "in" + to_string(e.cell);
  }
  return s;
}

namespace {

// Minimal cursor over the event grammar; every helper consumes on success only.
struct Cursor {
  std::string_view s;

  bool eat(std::string_view lit) {
    if (s.substr(0, lit.size()) != lit)
      return false;
    s.remove_prefix(lit.size());
    return true;
  }

  std::optional<int> integer() {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p == s.data() || v < 0)
      return std::nullopt;
    s.remove_prefix(static_cast<std::size_t>(p - s.data()));
    return v;
  }

  std::optional<Cell> cell() {
    if (!eat("("))
      return std::nullopt;
    auto x = integer();
    if (!x || !eat(","))
      return std::nullopt;
    auto y = integer();
    if (!y || !eat(")"))
      return std::nullopt;
    return Cell{*x, *y};
  }
};

} // namespace

std::optional<Event> parse_event(std::string_view text) {
  Cursor c{text};
  if (c.eat("tau[")) {
    Event e;
    if (c.eat("o]")) {
      auto cell = c.cell();
      if (!cell || !c.s.empty())
        return std::nullopt;
      return Event::unload_other(*cell);
    }
    const bool indexed = c.eat("j=");
    auto r = c.integer();
    if (!r || *r < 1 || !c.eat("]"))
      return std::nullopt;
    auto cell = c.cell();
    if (!cell || !c.s.empty())
      return std::nullopt;
    return indexed ? Event::unload_indexed(*r, *cell) : Event::unload(*r, *cell);
  }
  if (c.eat("loc[")) {
    auto r = c.integer();
    if (!r || *r < 1 || !c.eat("]:"))
      return std::nullopt;
    std::optional<Event> e;
    if (c.eat("out"))
      e = Event::local(*r, Move::Exit);
    else if (c.eat("in")) {
      auto cell = c.cell();
      if (!cell)
        return std::nullopt;
      e = Event::local(*r, Move::Enter, *cell);
    } else if (c.eat("e"))
      e = Event::local(*r, Move::East);
    else if (c.eat("w"))
      e = Event::local(*r, Move::West);
    else if (c.eat("n"))
      e = Event::local(*r, Move::North);
    else if (c.eat("s"))
      e = Event::local(*r, Move::South);
    else if (c.eat("p"))
      e = Event::local(*r, Move::Pick);
    if (!e || !c.s.empty())
      return std::nullopt;
    return e;
  }
  return std::nullopt;
}

} // namespace brickctl
