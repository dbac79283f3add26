#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace brickctl {

struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// The region surrounding the construction site.
inline constexpr Cell kOutside{0, 0};

enum class Move : std::uint8_t { East, West, North, South, Pick, Exit, Enter };

enum class Owner : std::uint8_t {
  Self,    ///< unload by the robot the automaton belongs to
  Other,   ///< unload by some other robot (before refinement)
  Indexed, ///< unload by a named foreign robot (after refinement)
};

/// Either a local event of one robot or a brick unload on a cell.
///
/// Local events carry `robot` and `move` (and `cell` for Enter); unload events
/// carry `owner`, `cell` and, unless the owner is Other, `robot`.
struct Event {
  enum class Kind : std::uint8_t { Local, Unload };

  Kind kind = Kind::Local;
  int robot = 0;
  Move move = Move::Pick;
  Owner owner = Owner::Self;
  Cell cell{};

  static Event local(int robot, Move m, Cell entry = kOutside) {
    Event e;
    e.kind = Kind::Local;
    e.robot = robot;
    e.move = m;
    e.cell = m == Move::Enter ? entry : kOutside;
    return e;
  }
  static Event unload(int robot, Cell c) {
    Event e;
    e.kind = Kind::Unload;
    e.robot = robot;
    e.owner = Owner::Self;
    e.cell = c;
    return e;
  }
  static Event unload_other(Cell c) {
    Event e;
    e.kind = Kind::Unload;
    e.robot = 0;
    e.owner = Owner::Other;
    e.cell = c;
    return e;
  }
  static Event unload_indexed(int robot, Cell c) {
    Event e = unload(robot, c);
    e.owner = Owner::Indexed;
    return e;
  }

  bool is_local() const noexcept { return kind == Kind::Local; }
  bool is_unload() const noexcept { return kind == Kind::Unload; }
  bool is_own_unload() const noexcept { return is_unload() && owner == Owner::Self; }
  bool is_other_unload() const noexcept { return is_unload() && owner == Owner::Other; }

  friend auto operator<=>(const Event& a, const Event& b) { return a.tie() <=> b.tie(); }
  friend bool operator==(const Event& a, const Event& b) { return a.tie() == b.tie(); }

private:
  // Local events never look at `owner`, unload events never look at `move`.
  std::tuple<int, int, int, int, int, int> tie() const {
    const int k = static_cast<int>(kind);
    if (kind == Kind::Local)
      return {k, robot, static_cast<int>(move), 0, cell.x, cell.y};
    return {k, robot, 0, static_cast<int>(owner), cell.x, cell.y};
  }
};

/// Identity used when synchronizing refined automata: Indexed(k) and Self(k)
/// denote the same physical unload.
Event sync_identity(const Event& e);

/// Same event with every robot-indexed part renamed from robot `from` to `to`.
Event reindex(const Event& e, int from, int to);

/// Text syntax: `tau[i](x,y)`, `tau[o](x,y)`, `tau[j=K](x,y)`,
/// `loc[i]:e|w|n|s|p|out|in(x,y)`.
std::string to_string(const Event& e);
std::optional<Event> parse_event(std::string_view text);

std::string to_string(Cell c);

} // namespace brickctl
