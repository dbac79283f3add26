#pragma once

// Target structures and the structure automaton built from them.

#include "brickctl/efa.hpp"
#include "brickctl/explicit.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brickctl {

class StructureSpec {
public:
  StructureSpec() = default;
  /// `target` is row-major, row y=1 first. Throws ModelError on invalid input.
  StructureSpec(int width, int height, std::vector<int> target, std::vector<Cell> io);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool in_domain(Cell c) const noexcept {
    return c.x >= 1 && c.x <= width_ && c.y >= 1 && c.y <= height_;
  }
  /// Target height; zero outside the domain and at the outside region.
  int target(Cell c) const noexcept;
  bool is_io(Cell c) const noexcept;
  std::span<const Cell> io() const noexcept { return io_; }
  std::span<const int> targets() const noexcept { return target_; }

  /// Cells with a nonzero target, ordered by (y, x).
  std::span<const Cell> task_cells() const noexcept { return task_cells_; }

  /// Edge neighbors inside the domain, plus the outside region for io cells.
  /// For the outside region itself this is the io set.
  std::vector<Cell> neighbors(Cell c) const;

  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.y - 1) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x - 1);
  }
  std::size_t area() const noexcept { return target_.size(); }

  friend bool operator==(const StructureSpec&, const StructureSpec&) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<int> target_;
  std::vector<Cell> io_;
  std::vector<Cell> task_cells_;
};

/// Structure file:
///
///     grid <n_x> <n_y>
///     io <x,y> <x,y> ...
///     heights
///     <n_y rows of n_x integers, row y=1 first>
///
/// `#` starts a comment. Errors are ParseError with the offending line.
StructureSpec parse_structure(std::string_view text);
std::string to_text(const StructureSpec& spec);

/// Row-major current heights over the whole grid.
using Heights = std::vector<int>;

/// Height at a cell of a row-major grid; zero off the grid.
int height_at(const StructureSpec& spec, std::span<const int> heights, Cell c);

/// No-trench rule: placing on `c` is forbidden when `c` is strictly lower than
/// both its west and east neighbors, or than both its north and south ones.
bool no_trench_permits(const StructureSpec& spec, std::span<const int> heights, Cell c);

std::string height_variable(Cell c);

/// Declares h[x,y] with domain 0..target for every task cell, in (y, x) order.
void declare_heights(const StructureSpec& spec, VariableTable& table);

/// Operand for the height of `c`: the cell's variable, or constant 0 for
/// cells that never receive bricks and for the outside region.
Term height_term(const StructureSpec& spec, const VariableTable& table, Cell c);

/// Guards of the brick-addition physics at one cell.
Guard equal_neighbor_guard(const StructureSpec& spec, const VariableTable& table, Cell c);
Guard no_trench_guard(const StructureSpec& spec, const VariableTable& table, Cell c);

/// Unload events of `robot` and of the others for every task cell.
ExtendedAutomaton build_g1(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot);
/// One two-location template per task cell.
std::vector<ExtendedAutomaton> build_g2_cells(const StructureSpec& spec,
                                              std::shared_ptr<const VariableTable> table, int robot);
/// Composition of the per-cell templates; 2^|cells| locations, small inputs only.
ExtendedAutomaton build_g2(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot);

/// G1 followed by the G2 cell templates, ready for flatten().
std::vector<ExtendedAutomaton> structure_network(const StructureSpec& spec,
                                                 std::shared_ptr<const VariableTable> table,
                                                 int robot);

class UnreachableTargetError : public ModelError {
public:
  UnreachableTargetError() : ModelError("target structure unreachable under the no-trench rule") {}
};

/// trim(flatten(G1 || G2)). Throws UnreachableTargetError when trim empties it.
ExplicitAutomaton build_structure_automaton(const StructureSpec& spec, int robot = 1,
                                            std::size_t state_cap = kDefaultStateCap);

/// Same, but returns the empty automaton instead of throwing.
ExplicitAutomaton structure_automaton_or_empty(const StructureSpec& spec, int robot = 1,
                                               std::size_t state_cap = kDefaultStateCap);

} // namespace brickctl
