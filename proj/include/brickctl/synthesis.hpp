#pragma once

// Supervisor synthesis for one robot: prune the plant until it is trim,
// task-observer and totally reciprocal.

#include "brickctl/explicit.hpp"
#include "brickctl/structure.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brickctl {

/// K_i: the structure automaton in product with the robot model.
ExplicitAutomaton build_plant(const StructureSpec& spec, int robot,
                              std::size_t state_cap = kDefaultStateCap);

/// Per-state structure keys: heights of the cells that appear in unload
/// events, ordered by (y, x). Taken from state labels when present, otherwise
/// derived by propagating brick counts from the initial state.
struct StructureKeys {
  std::vector<Cell> cells;
  std::vector<std::int16_t> data; // cells.size() entries per state

  std::span<const std::int16_t> key(StateId s) const {
    return {data.data() + static_cast<std::size_t>(s) * cells.size(), cells.size()};
  }
};
StructureKeys structure_keys(const ExplicitAutomaton& a);

struct Macrostate {
  std::vector<int> key;
  std::vector<StateId> members; // ascending
};

/// Partition of the states by structure key, ordered by key.
std::vector<Macrostate> compute_macrostates(const ExplicitAutomaton& a);

/// Unload events (own or foreign) leaving some member of `m`, in alphabet order.
std::vector<Event> enabled_task_events(const Macrostate& m, const ExplicitAutomaton& a);

struct TaskObserverViolation {
  std::size_t macrostate;
  Event event;
  std::vector<StateId> offending;
};

/// Members of each macrostate that cannot reach, through local events, a
/// state where an enabled task event of that macrostate is defined.
std::vector<TaskObserverViolation> check_task_observer(const ExplicitAutomaton& a);

struct ReciprocityViolation {
  std::size_t macrostate;
  Cell cell;
  Event present; ///< the one of the (own, other) pair that is enabled
};

std::vector<ReciprocityViolation> check_totally_reciprocal(const ExplicitAutomaton& a);

enum class RepairMode {
  States,      ///< drop offending states
  Transitions, ///< drop the violated task event from the whole macrostate
};

ExplicitAutomaton repair_task_observer(const ExplicitAutomaton& a,
                                       const std::vector<TaskObserverViolation>& violations,
                                       RepairMode mode = RepairMode::States);
ExplicitAutomaton repair_totally_reciprocal(const ExplicitAutomaton& a,
                                            const std::vector<ReciprocityViolation>& violations);

struct Certificate {
  bool trim = false;
  bool task_observer = false;
  bool totally_reciprocal = false;

  bool all() const noexcept { return trim && task_observer && totally_reciprocal; }
};

/// Re-runs every checker on `a`.
Certificate certify(const ExplicitAutomaton& a);

struct Supervisor {
  ExplicitAutomaton automaton;
  int robot = 1;
  std::vector<Macrostate> macrostates;
  Certificate certificate;
};

struct SynthesisOptions {
  RepairMode repair_mode = RepairMode::States;
  std::size_t state_cap = kDefaultStateCap;
  std::size_t iteration_cap = 10'000;
};

struct SynthesisResult {
  std::optional<Supervisor> supervisor; ///< nullopt: no supervisor exists
  std::size_t plant_states = 0;
  std::size_t plant_transitions = 0;
  std::size_t passes = 0; ///< passes that changed the automaton
};

/// Divergence of the pruning loop; unreachable in practice since every
/// changing pass strictly shrinks the automaton.
class SynthesisDivergedError : public std::runtime_error {
public:
  explicit SynthesisDivergedError(std::size_t cap)
      : std::runtime_error("synthesis did not converge within " + std::to_string(cap) + " passes") {}
};

SynthesisResult synthesize(const StructureSpec& spec, int robot, const SynthesisOptions& options = {});

/// The pruning loop alone, starting from an arbitrary plant.
SynthesisResult synthesize_from(const ExplicitAutomaton& plant, int robot,
                                const SynthesisOptions& options = {});

/// Supervisor file: `robot <i>`, the automaton text, then
/// `certificate trim=B taskobs=B reciprocal=B`.
std::string to_text(const Supervisor& s);
Supervisor parse_supervisor(std::string_view text);

/// Robot-side reading of a plant or supervisor state (requires state labels).
struct RobotConfig {
  bool inside = false;
  bool loaded = false;
  Cell position = kOutside;

  friend bool operator==(const RobotConfig&, const RobotConfig&) = default;
};

class PlantView {
public:
  PlantView(const ExplicitAutomaton& a, const StructureSpec& spec);

  RobotConfig robot(StateId s) const;
  Heights heights(StateId s) const;

private:
  const StateLabels* labels_;
  const StructureSpec* spec_;
  std::size_t g3_, g4_, x_, y_;
  std::vector<std::pair<std::size_t, std::size_t>> height_columns_; // (column, grid index)
};

} // namespace brickctl
