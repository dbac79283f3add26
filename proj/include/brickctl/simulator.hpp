#pragma once

// Closed-loop simulation of n supervised robots with the permission protocol
// and an occupancy filter beneath the supervisors.

#include "brickctl/synthesis.hpp"
#include "brickctl/trace.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace brickctl {

struct ScriptLine {
  int robot = 1;
  Event event;
  std::size_t line = 0;
};

/// `<robot> <event>` per line; `#` starts a comment.
std::vector<ScriptLine> parse_script(std::string_view text);

class ScriptError : public std::runtime_error {
public:
  ScriptError(std::size_t step, const std::string& what)
      : std::runtime_error("script step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

struct SimulationConfig {
  StructureSpec spec;
  int robots = 1;
  std::uint64_t seed = 0;
  std::optional<std::vector<ScriptLine>> script; ///< random policy when absent
  std::size_t max_steps = 100'000;
};

struct RobotStatus {
  StateId state = 0;
  RobotConfig config;
};

struct SimulationState {
  Heights heights;
  std::vector<RobotStatus> robots; // robot k+1 at index k
  std::size_t step = 0;
};

struct UnloadDecision {
  bool granted = false;
  std::vector<int> denied_by;
};

class Simulator {
public:
  /// supervisors[k] is the (unrefined) supervisor of robot k+1.
  Simulator(const StructureSpec& spec, std::vector<Supervisor> supervisors);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const StructureSpec& spec() const noexcept { return spec_; }
  const SimulationState& state() const noexcept { return state_; }
  int robots() const noexcept { return static_cast<int>(supervisors_.size()); }
  const Supervisor& supervisor(int robot) const { return supervisors_.at(robot - 1); }

  /// Own events the robot's supervisor enables, ignoring other robots' bodies.
  std::vector<Event> supervised_actions(int robot) const;
  /// supervised_actions minus moves, entries and unloads onto occupied cells.
  std::vector<Event> enabled_actions(int robot) const;
  bool collides(int robot, const Event& e) const;

  bool finished(int robot) const;
  bool all_finished() const;

  /// Permission round for an unload; nothing changes.
  UnloadDecision ask(int robot, Cell c) const;
  /// Permission round, then the broadcast unload when granted.
  UnloadDecision attempt_unload(int robot, Cell c);
  /// Applies an own event of `robot` (broadcasting unloads) without checks
  /// beyond the supervisors' transition functions.
  void execute(int robot, const Event& e);

  /// One random-policy turn. nullopt when the robot has nothing to do.
  std::optional<TraceEvent> random_turn(int robot, std::mt19937_64& rng);
  /// One scripted turn; throws ScriptError if the event is not supervised.
  TraceEvent scripted_turn(const ScriptLine& line);

  /// Heights with robot markers A..Z; robots outside listed underneath.
  std::string render() const;

private:
  TraceEvent act(int robot, const Event& e);
  void sync(int robot);

  StructureSpec spec_;
  std::vector<Supervisor> supervisors_;
  std::vector<PlantView> views_;
  SimulationState state_;
};

using TraceObserver = std::function<void(const TraceEvent&, const Simulator&)>;

/// Replicates `s1` to every robot and runs to an outcome.
Trace run(const SimulationConfig& config, const Supervisor& s1, const TraceObserver& observer = {});

/// Replays a trace against fresh supervisors; returns every discrepancy.
std::vector<std::string> validate_trace(const Trace& trace, const StructureSpec& spec,
                                        const Supervisor& s1, int robots);

} // namespace brickctl
