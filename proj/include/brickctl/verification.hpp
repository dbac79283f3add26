#pragma once

// Explicit joint behavior of refined supervisors and checks on it.

#include "brickctl/replication.hpp"
#include "brickctl/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace brickctl {

/// Synchronous product of refined supervisors, component k for robot k+1.
ProductResult joint(std::span<const ExplicitAutomaton> refined,
                    std::size_t state_cap = kDefaultStateCap);

struct VerificationReport {
  bool supervisor_exists = true;
  bool nonblocking = false;
  std::size_t states = 0;
  std::size_t transitions = 0;
  /// Shortest path to a state that cannot reach marking.
  std::optional<std::vector<TraceEvent>> witness;
};

struct VerifyOptions {
  std::size_t state_cap = kDefaultStateCap;
  RepairMode repair_mode = RepairMode::States;
};

/// Builds the joint of supervisors[k] (robot k+1) after refinement.
VerificationReport verify_supervisors(std::span<const Supervisor> supervisors,
                                      std::size_t state_cap = kDefaultStateCap);

/// Synthesizes for robot 1, replicates to 1..n and checks the joint.
VerificationReport verify_theorem(const StructureSpec& spec, int n, const VerifyOptions& opts = {});

/// The same check with the plant of robot 1 standing in for the supervisor.
VerificationReport verify_plant(const StructureSpec& spec, int n, const VerifyOptions& opts = {});

/// Shortest event path (BFS tree) from the initial state to `s`.
std::vector<TraceEvent> path_to(const ProductResult& p, StateId s);

/// `RESULT nonblocking=<bool> states=<N> trans=<M>` plus `WITNESS <trace line>`s.
std::string to_text(const VerificationReport& r);

struct InvariantReport {
  bool vacuous = false; ///< empty joint
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Marked states complete with every robot outside; every unload permitted by
/// the no-trench rule; brick count rising by exactly one per unload.
/// `components` are the labeled automata the joint was built from.
InvariantReport check_joint_invariants(const ProductResult& joint,
                                       std::span<const ExplicitAutomaton> components,
                                       const StructureSpec& spec);

/// At every joint state, robot j's unload on c is enabled iff j's component
/// enables it and every other component enables the indexed unload.
InvariantReport check_permission_semantics(const ProductResult& joint,
                                           std::span<const ExplicitAutomaton> components);

} // namespace brickctl
