#pragma once

// Supervisor replication across identical robots and refinement of foreign
// unloads into per-robot events.

#include "brickctl/synthesis.hpp"

namespace brickctl {

/// The same supervisor for robot `j`: own events renamed, foreign unloads kept.
Supervisor replicate(const Supervisor& s, int j);

/// Every foreign unload becomes one indexed unload per other robot in 1..n.
ExplicitAutomaton refine(const Supervisor& s, int n);

} // namespace brickctl
