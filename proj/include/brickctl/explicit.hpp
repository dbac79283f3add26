#pragma once

// Explicit deterministic automata: the carrier for structure, plant,
// supervisor and joint automata.

#include "brickctl/errors.hpp"
#include "brickctl/event.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brickctl {

using StateId = std::uint32_t;
using EventId = std::uint32_t;
inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();

/// Per-state (location vector, valuation) keys carried over from flattening.
struct StateLabels {
  std::vector<std::string> components;
  std::vector<std::string> variables;
  std::vector<std::int16_t> data; // row-major, stride() entries per state

  std::size_t stride() const noexcept { return components.size() + variables.size(); }
  std::span<const std::int16_t> row(StateId s) const {
    return {data.data() + static_cast<std::size_t>(s) * stride(), stride()};
  }
  /// Column of a variable inside a row.
  std::optional<std::size_t> variable_column(std::string_view name) const;
  std::optional<std::size_t> component_column(std::string_view name) const;
};

struct LabeledTransition {
  StateId source;
  Event event;
  StateId target;
};

class ExplicitAutomaton {
public:
  struct Edge {
    EventId event;
    StateId target;
  };

  /// The empty automaton (no states, not even an initial one).
  ExplicitAutomaton() = default;

  /// Canonicalizes: sorts the alphabet (events on transitions are added to
  /// it), sorts edges per state by event, merges exact duplicates. Throws
  /// ModelError on two different successors for one (state, event).
  static ExplicitAutomaton build(std::vector<Event> alphabet, std::size_t num_states,
                                 StateId initial, std::vector<char> marked,
                                 std::vector<LabeledTransition> transitions,
                                 std::shared_ptr<const StateLabels> labels = nullptr);

  bool empty() const noexcept { return num_states_ == 0; }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_transitions() const noexcept { return edges_.size(); }
  StateId initial() const noexcept { return initial_; }
  bool is_marked(StateId s) const { return marked_[s] != 0; }
  std::size_t num_marked() const;

  std::span<const Event> alphabet() const noexcept { return alphabet_; }
  const Event& event(EventId e) const { return alphabet_[e]; }
  std::optional<EventId> event_id(const Event& e) const;

  std::span<const Edge> out(StateId s) const {
    return {edges_.data() + offsets_[s], edges_.data() + offsets_[s + 1]};
  }
  std::optional<StateId> successor(StateId s, EventId e) const;
  std::optional<StateId> successor(StateId s, const Event& e) const;

  /// Every transition as (source, event, target), in canonical order.
  std::vector<LabeledTransition> transitions() const;

  const StateLabels* labels() const noexcept { return labels_.get(); }
  const std::shared_ptr<const StateLabels>& shared_labels() const noexcept { return labels_; }

  /// Sub-automaton on the kept states and edges; surviving states keep their
  /// relative order. If the initial state is dropped the result is empty
  /// (alphabet retained).
  ExplicitAutomaton restrict(std::span<const char> keep_state,
                             const std::function<bool(StateId, const Edge&)>& keep_edge = {}) const;

  /// Same shape with every transition relabeled to zero or more events.
  ExplicitAutomaton relabel(const std::function<std::vector<Event>(const Event&)>& f,
                            std::vector<Event> alphabet) const;

  friend bool operator==(const ExplicitAutomaton& a, const ExplicitAutomaton& b);

private:
  std::vector<Event> alphabet_;
  std::size_t num_states_ = 0;
  StateId initial_ = kNoState;
  std::vector<char> marked_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Edge> edges_;
  std::shared_ptr<const StateLabels> labels_;
};

/// States reachable from the initial state.
std::vector<char> accessible(const ExplicitAutomaton& a);
/// States from which some marked state is reachable.
std::vector<char> coaccessible(const ExplicitAutomaton& a);

ExplicitAutomaton trim(const ExplicitAutomaton& a);
bool is_nonblocking(const ExplicitAutomaton& a);

struct ProductResult {
  ExplicitAutomaton automaton;
  std::size_t arity = 0;
  std::vector<StateId> tuples; ///< component states, arity entries per product state
  std::vector<StateId> parent; ///< BFS tree: predecessor state (kNoState at the root)
  std::vector<EventId> parent_event;

  std::span<const StateId> tuple(StateId s) const { return {tuples.data() + s * arity, arity}; }
};

/// Explicit synchronous product, reachable part only, BFS numbering. Events
/// are matched through sync_identity(); an event fires iff every component
/// whose alphabet contains it enables it. Marked iff all components marked.
ProductResult synchronous_product(std::span<const ExplicitAutomaton> components,
                                  std::size_t state_cap = kDefaultStateCap);

/// Line format: `states N initial I alphabet E...`, `mark S`, `trans S E T`.
std::string to_text(const ExplicitAutomaton& a);
ExplicitAutomaton parse_automaton(std::string_view text);

} // namespace brickctl
