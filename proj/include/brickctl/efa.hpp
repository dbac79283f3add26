#pragma once

// Extended finite automata over a shared table of bounded integer variables.

#include "brickctl/errors.hpp"
#include "brickctl/event.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace brickctl {

class ExplicitAutomaton;

using VarId = std::uint32_t;
using LocId = std::uint32_t;

struct Variable {
  std::string name;
  int lo = 0;
  int hi = 0;
  int initial = 0;
};

class VariableTable {
public:
  /// Throws ModelError on a duplicate name, an empty domain, or an initial
  /// value outside the domain.
  VarId declare(std::string name, int lo, int hi, int initial);

  VarId id(std::string_view name) const; ///< throws ModelError if undeclared
  std::optional<VarId> find(std::string_view name) const;

  const Variable& operator[](VarId v) const { return vars_[v]; }
  std::size_t size() const noexcept { return vars_.size(); }
  std::span<const Variable> variables() const noexcept { return vars_; }

private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, VarId> index_;
};

/// Total assignment of the table's variables, indexed by VarId.
class Valuation {
public:
  Valuation() = default;
  explicit Valuation(std::vector<int> values) : values_(std::move(values)) {}
  static Valuation initial(const VariableTable& table);

  int operator[](VarId v) const { return values_[v]; }
  int& operator[](VarId v) { return values_[v]; }
  std::span<const int> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const Valuation&, const Valuation&) = default;

private:
  std::vector<int> values_;
};

/// Integer operand: a constant, or a variable read plus a constant offset.
class Term {
public:
  static Term constant(int c) { return Term(kNoVar, c); }
  static Term variable(VarId v, int offset = 0) { return Term(v, offset); }

  bool is_constant() const noexcept { return var_ == kNoVar; }
  VarId var() const noexcept { return var_; }
  int offset() const noexcept { return offset_; }

  int eval(std::span<const int> v) const { return is_constant() ? offset_ : v[var_] + offset_; }

  Term operator+(int k) const { return Term(var_, offset_ + k); }
  Term operator-(int k) const { return Term(var_, offset_ - k); }

  friend bool operator==(const Term&, const Term&) = default;

private:
  static constexpr VarId kNoVar = ~VarId{0};
  Term(VarId v, int off) : var_(v), offset_(off) {}

  VarId var_;
  int offset_;
};

enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

/// Immutable boolean expression tree. Copies share structure.
class Guard {
public:
  enum class Kind : std::uint8_t { Const, Cmp, And, Or, Not, Xor };

  Guard() : Guard(truth()) {}

  static Guard truth();
  static Guard falsity();
  static Guard cmp(Term lhs, CmpOp op, Term rhs);
  static Guard all(std::vector<Guard> parts);
  static Guard any(std::vector<Guard> parts);
  static Guard negate(Guard g);
  static Guard exclusive(Guard a, Guard b);

  Kind kind() const noexcept;
  bool is_true() const noexcept;
  bool is_false() const noexcept;

  /// Conjuncts of an And node, or the guard itself.
  std::vector<Guard> conjuncts() const;

  bool eval(std::span<const int> v) const;

  /// Largest variable id read, if any.
  std::optional<VarId> max_var() const;

  std::string to_string(const VariableTable& table) const;

private:
  struct Node;
  explicit Guard(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Guard operator&&(Guard a, Guard b);
Guard operator||(Guard a, Guard b);
Guard operator!(Guard a);

inline Guard eq(Term a, Term b) { return Guard::cmp(a, CmpOp::Eq, b); }
inline Guard ne(Term a, Term b) { return Guard::cmp(a, CmpOp::Ne, b); }
inline Guard lt(Term a, Term b) { return Guard::cmp(a, CmpOp::Lt, b); }
inline Guard le(Term a, Term b) { return Guard::cmp(a, CmpOp::Le, b); }
inline Guard gt(Term a, Term b) { return Guard::cmp(a, CmpOp::Gt, b); }
inline Guard ge(Term a, Term b) { return Guard::cmp(a, CmpOp::Ge, b); }

struct Assignment {
  VarId target;
  Term value;
};

using ActionList = std::vector<Assignment>;

bool eval_guard(const Guard& g, const Valuation& v);

/// Applies the assignments left to right. Returns nullopt when any
/// intermediate value leaves its variable's domain.
std::optional<Valuation> apply_actions(const ActionList& actions, const Valuation& v,
                                       const VariableTable& table);

struct EfaTransition {
  LocId source;
  Event event;
  Guard guard;
  ActionList actions;
  LocId target;
};

class ExtendedAutomaton {
public:
  ExtendedAutomaton(std::string name, std::shared_ptr<const VariableTable> vars);

  LocId add_location(std::string name, bool marked);
  void set_initial(LocId l);
  void add_event(const Event& e);
  /// Adds the event to the alphabet. Throws ModelError when the guard or an
  /// assignment touches an undeclared variable.
  void add_transition(LocId source, const Event& e, Guard g, ActionList actions, LocId target);

  const std::string& name() const noexcept { return name_; }
  const std::shared_ptr<const VariableTable>& variables() const noexcept { return vars_; }
  std::size_t num_locations() const noexcept { return locations_.size(); }
  const std::string& location_name(LocId l) const { return locations_[l]; }
  bool is_marked(LocId l) const { return marked_[l] != 0; }
  LocId initial() const noexcept { return initial_; }
  std::span<const Event> alphabet() const noexcept { return alphabet_; }
  bool has_event(const Event& e) const;
  std::span<const EfaTransition> transitions() const noexcept { return transitions_; }

private:
  std::string name_;
  std::shared_ptr<const VariableTable> vars_;
  std::vector<std::string> locations_;
  std::vector<char> marked_;
  LocId initial_ = 0;
  std::vector<Event> alphabet_; // sorted
  std::vector<EfaTransition> transitions_;
};

/// Symbolic synchronous product: Cartesian locations, conjoined guards,
/// concatenated actions. Throws ModelError on a write conflict or when the
/// operands do not share one variable table.
ExtendedAutomaton compose(std::span<const ExtendedAutomaton> efas);

struct FlattenOptions {
  std::size_t state_cap = kDefaultStateCap;
  /// Optional filter on successor valuations; rejected successors are dropped
  /// together with the transition leading to them.
  std::function<bool(std::span<const int>)> admit;
};

/// Explicit reachable state space of a network of EFAs run in synchronous
/// product. States are (location vector, valuation) pairs numbered in BFS
/// discovery order with events tried in alphabet order.
ExplicitAutomaton flatten(std::span<const ExtendedAutomaton> network,
                          const FlattenOptions& options = {});
ExplicitAutomaton flatten(const ExtendedAutomaton& efa, const FlattenOptions& options = {});

} // namespace brickctl
