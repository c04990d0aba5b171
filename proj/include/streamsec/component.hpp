#pragma once

// Declarative component state machines with assumption/guarantee structure.
//
// A component reads one interval of each input channel per time unit, fires
// every transition whose guard holds, and produces updated locals plus
// emissions. Locals not updated keep their value; outputs not emitted stay
// empty for that time unit. Strongly causal components emit at t+1, weakly
// causal ones within t.
//
// Guards and emitted values are built from a small term language (Term,
// Guard) instead of arbitrary callbacks so that specifications can be
// rendered, validated for undeclared names, and compared.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "streamsec/knowledge.hpp"
#include "streamsec/message.hpp"
#include "streamsec/result.hpp"
#include "streamsec/term.hpp"
#include "streamsec/timed_stream.hpp"

namespace streamsec {

/// Value of an enumerated state type (st0, initS, sendA1, ...).
struct Symbol {
  std::string name;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend std::strong_ordering operator<=>(const Symbol&, const Symbol&) = default;
};

using Value = std::variant<Event, Expression, InitMessage, Symbol>;

Value to_value(const Message& m);
std::optional<Message> to_message(const Value& v);
std::string render(const Value& v);

enum class EvalError {
  NotAnEncryption,
  NotASignature,
  WrongKey,
  OutOfRange,
  EmptyInterval,
  Unset,
  TypeMismatch,
};

std::string_view to_string(EvalError error);

using EvalResult = Result<Value, EvalError>;
using StepInputs = std::map<std::string, Interval>;

struct ComponentState {
  std::map<std::string, std::optional<Value>> locals;

  friend bool operator==(const ComponentState&, const ComponentState&) = default;
};

struct EvalContext {
  const StepInputs& inputs;
  const ComponentState& state;
  const std::map<std::string, EvalResult>& bindings;
};

/// Names a term or guard reads, by namespace.
struct References {
  std::set<std::string> channels;
  std::set<std::string> locals;
  std::set<std::string> bindings;
};

class Term {
 public:
  static Term constant(Value v);
  /// <a> as a constant expression.
  static Term atom(const Atom& a);
  static Term symbol(std::string name);
  static Term local(std::string name);
  /// A where-clause binding.
  static Term bound(std::string name);
  /// First message of the current interval of an input channel.
  static Term first(std::string channel);

  static Term enc(Term key, Term payload);
  static Term decr(Term key, Term payload);
  static Term sign(Term key, Term payload);
  static Term ext(Term key, Term payload);
  static Term element(Term e, Position position);
  /// Concatenation of the operands, each of which must evaluate to an expression.
  static Term seq(std::vector<Term> parts);

  static Term init_message(Term ung_value, Term key, Term msg);
  static Term ung_value(Term init);
  static Term key_of(Term init);
  static Term msg_of(Term init);

  EvalResult evaluate(const EvalContext& ctx) const;
  void collect(References& refs) const;
  std::string render() const;

  struct Node;

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class Guard {
 public:
  static Guard always();
  static Guard empty(std::string channel);
  static Guard nonempty(std::string channel);
  /// Holds iff both sides evaluate and are equal.
  static Guard equal(Term a, Term b);
  /// Negation of equal: holds when either side fails to evaluate.
  static Guard not_equal(Term a, Term b);

  friend Guard operator&&(Guard a, Guard b);
  friend Guard operator||(Guard a, Guard b);

  bool holds(const EvalContext& ctx) const;
  void collect(References& refs) const;
  std::string render() const;

  struct Node;

 private:
  explicit Guard(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Update {
  std::string local;
  Term value;
};

/// Copy the whole current interval of an input channel.
struct Forward {
  std::string from;
};

struct Emission {
  std::string channel;
  std::variant<Term, Forward> source;
};

struct Transition {
  std::string label;
  Guard guard;
  std::vector<Update> updates;
  std::vector<Emission> emissions;
};

struct PortDecl {
  std::string name;
  MessageType type;
};

struct LocalDecl {
  std::string name;
  std::string type_tag;
  std::optional<Value> initial;
};

struct WhereBinding {
  std::string name;
  Term term;
};

/// Assumption msg_n(channel).
struct MsgBound {
  std::string channel;
  std::size_t n;
};

struct InitialEmission {
  std::string channel;
  Message message;
};

enum class Causality { Strong, Weak };

std::string_view to_string(Causality c);

struct ComponentSpec {
  std::string name;
  std::vector<PortDecl> inputs;
  std::vector<PortDecl> outputs;
  std::vector<LocalDecl> locals;
  Causality causality = Causality::Strong;
  std::vector<MsgBound> assumption;
  std::vector<WhereBinding> where;
  std::vector<Transition> transitions;
  /// Emissions fixed at t = 0 independent of inputs.
  std::vector<InitialEmission> initial_emissions;

  std::set<Atom> private_keys;
  std::set<Atom> unguessable;
  std::set<Expression> local_secrets;
  /// Public material the component holds from the start.
  std::set<Expression> prior_knowledge;

  std::set<Atom> ks() const;
  const PortDecl* input(std::string_view port) const;
  const PortDecl* output(std::string_view port) const;

  /// The component's own knowledge base before any observation.
  KnowledgeBase initial_knowledge() const;
};

class SpecError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Checks the structural invariants of a specification. Throws SpecError.
void validate(const ComponentSpec& spec);

ComponentState initial_state(const ComponentSpec& spec);

class SimulationError : public std::runtime_error {
 public:
  enum class Kind { ConflictingUpdates, AssumptionViolated, UndefinedEmission, TypeMismatch };

  SimulationError(Kind kind, std::string component, Time time, const std::string& detail);

  Kind kind() const { return kind_; }
  const std::string& component() const { return component_; }
  Time time() const { return time_; }

 private:
  Kind kind_;
  std::string component_;
  Time time_;
};

std::string_view to_string(SimulationError::Kind kind);

struct StepResult {
  ComponentState next;
  std::map<std::string, Interval> emissions;
  /// Time unit the emissions belong to: t + 1 for strong, t for weak.
  Time emit_time = 0;
  /// Indices of fired transitions in declaration order.
  std::vector<std::size_t> fired;
};

/// One time unit of behaviour. Throws SimulationError.
StepResult step(const ComponentSpec& spec, const ComponentState& state, const StepInputs& inputs, Time t);

}  // namespace streamsec
