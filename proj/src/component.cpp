#include "streamsec/component.hpp"

#include <algorithm>

namespace streamsec {

Value to_value(const Message& m) {
  return std::visit([](const auto& x) -> Value { return x; }, m);
}

std::optional<Message> to_message(const Value& v) {
  if (std::holds_alternative<Symbol>(v)) return std::nullopt;
  return std::visit(
      [](const auto& x) -> std::optional<Message> {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Symbol>) {
          return std::nullopt;
        } else {
          return Message{x};
        }
      },
      v);
}

std::string render(const Value& v) {
  if (const auto* s = std::get_if<Symbol>(&v)) return s->name;
  return render(*to_message(v));
}

std::string_view to_string(EvalError error) {
  switch (error) {
    case EvalError::NotAnEncryption: return "NotAnEncryption";
    case EvalError::NotASignature: return "NotASignature";
    case EvalError::WrongKey: return "WrongKey";
    case EvalError::OutOfRange: return "OutOfRange";
    case EvalError::EmptyInterval: return "EmptyInterval";
    case EvalError::Unset: return "Unset";
    case EvalError::TypeMismatch: return "TypeMismatch";
  }
  return "?";
}

std::string_view to_string(Causality c) { return c == Causality::Strong ? "strong" : "weak"; }

namespace {

EvalError lift(CryptoError e) {
  switch (e) {
    case CryptoError::NotAnEncryption: return EvalError::NotAnEncryption;
    case CryptoError::NotASignature: return EvalError::NotASignature;
    case CryptoError::WrongKey: return EvalError::WrongKey;
    case CryptoError::OutOfRange: return EvalError::OutOfRange;
  }
  return EvalError::TypeMismatch;
}

Result<Expression, EvalError> expect_expression(const Value& v) {
  if (const auto* e = std::get_if<Expression>(&v)) return *e;
  return EvalError::TypeMismatch;
}

// A single-atom expression whose atom has one of the allowed kinds.
Result<Atom, EvalError> expect_atom(const Value& v, std::initializer_list<AtomKind> kinds) {
  const auto* e = std::get_if<Expression>(&v);
  if (e == nullptr || e->size() != 1 || !(*e)[0].is_atomic()) return EvalError::TypeMismatch;
  const Atom& a = (*e)[0].atom();
  if (std::find(kinds.begin(), kinds.end(), a.kind()) == kinds.end()) return EvalError::TypeMismatch;
  return a;
}

Result<Atom, EvalError> expect_encryptor(const Value& v) { return expect_atom(v, {AtomKind::Key, AtomKind::Var}); }

Result<InitMessage, EvalError> expect_init(const Value& v) {
  if (const auto* im = std::get_if<InitMessage>(&v)) return *im;
  return EvalError::TypeMismatch;
}

const char* position_prefix(Position p) {
  switch (p) {
    case Position::First: return "ft.";
    case Position::Second: return "snd.";
    case Position::Third: return "trd.";
  }
  return "?.";
}

}  // namespace

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
  enum class Op {
    Constant, Local, Bound, First,
    Enc, Decr, Sign, Ext, Element, Seq,
    InitMessage, UngValue, KeyOf, MsgOf,
  };

  Op op;
  std::optional<Value> value;
  std::string name;
  Position position = Position::First;
  std::vector<Term> args;
};

namespace {

std::shared_ptr<const Term::Node> make_node(Term::Node node) {
  return std::make_shared<const Term::Node>(std::move(node));
}

}  // namespace

Term Term::constant(Value v) { return Term(make_node({Node::Op::Constant, std::move(v), {}, {}, {}})); }
Term Term::atom(const Atom& a) { return constant(Expression{a}); }
Term Term::symbol(std::string name) { return constant(Symbol{std::move(name)}); }
Term Term::local(std::string name) { return Term(make_node({Node::Op::Local, {}, std::move(name), {}, {}})); }
Term Term::bound(std::string name) { return Term(make_node({Node::Op::Bound, {}, std::move(name), {}, {}})); }
Term Term::first(std::string channel) {
  return Term(make_node({Node::Op::First, {}, std::move(channel), {}, {}}));
}

Term Term::enc(Term key, Term payload) {
  return Term(make_node({Node::Op::Enc, {}, {}, {}, {std::move(key), std::move(payload)}}));
}
Term Term::decr(Term key, Term payload) {
  return Term(make_node({Node::Op::Decr, {}, {}, {}, {std::move(key), std::move(payload)}}));
}
Term Term::sign(Term key, Term payload) {
  return Term(make_node({Node::Op::Sign, {}, {}, {}, {std::move(key), std::move(payload)}}));
}
Term Term::ext(Term key, Term payload) {
  return Term(make_node({Node::Op::Ext, {}, {}, {}, {std::move(key), std::move(payload)}}));
}
Term Term::element(Term e, Position position) {
  return Term(make_node({Node::Op::Element, {}, {}, position, {std::move(e)}}));
}
Term Term::seq(std::vector<Term> parts) { return Term(make_node({Node::Op::Seq, {}, {}, {}, std::move(parts)})); }

Term Term::init_message(Term ung_value, Term key, Term msg) {
  return Term(make_node({Node::Op::InitMessage, {}, {}, {}, {std::move(ung_value), std::move(key), std::move(msg)}}));
}
Term Term::ung_value(Term init) { return Term(make_node({Node::Op::UngValue, {}, {}, {}, {std::move(init)}})); }
Term Term::key_of(Term init) { return Term(make_node({Node::Op::KeyOf, {}, {}, {}, {std::move(init)}})); }
Term Term::msg_of(Term init) { return Term(make_node({Node::Op::MsgOf, {}, {}, {}, {std::move(init)}})); }

EvalResult Term::evaluate(const EvalContext& ctx) const {
  const Node& n = *node_;
  using Op = Node::Op;

  // Binary crypto operators share operand evaluation.
  auto crypto = [&](auto&& op) -> EvalResult {
    auto k = n.args[0].evaluate(ctx);
    if (!k) return k.error();
    auto key = expect_encryptor(*k);
    if (!key) return key.error();
    auto p = n.args[1].evaluate(ctx);
    if (!p) return p.error();
    auto payload = expect_expression(*p);
    if (!payload) return payload.error();
    return op(*key, *payload);
  };
  auto destruct = [](auto fn) {
    return [fn](const Atom& key, const Expression& payload) -> EvalResult {
      auto r = fn(key, payload);
      if (!r) return lift(r.error());
      return Value{*r};
    };
  };
  auto init_field = [&](auto&& field) -> EvalResult {
    auto v = n.args[0].evaluate(ctx);
    if (!v) return v.error();
    auto im = expect_init(*v);
    if (!im) return im.error();
    return field(*im);
  };

  switch (n.op) {
    case Op::Constant: return *n.value;
    case Op::Local: {
      auto it = ctx.state.locals.find(n.name);
      if (it == ctx.state.locals.end() || !it->second) return EvalError::Unset;
      return *it->second;
    }
    case Op::Bound: {
      auto it = ctx.bindings.find(n.name);
      if (it == ctx.bindings.end()) return EvalError::Unset;
      return it->second;
    }
    case Op::First: {
      auto it = ctx.inputs.find(n.name);
      if (it == ctx.inputs.end() || it->second.empty()) return EvalError::EmptyInterval;
      return to_value(it->second.front());
    }
    case Op::Enc:
      return crypto([](const Atom& k, const Expression& e) -> EvalResult { return streamsec::enc(k, e); });
    case Op::Sign:
      return crypto([](const Atom& k, const Expression& e) -> EvalResult { return streamsec::sign(k, e); });
    case Op::Decr:
      return crypto(destruct([](const Atom& k, const Expression& e) { return streamsec::decr(k, e); }));
    case Op::Ext:
      return crypto(destruct([](const Atom& k, const Expression& e) { return streamsec::ext(k, e); }));
    case Op::Element: {
      auto v = n.args[0].evaluate(ctx);
      if (!v) return v.error();
      auto e = expect_expression(*v);
      if (!e) return e.error();
      auto item = streamsec::element(*e, n.position);
      if (!item) return lift(item.error());
      return Expression{*item};
    }
    case Op::Seq: {
      Expression out;
      for (const auto& part : n.args) {
        auto v = part.evaluate(ctx);
        if (!v) return v.error();
        auto e = expect_expression(*v);
        if (!e) return e.error();
        out = concat(out, *e);
      }
      return out;
    }
    case Op::InitMessage: {
      auto u = n.args[0].evaluate(ctx);
      if (!u) return u.error();
      auto ung = expect_atom(*u, {AtomKind::Secret});
      if (!ung) return ung.error();
      auto k = n.args[1].evaluate(ctx);
      if (!k) return k.error();
      auto key = expect_atom(*k, {AtomKind::Key});
      if (!key) return key.error();
      auto m = n.args[2].evaluate(ctx);
      if (!m) return m.error();
      auto msg = expect_expression(*m);
      if (!msg) return msg.error();
      return InitMessage{*ung, *key, *msg};
    }
    case Op::UngValue:
      return init_field([](const InitMessage& im) -> EvalResult { return Expression{im.ung_value}; });
    case Op::KeyOf:
      return init_field([](const InitMessage& im) -> EvalResult { return Expression{im.key}; });
    case Op::MsgOf:
      return init_field([](const InitMessage& im) -> EvalResult { return im.msg; });
  }
  return EvalError::TypeMismatch;
}

void Term::collect(References& refs) const {
  const Node& n = *node_;
  switch (n.op) {
    case Node::Op::Local: refs.locals.insert(n.name); break;
    case Node::Op::Bound: refs.bindings.insert(n.name); break;
    case Node::Op::First: refs.channels.insert(n.name); break;
    default: break;
  }
  for (const auto& arg : n.args) arg.collect(refs);
}

std::string Term::render() const {
  const Node& n = *node_;
  auto call = [&](const char* f) {
    std::string out = std::string(f) + "(";
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i != 0) out += ", ";
      out += n.args[i].render();
    }
    return out + ")";
  };
  switch (n.op) {
    case Node::Op::Constant: return streamsec::render(*n.value);
    case Node::Op::Local:
    case Node::Op::Bound: return n.name;
    case Node::Op::First: return "ft." + n.name + "^t";
    case Node::Op::Enc: return call("Enc");
    case Node::Op::Decr: return call("Decr");
    case Node::Op::Sign: return call("Sign");
    case Node::Op::Ext: return call("Ext");
    case Node::Op::Element: return position_prefix(n.position) + n.args[0].render();
    case Node::Op::Seq: {
      std::string out = "<";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i != 0) out += " ^ ";
        out += n.args[i].render();
      }
      return out + ">";
    }
    case Node::Op::InitMessage: return call("im");
    case Node::Op::UngValue: return call("ungValue");
    case Node::Op::KeyOf: return call("key");
    case Node::Op::MsgOf: return call("msg");
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Guard

struct Guard::Node {
  enum class Op { Always, Empty, NonEmpty, Equal, NotEqual, And, Or };

  Op op;
  std::string channel;
  std::vector<Term> terms;
  std::vector<Guard> children;
};

namespace {

std::shared_ptr<const Guard::Node> make_guard(Guard::Node node) {
  return std::make_shared<const Guard::Node>(std::move(node));
}

bool evaluates_equal(const Term& a, const Term& b, const EvalContext& ctx) {
  auto va = a.evaluate(ctx);
  if (!va) return false;
  auto vb = b.evaluate(ctx);
  if (!vb) return false;
  return *va == *vb;
}

}  // namespace

Guard Guard::always() { return Guard(make_guard({Node::Op::Always, {}, {}, {}})); }
Guard Guard::empty(std::string channel) { return Guard(make_guard({Node::Op::Empty, std::move(channel), {}, {}})); }
Guard Guard::nonempty(std::string channel) {
  return Guard(make_guard({Node::Op::NonEmpty, std::move(channel), {}, {}}));
}
Guard Guard::equal(Term a, Term b) {
  return Guard(make_guard({Node::Op::Equal, {}, {std::move(a), std::move(b)}, {}}));
}
Guard Guard::not_equal(Term a, Term b) {
  return Guard(make_guard({Node::Op::NotEqual, {}, {std::move(a), std::move(b)}, {}}));
}
Guard operator&&(Guard a, Guard b) {
  return Guard(make_guard({Guard::Node::Op::And, {}, {}, {std::move(a), std::move(b)}}));
}
Guard operator||(Guard a, Guard b) {
  return Guard(make_guard({Guard::Node::Op::Or, {}, {}, {std::move(a), std::move(b)}}));
}

bool Guard::holds(const EvalContext& ctx) const {
  const Node& n = *node_;
  auto interval_empty = [&] {
    auto it = ctx.inputs.find(n.channel);
    return it == ctx.inputs.end() || it->second.empty();
  };
  switch (n.op) {
    case Node::Op::Always: return true;
    case Node::Op::Empty: return interval_empty();
    case Node::Op::NonEmpty: return !interval_empty();
    case Node::Op::Equal: return evaluates_equal(n.terms[0], n.terms[1], ctx);
    case Node::Op::NotEqual: return !evaluates_equal(n.terms[0], n.terms[1], ctx);
    case Node::Op::And: return n.children[0].holds(ctx) && n.children[1].holds(ctx);
    case Node::Op::Or: return n.children[0].holds(ctx) || n.children[1].holds(ctx);
  }
  return false;
}

void Guard::collect(References& refs) const {
  const Node& n = *node_;
  if (n.op == Node::Op::Empty || n.op == Node::Op::NonEmpty) refs.channels.insert(n.channel);
  for (const auto& t : n.terms) t.collect(refs);
  for (const auto& g : n.children) g.collect(refs);
}

std::string Guard::render() const {
  const Node& n = *node_;
  switch (n.op) {
    case Node::Op::Always: return "true";
    case Node::Op::Empty: return n.channel + "^t = <>";
    case Node::Op::NonEmpty: return n.channel + "^t != <>";
    case Node::Op::Equal: return n.terms[0].render() + " = " + n.terms[1].render();
    case Node::Op::NotEqual: return n.terms[0].render() + " != " + n.terms[1].render();
    case Node::Op::And: return "(" + n.children[0].render() + " && " + n.children[1].render() + ")";
    case Node::Op::Or: return "(" + n.children[0].render() + " || " + n.children[1].render() + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ComponentSpec

std::set<Atom> ComponentSpec::ks() const {
  std::set<Atom> out = private_keys;
  out.insert(unguessable.begin(), unguessable.end());
  return out;
}

namespace {

const PortDecl* find_port(const std::vector<PortDecl>& ports, std::string_view name) {
  auto it = std::find_if(ports.begin(), ports.end(), [&](const PortDecl& p) { return p.name == name; });
  return it == ports.end() ? nullptr : &*it;
}

}  // namespace

const PortDecl* ComponentSpec::input(std::string_view port) const { return find_port(inputs, port); }
const PortDecl* ComponentSpec::output(std::string_view port) const { return find_port(outputs, port); }

KnowledgeBase ComponentSpec::initial_knowledge() const {
  std::set<Expression> initial = local_secrets;
  initial.insert(prior_knowledge.begin(), prior_knowledge.end());
  for (const auto& a : ks()) initial.insert(Expression{a});
  return KnowledgeBase(std::move(initial), ks());
}

void validate(const ComponentSpec& spec) {
  auto fail = [&](const std::string& what) { throw SpecError("component '" + spec.name + "': " + what); };

  if (spec.name.empty()) throw SpecError("component without a name");

  std::set<std::string> ports;
  for (const auto& p : spec.inputs) {
    if (!ports.insert(p.name).second) fail("duplicate port '" + p.name + "'");
  }
  for (const auto& p : spec.outputs) {
    if (!ports.insert(p.name).second) fail("port '" + p.name + "' is both input and output or duplicated");
  }

  std::set<std::string> locals;
  for (const auto& l : spec.locals) {
    if (!locals.insert(l.name).second) fail("duplicate local '" + l.name + "'");
  }

  for (const auto& a : spec.assumption) {
    if (spec.input(a.channel) == nullptr) fail("assumption on unknown input '" + a.channel + "'");
  }

  std::set<std::string> bound;
  auto check_refs = [&](const References& refs, const std::string& where) {
    for (const auto& c : refs.channels) {
      if (spec.input(c) == nullptr) fail(where + " reads unknown input '" + c + "'");
    }
    for (const auto& l : refs.locals) {
      if (locals.count(l) == 0) fail(where + " reads undeclared local '" + l + "'");
    }
    for (const auto& b : refs.bindings) {
      if (bound.count(b) == 0) fail(where + " reads unbound name '" + b + "'");
    }
  };

  for (const auto& w : spec.where) {
    References refs;
    w.term.collect(refs);
    check_refs(refs, "where-binding '" + w.name + "'");
    if (!bound.insert(w.name).second) fail("duplicate where-binding '" + w.name + "'");
  }

  for (const auto& tr : spec.transitions) {
    const std::string where = "transition '" + tr.label + "'";
    References refs;
    tr.guard.collect(refs);
    for (const auto& u : tr.updates) {
      if (locals.count(u.local) == 0) fail(where + " updates undeclared local '" + u.local + "'");
      u.value.collect(refs);
    }
    for (const auto& e : tr.emissions) {
      const PortDecl* out = spec.output(e.channel);
      if (out == nullptr) fail(where + " emits on unknown output '" + e.channel + "'");
      if (const auto* fwd = std::get_if<Forward>(&e.source)) {
        const PortDecl* in = spec.input(fwd->from);
        if (in == nullptr) fail(where + " forwards unknown input '" + fwd->from + "'");
        if (in->type != out->type) fail(where + " forwards '" + fwd->from + "' onto a channel of another type");
      } else {
        std::get<Term>(e.source).collect(refs);
      }
    }
    check_refs(refs, where);
  }

  for (const auto& ie : spec.initial_emissions) {
    const PortDecl* out = spec.output(ie.channel);
    if (out == nullptr) fail("initial emission on unknown output '" + ie.channel + "'");
    if (type_of(ie.message) != out->type) fail("initial emission on '" + ie.channel + "' has the wrong type");
  }

  for (const auto& k : spec.private_keys) {
    if (!k.is_key()) fail("private key '" + k.label() + "' is not a key");
  }
  for (const auto& s : spec.unguessable) {
    if (s.kind() != AtomKind::Secret) fail("unguessable value '" + s.label() + "' is not a secret");
  }
}

ComponentState initial_state(const ComponentSpec& spec) {
  ComponentState state;
  for (const auto& l : spec.locals) state.locals[l.name] = l.initial;
  return state;
}

// ---------------------------------------------------------------------------
// step

SimulationError::SimulationError(Kind kind, std::string component, Time time, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " in " + component + " at t=" + std::to_string(time) + ": " +
                         detail),
      kind_(kind),
      component_(std::move(component)),
      time_(time) {}

std::string_view to_string(SimulationError::Kind kind) {
  switch (kind) {
    case SimulationError::Kind::ConflictingUpdates: return "ConflictingUpdates";
    case SimulationError::Kind::AssumptionViolated: return "AssumptionViolated";
    case SimulationError::Kind::UndefinedEmission: return "UndefinedEmission";
    case SimulationError::Kind::TypeMismatch: return "TypeMismatch";
  }
  return "?";
}

StepResult step(const ComponentSpec& spec, const ComponentState& state, const StepInputs& inputs, Time t) {
  auto error = [&](SimulationError::Kind kind, const std::string& detail) {
    return SimulationError(kind, spec.name, t, detail);
  };

  for (const auto& a : spec.assumption) {
    auto it = inputs.find(a.channel);
    std::size_t n = it == inputs.end() ? 0 : it->second.size();
    if (n > a.n) {
      throw error(SimulationError::Kind::AssumptionViolated,
                  "msg_" + std::to_string(a.n) + "(" + a.channel + ") received " + std::to_string(n));
    }
  }

  std::map<std::string, EvalResult> bindings;
  const EvalContext ctx{inputs, state, bindings};
  for (const auto& w : spec.where) bindings.insert_or_assign(w.name, w.term.evaluate(ctx));

  StepResult result;
  result.emit_time = spec.causality == Causality::Strong ? t + 1 : t;
  for (std::size_t i = 0; i < spec.transitions.size(); ++i) {
    if (spec.transitions[i].guard.holds(ctx)) result.fired.push_back(i);
  }

  std::map<std::string, Value> updates;
  for (auto i : result.fired) {
    const auto& tr = spec.transitions[i];
    for (const auto& u : tr.updates) {
      auto v = u.value.evaluate(ctx);
      if (!v) {
        throw error(SimulationError::Kind::UndefinedEmission,
                    tr.label + ": " + u.local + "' = " + u.value.render() + " is " + std::string(to_string(v.error())));
      }
      auto [it, inserted] = updates.try_emplace(u.local, *v);
      if (!inserted && it->second != *v) {
        throw error(SimulationError::Kind::ConflictingUpdates, tr.label + " writes '" + u.local + "' differently");
      }
    }
    for (const auto& e : tr.emissions) {
      Interval out;
      if (const auto* fwd = std::get_if<Forward>(&e.source)) {
        auto it = inputs.find(fwd->from);
        if (it != inputs.end()) out = it->second;
      } else {
        const Term& term = std::get<Term>(e.source);
        auto v = term.evaluate(ctx);
        if (!v) {
          throw error(SimulationError::Kind::UndefinedEmission,
                      tr.label + ": " + e.channel + " = " + term.render() + " is " + std::string(to_string(v.error())));
        }
        auto m = to_message(*v);
        if (!m || type_of(*m) != spec.output(e.channel)->type) {
          throw error(SimulationError::Kind::TypeMismatch, tr.label + ": " + e.channel + " = " + render(*v));
        }
        out.push_back(std::move(*m));
      }
      if (out.empty()) continue;
      auto [it, inserted] = result.emissions.try_emplace(e.channel, out);
      if (!inserted && it->second != out) {
        throw error(SimulationError::Kind::ConflictingUpdates, tr.label + " emits on '" + e.channel + "' differently");
      }
    }
  }

  result.next = state;
  for (auto& [name, v] : updates) result.next.locals[name] = std::move(v);
  return result;
}

}  // namespace streamsec
