#include "streamsec/composite.hpp"

#include <algorithm>
#include <sstream>

namespace streamsec {

std::string render(const Endpoint& e) { return e.component + "." + e.port; }

std::string render(const Wire& w) {
  std::string out = render(w.producer) + " ->";
  if (w.consumers.empty()) return out + " (nothing)";
  for (std::size_t i = 0; i < w.consumers.size(); ++i) {
    out += (i == 0 ? " " : ", ") + render(w.consumers[i]);
  }
  return out;
}

bool InterfaceReport::ok() const {
  return problems.empty() && std::all_of(wires.begin(), wires.end(), [](const WireCheck& w) { return w.ok; });
}

std::string InterfaceReport::render() const {
  auto type_name = [](const std::optional<MessageType>& t) {
    return t ? std::string(to_string(*t)) : std::string("?");
  };
  std::ostringstream out;
  for (const auto& w : wires) {
    out << (w.ok ? "ok       " : "MISMATCH ") << w.wire << " [" << type_name(w.producer_type) << " ->";
    for (std::size_t i = 0; i < w.consumer_types.size(); ++i) {
      out << (i == 0 ? " " : ", ") << type_name(w.consumer_types[i]);
    }
    out << "]\n";
    for (const auto& p : w.problems) out << "         " << p << "\n";
  }
  for (const auto& p : problems) out << "problem  " << p << "\n";
  out << "interfaces: " << (ok() ? "OK" : "FAILED") << " (" << wires.size() << " wires)\n";
  return out.str();
}

InterfaceError::InterfaceError(InterfaceReport report)
    : std::runtime_error("interface mismatch:\n" + report.render()), report_(std::move(report)) {}

namespace {

const ComponentSpec* find_part(const std::vector<ComponentSpec>& parts, std::string_view name) {
  auto it = std::find_if(parts.begin(), parts.end(), [&](const ComponentSpec& p) { return p.name == name; });
  return it == parts.end() ? nullptr : &*it;
}

// Kahn's algorithm over weakly causal parts. On a cycle the order is
// partial: parts on or behind the cycle are missing from it.
std::vector<std::size_t> weak_dataflow_order(const std::vector<ComponentSpec>& parts,
                                                            const std::vector<Wire>& wiring) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].causality == Causality::Weak) index.emplace(parts[i].name, i);
  }
  std::map<std::size_t, std::set<std::size_t>> successors;
  std::map<std::size_t, std::size_t> indegree;
  for (const auto& [_, i] : index) indegree[i] = 0;
  for (const auto& w : wiring) {
    auto from = index.find(w.producer.component);
    if (from == index.end()) continue;
    for (const auto& c : w.consumers) {
      auto to = index.find(c.component);
      if (to == index.end()) continue;
      if (successors[from->second].insert(to->second).second) ++indegree[to->second];
    }
  }

  std::vector<std::size_t> ready;
  for (const auto& [i, d] : indegree) {
    if (d == 0) ready.push_back(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    auto i = ready.back();
    ready.pop_back();
    order.push_back(i);
    for (auto j : successors[i]) {
      if (--indegree[j] == 0) ready.push_back(j);
    }
  }
  return order;
}

std::size_t weak_count(const std::vector<ComponentSpec>& parts) {
  return static_cast<std::size_t>(
      std::count_if(parts.begin(), parts.end(), [](const ComponentSpec& p) { return p.causality == Causality::Weak; }));
}

}  // namespace

InterfaceReport check_interfaces(const std::vector<ComponentSpec>& parts, const std::vector<Wire>& wiring) {
  InterfaceReport report;

  std::set<std::string> names;
  for (const auto& p : parts) {
    if (!names.insert(p.name).second) report.problems.push_back("duplicate component name '" + p.name + "'");
  }

  std::map<Endpoint, std::string> fed_by;        // consumer port -> wire
  std::map<std::string, std::string> channels;   // channel name -> wire
  std::set<Endpoint> wired_outputs;

  for (const auto& w : wiring) {
    WireCheck check;
    check.wire = render(w);
    check.channel = w.channel();
    auto problem = [&](std::string p) {
      check.ok = false;
      check.problems.push_back(std::move(p));
    };

    const ComponentSpec* producer = find_part(parts, w.producer.component);
    if (producer == nullptr) {
      problem("unknown component '" + w.producer.component + "'");
    } else if (const PortDecl* out = producer->output(w.producer.port)) {
      check.producer_type = out->type;
    } else if (producer->input(w.producer.port) != nullptr) {
      problem(render(w.producer) + " is an input port, not an output");
    } else {
      problem(render(w.producer) + " is not a port of " + producer->name);
    }

    if (!wired_outputs.insert(w.producer).second) problem(render(w.producer) + " drives more than one wire");
    if (auto [it, inserted] = channels.emplace(w.channel(), check.wire); !inserted && it->second != check.wire) {
      problem("channel name '" + w.channel() + "' is also produced by " + it->second);
    }
    if (w.consumers.empty()) problem("dangling wire: no consumer");

    for (const auto& c : w.consumers) {
      std::optional<MessageType> type;
      const ComponentSpec* consumer = find_part(parts, c.component);
      if (consumer == nullptr) {
        problem("unknown component '" + c.component + "'");
      } else if (const PortDecl* in = consumer->input(c.port)) {
        type = in->type;
        if (check.producer_type && *check.producer_type != in->type) {
          problem("type tag " + std::string(to_string(*check.producer_type)) + " does not match " +
                  std::string(to_string(in->type)) + " at " + render(c));
        }
      } else if (consumer->output(c.port) != nullptr) {
        problem(render(c) + " is an output port, not an input");
      } else {
        problem(render(c) + " is not a port of " + consumer->name);
      }
      check.consumer_types.push_back(type);
      if (auto [it, inserted] = fed_by.emplace(c, check.wire); !inserted) {
        problem(render(c) + " has two producers (also " + it->second + ")");
      }
    }
    report.wires.push_back(std::move(check));
  }

  // Unconnected ports become external channels named after the port.
  std::map<std::string, MessageType> external_in;
  for (const auto& p : parts) {
    for (const auto& out : p.outputs) {
      Endpoint e{p.name, out.name};
      if (wired_outputs.count(e) != 0) continue;
      if (auto [it, inserted] = channels.emplace(out.name, render(e)); !inserted) {
        report.problems.push_back("external output " + render(e) + " collides with channel '" + out.name +
                                  "' of " + it->second);
      }
    }
  }
  for (const auto& p : parts) {
    for (const auto& in : p.inputs) {
      Endpoint e{p.name, in.name};
      if (fed_by.count(e) != 0) continue;
      if (channels.count(in.name) != 0) {
        report.problems.push_back("unconnected input " + render(e) + " shares its name with internal channel '" +
                                  in.name + "'");
      }
      if (auto [it, inserted] = external_in.emplace(in.name, in.type); !inserted && it->second != in.type) {
        report.problems.push_back("external input '" + in.name + "' is declared with different type tags");
      }
    }
  }

  auto order = weak_dataflow_order(parts, wiring);
  if (order.size() != weak_count(parts)) {
    std::set<std::string> stuck;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].causality == Causality::Weak && std::find(order.begin(), order.end(), i) == order.end()) {
        stuck.insert(parts[i].name);
      }
    }
    bool named = false;
    for (std::size_t i = 0; i < wiring.size(); ++i) {
      const auto& w = wiring[i];
      bool inside = stuck.count(w.producer.component) != 0 &&
                    std::any_of(w.consumers.begin(), w.consumers.end(),
                                [&](const Endpoint& c) { return stuck.count(c.component) != 0; });
      if (!inside) continue;
      report.wires[i].ok = false;
      report.wires[i].problems.push_back("lies on or behind a same-time cycle among weakly causal components");
      named = true;
    }
    if (!named) report.problems.push_back("same-time cycle among weakly causal components");
  }
  return report;
}

Composite Composite::compose(std::vector<ComponentSpec> parts, std::vector<Wire> wiring) {
  for (const auto& p : parts) validate(p);
  auto report = check_interfaces(parts, wiring);
  if (!report.ok()) throw InterfaceError(std::move(report));

  Composite c;
  for (const auto& w : wiring) {
    const auto& producer = *find_part(parts, w.producer.component);
    c.channel_types_.emplace(w.channel(), producer.output(w.producer.port)->type);
    for (const auto& consumer : w.consumers) c.input_channels_.emplace(consumer, w.channel());
  }
  std::set<Endpoint> wired_outputs;
  for (const auto& w : wiring) wired_outputs.insert(w.producer);

  for (const auto& p : parts) {
    for (const auto& out : p.outputs) {
      Endpoint e{p.name, out.name};
      if (wired_outputs.count(e) != 0) continue;
      c.external_outputs_.push_back({out.name, e, out.type});
      c.channel_types_.emplace(out.name, out.type);
    }
    for (const auto& in : p.inputs) {
      Endpoint e{p.name, in.name};
      if (c.input_channels_.count(e) != 0) continue;
      c.external_inputs_.push_back({in.name, e, in.type});
      c.input_channels_.emplace(e, in.name);
      c.channel_types_.emplace(in.name, in.type);
    }
    c.private_keys_.insert(p.private_keys.begin(), p.private_keys.end());
    c.unguessable_.insert(p.unguessable.begin(), p.unguessable.end());
    c.local_secrets_.insert(p.local_secrets.begin(), p.local_secrets.end());
  }

  c.weak_order_ = weak_dataflow_order(parts, wiring);
  c.parts_ = std::move(parts);
  c.wiring_ = std::move(wiring);
  return c;
}

const ComponentSpec& Composite::part(std::string_view name) const {
  const ComponentSpec* p = find_part(parts_, name);
  if (p == nullptr) throw LookupError("no component '" + std::string(name) + "' in composite");
  return *p;
}

bool Composite::has_part(std::string_view name) const { return find_part(parts_, name) != nullptr; }

std::set<Atom> Composite::ks() const {
  std::set<Atom> out = private_keys_;
  out.insert(unguessable_.begin(), unguessable_.end());
  return out;
}

std::array<PropertyCheck, 6> ks_union_check(const Composite& c, std::span<const Atom> probes) {
  const auto& parts = c.parts();
  auto in_some_part = [&](const Atom& xb, auto member) {
    return std::any_of(parts.begin(), parts.end(), [&](const ComponentSpec& p) { return (p.*member).count(xb) != 0; });
  };

  std::array<PropertyCheck, 6> checks{{
      {1, "xb in K_C -> xb in K_Ci for some i", true, {}},
      {2, "xb in S_C -> xb in S_Ci for some i", true, {}},
      {3, "xb in K_Ci -> xb in K_C", true, {}},
      {4, "xb in S_Ci -> xb in S_C", true, {}},
      {5, "xb not in KS_Ci for all i -> xb not in KS_C", true, {}},
      {6, "external input (output) of C is an input (output) of some part", true, {}},
  }};
  auto violate = [&](int number, std::string what) {
    checks[number - 1].holds = false;
    checks[number - 1].counterexamples.push_back(std::move(what));
  };

  for (const auto& xb : c.private_keys()) {
    if (!in_some_part(xb, &ComponentSpec::private_keys)) violate(1, xb.label());
  }
  for (const auto& xb : c.unguessable()) {
    if (!in_some_part(xb, &ComponentSpec::unguessable)) violate(2, xb.label());
  }
  for (const auto& p : parts) {
    for (const auto& xb : p.private_keys) {
      if (c.private_keys().count(xb) == 0) violate(3, p.name + ":" + xb.label());
    }
    for (const auto& xb : p.unguessable) {
      if (c.unguessable().count(xb) == 0) violate(4, p.name + ":" + xb.label());
    }
  }

  std::set<Atom> universe(probes.begin(), probes.end());
  for (const auto& p : parts) {
    auto ks = p.ks();
    universe.insert(ks.begin(), ks.end());
  }
  auto composite_ks = c.ks();
  universe.insert(composite_ks.begin(), composite_ks.end());
  for (const auto& xb : universe) {
    bool in_no_part = std::none_of(parts.begin(), parts.end(), [&](const ComponentSpec& p) { return p.ks().count(xb); });
    if (in_no_part && composite_ks.count(xb) != 0) violate(5, xb.label());
  }

  for (const auto& x : c.external_inputs()) {
    bool found = std::any_of(parts.begin(), parts.end(), [&](const ComponentSpec& p) { return p.input(x.channel); });
    if (!found) violate(6, "input " + x.channel);
  }
  for (const auto& x : c.external_outputs()) {
    bool found = std::any_of(parts.begin(), parts.end(), [&](const ComponentSpec& p) { return p.output(x.channel); });
    if (!found) violate(6, "output " + x.channel);
  }
  return checks;
}

// ---------------------------------------------------------------------------
// Simulation

const Channel& Trace::channel(std::string_view name) const {
  auto it = channels_.find(std::string(name));
  if (it == channels_.end()) throw LookupError("no channel '" + std::string(name) + "' in trace");
  return it->second;
}

const std::vector<Observation>& Trace::observations(std::string_view component) const {
  static const std::vector<Observation> kNone;
  auto it = observations_.find(component);
  return it == observations_.end() ? kNone : it->second;
}

std::string Trace::render() const {
  std::string out;
  for (Time t = 0;; ++t) {
    for (const auto& [name, ch] : channels_) {
      for (const auto& m : ch.interval(t)) {
        out += "t=" + std::to_string(t) + " " + name + " : " + streamsec::render(m) + "\n";
      }
    }
    if (t == horizon_) break;
  }
  return out;
}

KnowledgeBase Trace::knowledge_of(const ComponentSpec& spec) const {
  KnowledgeBase kb = spec.initial_knowledge();
  for (const auto& obs : observations(spec.name)) {
    auto e = as_expression(obs.message);
    if (!e.empty()) kb = kb.observe(obs.time, std::move(e));
  }
  return kb;
}

Trace run(const Composite& c, Time horizon, const std::map<std::string, TimedStream>& external_inputs) {
  Trace trace;
  trace.horizon_ = horizon;
  for (const auto& [name, type] : c.channel_types()) trace.channels_.emplace(name, Channel(name, type));

  for (const auto& [name, stream] : external_inputs) {
    bool external = std::any_of(c.external_inputs().begin(), c.external_inputs().end(),
                                [&](const ExternalPort& p) { return p.channel == name; });
    if (!external) throw std::invalid_argument("'" + name + "' is not an external input channel");
    auto& ch = trace.channels_.at(name);
    for (const auto& [t, xs] : stream.populated()) {
      if (t > horizon) break;
      for (const auto& m : xs) ch.emit(t, m);
    }
  }

  const auto& parts = c.parts();
  std::vector<ComponentState> states;
  for (const auto& p : parts) {
    states.push_back(initial_state(p));
    for (const auto& ie : p.initial_emissions) trace.channels_.at(ie.channel).emit(0, ie.message);
  }

  auto run_part = [&](std::size_t i, Time t) {
    const ComponentSpec& spec = parts[i];
    StepInputs inputs;
    auto& seen = trace.observations_[spec.name];
    for (const auto& port : spec.inputs) {
      const auto& channel = c.input_channels().at({spec.name, port.name});
      const auto& xs = trace.channels_.at(channel).interval(t);
      inputs.emplace(port.name, xs);
      for (const auto& m : xs) seen.push_back({t, channel, m});
    }

    StepResult r = step(spec, states[i], inputs, t);
    if (r.emit_time <= horizon) {
      for (const auto& [port, xs] : r.emissions) {
        auto& ch = trace.channels_.at(port);
        for (const auto& m : xs) ch.emit(r.emit_time, m);
      }
    }
    trace.steps_.push_back({t, spec.name, states[i], r.next, r.fired, r.emissions, r.emit_time});
    states[i] = std::move(r.next);
  };

  for (Time t = 0;; ++t) {
    for (auto i : c.weak_order()) run_part(i, t);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].causality == Causality::Strong) run_part(i, t);
    }
    if (t == horizon) break;
  }
  return trace;
}

}  // namespace streamsec
