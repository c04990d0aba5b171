#pragma once

// Composition of components by channel wiring, and synchronous simulation.
//
// A wire connects one producer output port to one or more consumer input
// ports; the resulting channel is named after the producer's port. Input
// ports left unconnected become external inputs, unconnected outputs become
// external outputs. A composite's private keys, unguessable values and local
// secrets are the unions of its parts' sets.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamsec/component.hpp"
#include "streamsec/knowledge.hpp"
#include "streamsec/timed_stream.hpp"

namespace streamsec {

struct Endpoint {
  std::string component;
  std::string port;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

std::string render(const Endpoint& e);

struct Wire {
  Endpoint producer;
  std::vector<Endpoint> consumers;

  const std::string& channel() const { return producer.port; }
};

/// `Producer.port -> Consumer.port, ...`
std::string render(const Wire& w);

struct WireCheck {
  std::string wire;
  std::string channel;
  std::optional<MessageType> producer_type;
  std::vector<std::optional<MessageType>> consumer_types;
  bool ok = true;
  std::vector<std::string> problems;
};

// Outcome of syntactic interface checking. Problems not tied to a single
// wire (duplicate component names, same-time cycles) are listed separately.
struct InterfaceReport {
  std::vector<WireCheck> wires;
  std::vector<std::string> problems;

  bool ok() const;
  std::string render() const;
};

InterfaceReport check_interfaces(const std::vector<ComponentSpec>& parts, const std::vector<Wire>& wiring);

class InterfaceError : public std::runtime_error {
 public:
  explicit InterfaceError(InterfaceReport report);
  const InterfaceReport& report() const { return report_; }

 private:
  InterfaceReport report_;
};

struct ExternalPort {
  std::string channel;
  Endpoint endpoint;
  MessageType type;
};

class Composite {
 public:
  /// Validates each part and the wiring. Throws SpecError or InterfaceError.
  static Composite compose(std::vector<ComponentSpec> parts, std::vector<Wire> wiring);

  const std::vector<ComponentSpec>& parts() const { return parts_; }
  const std::vector<Wire>& wiring() const { return wiring_; }
  const ComponentSpec& part(std::string_view name) const;
  bool has_part(std::string_view name) const;

  const std::vector<ExternalPort>& external_inputs() const { return external_inputs_; }
  const std::vector<ExternalPort>& external_outputs() const { return external_outputs_; }

  const std::set<Atom>& private_keys() const { return private_keys_; }
  const std::set<Atom>& unguessable() const { return unguessable_; }
  const std::set<Expression>& local_secrets() const { return local_secrets_; }
  std::set<Atom> ks() const;

  /// Channel feeding each component input port.
  const std::map<Endpoint, std::string>& input_channels() const { return input_channels_; }
  /// Every channel with its type, internal and external.
  const std::map<std::string, MessageType>& channel_types() const { return channel_types_; }
  /// Weakly causal parts in same-time dataflow order.
  const std::vector<std::size_t>& weak_order() const { return weak_order_; }

 private:
  Composite() = default;

  std::vector<ComponentSpec> parts_;
  std::vector<Wire> wiring_;
  std::vector<ExternalPort> external_inputs_;
  std::vector<ExternalPort> external_outputs_;
  std::set<Atom> private_keys_;
  std::set<Atom> unguessable_;
  std::set<Expression> local_secrets_;
  std::map<Endpoint, std::string> input_channels_;
  std::map<std::string, MessageType> channel_types_;
  std::vector<std::size_t> weak_order_;
};

struct PropertyCheck {
  int number;
  std::string statement;
  bool holds;
  std::vector<std::string> counterexamples;
};

/// The six key/secret/channel composition properties evaluated literally on
/// a concrete composite. `probes` are extra atoms to test property (5) with.
std::array<PropertyCheck, 6> ks_union_check(const Composite& c, std::span<const Atom> probes = {});

struct StepRecord {
  Time time;
  std::string component;
  ComponentState before;
  ComponentState after;
  std::vector<std::size_t> fired;
  std::map<std::string, Interval> emissions;
  Time emit_time;
};

struct Observation {
  Time time;
  std::string channel;
  Message message;
};

class Trace {
 public:
  Time horizon() const { return horizon_; }
  const std::map<std::string, Channel>& channels() const { return channels_; }
  const Channel& channel(std::string_view name) const;
  const std::vector<StepRecord>& steps() const { return steps_; }
  /// Everything a component received on its inputs, in time order.
  const std::vector<Observation>& observations(std::string_view component) const;

  /// One line per message: `t=<n> <channel> : <message>`, channels sorted
  /// within each time unit.
  std::string render() const;

  /// The component's initial knowledge plus everything it observed.
  KnowledgeBase knowledge_of(const ComponentSpec& spec) const;

 private:
  friend Trace run(const Composite&, Time, const std::map<std::string, TimedStream>&);

  Time horizon_ = 0;
  std::map<std::string, Channel> channels_;
  std::vector<StepRecord> steps_;
  std::map<std::string, std::vector<Observation>, std::less<>> observations_;
};

/// Synchronous simulation over [0, horizon]. Per time unit, weakly causal
/// parts run first in dataflow order and emit into the current unit; then
/// strongly causal parts read the completed unit and emit into the next.
/// External inputs not supplied are empty. Throws SimulationError.
Trace run(const Composite& c, Time horizon, const std::map<std::string, TimedStream>& external_inputs = {});

}  // namespace streamsec
