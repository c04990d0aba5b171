#pragma once

// Named simulation setups: the four built-in TLS scenarios, and a plain-text
// scenario format that assembles built-in components with explicit wiring.
//
//   [component Client]
//   builtin = fixed-client      # optional; defaults from the section name
//   causality = strong
//   keys = CKey^-1
//   secrets = N, secretD
//   locals = check, enc
//
//   [wiring]
//   Client.init -> Server.init
//
//   [scenario]
//   horizon = 20
//   targets = secretD
//   adversary = Adversary
//
// Parameter files override atom labels, one `name = label` per line, with
// names nonce, secret, client_key, server_key, ca_key, adversary_key,
// session_key, client_name, server_name, adversary_name.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "streamsec/composite.hpp"
#include "streamsec/knowledge.hpp"
#include "streamsec/tls.hpp"

namespace streamsec {

inline constexpr Time kDefaultHorizon = 20;

struct Scenario {
  std::string name;
  std::vector<ComponentSpec> parts;
  std::vector<Wire> wiring;
  /// Component whose knowledge is checked against the secrecy targets.
  std::optional<std::string> adversary;
  std::vector<SecrecyTarget> targets;
  Time horizon = kDefaultHorizon;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> builtin_scenario_names();
std::optional<Scenario> builtin_scenario(std::string_view name, const tls::TlsParams& params = {});

/// Throws ScenarioError on malformed input. Wiring is not checked here.
Scenario parse_scenario(std::string_view text, const tls::TlsParams& params = {});
Scenario load_scenario(const std::filesystem::path& path, const tls::TlsParams& params = {});

tls::TlsParams parse_params(std::string_view text);
tls::TlsParams load_params(const std::filesystem::path& path);

}  // namespace streamsec
