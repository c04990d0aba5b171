#include "streamsec/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace streamsec {

namespace {

using namespace std::string_view_literals;

Scenario tls_scenario(std::string name, bool intercepted, bool fixed, const tls::TlsParams& p) {
  const auto atoms = tls::TlsAtoms::from(p);
  Scenario s;
  s.name = std::move(name);
  s.parts.push_back(fixed ? tls::make_fixed_client(p) : tls::make_client(p));
  if (intercepted) s.parts.push_back(tls::make_adversary(p));
  s.parts.push_back(fixed ? tls::make_fixed_server(p) : tls::make_server(p));
  s.wiring = intercepted ? tls::intercepted_wiring() : tls::direct_wiring();
  if (intercepted) {
    s.adversary = tls::kAdversary;
    s.targets = {{atoms.secret, {tls::kAdversary}}};
  } else {
    s.targets = {{atoms.secret, {}}};
  }
  return s;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r"sv;
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

// Non-empty, comment-stripped lines.
std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty() || number == 0) {
    ++number;
    auto nl = text.find('\n');
    auto raw = text.substr(0, nl);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (auto t = trim(raw); !t.empty()) out.push_back({number, t});
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ScenarioError("line " + std::to_string(line) + ": " + what);
}

std::pair<std::string_view, std::string_view> key_value(const Line& line) {
  auto eq = line.text.find('=');
  if (eq == std::string_view::npos) fail(line.number, "expected 'key = value'");
  auto key = trim(line.text.substr(0, eq));
  if (key.empty()) fail(line.number, "missing key before '='");
  return {key, trim(line.text.substr(eq + 1))};
}

Time parse_time(std::string_view s, std::size_t line) {
  Time t = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "expected a time unit, got '" + std::string(s) + "'");
  return t;
}

Endpoint parse_endpoint(std::string_view s, std::size_t line) {
  s = trim(s);
  auto dot = s.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == s.size()) {
    fail(line, "expected 'Component.port', got '" + std::string(s) + "'");
  }
  return {std::string(s.substr(0, dot)), std::string(s.substr(dot + 1))};
}

using Factory = ComponentSpec (*)(const tls::TlsParams&);

const std::map<std::string, Factory, std::less<>>& builtin_components() {
  static const std::map<std::string, Factory, std::less<>> kComponents{
      {"client", &tls::make_client},
      {"server", &tls::make_server},
      {"adversary", &tls::make_adversary},
      {"fixed-client", &tls::make_fixed_client},
      {"fixed-server", &tls::make_fixed_server},
  };
  return kComponents;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Built-in kind for a section name: Client -> client, FixedClient -> fixed-client.
std::string default_builtin(std::string_view instance) {
  std::string out;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    char c = instance[i];
    if (i != 0 && std::isupper(static_cast<unsigned char>(c))) out += '-';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

struct PendingComponent {
  std::size_t line;
  std::string instance;
  std::map<std::string, std::pair<std::size_t, std::string>, std::less<>> settings;
};

ComponentSpec build_component(const PendingComponent& pc, const tls::TlsParams& params, const AtomTable& atoms) {
  auto setting = [&](std::string_view key) -> const std::pair<std::size_t, std::string>* {
    auto it = pc.settings.find(key);
    return it == pc.settings.end() ? nullptr : &it->second;
  };

  std::string kind = default_builtin(pc.instance);
  if (const auto* b = setting("builtin")) kind = lowercase(b->second);
  auto factory = builtin_components().find(kind);
  if (factory == builtin_components().end()) {
    fail(setting("builtin") ? setting("builtin")->first : pc.line, "unknown built-in component '" + kind + "'");
  }
  ComponentSpec spec = factory->second(params);
  spec.name = pc.instance;

  if (const auto* c = setting("causality")) {
    if (c->second == "strong") {
      spec.causality = Causality::Strong;
    } else if (c->second == "weak") {
      spec.causality = Causality::Weak;
    } else {
      fail(c->first, "causality must be 'strong' or 'weak'");
    }
  }

  auto resolve = [&](std::size_t line, const std::string& label) {
    try {
      return atoms.at(label);
    } catch (const LookupError& e) {
      fail(line, e.what());
    }
  };
  if (const auto* k = setting("keys")) {
    spec.private_keys.clear();
    for (const auto& label : split_list(k->second)) {
      auto atom = resolve(k->first, label);
      if (!atom.is_key()) fail(k->first, "'" + label + "' is not a key");
      spec.private_keys.insert(atom);
    }
  }
  if (const auto* s = setting("secrets")) {
    spec.unguessable.clear();
    for (const auto& label : split_list(s->second)) {
      auto atom = resolve(s->first, label);
      if (atom.kind() != AtomKind::Secret) fail(s->first, "'" + label + "' is not an unguessable value");
      spec.unguessable.insert(atom);
    }
  }
  if (const auto* l = setting("locals")) {
    std::set<std::string> declared;
    for (const auto& d : spec.locals) declared.insert(d.name);
    auto listed = split_list(l->second);
    if (std::set<std::string>(listed.begin(), listed.end()) != declared) {
      std::string names;
      for (const auto& d : declared) names += (names.empty() ? "" : ", ") + d;
      fail(l->first, "locals of built-in '" + kind + "' are: " + names);
    }
  }
  for (const auto& [key, value] : pc.settings) {
    static const std::set<std::string, std::less<>> kKnown{"builtin", "causality", "keys", "secrets", "locals"};
    if (kKnown.count(key) == 0) fail(value.first, "unknown component setting '" + key + "'");
  }
  return spec;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"honest", "attack", "fixed-honest", "fixed-attack"}; }

std::optional<Scenario> builtin_scenario(std::string_view name, const tls::TlsParams& params) {
  if (name == "honest") return tls_scenario("honest", false, false, params);
  if (name == "attack") return tls_scenario("attack", true, false, params);
  if (name == "fixed-honest") return tls_scenario("fixed-honest", false, true, params);
  if (name == "fixed-attack") return tls_scenario("fixed-attack", true, true, params);
  return std::nullopt;
}

Scenario parse_scenario(std::string_view text, const tls::TlsParams& params) {
  AtomTable atoms;
  try {
    atoms = tls::TlsAtoms::from(params).table();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }

  enum class Section { None, Component, Wiring, Scenario };
  Section section = Section::None;
  std::vector<PendingComponent> components;
  std::vector<Wire> wiring;
  std::map<std::string, std::pair<std::size_t, std::string>, std::less<>> scenario;

  for (const auto& line : lines_of(text)) {
    if (line.text.front() == '[') {
      if (line.text.back() != ']') fail(line.number, "unterminated section header");
      auto header = trim(line.text.substr(1, line.text.size() - 2));
      if (header == "wiring") {
        section = Section::Wiring;
      } else if (header == "scenario") {
        section = Section::Scenario;
      } else if (header.rfind("component", 0) == 0 && header.size() > 9 &&
                 (header[9] == ' ' || header[9] == '\t')) {
        auto instance = trim(header.substr(9));
        if (instance.empty()) fail(line.number, "component section needs a name");
        section = Section::Component;
        components.push_back({line.number, std::string(instance), {}});
      } else {
        fail(line.number, "unknown section '" + std::string(header) + "'");
      }
      continue;
    }

    switch (section) {
      case Section::None: fail(line.number, "content before the first section");
      case Section::Component: {
        auto [key, value] = key_value(line);
        if (!components.back().settings.emplace(std::string(key), std::pair{line.number, std::string(value)}).second) {
          fail(line.number, "duplicate setting '" + std::string(key) + "'");
        }
        break;
      }
      case Section::Scenario: {
        auto [key, value] = key_value(line);
        if (!scenario.emplace(std::string(key), std::pair{line.number, std::string(value)}).second) {
          fail(line.number, "duplicate setting '" + std::string(key) + "'");
        }
        break;
      }
      case Section::Wiring: {
        auto arrow = line.text.find("->");
        if (arrow == std::string_view::npos) fail(line.number, "expected 'Producer.port -> Consumer.port'");
        Endpoint producer = parse_endpoint(line.text.substr(0, arrow), line.number);
        std::vector<Endpoint> consumers;
        for (const auto& c : split_list(line.text.substr(arrow + 2))) consumers.push_back(parse_endpoint(c, line.number));
        auto same = std::find_if(wiring.begin(), wiring.end(), [&](const Wire& w) { return w.producer == producer; });
        if (same != wiring.end()) {
          same->consumers.insert(same->consumers.end(), consumers.begin(), consumers.end());
        } else {
          wiring.push_back({producer, consumers});
        }
        break;
      }
    }
  }

  Scenario s;
  s.name = "custom";
  for (const auto& pc : components) s.parts.push_back(build_component(pc, params, atoms));
  s.wiring = std::move(wiring);

  for (const auto& [key, entry] : scenario) {
    const auto& [number, value] = entry;
    if (key == "name") {
      s.name = value;
    } else if (key == "horizon") {
      s.horizon = parse_time(value, number);
    } else if (key == "adversary") {
      s.adversary = value;
    } else if (key != "targets") {
      fail(number, "unknown scenario setting '" + key + "'");
    }
  }
  if (s.adversary) {
    bool present = std::any_of(s.parts.begin(), s.parts.end(), [&](const ComponentSpec& p) { return p.name == *s.adversary; });
    if (!present) fail(scenario.at("adversary").first, "adversary '" + *s.adversary + "' is not a component");
  }
  if (auto it = scenario.find("targets"); it != scenario.end()) {
    for (const auto& label : split_list(it->second.second)) {
      Atom atom = [&] {
        try {
          return atoms.at(label);
        } catch (const LookupError& e) {
          fail(it->second.first, e.what());
        }
      }();
      if (atom.kind() != AtomKind::Key && atom.kind() != AtomKind::Secret) {
        fail(it->second.first, "target '" + label + "' is not a key or secret");
      }
      std::set<std::string> exclusion;
      if (s.adversary) exclusion.insert(*s.adversary);
      s.targets.push_back({atom, exclusion});
    }
  }
  return s;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path, const tls::TlsParams& params) {
  auto s = parse_scenario(read_file(path), params);
  if (s.name == "custom") s.name = path.stem().string();
  return s;
}

tls::TlsParams parse_params(std::string_view text) {
  tls::TlsParams p;
  const std::map<std::string_view, std::string tls::TlsParams::*> fields{
      {"nonce", &tls::TlsParams::nonce},
      {"secret", &tls::TlsParams::secret},
      {"client_key", &tls::TlsParams::client_key},
      {"server_key", &tls::TlsParams::server_key},
      {"ca_key", &tls::TlsParams::ca_key},
      {"adversary_key", &tls::TlsParams::adversary_key},
      {"session_key", &tls::TlsParams::session_key},
      {"client_name", &tls::TlsParams::client_name},
      {"server_name", &tls::TlsParams::server_name},
      {"adversary_name", &tls::TlsParams::adversary_name},
  };
  for (const auto& line : lines_of(text)) {
    auto [key, value] = key_value(line);
    auto it = fields.find(key);
    if (it == fields.end()) fail(line.number, "unknown parameter '" + std::string(key) + "'");
    if (value.empty() || value.find_first_of(" \t,<>()") != std::string_view::npos) {
      fail(line.number, "invalid label '" + std::string(value) + "'");
    }
    p.*(it->second) = std::string(value);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return p;
}

tls::TlsParams load_params(const std::filesystem::path& path) { return parse_params(read_file(path)); }

}  // namespace streamsec
