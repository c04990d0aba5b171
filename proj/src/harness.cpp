#include "streamsec/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace streamsec {

int Verdict::exit_code() const {
  if (!interface_ok) return exit_code::kInterface;
  if (!assumption_ok) return exit_code::kAssumption;
  return secrecy_holds ? exit_code::kSecure : exit_code::kLeak;
}

std::vector<std::pair<std::string, Time>> aborts_of(const Trace& trace) {
  std::vector<std::pair<std::string, Time>> out;
  for (const auto& [name, ch] : trace.channels()) {
    if (ch.type() != MessageType::Event) continue;
    for (const auto& [t, interval] : ch.stream().populated()) {
      if (!interval.empty()) out.emplace_back(name, t);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

Evaluation evaluate(const Scenario& s, std::optional<Time> horizon) {
  Evaluation e;
  e.verdict.scenario = s.name;
  e.verdict.horizon = horizon.value_or(s.horizon);

  for (const auto& target : s.targets) {
    for (const auto& p : s.parts) {
      if (target.owner_exclusion.count(p.name) != 0 && p.ks().count(target.item) != 0) {
        throw ScenarioError("secrecy target '" + target.item.label() + "' belongs to " + p.name);
      }
    }
  }

  e.interfaces = check_interfaces(s.parts, s.wiring);
  if (!e.interfaces.ok()) {
    e.verdict.interface_ok = false;
    e.verdict.detail = e.interfaces.problems.empty() ? "interface mismatch" : e.interfaces.problems.front();
    return e;
  }

  try {
    auto composite = Composite::compose(s.parts, s.wiring);
    e.trace = run(composite, e.verdict.horizon);
    e.verdict.aborts = aborts_of(*e.trace);
    if (s.adversary) {
      auto kb = e.trace->knowledge_of(composite.part(*s.adversary));
      std::vector<SecrecyTarget> targets;
      for (const auto& t : s.targets) {
        if (kb.own().count(t.item) == 0) targets.push_back(t);
      }
      e.verdict.leaks = leak_check(kb, targets, e.verdict.horizon);
      e.verdict.secrecy_holds = e.verdict.leaks.empty();
    }
  } catch (const InterfaceError& err) {
    e.interfaces = err.report();
    e.verdict.interface_ok = false;
    e.verdict.detail = err.what();
  } catch (const SimulationError& err) {
    e.trace.reset();
    e.verdict.assumption_ok = false;
    e.verdict.detail = err.what();
  }
  return e;
}

namespace {

constexpr const char* kGreen = "\x1b[32m";
constexpr const char* kRed = "\x1b[31m";
constexpr const char* kReset = "\x1b[0m";

std::string verdict_word(const Verdict& v) {
  if (!v.interface_ok) return "INTERFACE ERROR";
  if (!v.assumption_ok) return "ASSUMPTION VIOLATED";
  return v.secrecy_holds ? "SECURE" : "LEAK";
}

}  // namespace

std::string render_text(const Evaluation& e, bool color) {
  const auto& v = e.verdict;
  std::ostringstream out;
  out << "scenario " << v.scenario << " (horizon " << v.horizon << ")\n";
  if (e.trace) out << e.trace->render();
  if (!v.interface_ok) out << e.interfaces.render();
  if (!v.detail.empty()) out << v.detail << "\n";
  for (const auto& [channel, t] : v.aborts) out << "abort " << channel << " at t=" << t << "\n";
  for (const auto& leak : v.leaks) out << "leak " << leak.item.label() << " at t=" << leak.time << "\n";
  const bool good = v.exit_code() == exit_code::kSecure;
  out << "verdict: ";
  if (color) out << (good ? kGreen : kRed);
  out << verdict_word(v);
  if (color) out << kReset;
  out << "\n";
  return out.str();
}

std::string render_structured(const Evaluation& e) {
  const auto& v = e.verdict;
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::ostringstream out;
  out << "scenario=" << v.scenario << "\n";
  out << "horizon=" << v.horizon << "\n";
  if (e.trace) {
    for (Time t = 0;; ++t) {
      for (const auto& [name, ch] : e.trace->channels()) {
        for (const auto& m : ch.interval(t)) out << "message=" << t << " " << name << " " << render(m) << "\n";
      }
      if (t == e.trace->horizon()) break;
    }
  }
  for (const auto& [channel, t] : v.aborts) out << "abort=" << channel << "@" << t << "\n";
  for (const auto& leak : v.leaks) out << "leak=" << leak.item.label() << "@" << leak.time << "\n";
  out << "interface_ok=" << flag(v.interface_ok) << "\n";
  out << "assumption_ok=" << flag(v.assumption_ok) << "\n";
  out << "secrecy_holds=" << flag(v.secrecy_holds) << "\n";
  if (!v.detail.empty()) out << "detail=" << v.detail << "\n";
  out << "exit_code=" << v.exit_code() << "\n";
  return out.str();
}

namespace {

bool color_enabled() {
  const char* env = std::getenv("STREAMSEC_COLOR");
  return env != nullptr && std::string_view(env) == "1";
}

// A built-in name, or else a scenario file path.
Scenario resolve_scenario(const std::string& name, const std::string& params_file) {
  tls::TlsParams params = params_file.empty() ? tls::TlsParams{} : load_params(params_file);
  if (auto s = builtin_scenario(name, params)) return *s;
  if (std::filesystem::is_regular_file(name)) return load_scenario(name, params);
  std::string known;
  for (const auto& n : builtin_scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw ScenarioError("unknown scenario '" + name + "' (built-ins: " + known + ")");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate stream-processing security protocols and check secrecy", "streamsec"};
  app.require_subcommand(1);

  std::string scenario_name;
  std::string params_file;
  std::string format = "text";
  std::optional<Time> horizon;
  Time at = 0;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and report a secrecy verdict");
  run_cmd->add_option("scenario", scenario_name, "Built-in scenario or scenario file")->required();
  run_cmd->add_option("--horizon", horizon, "Last simulated time unit");
  run_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  run_cmd->add_option("--params", params_file, "Atom label overrides")->check(CLI::ExistingFile);

  auto* check_cmd = app.add_subcommand("check-interfaces", "Check the wiring of a scenario");
  check_cmd->add_option("scenario", scenario_name, "Built-in scenario or scenario file")->required();
  check_cmd->add_option("--params", params_file, "Atom label overrides")->check(CLI::ExistingFile);

  auto* knowledge_cmd = app.add_subcommand("knowledge", "Print the adversary's analyzed knowledge at a time unit");
  knowledge_cmd->add_option("scenario", scenario_name, "Built-in scenario or scenario file")->required();
  knowledge_cmd->add_option("t", at, "Time unit")->required();
  knowledge_cmd->add_option("--params", params_file, "Atom label overrides")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "streamsec: " << e.what() << "\n";
    err << "run 'streamsec --help' for usage\n";
    return exit_code::kUsage;
  }

  try {
    Scenario scenario = resolve_scenario(scenario_name, params_file);

    if (*run_cmd) {
      auto eval = evaluate(scenario, horizon);
      out << (format == "structured" ? render_structured(eval) : render_text(eval, color_enabled()));
      return eval.verdict.exit_code();
    }

    if (*check_cmd) {
      auto report = check_interfaces(scenario.parts, scenario.wiring);
      out << "scenario " << scenario.name << "\n" << report.render();
      return report.ok() ? exit_code::kSecure : exit_code::kInterface;
    }

    if (!scenario.adversary) {
      err << "streamsec: scenario '" << scenario.name << "' has no adversary\n";
      return exit_code::kNoAdversary;
    }
    auto eval = evaluate(scenario, at);
    if (eval.verdict.exit_code() == exit_code::kInterface || eval.verdict.exit_code() == exit_code::kAssumption) {
      err << "streamsec: " << eval.verdict.detail << "\n";
      return eval.verdict.exit_code();
    }
    auto kb = eval.trace->knowledge_of(Composite::compose(scenario.parts, scenario.wiring).part(*scenario.adversary));
    out << "knowledge of " << *scenario.adversary << " at t=" << at << "\n";
    for (const auto& line : kb.until(at).analyze().dump()) out << line << "\n";
    return exit_code::kSecure;
  } catch (const ScenarioError& e) {
    err << "streamsec: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const SpecError& e) {
    err << "streamsec: " << e.what() << "\n";
    return exit_code::kUsage;
  }
}

}  // namespace streamsec
