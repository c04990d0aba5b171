#pragma once

// Scenario evaluation and the `streamsec` command line.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "streamsec/composite.hpp"
#include "streamsec/knowledge.hpp"
#include "streamsec/scenario.hpp"

namespace streamsec {

namespace exit_code {
inline constexpr int kSecure = 0;
inline constexpr int kLeak = 2;
inline constexpr int kInterface = 3;
inline constexpr int kAssumption = 4;
inline constexpr int kUsage = 64;
inline constexpr int kNoAdversary = 65;
}  // namespace exit_code

struct Verdict {
  std::string scenario;
  bool secrecy_holds = true;
  std::vector<Leak> leaks;
  std::vector<std::pair<std::string, Time>> aborts;
  bool interface_ok = true;
  /// False when a component's input assumption (or its own guarantee) broke
  /// during simulation; `detail` says where.
  bool assumption_ok = true;
  Time horizon = 0;
  std::string detail;

  int exit_code() const;
};

struct Evaluation {
  Verdict verdict;
  InterfaceReport interfaces;
  /// Absent when composition or simulation failed.
  std::optional<Trace> trace;
};

/// compose + run + leak_check. Throws ScenarioError when a secrecy target is
/// owned by a component it must stay hidden from.
Evaluation evaluate(const Scenario& s, std::optional<Time> horizon = std::nullopt);

/// Abort events observed on event-typed channels, by time then channel.
std::vector<std::pair<std::string, Time>> aborts_of(const Trace& trace);

std::string render_text(const Evaluation& e, bool color);
/// One `field=value` record per line.
std::string render_structured(const Evaluation& e);

/// Full command line (without argv[0]); returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace streamsec
