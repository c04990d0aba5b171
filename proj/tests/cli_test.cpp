#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "streamsec/harness.hpp"
#include "streamsec/scenario.hpp"

using namespace streamsec;

namespace {

const std::filesystem::path kTests = STREAMSEC_TEST_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data(const std::string& name) { return (kTests / "data" / name).string(); }

}  // namespace

TEST_CASE("run: exit codes and verdicts") {
  auto attack = cli({"run", "attack", "--horizon", "10"});
  CHECK(attack.code == 2);
  CHECK(attack.out.find("leak secretD at t=4\n") != std::string::npos);

  auto fixed = cli({"run", "fixed-attack", "--horizon", "20"});
  CHECK(fixed.code == 0);
  CHECK(fixed.out.find("abort abortC at t=4\n") != std::string::npos);
  CHECK(fixed.out.find("leak") == std::string::npos);

  auto zero = cli({"run", "honest", "--horizon", "0"});
  CHECK(zero.code == 0);
  CHECK(zero.out.find("t=0 init : im(N, CKey, <sig(CKey^-1, <C, CKey>)>)\n") != std::string::npos);
  CHECK(zero.out.find("t=1") == std::string::npos);
}

TEST_CASE("run: usage errors") {
  CHECK(cli({"run", "nope"}).code == 64);
  CHECK(cli({}).code == 64);
  CHECK(cli({"frobnicate"}).code == 64);
  CHECK(cli({"run", "honest", "--format", "xml"}).code == 64);
  CHECK(cli({"run", "honest", "--horizon", "-3"}).code == 64);
  CHECK(cli({"run", data("bad_syntax.scn")}).code == 64);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("text and structured output encode the same verdict") {
  for (const auto& name : builtin_scenario_names()) {
    auto text = cli({"run", name});
    auto structured = cli({"run", name, "--format", "structured"});
    CHECK(text.code == structured.code);
    CHECK(structured.out.find("exit_code=" + std::to_string(text.code) + "\n") != std::string::npos);
  }
  CHECK(cli({"run", "attack", "--horizon", "10", "--format", "structured"}).out == slurp(kTests / "golden" / "attack.structured"));
}

TEST_CASE("golden traces") {
  for (const auto& name : builtin_scenario_names()) {
    INFO(name);
    auto s = *builtin_scenario(name);
    auto e = evaluate(s);
    REQUIRE(e.trace);
    CHECK(e.trace->render() == slurp(kTests / "golden" / (name + ".trace")));
    // Bit-stable across runs.
    CHECK(evaluate(s).trace->render() == e.trace->render());
  }
}

TEST_CASE("color toggles only escape codes") {
  auto e = evaluate(*builtin_scenario("attack"), 10);
  auto plain = render_text(e, false);
  auto colored = render_text(e, true);
  CHECK(plain.find('\x1b') == std::string::npos);
  CHECK(colored.find("\x1b[31mLEAK\x1b[0m") != std::string::npos);
}

TEST_CASE("check-interfaces") {
  auto honest = cli({"check-interfaces", "honest"});
  CHECK(honest.code == 0);
  CHECK(honest.out.find("interfaces: OK (5 wires)") != std::string::npos);
  auto attack = cli({"check-interfaces", "attack"});
  CHECK(attack.code == 0);
  CHECK(attack.out.find("interfaces: OK (10 wires)") != std::string::npos);

  const std::vector<std::pair<std::string, std::string>> broken{
      {"broken_type_clash.scn", "Server.resp -> Client.abortS"},
      {"broken_unknown_component.scn", "Client.init -> Srv.init"},
      {"broken_unknown_port.scn", "Client.init -> Server.hello"},
      {"broken_two_producers.scn", "Server.resp -> Client.resp, Server.xchd"},
      {"broken_wrong_direction.scn", "Server.init -> Client.init"},
      {"broken_event_into_init.scn", "Client.abortC -> Server.init"},
      {"broken_weak_cycle.scn", "Relay.init2 -> Adversary.init1"},
  };
  for (const auto& [file, wire] : broken) {
    INFO(file);
    auto r = cli({"check-interfaces", data(file)});
    CHECK(r.code == 3);
    CHECK(r.out.find("MISMATCH " + wire) != std::string::npos);
    CHECK(cli({"run", data(file)}).code == 3);
  }
}

TEST_CASE("knowledge") {
  auto at4 = cli({"knowledge", "attack", "4"});
  CHECK(at4.code == 0);
  CHECK(at4.out.find("\n<secretD>\n") != std::string::npos);
  CHECK(at4.out.find("\n<genKey>\n") != std::string::npos);

  auto at3 = cli({"knowledge", "attack", "3"});
  CHECK(at3.out.find("\n<genKey>\n") != std::string::npos);
  CHECK(at3.out.find("\n<secretD>\n") == std::string::npos);

  auto fixed = cli({"knowledge", "fixed-attack", "20"});
  CHECK(fixed.code == 0);
  CHECK(fixed.out.find("secretD") == std::string::npos);

  auto honest = cli({"knowledge", "honest", "3"});
  CHECK(honest.code == 65);
  CHECK(honest.err.find("no adversary") != std::string::npos);
}

TEST_CASE("scenario files") {
  auto s = load_scenario(data("attack.scn"));
  CHECK(s.name == "attack-file");
  CHECK(s.horizon == 10);
  REQUIRE(s.adversary);
  CHECK(*s.adversary == "Adversary");
  auto from_file = evaluate(s);
  auto builtin = evaluate(*builtin_scenario("attack"), 10);
  CHECK(from_file.trace->render() == builtin.trace->render());
  CHECK(from_file.verdict.leaks == builtin.verdict.leaks);
  CHECK(cli({"run", data("attack.scn")}).code == 2);

  auto fh = load_scenario(data("fixed_honest.scn"));
  CHECK(fh.name == "fixed_honest");
  CHECK(evaluate(fh).trace->render() == slurp(kTests / "golden" / "fixed-honest.trace"));
}

TEST_CASE("scenario file errors") {
  CHECK_THROWS_AS(parse_scenario("[component Client]\ncausality = sideways\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("horizon = 3\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[component Gadget]\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[component Client]\nkeys = Nope\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[component Client]\nkeys = N\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[component Client]\nlocals = check\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[component Client]\nflavour = mint\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[wiring]\nClient.init Server.init\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nhorizon = soon\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nadversary = Ghost\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\ntargets = C\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[bogus]\n"), ScenarioError);
  try {
    parse_scenario("[component Client]\n\n# note\ncausality = sideways\n");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).rfind("line 4:", 0) == 0);
  }
}

TEST_CASE("secrecy targets owned by the adversary are rejected") {
  auto s = *builtin_scenario("attack");
  s.targets.push_back({Atom::key("AKey^-1", "AKey"), {"Adversary"}});
  CHECK_THROWS_AS(evaluate(s), ScenarioError);
}

TEST_CASE("parameter files rename atoms") {
  auto p = load_params(data("params_renamed.params"));
  CHECK(p.secret == "payload");
  CHECK(p.session_key == "sessKey");
  auto r = cli({"run", "attack", "--params", data("params_renamed.params"), "--horizon", "6"});
  CHECK(r.code == 2);
  CHECK(r.out.find("t=4 xchd : <enc(sessKey, <payload>)>") != std::string::npos);
  CHECK(r.out.find("leak payload at t=4") != std::string::npos);

  CHECK_THROWS_AS(parse_params("colour = red\n"), ScenarioError);
  CHECK_THROWS_AS(parse_params("nonce = S\n"), ScenarioError);
  CHECK_THROWS_AS(parse_params("nonce = a b\n"), ScenarioError);
}
