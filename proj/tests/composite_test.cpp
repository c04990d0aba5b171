#include <doctest.h>

#include <random>

#include "streamsec/composite.hpp"
#include "streamsec/tls.hpp"
#include "support/random_composite.hpp"

using namespace streamsec;
using streamsec::testing::composition_violations;
using streamsec::testing::random_composite;
namespace tls = streamsec::tls;

namespace {

ComponentSpec bare(std::string name, std::vector<PortDecl> in, std::vector<PortDecl> out,
                   Causality causality = Causality::Strong) {
  ComponentSpec c;
  c.name = std::move(name);
  c.inputs = std::move(in);
  c.outputs = std::move(out);
  c.causality = causality;
  return c;
}

bool wire_named(const InterfaceReport& r, const std::string& wire) {
  return std::any_of(r.wires.begin(), r.wires.end(), [&](const WireCheck& w) { return !w.ok && w.wire == wire; });
}

}  // namespace

TEST_CASE("TLS composites compose") {
  auto honest = Composite::compose({tls::make_client({}), tls::make_server({})}, tls::direct_wiring());
  CHECK(honest.external_inputs().empty());
  CHECK(honest.external_outputs().empty());
  CHECK(honest.channel_types().size() == 5);

  auto attack = Composite::compose({tls::make_client({}), tls::make_adversary({}), tls::make_server({})},
                                   tls::intercepted_wiring());
  CHECK(attack.external_inputs().empty());
  CHECK(attack.channel_types().size() == 10);
  REQUIRE(attack.weak_order().size() == 1);
  CHECK(attack.parts()[attack.weak_order()[0]].name == "Adversary");
}

TEST_CASE("KS of the TLS composites is the union of the parts") {
  auto a = tls::TlsAtoms::from({});
  auto p = Composite::compose({tls::make_client({}), tls::make_server({})}, tls::direct_wiring());
  CHECK(p.private_keys().count(a.client_key_inv) == 1);
  CHECK(p.part("Client").private_keys.count(a.client_key_inv) == 1);

  Atom xb = Atom::secret("xb");
  std::vector<Atom> probes{xb, a.adversary_key_inv};
  for (const auto& check : ks_union_check(p, probes)) {
    INFO("property " << check.number);
    CHECK(check.holds);
  }
  CHECK(p.ks().count(xb) == 0);
  CHECK(p.ks().count(a.adversary_key_inv) == 0);

  auto attack = Composite::compose({tls::make_client({}), tls::make_adversary({}), tls::make_server({})},
                                   tls::intercepted_wiring());
  for (const auto& check : ks_union_check(attack, probes)) CHECK(check.holds);
  CHECK(attack.part("Adversary").ks().count(a.secret) == 0);
}

TEST_CASE("a single-part composite has that part's KS") {
  auto client = tls::make_client({});
  auto c = Composite::compose({client}, {});
  CHECK(c.ks() == client.ks());
  CHECK(c.external_inputs().size() == 2);
  CHECK(c.external_outputs().size() == 3);
}

TEST_CASE("composition properties hold on random composites") {
  std::vector<Atom> keys;
  std::vector<Atom> secrets;
  for (int i = 0; i < 4; ++i) {
    auto [k, ki] = key_pair("k" + std::to_string(i));
    keys.push_back(k);
    keys.push_back(ki);
    secrets.push_back(Atom::secret("s" + std::to_string(i)));
  }
  std::vector<Atom> universe = keys;
  universe.insert(universe.end(), secrets.begin(), secrets.end());

  std::mt19937 rng(777);
  std::size_t violations = 0;
  for (int trial = 0; trial < 250; ++trial) {
    auto rc = random_composite(rng, keys, secrets);
    violations += composition_violations(rc, universe);
  }
  CHECK(violations == 0);
}

TEST_CASE("interface checks name the offending wire") {
  auto client = tls::make_client({});
  auto server = tls::make_server({});

  SUBCASE("type clash") {
    auto wiring = tls::direct_wiring();
    wiring[3] = {{"Server", "resp"}, {{"Client", "abortS"}}};
    wiring[4] = {{"Server", "abortS"}, {{"Client", "resp"}}};
    auto r = check_interfaces({client, server}, wiring);
    CHECK_FALSE(r.ok());
    CHECK(wire_named(r, "Server.resp -> Client.abortS"));
    CHECK_THROWS_AS(Composite::compose({client, server}, wiring), InterfaceError);
  }
  SUBCASE("unknown component") {
    auto wiring = tls::direct_wiring();
    wiring[0].consumers = {{"Srv", "init"}};
    auto r = check_interfaces({client, server}, wiring);
    CHECK(wire_named(r, "Client.init -> Srv.init"));
  }
  SUBCASE("two producers for one input") {
    auto wiring = tls::direct_wiring();
    wiring[3].consumers.push_back({"Server", "xchd"});
    auto r = check_interfaces({client, server}, wiring);
    CHECK_FALSE(r.ok());
    CHECK(wire_named(r, "Server.resp -> Client.resp, Server.xchd"));
  }
  SUBCASE("dangling wire") {
    auto wiring = tls::direct_wiring();
    wiring[0].consumers.clear();
    CHECK(wire_named(check_interfaces({client, server}, wiring), "Client.init -> (nothing)"));
  }
  SUBCASE("direction") {
    auto wiring = tls::direct_wiring();
    wiring[0] = {{"Server", "init"}, {{"Client", "init"}}};
    CHECK_FALSE(check_interfaces({client, server}, wiring).ok());
  }
  SUBCASE("weak cycle") {
    auto a = bare("A", {{"x", MessageType::Event}}, {{"y", MessageType::Event}}, Causality::Weak);
    auto b = bare("B", {{"y2", MessageType::Event}}, {{"x2", MessageType::Event}}, Causality::Weak);
    std::vector<Wire> w{{{"A", "y"}, {{"B", "y2"}}}, {{"B", "x2"}, {{"A", "x"}}}};
    CHECK_FALSE(check_interfaces({a, b}, w).ok());
    b.causality = Causality::Strong;
    CHECK(check_interfaces({a, b}, w).ok());
  }
}

TEST_CASE("interface report rendering") {
  auto r = check_interfaces({tls::make_client({}), tls::make_server({})}, tls::direct_wiring());
  CHECK(r.ok());
  CHECK(r.wires.size() == 5);
  auto text = r.render();
  CHECK(text.find("ok       Client.init -> Server.init [InitMessage -> InitMessage]") != std::string::npos);
  CHECK(text.find("interfaces: OK (5 wires)") != std::string::npos);
}

TEST_CASE("runs are deterministic") {
  auto make = [] {
    return Composite::compose({tls::make_client({}), tls::make_adversary({}), tls::make_server({})},
                              tls::intercepted_wiring());
  };
  CHECK(run(make(), 12).render() == run(make(), 12).render());
}

TEST_CASE("horizon 0 shows only the opening init") {
  auto c = Composite::compose({tls::make_client({}), tls::make_server({})}, tls::direct_wiring());
  CHECK(run(c, 0).render() == "t=0 init : im(N, CKey, <sig(CKey^-1, <C, CKey>)>)\n");
}
