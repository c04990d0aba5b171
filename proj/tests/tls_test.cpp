#include <doctest.h>

#include "streamsec/composite.hpp"
#include "streamsec/scenario.hpp"
#include "streamsec/tls.hpp"
#include "support/brute_force.hpp"

using namespace streamsec;
namespace tls = streamsec::tls;
using streamsec::testing::BruteForce;

namespace {

const tls::TlsAtoms A = tls::TlsAtoms::from({});

StepInputs inputs_for(const ComponentSpec& spec, StepInputs given = {}) {
  for (const auto& p : spec.inputs) given.try_emplace(p.name);
  return given;
}

Value sym(const char* s) { return Symbol{s}; }
Value ex(const Atom& a) { return Expression{a}; }

Trace trace_of(const std::string& name, Time horizon = 20) {
  auto s = *builtin_scenario(name);
  return run(Composite::compose(s.parts, s.wiring), horizon);
}

InitMessage init_with(const Atom& presented, const Atom& signer_inv, const Atom& signed_key) {
  return {A.nonce, presented, sign(signer_inv, {A.client_name, signed_key})};
}

std::set<Expression> seeds_until(const KnowledgeBase& kb, Time t) {
  std::set<Expression> seeds = kb.initial();
  for (const auto& [when, e] : kb.observed()) {
    if (when <= t) seeds.insert(e);
  }
  return seeds;
}

}  // namespace

TEST_CASE("parameters") {
  CHECK(A.session_key.symmetric());
  CHECK_FALSE(A.client_key.symmetric());
  auto client = tls::make_client({});
  auto server = tls::make_server({});
  auto adversary = tls::make_adversary({});
  CHECK(client.unguessable == std::set<Atom>{A.nonce, A.secret});
  CHECK(client.private_keys.count(A.client_key_inv) == 1);
  CHECK(server.ks().count(A.server_key_inv) == 1);
  CHECK(server.ks().count(A.session_key) == 1);
  CHECK(adversary.private_keys.count(A.adversary_key_inv) == 1);
  CHECK(adversary.ks().count(A.secret) == 0);

  tls::TlsParams clash;
  clash.nonce = "S";
  CHECK_THROWS_AS(clash.validate(), std::invalid_argument);
}

TEST_CASE("client: session key accepted sends the secret under genKey") {
  auto client = tls::make_client({});
  auto st = initial_state(client);
  st.locals["check"] = sym("st2");
  st.locals["enc"] = ex(A.server_key);
  auto msg = enc(A.client_key, sign(A.server_key_inv, {A.session_key, A.nonce}));
  auto r = step(client, st, inputs_for(client, {{"resp", {msg}}}), 3);
  CHECK(r.emit_time == 4);
  REQUIRE(r.emissions.count("xchd") == 1);
  CHECK(render(r.emissions.at("xchd")[0]) == "<enc(genKey, <secretD>)>");
  CHECK(r.next.locals.at("check") == sym("st0"));
}

TEST_CASE("client: wrong nonce aborts") {
  auto client = tls::make_client({});
  auto st = initial_state(client);
  st.locals["check"] = sym("st2");
  st.locals["enc"] = ex(A.server_key);
  auto msg = enc(A.client_key, sign(A.server_key_inv, {A.session_key, Atom::secret("N2")}));
  auto r = step(client, st, inputs_for(client, {{"resp", {msg}}}), 3);
  REQUIRE(r.emissions.count("abortC") == 1);
  CHECK(r.emissions.count("xchd") == 0);
  CHECK(r.next.locals.at("check") == sym("st0"));
}

TEST_CASE("client: certificate step stores the server key") {
  auto client = tls::make_client({});
  auto st = initial_state(client);
  st.locals["check"] = sym("st1");
  auto r = step(client, st, inputs_for(client, {{"resp", {tls::server_certificate(A)}}}), 2);
  CHECK(r.emissions.empty());
  CHECK(r.next.locals.at("check") == sym("st2"));
  CHECK(r.next.locals.at("enc") == ex(A.server_key));

  auto forged = sign(A.ca_key_inv, {A.adversary_name, A.adversary_key});
  auto bad = step(client, st, inputs_for(client, {{"resp", {forged}}}), 2);
  CHECK(bad.emissions.count("abortC") == 1);
}

TEST_CASE("server: any self-signed key passes the init check") {
  auto server = tls::make_server({});
  auto r = step(server, initial_state(server),
                inputs_for(server, {{"init", {init_with(A.adversary_key, A.adversary_key_inv, A.adversary_key)}}}), 0);
  CHECK(r.next.locals.at("stateS") == sym("sendS1"));
  CHECK(r.next.locals.at("kValue") == ex(A.adversary_key));
  CHECK(r.next.locals.at("uValue") == ex(A.nonce));
  REQUIRE(r.emissions.count("resp") == 1);
  CHECK(render(r.emissions.at("resp")[0]) == "<N>");
}

TEST_CASE("server: presented key differing from the signed one aborts") {
  auto server = tls::make_server({});
  auto r = step(server, initial_state(server),
                inputs_for(server, {{"init", {init_with(A.client_key, A.adversary_key_inv, A.adversary_key)}}}), 0);
  CHECK(r.emissions.count("abortS") == 1);
  CHECK(r.emissions.count("resp") == 0);
  CHECK(r.emit_time == 1);
}

TEST_CASE("server: session key goes to the stored key") {
  for (bool fixed : {false, true}) {
    auto server = fixed ? tls::make_fixed_server({}) : tls::make_server({});
    auto st = initial_state(server);
    st.locals["stateS"] = sym("sendS2");
    st.locals["kValue"] = ex(A.adversary_key);
    st.locals["uValue"] = ex(A.nonce);
    auto r = step(server, st, inputs_for(server), 2);
    REQUIRE(r.emissions.count("resp") == 1);
    CHECK(render(r.emissions.at("resp")[0]) ==
          (fixed ? "<enc(AKey, <sig(SKey^-1, <genKey, N, AKey>)>)>" : "<enc(AKey, <sig(SKey^-1, <genKey, N>)>)>"));
    CHECK(r.next.locals.at("stateS") == sym("waitS"));
  }
}

TEST_CASE("adversary substitutes its own key in the init message") {
  auto adv = tls::make_adversary({});
  auto r = step(adv, initial_state(adv),
                inputs_for(adv, {{"init1", {init_with(A.client_key, A.client_key_inv, A.client_key)}}}), 0);
  CHECK(r.emit_time == 0);
  REQUIRE(r.emissions.count("init2") == 1);
  CHECK(render(r.emissions.at("init2")[0]) == "im(N, AKey, <sig(AKey^-1, <C, AKey>)>)");
  CHECK(r.next.locals.at("aCKey") == ex(A.client_key));
}

TEST_CASE("adversary re-encrypts the session key to the client") {
  auto adv = tls::make_adversary({});
  auto st = initial_state(adv);
  st.locals["stateA"] = sym("sendA2");
  st.locals["aCKey"] = ex(A.client_key);
  st.locals["aSKey"] = ex(A.server_key);
  auto msg = enc(A.adversary_key, sign(A.server_key_inv, {A.session_key, A.nonce}));
  auto r = step(adv, st, inputs_for(adv, {{"resp1", {msg}}}), 3);
  REQUIRE(r.emissions.count("resp2") == 1);
  CHECK(render(r.emissions.at("resp2")[0]) == "<enc(CKey, <sig(SKey^-1, <genKey, N>)>)>");
  CHECK(r.next.locals.at("aKey") == ex(A.session_key));
}

TEST_CASE("adversary passes xchd through unchanged") {
  auto adv = tls::make_adversary({});
  auto st = initial_state(adv);
  for (Time t : {0u, 4u, 9u}) {
    Expression x = enc(A.session_key, {A.secret});
    auto r = step(adv, st, inputs_for(adv, {{"xchd1", {x}}}), t);
    REQUIRE(r.emissions.count("xchd2") == 1);
    CHECK(r.emissions.at("xchd2") == Interval{x});
    CHECK(r.emit_time == t);
  }
}

TEST_CASE("honest runs complete and the server can read the secret") {
  for (const auto* name : {"honest", "fixed-honest"}) {
    INFO(name);
    auto trace = trace_of(name);
    const auto& resp = trace.channel("resp").stream().populated();
    REQUIRE(resp.size() == 3);
    CHECK(resp.count(1));
    CHECK(resp.count(2));
    CHECK(resp.count(3));
    CHECK(trace.channel("abortC").stream().populated().empty());
    CHECK(trace.channel("abortS").stream().populated().empty());
    const auto& x = trace.channel("xchd").interval(4);
    REQUIRE(x.size() == 1);
    auto opened = decr(A.session_key, std::get<Expression>(x[0]));
    REQUIRE(opened);
    CHECK(*opened == Expression{A.secret});
  }
  auto fixed = trace_of("fixed-honest");
  CHECK(render(fixed.channel("resp").interval(3)[0]) == "<enc(CKey, <sig(SKey^-1, <genKey, N, CKey>)>)>");
}

TEST_CASE("attack run: adversary learns genKey once it can open the ciphertext, then secretD") {
  auto s = *builtin_scenario("attack");
  auto trace = run(Composite::compose(s.parts, s.wiring), 20);
  auto kb = trace.knowledge_of(tls::make_adversary({}));
  for (Time t = 0; t <= 6; ++t) {
    auto now = kb.until(t).analyze();
    BruteForce oracle(seeds_until(kb, t), {{A.session_key}, {A.secret}});
    INFO("t=" << t);
    CHECK(now.know_item(A.session_key) == oracle.knows({A.session_key}));
    CHECK(now.know_item(A.secret) == oracle.knows({A.secret}));
    // The ciphertext it can open reaches the adversary at t=3.
    CHECK(now.know_item(A.session_key) == (t >= 3));
    CHECK(now.know_item(A.secret) == (t >= 4));
  }
  auto leaks = leak_check(kb, s.targets, 20);
  REQUIRE(leaks.size() == 1);
  CHECK(leaks[0] == Leak{A.secret, 4});
}

TEST_CASE("fixed attack: abort at 4, genKey still leaks, secretD never does") {
  auto s = *builtin_scenario("fixed-attack");
  auto trace = run(Composite::compose(s.parts, s.wiring), 20);
  REQUIRE(trace.channel("abortC").interval(4).size() == 1);
  CHECK(render(trace.channel("resp").interval(3)[0]) == "<enc(AKey, <sig(SKey^-1, <genKey, N, AKey>)>)>");
  CHECK(trace.channel("xchd").stream().populated().empty());
  auto kb = trace.knowledge_of(tls::make_adversary({}));
  for (Time t = 0; t <= 20; ++t) {
    auto now = kb.until(t).analyze();
    CHECK(now.know_item(A.session_key) == (t >= 3));
    CHECK_FALSE(now.know_item(A.secret));
  }
  CHECK(leak_check(kb, s.targets, 20).empty());
}

TEST_CASE("everything a component emits is derivable from what it knew by then") {
  for (const auto& name : builtin_scenario_names()) {
    auto s = *builtin_scenario(name);
    auto c = Composite::compose(s.parts, s.wiring);
    auto trace = run(c, 20);
    for (const auto& p : c.parts()) {
      auto kb = trace.knowledge_of(p);
      for (const auto& ie : p.initial_emissions) CHECK(kb.until(0).derivable(as_expression(ie.message)));
      for (const auto& rec : trace.steps()) {
        if (rec.component != p.name) continue;
        auto known = kb.until(rec.time).analyze();
        for (const auto& [port, xs] : rec.emissions) {
          for (const auto& m : xs) {
            INFO(name << " " << p.name << " t=" << rec.time << " " << port << " " << render(m));
            CHECK(known.derivable(as_expression(m)));
          }
        }
      }
    }
  }
}
