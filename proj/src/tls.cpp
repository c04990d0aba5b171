#include "streamsec/tls.hpp"

#include <set>
#include <stdexcept>

namespace streamsec::tls {

void TlsParams::validate() const {
  const std::vector<std::string> labels{nonce,       secret,      client_key,  server_key,     ca_key,
                                        adversary_key, session_key, client_name, server_name, adversary_name};
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument("empty atom label in TLS parameters");
    if (!seen.insert(l).second || !seen.insert(l + "^-1").second) {
      throw std::invalid_argument("TLS atom label '" + l + "' is used twice");
    }
  }
}

TlsAtoms TlsAtoms::from(const TlsParams& p) {
  p.validate();
  auto [ck, ck_inv] = key_pair(p.client_key);
  auto [sk, sk_inv] = key_pair(p.server_key);
  auto [cak, cak_inv] = key_pair(p.ca_key);
  auto [ak, ak_inv] = key_pair(p.adversary_key);
  return TlsAtoms{
      Atom::secret(p.nonce), Atom::secret(p.secret), ck, ck_inv, sk, sk_inv, cak, cak_inv, ak, ak_inv,
      Atom::symmetric_key(p.session_key), Atom::data(p.client_name), Atom::data(p.server_name),
      Atom::data(p.adversary_name),
  };
}

AtomTable TlsAtoms::table() const {
  AtomTable t;
  for (const auto& a : {nonce, secret, client_key, client_key_inv, server_key, server_key_inv, ca_key, ca_key_inv,
                        adversary_key, adversary_key_inv, session_key, client_name, server_name, adversary_name}) {
    t.add(a);
  }
  return t;
}

Expression server_certificate(const TlsAtoms& a) { return sign(a.ca_key_inv, {a.server_name, a.server_key}); }

namespace {

using T = Term;
using G = Guard;

Term sym(const char* s) { return T::symbol(s); }
Guard state_is(const char* local, const char* value) { return G::equal(T::local(local), sym(value)); }

// `fixed` adds the check that the signed reply names the client's own key.
ComponentSpec client(const TlsParams& p, bool fixed) {
  const auto a = TlsAtoms::from(p);
  ComponentSpec c;
  c.name = kClient;
  c.inputs = {{"abortS", MessageType::Event}, {"resp", MessageType::Expression}};
  c.outputs = {{"init", MessageType::InitMessage}, {"xchd", MessageType::Expression}, {"abortC", MessageType::Event}};
  c.locals = {{"check", "StateC", Symbol{"st0"}}, {"enc", "Keys", std::nullopt}};
  c.causality = Causality::Strong;

  c.initial_emissions = {
      {"init", InitMessage{a.nonce, a.client_key, sign(a.client_key_inv, {a.client_name, a.client_key})}}};

  c.where = {
      {"secr", T::ext(T::atom(a.ca_key), T::first("resp"))},
      {"res", T::ext(T::local("enc"), T::decr(T::atom(a.client_key_inv), T::first("resp")))},
  };
  const auto secr_names_server = G::equal(T::element(T::bound("secr"), Position::First), T::atom(a.server_name));
  const auto secr_wrong_server = G::not_equal(T::element(T::bound("secr"), Position::First), T::atom(a.server_name));
  auto res_ok = G::equal(T::element(T::bound("res"), Position::Second), T::atom(a.nonce));
  auto res_bad = G::not_equal(T::element(T::bound("res"), Position::Second), T::atom(a.nonce));
  if (fixed) {
    res_ok = res_ok && G::equal(T::element(T::bound("res"), Position::Third), T::atom(a.client_key));
    res_bad = res_bad || G::not_equal(T::element(T::bound("res"), Position::Third), T::atom(a.client_key));
  }
  const auto quiet = G::empty("abortS");
  const auto got = G::nonempty("resp");

  c.transitions = {
      {"reset on server abort", G::nonempty("abortS"), {{"check", sym("st0")}}, {}},
      {"nonce echoed", quiet && got && state_is("check", "st0"), {{"check", sym("st1")}}, {}},
      {"certificate accepted",
       quiet && got && state_is("check", "st1") && secr_names_server,
       {{"check", sym("st2")}, {"enc", T::element(T::bound("secr"), Position::Second)}},
       {}},
      {"session key accepted",
       quiet && got && state_is("check", "st2") && res_ok,
       {{"check", sym("st0")}},
       {{"xchd", T::enc(T::element(T::bound("res"), Position::First), T::atom(a.secret))}}},
      {"check failed",
       quiet && ((state_is("check", "st1") && (G::empty("resp") || (got && secr_wrong_server))) ||
                 (state_is("check", "st2") && (G::empty("resp") || (got && res_bad)))),
       {{"check", sym("st0")}},
       {{"abortC", T::constant(Event{})}}},
  };

  c.private_keys = {a.client_key_inv};
  c.unguessable = {a.nonce, a.secret};
  c.prior_knowledge = {{a.client_key}, {a.ca_key}, {a.client_name}, {a.server_name}};
  return c;
}

// `fixed` signs <genKey, N, key> instead of <genKey, N>.
ComponentSpec server(const TlsParams& p, bool fixed) {
  const auto a = TlsAtoms::from(p);
  ComponentSpec s;
  s.name = kServer;
  s.inputs = {{"init", MessageType::InitMessage}, {"abortC", MessageType::Event}, {"xchd", MessageType::Expression}};
  s.outputs = {{"resp", MessageType::Expression}, {"abortS", MessageType::Event}};
  s.locals = {{"stateS", "StateS", Symbol{"initS"}}, {"kValue", "Keys", std::nullopt}, {"uValue", "Secret", std::nullopt}};
  s.causality = Causality::Strong;
  s.assumption = {{"init", 1}, {"xchd", 1}};

  // The presented key must verify the signed pair and be its second element.
  const auto presented = T::key_of(T::first("init"));
  const auto signed_key = T::element(T::ext(presented, T::msg_of(T::first("init"))), Position::Second);
  const auto ready = G::empty("abortC") && state_is("stateS", "initS") && G::nonempty("init");

  std::vector<Term> reply{T::atom(a.session_key), T::local("uValue")};
  if (fixed) reply.push_back(T::local("kValue"));

  s.transitions = {
      {"reset on client abort", G::nonempty("abortC"), {{"stateS", sym("initS")}}, {}},
      {"reject init", ready && G::not_equal(signed_key, presented), {}, {{"abortS", T::constant(Event{})}}},
      {"accept init",
       ready && G::equal(signed_key, presented),
       {{"stateS", sym("sendS1")},
        {"uValue", T::ung_value(T::first("init"))},
        {"kValue", presented}},
       {{"resp", T::ung_value(T::first("init"))}}},
      {"send certificate",
       G::empty("abortC") && state_is("stateS", "sendS1"),
       {{"stateS", sym("sendS2")}},
       {{"resp", T::constant(server_certificate(a))}}},
      {"send session key",
       G::empty("abortC") && state_is("stateS", "sendS2"),
       {{"stateS", sym("waitS")}},
       {{"resp", T::enc(T::local("kValue"), T::sign(T::atom(a.server_key_inv), T::seq(reply)))}}},
  };

  s.private_keys = {a.server_key_inv, a.session_key};
  s.prior_knowledge = {{a.server_key}, {a.ca_key}, server_certificate(a), {a.client_name}, {a.server_name}};
  return s;
}

}  // namespace

ComponentSpec make_client(const TlsParams& p) { return client(p, false); }
ComponentSpec make_fixed_client(const TlsParams& p) { return client(p, true); }
ComponentSpec make_server(const TlsParams& p) { return server(p, false); }
ComponentSpec make_fixed_server(const TlsParams& p) { return server(p, true); }

ComponentSpec make_adversary(const TlsParams& p) {
  const auto a = TlsAtoms::from(p);
  ComponentSpec adv;
  adv.name = kAdversary;
  adv.inputs = {{"abortC1", MessageType::Event},
                {"abortS1", MessageType::Event},
                {"xchd1", MessageType::Expression},
                {"resp1", MessageType::Expression},
                {"init1", MessageType::InitMessage}};
  adv.outputs = {{"abortC2", MessageType::Event},
                 {"abortS2", MessageType::Event},
                 {"xchd2", MessageType::Expression},
                 {"resp2", MessageType::Expression},
                 {"init2", MessageType::InitMessage}};
  adv.locals = {{"aCKey", "Keys", std::nullopt},
                {"aSKey", "Keys", std::nullopt},
                {"aKey", "Keys", std::nullopt},
                {"stateA", "AdvStates", Symbol{"initA"}}};
  adv.causality = Causality::Weak;
  adv.assumption = {{"resp1", 2}, {"xchd1", 1}};

  const auto opened = T::decr(T::atom(a.adversary_key_inv), T::first("resp1"));
  const auto got = G::nonempty("resp1");

  adv.transitions = {
      {"relay abortC", G::nonempty("abortC1"), {}, {{"abortC2", Forward{"abortC1"}}}},
      {"relay abortS", G::nonempty("abortS1"), {}, {{"abortS2", Forward{"abortS1"}}}},
      {"relay xchd", G::nonempty("xchd1"), {}, {{"xchd2", Forward{"xchd1"}}}},
      {"substitute init",
       G::nonempty("init1"),
       {{"aCKey", T::key_of(T::first("init1"))}},
       {{"init2", T::init_message(T::ung_value(T::first("init1")), T::atom(a.adversary_key),
                                  T::constant(sign(a.adversary_key_inv, {a.client_name, a.adversary_key})))}}},
      {"relay nonce", got && state_is("stateA", "initA"), {{"stateA", sym("sendA1")}}, {{"resp2", Forward{"resp1"}}}},
      {"harvest server key",
       got && state_is("stateA", "sendA1"),
       {{"stateA", sym("sendA2")},
        {"aSKey", T::element(T::ext(T::atom(a.ca_key), T::first("resp1")), Position::Second)}},
       {{"resp2", Forward{"resp1"}}}},
      {"re-encrypt session key",
       got && state_is("stateA", "sendA2"),
       {{"stateA", sym("initA")}, {"aKey", T::element(T::ext(T::local("aSKey"), opened), Position::First)}},
       {{"resp2", T::enc(T::local("aCKey"), opened)}}},
  };

  adv.private_keys = {a.adversary_key_inv};
  adv.local_secrets = {{a.adversary_key_inv}};
  // A priori: the CA's public key, the server's certificate and a certificate
  // for the adversary's own identity.
  adv.prior_knowledge = {{a.adversary_key},
                         {a.ca_key},
                         server_certificate(a),
                         sign(a.ca_key_inv, {a.adversary_name, a.adversary_key}),
                         {a.client_name},
                         {a.server_name},
                         {a.adversary_name}};
  return adv;
}

std::vector<Wire> direct_wiring() {
  return {
      {{kClient, "init"}, {{kServer, "init"}}},     {{kClient, "xchd"}, {{kServer, "xchd"}}},
      {{kClient, "abortC"}, {{kServer, "abortC"}}}, {{kServer, "resp"}, {{kClient, "resp"}}},
      {{kServer, "abortS"}, {{kClient, "abortS"}}},
  };
}

std::vector<Wire> intercepted_wiring() {
  return {
      {{kClient, "init"}, {{kAdversary, "init1"}}},      {{kAdversary, "init2"}, {{kServer, "init"}}},
      {{kClient, "xchd"}, {{kAdversary, "xchd1"}}},      {{kAdversary, "xchd2"}, {{kServer, "xchd"}}},
      {{kClient, "abortC"}, {{kAdversary, "abortC1"}}},  {{kAdversary, "abortC2"}, {{kServer, "abortC"}}},
      {{kServer, "resp"}, {{kAdversary, "resp1"}}},      {{kAdversary, "resp2"}, {{kClient, "resp"}}},
      {{kServer, "abortS"}, {{kAdversary, "abortS1"}}},  {{kAdversary, "abortS2"}, {{kClient, "abortS"}}},
  };
}

}  // namespace streamsec::tls
