#pragma once

// The TLS handshake variant: Client, Server, a man-in-the-middle Adversary,
// and the corrected Client/Server whose signed server reply also carries the
// public key the server encrypted to.

#include <string>
#include <vector>

#include "streamsec/component.hpp"
#include "streamsec/composite.hpp"

namespace streamsec::tls {

/// Atom labels, overridable from a parameter file.
struct TlsParams {
  std::string nonce = "N";
  std::string secret = "secretD";
  std::string client_key = "CKey";
  std::string server_key = "SKey";
  std::string ca_key = "CAKey";
  std::string adversary_key = "AKey";
  std::string session_key = "genKey";
  std::string client_name = "C";
  std::string server_name = "S";
  std::string adversary_name = "A";

  /// Throws std::invalid_argument on empty or clashing labels.
  void validate() const;
};

struct TlsAtoms {
  Atom nonce, secret;
  Atom client_key, client_key_inv;
  Atom server_key, server_key_inv;
  Atom ca_key, ca_key_inv;
  Atom adversary_key, adversary_key_inv;
  Atom session_key;
  Atom client_name, server_name, adversary_name;

  static TlsAtoms from(const TlsParams& p);
  AtomTable table() const;
};

inline constexpr const char* kClient = "Client";
inline constexpr const char* kServer = "Server";
inline constexpr const char* kAdversary = "Adversary";

ComponentSpec make_client(const TlsParams& p);
ComponentSpec make_server(const TlsParams& p);
ComponentSpec make_adversary(const TlsParams& p);
ComponentSpec make_fixed_client(const TlsParams& p);
ComponentSpec make_fixed_server(const TlsParams& p);

/// Client <-> Server directly: init, xchd, abortC one way; resp, abortS back.
std::vector<Wire> direct_wiring();
/// Every channel routed through the Adversary (init -> init1, init2 -> init, ...).
std::vector<Wire> intercepted_wiring();

/// The CA certificate Sign(CAKey^-1, <S, SKey>).
Expression server_certificate(const TlsAtoms& a);

}  // namespace streamsec::tls
