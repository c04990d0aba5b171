#pragma once

// What travels on a channel. Channels are typed by MessageType; the three
// types cover the TLS handshake: bare events (abort signals), expressions,
// and the structured protocol-initiation record im(ungValue, key, msg).

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "streamsec/term.hpp"

namespace streamsec {

struct Event {
  friend bool operator==(const Event&, const Event&) = default;
  friend std::strong_ordering operator<=>(const Event&, const Event&) = default;
};

struct InitMessage {
  Atom ung_value;
  Atom key;
  Expression msg;

  friend bool operator==(const InitMessage&, const InitMessage&) = default;
  friend std::strong_ordering operator<=>(const InitMessage&, const InitMessage&) = default;
};

using Message = std::variant<Event, Expression, InitMessage>;

enum class MessageType { Event, Expression, InitMessage };

MessageType type_of(const Message& m);
std::string_view to_string(MessageType type);
std::optional<MessageType> parse_message_type(std::string_view text);

/// Canonical rendering: `event`, `<...>`, `im(u, k, <...>)`.
std::string render(const Message& m);

/// The information content of a message as an expression. Events carry none.
Expression as_expression(const Message& m);

}  // namespace streamsec
