#include "streamsec/message.hpp"

namespace streamsec {

MessageType type_of(const Message& m) { return static_cast<MessageType>(m.index()); }

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::Event: return "Event";
    case MessageType::Expression: return "Expression";
    case MessageType::InitMessage: return "InitMessage";
  }
  return "?";
}

std::optional<MessageType> parse_message_type(std::string_view text) {
  for (auto type : {MessageType::Event, MessageType::Expression, MessageType::InitMessage}) {
    if (to_string(type) == text) return type;
  }
  return std::nullopt;
}

std::string render(const Message& m) {
  struct {
    std::string operator()(const Event&) const { return "event"; }
    std::string operator()(const Expression& e) const { return render(e); }
    std::string operator()(const InitMessage& im) const {
      return "im(" + render(im.ung_value) + ", " + render(im.key) + ", " + render(im.msg) + ")";
    }
  } visitor;
  return std::visit(visitor, m);
}

Expression as_expression(const Message& m) {
  struct {
    Expression operator()(const Event&) const { return {}; }
    Expression operator()(const Expression& e) const { return e; }
    Expression operator()(const InitMessage& im) const {
      return concat(Expression{im.ung_value, im.key}, im.msg);
    }
  } visitor;
  return std::visit(visitor, m);
}

}  // namespace streamsec
