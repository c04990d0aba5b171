#pragma once

// Finite prefixes of timed streams: each time unit holds an ordered list of
// messages transmitted during that unit. Unpopulated units read as empty.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamsec/message.hpp"

namespace streamsec {

using Time = std::uint32_t;
using Interval = std::vector<Message>;

class TimedStream {
 public:
  const Interval& interval(Time t) const;
  void emit(Time t, Message m);
  /// Largest populated time unit, if any.
  std::optional<Time> horizon() const;
  /// Populated units in increasing time order.
  const std::map<Time, Interval>& populated() const { return intervals_; }

  friend bool operator==(const TimedStream&, const TimedStream&) = default;

 private:
  std::map<Time, Interval> intervals_;
};

inline std::size_t length(std::span<const Message> xs) { return xs.size(); }

/// True iff no interval up to `horizon` holds more than `n` messages.
bool msg_bound(const TimedStream& s, std::size_t n, Time horizon);

class ChannelTypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A named, typed stream. Emission rejects messages of the wrong type.
class Channel {
 public:
  Channel(std::string name, MessageType type) : name_(std::move(name)), type_(type) {}

  const std::string& name() const { return name_; }
  MessageType type() const { return type_; }
  const TimedStream& stream() const { return stream_; }
  const Interval& interval(Time t) const { return stream_.interval(t); }

  void emit(Time t, Message m);

 private:
  std::string name_;
  MessageType type_;
  TimedStream stream_;
};

}  // namespace streamsec
