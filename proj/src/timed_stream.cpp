#include "streamsec/timed_stream.hpp"

namespace streamsec {

const Interval& TimedStream::interval(Time t) const {
  static const Interval kEmpty;
  auto it = intervals_.find(t);
  return it == intervals_.end() ? kEmpty : it->second;
}

void TimedStream::emit(Time t, Message m) { intervals_[t].push_back(std::move(m)); }

std::optional<Time> TimedStream::horizon() const {
  if (intervals_.empty()) return std::nullopt;
  return intervals_.rbegin()->first;
}

bool msg_bound(const TimedStream& s, std::size_t n, Time horizon) {
  for (const auto& [t, xs] : s.populated()) {
    if (t > horizon) break;
    if (length(xs) > n) return false;
  }
  return true;
}

void Channel::emit(Time t, Message m) {
  if (type_of(m) != type_) {
    throw ChannelTypeError("channel '" + name_ + "' carries " + std::string(to_string(type_)) + ", got " +
                           std::string(to_string(type_of(m))) + " " + render(m));
  }
  stream_.emit(t, std::move(m));
}

}  // namespace streamsec
