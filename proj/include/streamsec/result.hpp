#pragma once

#include <cassert>
#include <type_traits>
#include <utility>
#include <variant>

namespace streamsec {

// Value-or-error for checks that are expected to fail during normal protocol
// runs (a wrong key is an outcome, not a bug).
template <class T, class E>
class Result {
 public:
  Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  template <class U>
    requires(std::is_constructible_v<T, U &&> && !std::is_same_v<std::remove_cvref_t<U>, T> &&
             !std::is_same_v<std::remove_cvref_t<U>, E> && !std::is_same_v<std::remove_cvref_t<U>, Result>)
  Result(U&& value) : v_(std::in_place_index<0>, T(std::forward<U>(value))) {}
  Result(E error) : v_(std::in_place_index<1>, error) {}

  bool has_value() const { return v_.index() == 0; }
  explicit operator bool() const { return has_value(); }

  const T& value() const& {
    assert(has_value());
    return std::get<0>(v_);
  }
  T&& value() && {
    assert(has_value());
    return std::get<0>(std::move(v_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  E error() const {
    assert(!has_value());
    return std::get<1>(v_);
  }

  template <class F>
  auto and_then(F&& f) const -> decltype(f(std::declval<const T&>())) {
    if (has_value()) return f(value());
    return error();
  }

 private:
  std::variant<T, E> v_;
};

}  // namespace streamsec
