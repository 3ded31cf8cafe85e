#ifndef SHARDBUS_RESULT_HPP
#define SHARDBUS_RESULT_HPP

#include <cassert>
#include <utility>
#include <variant>

namespace shardbus {

enum class Error {
  KeyExists,
  UnknownKey,
  SessionExpired,
  DomainError,
  CorruptWal,
  MalformedHistory,
  BudgetExceeded,
};

constexpr const char* to_string(Error e) {
  switch (e) {
    case Error::KeyExists: return "KeyExists";
    case Error::UnknownKey: return "UnknownKey";
    case Error::SessionExpired: return "SessionExpired";
    case Error::DomainError: return "DomainError";
    case Error::CorruptWal: return "CorruptWal";
    case Error::MalformedHistory: return "MalformedHistory";
    case Error::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

/// Minimal expected-style result. Ok path carries a T, error path an Error.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}       // NOLINT(google-explicit-constructor)
  Result(Error e) : v_(e) {}                      // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  T& operator*() { return value(); }
  const T& operator*() const { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

  Error error() const {
    assert(!ok());
    return std::get<Error>(v_);
  }

 private:
  std::variant<T, Error> v_;
};

}  // namespace shardbus

#endif  // SHARDBUS_RESULT_HPP
