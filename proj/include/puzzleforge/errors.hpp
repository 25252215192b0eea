#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace puzzleforge {

// Exception families map onto the CLI exit codes (2 config, 3 numerical, 4 resource).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameter : ConfigError {
  using ConfigError::ConfigError;
};

// Value-or-reason return for operations whose failure is an expected outcome
// (NotRegular, Blocked, NotAdmissible, ...), as opposed to a broken contract.
template <class T, class E>
class Result {
 public:
  Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Result(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool has_value() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return has_value(); }

  const T& value() const {
    if (!has_value()) throw std::logic_error("Result holds an error");
    return std::get<0>(v_);
  }
  T& value() {
    if (!has_value()) throw std::logic_error("Result holds an error");
    return std::get<0>(v_);
  }
  const E& error() const {
    if (has_value()) throw std::logic_error("Result holds a value");
    return std::get<1>(v_);
  }

  const T* operator->() const { return &value(); }
  const T& operator*() const { return value(); }

 private:
  std::variant<T, E> v_;
};

}  // namespace puzzleforge
