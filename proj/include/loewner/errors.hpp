#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

/// Thrown when an argument violates an operation's precondition.
class PreconditionError : public std::invalid_argument {
public:
  explicit PreconditionError(const std::string &what) : std::invalid_argument(what) {}
};

/// Thrown when a numerical procedure fails to meet its tolerance or budget.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

namespace detail {
inline void require(bool cond, const char *msg) {
  if (!cond) throw PreconditionError(msg);
}
} // namespace detail

} // namespace loewner
