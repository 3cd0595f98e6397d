#ifndef HOFM_ERRORS_HPP_
#define HOFM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hofm {

/// Raised when a feedback loop runs away (modulation output beyond the guard).
class InstabilityError : public std::runtime_error {
 public:
  explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a truncated spectrum expansion would visit too many terms.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hofm

#endif  // HOFM_ERRORS_HPP_
