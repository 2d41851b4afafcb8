#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyham {

using Vec = std::vector<double>;

/// Thrown when a trajectory or auxiliary flow leaves the trusted region
/// (norm guard at 1e12) or produces non-finite values. Carries the last
/// finite state so callers can report where the blow-up happened.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string what, double time, Vec partial_state)
      : std::runtime_error(std::move(what)),
        time_(time),
        partial_state_(std::move(partial_state)) {}

  double time() const { return time_; }
  const Vec& partial_state() const { return partial_state_; }

 private:
  double time_;
  Vec partial_state_;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Full-precision decimal formatting; values round-trip bit exactly.
std::string format_double(double v);

bool all_finite(const Vec& v);
double inf_norm(const Vec& v);

constexpr double kDivergenceGuard = 1e12;

}  // namespace levyham
