#pragma once

#include <stdexcept>
#include <string>

namespace qmsr {

// Argument or input data violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// File could not be read or written, or its contents are malformed.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The sampled basis PV lost full column rank. Encoders refuse to proceed
// because every recovery guarantee assumes full column rank.
class RankDeficientError : public std::runtime_error {
public:
  RankDeficientError(long rank, long required)
      : std::runtime_error("sampled basis is rank deficient: numerical rank " +
                           std::to_string(rank) + " < required " +
                           std::to_string(required)),
        rank_(rank),
        required_(required) {}

  long rank() const noexcept { return rank_; }
  long required() const noexcept { return required_; }

private:
  long rank_;
  long required_;
};

// A trained or loaded model fails one of its structural invariants.
class ModelValidationError : public std::runtime_error {
public:
  ModelValidationError(const std::string& check, const std::string& detail)
      : std::runtime_error("model invariant '" + check + "' violated: " + detail),
        check_(check) {}

  const std::string& failed_check() const noexcept { return check_; }

private:
  std::string check_;
};

}  // namespace qmsr
