#pragma once

#include <Eigen/Dense>

#include "qmsr/errors.hpp"

namespace qmsr {

// All matrices are dense, double precision, column-major. Snapshots are
// stored as columns: S = [s(1), ..., s(k)] in R^{n x k}.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool is_finite(const Matrix& a) { return a.allFinite(); }
inline bool is_finite(const Vector& a) { return a.allFinite(); }

inline void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": matrix contains NaN or Inf entries");
  }
}

inline void require_finite(const Vector& a, const char* what) {
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": vector contains NaN or Inf entries");
  }
}

}  // namespace qmsr
