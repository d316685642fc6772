#include "qmsr/sampling.hpp"

#include <numeric>
#include <unordered_set>

#include "qmsr/numerics.hpp"

namespace qmsr {

SamplingOperator SamplingOperator::identity(Index n) {
  SamplingOperator p;
  p.ambient_dim = n;
  p.indices.resize(static_cast<std::size_t>(n));
  std::iota(p.indices.begin(), p.indices.end(), Index{0});
  return p;
}

bool SamplingOperator::is_identity() const {
  if (sample_count() != ambient_dim) return false;
  for (Index j = 0; j < ambient_dim; ++j) {
    if (indices[static_cast<std::size_t>(j)] != j) return false;
  }
  return true;
}

void validate(const SamplingOperator& p) {
  if (p.indices.empty()) {
    throw ValidationError("sampling operator: at least one index required");
  }
  if (p.ambient_dim < 1) {
    throw ValidationError("sampling operator: ambient dimension must be positive");
  }
  std::unordered_set<Index> seen;
  for (Index idx : p.indices) {
    if (idx < 0 || idx >= p.ambient_dim) {
      throw ValidationError("sampling operator: index " + std::to_string(idx) +
                            " outside [0, " + std::to_string(p.ambient_dim) + ")");
    }
    if (!seen.insert(idx).second) {
      throw ValidationError("sampling operator: duplicate index " + std::to_string(idx));
    }
  }
}

SamplingOperator qdeim_select(const Matrix& u) {
  require_finite(u, "qdeim_select");
  const Index n = u.rows();
  const Index m = u.cols();
  if (m < 1 || m > n) {
    throw ValidationError("qdeim_select: need 1 <= m <= n columns");
  }

  const Matrix gram = u.transpose() * u;
  const double defect = (gram - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    throw ValidationError("qdeim_select: columns not orthonormal (defect " +
                          std::to_string(defect) + " > 1e-8)");
  }

  // Rows of U become candidate columns of U^T; the first m pivots are the
  // sampling points.
  const std::vector<Index> order = pivoted_qr_column_order(u.transpose());

  SamplingOperator p;
  p.ambient_dim = n;
  p.indices.assign(order.begin(), order.begin() + m);
  return p;
}

Vector apply_sampling(const SamplingOperator& p, const Vector& x) {
  if (x.size() != p.ambient_dim) {
    throw ValidationError("apply_sampling: vector has " + std::to_string(x.size()) +
                          " rows, sampler expects " + std::to_string(p.ambient_dim));
  }
  Vector out(p.sample_count());
  for (Index j = 0; j < p.sample_count(); ++j) {
    out(j) = x(p.indices[static_cast<std::size_t>(j)]);
  }
  return out;
}

Matrix apply_sampling(const SamplingOperator& p, const Matrix& x) {
  if (x.rows() != p.ambient_dim) {
    throw ValidationError("apply_sampling: matrix has " + std::to_string(x.rows()) +
                          " rows, sampler expects " + std::to_string(p.ambient_dim));
  }
  Matrix out(p.sample_count(), x.cols());
  for (Index j = 0; j < p.sample_count(); ++j) {
    out.row(j) = x.row(p.indices[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace qmsr
