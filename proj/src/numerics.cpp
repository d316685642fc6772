#include "qmsr/numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

namespace qmsr {

namespace {

Index truncation_rank(const Vector& singular_values, double rank_tolerance,
                      double scale_anchor = 0.0) {
  if (singular_values.size() == 0) return 0;
  const double cutoff = rank_tolerance * std::max(singular_values(0), scale_anchor);
  Index rank = 0;
  while (rank < singular_values.size() && singular_values(rank) > cutoff) ++rank;
  // A zero leading singular value means the whole matrix is zero.
  if (singular_values(0) == 0.0) rank = 0;
  return rank;
}

}  // namespace

SvdFactors reduced_svd(const Matrix& a, double rank_tolerance) {
  require_finite(a, "reduced_svd");
  if (a.rows() < 1 || a.cols() < 1) {
    throw ValidationError("reduced_svd: matrix must have at least one row and column");
  }
  if (rank_tolerance < 0) {
    throw ValidationError("reduced_svd: rank_tolerance must be nonnegative");
  }

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index rank = truncation_rank(svd.singularValues(), rank_tolerance);

  SvdFactors out;
  out.left = svd.matrixU().leftCols(rank);
  out.singular_values = svd.singularValues().head(rank);
  out.right_t = svd.matrixV().leftCols(rank).transpose();
  out.rank_tolerance = rank_tolerance;
  return out;
}

std::vector<Index> pivoted_qr_column_order(const Matrix& a) {
  require_finite(a, "pivoted_qr_column_order");
  const Index cols = a.cols();
  const Index steps = std::min(a.rows(), cols);

  Matrix residual = a;
  std::vector<bool> used(static_cast<std::size_t>(cols), false);
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(cols));

  for (Index step = 0; step < steps; ++step) {
    // Recompute residual norms each step; scanning ascending with a strict
    // comparison breaks exact ties toward the lowest index.
    Index pivot = -1;
    double best = -1.0;
    for (Index j = 0; j < cols; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double norm2 = residual.col(j).squaredNorm();
      if (norm2 > best) {
        best = norm2;
        pivot = j;
      }
    }
    if (pivot < 0 || best <= 0.0) break;  // residual exhausted

    used[static_cast<std::size_t>(pivot)] = true;
    order.push_back(pivot);

    const Vector q = residual.col(pivot) / residual.col(pivot).norm();
    for (Index j = 0; j < cols; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      residual.col(j).noalias() -= q * q.dot(residual.col(j));
      // Second orthogonalization pass keeps residuals accurate for
      // ill-conditioned inputs.
      residual.col(j).noalias() -= q * q.dot(residual.col(j));
    }
  }

  for (Index j = 0; j < cols; ++j) {
    if (!used[static_cast<std::size_t>(j)]) order.push_back(j);
  }
  return order;
}

Matrix ridge_lsq_left(const Matrix& r, const Matrix& h, double gamma) {
  require_finite(r, "ridge_lsq_left");
  require_finite(h, "ridge_lsq_left");
  if (r.cols() != h.cols()) {
    throw ValidationError("ridge_lsq_left: R and H must have the same column count");
  }
  if (!(gamma > 0)) {
    throw ValidationError("ridge_lsq_left: gamma must be positive");
  }

  Matrix gram = h * h.transpose();
  gram.diagonal().array() += gamma;

  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    // gamma > 0 makes the system SPD; a failure here means the inputs are at
    // the edge of double range.
    throw ValidationError("ridge_lsq_left: normal matrix factorization failed");
  }

  // W = -R H^T (H H^T + gamma I)^{-1}, via the symmetric solve of H R^T.
  return -llt.solve(h * r.transpose()).transpose();
}

PseudoInverse::PseudoInverse(const Matrix& a, double rank_tolerance, double scale_anchor) {
  require_finite(a, "pseudo_inverse");
  if (a.rows() < 1 || a.cols() < 1) {
    throw ValidationError("pseudo_inverse: matrix must have at least one row and column");
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  rank_ = truncation_rank(svd.singularValues(), rank_tolerance, scale_anchor);
  u_ = svd.matrixU().leftCols(rank_);
  v_ = svd.matrixV().leftCols(rank_);
  inv_sigma_ = svd.singularValues().head(rank_).cwiseInverse();
}

Vector PseudoInverse::solve(const Vector& b) const {
  if (b.size() != u_.rows()) {
    throw ValidationError("pseudo_inverse: right-hand side size mismatch");
  }
  if (rank_ == 0) return Vector::Zero(v_.rows());
  return v_ * (inv_sigma_.asDiagonal() * (u_.transpose() * b));
}

Matrix PseudoInverse::solve(const Matrix& b) const {
  if (b.rows() != u_.rows()) {
    throw ValidationError("pseudo_inverse: right-hand side row mismatch");
  }
  if (rank_ == 0) return Matrix::Zero(v_.rows(), b.cols());
  return v_ * (inv_sigma_.asDiagonal() * (u_.transpose() * b));
}

std::pair<Vector, Index> pseudo_inverse_apply(const Matrix& a, const Vector& b,
                                              double rank_tolerance) {
  PseudoInverse pinv(a, rank_tolerance);
  return {pinv.solve(b), pinv.rank()};
}

}  // namespace qmsr
