#pragma once

#include <utility>
#include <vector>

#include "qmsr/types.hpp"

namespace qmsr {

// Relative cutoff (times sigma_1) below which singular values are treated as
// zero when truncating a factorization.
inline constexpr double kDefaultRankTolerance = 1e-12;

// Relative cutoff used by the sparse encoders when deciding whether the
// sampled basis PV still has full column rank.
inline constexpr double kEncoderRankTolerance = 1e-10;

// Truncated reduced SVD: A = left * diag(singular_values) * right_t with
// orthonormal left columns and orthonormal right_t rows. Only singular values
// above rank_tolerance * sigma_1 are retained.
struct SvdFactors {
  Matrix left;             // n x rho
  Vector singular_values;  // rho, descending
  Matrix right_t;          // rho x k
  double rank_tolerance = kDefaultRankTolerance;

  Index rank() const { return singular_values.size(); }
};

SvdFactors reduced_svd(const Matrix& a, double rank_tolerance = kDefaultRankTolerance);

// Column pivot order of a greedy column-pivoted QR: pivot i maximizes the
// residual column norm after orthogonalizing against pivots 0..i-1. Exact
// ties break toward the lowest column index. Returns a permutation of all
// column indices; once the residual is exhausted the remaining indices are
// appended in ascending order.
std::vector<Index> pivoted_qr_column_order(const Matrix& a);

// argmin_W ||R + W*H||_F^2 + gamma*||W||_F^2 for R (q x k), H (p x k),
// gamma > 0, solved through the SPD system (H*H^T + gamma*I).
Matrix ridge_lsq_left(const Matrix& r, const Matrix& h, double gamma);

// Minimum-norm least-squares solve through an SVD with relative cutoff:
// singular values below rank_tolerance * max(sigma_1, scale_anchor) are
// treated as zero. The default anchor of 0 gives the plain relative rule;
// encoders of sampled orthonormal bases pass scale_anchor = 1 so that a
// sampled block whose entries are all negligible counts as rank deficient.
// Keeps the factorization so one sampled basis can serve many right-hand
// sides. rank() reports the numerical rank so callers can enforce their own
// full-rank preconditions.
class PseudoInverse {
public:
  explicit PseudoInverse(const Matrix& a, double rank_tolerance = kDefaultRankTolerance,
                         double scale_anchor = 0.0);

  Index rank() const { return rank_; }
  Index rows() const { return u_.rows(); }
  Index cols() const { return v_.rows(); }

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

private:
  Matrix u_;          // m x rank
  Matrix v_;          // r x rank
  Vector inv_sigma_;  // rank
  Index rank_ = 0;
};

// One-shot min-norm least-squares solution A^+ b and the numerical rank of A.
std::pair<Vector, Index> pseudo_inverse_apply(const Matrix& a, const Vector& b,
                                              double rank_tolerance = kDefaultRankTolerance);

}  // namespace qmsr
