#pragma once

#include <vector>

#include "qmsr/types.hpp"

namespace qmsr {

// Row-selection operator P: R^n -> R^m. Indices are 0-based, distinct, and
// ordered; output row j of an application is input row indices[j].
struct SamplingOperator {
  Index ambient_dim = 0;
  std::vector<Index> indices;

  Index sample_count() const { return static_cast<Index>(indices.size()); }

  // Identity ordering over all n rows (the "full data" sampler).
  static SamplingOperator identity(Index n);
  bool is_identity() const;
};

void validate(const SamplingOperator& p);

// QDEIM point selection: the indices are the first m column pivots of a
// column-pivoted QR applied to U^T, where U (n x m) has orthonormal columns
// (checked to 1e-8 per entry of U^T U - I).
SamplingOperator qdeim_select(const Matrix& u);

Vector apply_sampling(const SamplingOperator& p, const Vector& x);
Matrix apply_sampling(const SamplingOperator& p, const Matrix& x);

}  // namespace qmsr
