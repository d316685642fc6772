#pragma once

#include "qmsr/types.hpp"

namespace qmsr {

// Feature dimension of the quadratic map: p = r(r+1)/2.
inline Index quad_feature_dim(Index r) { return r * (r + 1) / 2; }

// Quadratic feature map h: R^r -> R^p with the fixed monomial order
//   [q1*q1, q1*q2, ..., q1*qr, q2*q2, q2*q3, ..., qr*qr],
// i.e. the upper triangle including the diagonal, row by row. Serialized
// weight matrices are only meaningful relative to this order.
Vector quad_features(const Vector& q);

// Column-wise application of quad_features to Q (r x k), giving p x k.
Matrix quad_features_matrix(const Matrix& q);

// Jacobian of quad_features at q: entry (row(i,j), l) = d(q_i q_j)/d(q_l)
// with rows in the same monomial order as quad_features.
Matrix quad_features_jacobian(const Vector& q);

}  // namespace qmsr
