#include "qmsr/featuremap.hpp"

namespace qmsr {

Vector quad_features(const Vector& q) {
  const Index r = q.size();
  Vector h(quad_feature_dim(r));
  Index row = 0;
  for (Index i = 0; i < r; ++i) {
    for (Index j = i; j < r; ++j) {
      h(row++) = q(i) * q(j);
    }
  }
  return h;
}

Matrix quad_features_matrix(const Matrix& q) {
  const Index r = q.rows();
  const Index k = q.cols();
  Matrix h(quad_feature_dim(r), k);
  for (Index c = 0; c < k; ++c) {
    Index row = 0;
    for (Index i = 0; i < r; ++i) {
      for (Index j = i; j < r; ++j) {
        h(row++, c) = q(i, c) * q(j, c);
      }
    }
  }
  return h;
}

Matrix quad_features_jacobian(const Vector& q) {
  const Index r = q.size();
  Matrix jac = Matrix::Zero(quad_feature_dim(r), r);
  Index row = 0;
  for (Index i = 0; i < r; ++i) {
    for (Index j = i; j < r; ++j) {
      // d(q_i q_j)/dq_l = delta_il q_j + delta_jl q_i
      jac(row, i) += q(j);
      jac(row, j) += q(i);
      ++row;
    }
  }
  return jac;
}

}  // namespace qmsr
