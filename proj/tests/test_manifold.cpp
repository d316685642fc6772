#include <cmath>

#include "doctest.h"
#include "qmsr/manifold.hpp"
#include "qmsr/numerics.hpp"
#include "qmsr/training.hpp"
#include "support.hpp"

using namespace qmsr;
using test::Rng;

namespace {

// Random full-rank snapshot data trained into a small QMSR model.
QuadraticManifoldModel toy_model(Rng& rng, Index n, Index k, Index r, Index m) {
  const Matrix s = test::random_matrix(rng, n, k);
  TrainingConfig config;
  config.rank = r;
  config.samples = m;
  config.candidates = std::min<Index>(k, 2 * r + 2);
  return train_qmsr(s, config);
}

}  // namespace

TEST_SUITE_BEGIN("manifold");

TEST_CASE("decode: zero reduced state decodes to zero") {
  QuadraticManifoldModel model;
  model.basis = Matrix::Identity(4, 2);
  model.weights = Matrix::Zero(4, 3);
  CHECK(decode(model, Vector::Zero(2)).norm() == 0.0);
}

TEST_CASE("decode: zero weights reduce to the linear decoder") {
  Rng rng(31);
  QuadraticManifoldModel model;
  model.basis = test::random_orthonormal(rng, 10, 3);
  model.weights = Matrix::Zero(10, 6);
  const Vector q = test::random_vector(rng, 3);
  CHECK((decode(model, q) - model.basis * q).norm() == 0.0);
}

TEST_CASE("decode: explicit 2x1 quadratic example") {
  QuadraticManifoldModel model;
  model.basis = Matrix::Zero(2, 1);
  model.basis(0, 0) = 1.0;  // V = e1
  model.weights = Matrix::Zero(2, 1);
  model.weights(1, 0) = 1.0;  // W = [0; 1]
  Vector q(1);
  q << 2;
  const Vector out = decode(model, q);
  CHECK(out(0) == 2.0);  // V q
  CHECK(out(1) == 4.0);  // W q^2
}

TEST_CASE("encode_full: left inverse of the linear part") {
  Rng rng(32);
  QuadraticManifoldModel model;
  model.basis = test::random_orthonormal(rng, 12, 4);
  model.weights = Matrix::Zero(12, 10);
  const Vector q = test::random_vector(rng, 4);
  CHECK((encode_full(model, model.basis * q) - q).norm() <= 1e-13);

  // A state orthogonal to span(V) encodes to zero.
  Vector s = test::random_vector(rng, 12);
  s -= model.basis * (model.basis.transpose() * s);
  CHECK(encode_full(model, s).norm() <= 1e-13 * s.norm());
}

TEST_CASE("encode_full equals encode_sparse with the identity sampler") {
  Rng rng(33);
  QuadraticManifoldModel model;
  model.basis = test::random_orthonormal(rng, 15, 3);
  model.weights = Matrix::Zero(15, 6);
  model.sampler = SamplingOperator::identity(15);
  const Vector s = test::random_vector(rng, 15);
  CHECK((encode_full(model, s) - encode_sparse(model, s)).norm() <= 1e-12);
}

TEST_CASE("encode_sparse: canonical sampled basis returns samples verbatim") {
  QuadraticManifoldModel model;
  Matrix v = Matrix::Zero(6, 2);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0;
  model.basis = v;  // P V = I_2 for P = rows {0, 1}
  model.weights = Matrix::Zero(6, 3);
  model.sampler.ambient_dim = 6;
  model.sampler.indices = {0, 1};
  Vector sampled(2);
  sampled << 3.5, -2.0;
  CHECK((encode_sparse(model, sampled) - sampled).norm() == 0.0);
}

TEST_CASE("encode_sparse: single-column pseudo-inverse value") {
  QuadraticManifoldModel model;
  model.basis = Matrix::Constant(3, 1, 1.0 / std::sqrt(3.0));
  model.weights = Matrix::Zero(3, 1);
  model.sampler.ambient_dim = 3;
  model.sampler.indices = {0, 1};
  Vector sampled(2);
  sampled << 2, 4;
  const Vector q = encode_sparse(model, sampled);
  CHECK(q(0) == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("encode_sparse: rank-deficient PV raises") {
  QuadraticManifoldModel model;
  model.basis = Matrix::Identity(4, 2);
  model.weights = Matrix::Zero(4, 3);
  model.sampler.ambient_dim = 4;
  model.sampler.indices = {0, 3};  // row 3 of V is zero, PV has rank 1
  try {
    encode_sparse(model, Vector::Ones(2));
    FAIL("expected RankDeficientError");
  } catch (const RankDeficientError& e) {
    CHECK(e.rank() == 1);
    CHECK(e.required() == 2);
  }
}

TEST_CASE("encode_sparse: linear in the samples") {
  Rng rng(34);
  const QuadraticManifoldModel model = toy_model(rng, 30, 18, 3, 6);
  const Vector sampled = test::random_vector(rng, model.sample_count());
  const Vector q = encode_sparse(model, sampled);
  for (double alpha : {2.0, -0.125, 10.5}) {
    const Vector scaled = encode_sparse(model, Vector(alpha * sampled));
    CHECK((scaled - alpha * q).norm() <= 1e-12 * std::max(1.0, q.norm()));
  }
}

TEST_CASE("reconstruct: exact recovery of on-manifold points") {
  Rng rng(35);
  const QuadraticManifoldModel model = toy_model(rng, 40, 20, 3, 6);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector q = test::random_vector(rng, 3);
    const Vector s = decode(model, q);
    const Vector sampled = apply_sampling(model.sampler, s);
    const Vector back = reconstruct(model, sampled, EncoderMode::sparse_linear);
    CHECK((back - s).norm() <= 1e-8 * s.norm());
  }
}

TEST_CASE("reconstruct: idempotence on off-manifold points") {
  Rng rng(36);
  const QuadraticManifoldModel model = toy_model(rng, 40, 20, 3, 7);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector s = test::random_vector(rng, 40);
    const Vector once =
        reconstruct(model, apply_sampling(model.sampler, s), EncoderMode::sparse_linear);
    const Vector twice =
        reconstruct(model, apply_sampling(model.sampler, once), EncoderMode::sparse_linear);
    CHECK((twice - once).norm() <= 1e-10 * std::max(1.0, once.norm()));
  }
}

TEST_CASE("reconstruct: W = 0 equals the independent gappy-POD oracle") {
  Rng rng(37);
  QuadraticManifoldModel model;
  model.basis = test::random_orthonormal(rng, 25, 4);
  model.weights = Matrix::Zero(25, 10);
  model.sampler.ambient_dim = 25;
  model.sampler.indices = {1, 5, 9, 13, 17, 21, 24, 0};
  const Vector s = test::random_vector(rng, 25);
  const Vector mine =
      reconstruct(model, apply_sampling(model.sampler, s), EncoderMode::sparse_linear);
  const Vector oracle =
      test::gappy_reconstruction_oracle(model.basis, model.sampler.indices, s);
  CHECK((mine - oracle).norm() <= 1e-12 * std::max(1.0, oracle.norm()));
}

TEST_CASE("encode_gauss_newton: on-manifold points keep the linear encoding") {
  Rng rng(38);
  const QuadraticManifoldModel model = toy_model(rng, 40, 20, 3, 6);
  const Vector q = test::random_vector(rng, 3);
  const Vector sampled = apply_sampling(model.sampler, decode(model, q));
  const auto [q_gn, diag] = encode_gauss_newton(model, sampled);
  CHECK(diag.initial_residual <= 1e-10 * std::max(1.0, sampled.norm()));
  CHECK((q_gn - diag.initial_encoded).norm() <= 1e-10 * std::max(1.0, q.norm()));
}

TEST_CASE("encode_gauss_newton: linear model agrees with the sparse encoder") {
  Rng rng(39);
  QuadraticManifoldModel model;
  model.basis = test::random_orthonormal(rng, 30, 4);
  model.weights = Matrix::Zero(30, 10);
  model.sampler.ambient_dim = 30;
  model.sampler.indices = {0, 3, 7, 11, 15, 19, 23, 27};
  const Vector sampled = test::random_vector(rng, 8);
  const Vector q_lin = encode_sparse(model, sampled);
  const auto [q_gn, diag] = encode_gauss_newton(model, sampled);
  CHECK((q_gn - q_lin).norm() <= 1e-6 * std::max(1.0, q_lin.norm()));
}

TEST_CASE("encode_gauss_newton: never worse than the initializer on samples") {
  Rng rng(40);
  const QuadraticManifoldModel model = toy_model(rng, 40, 20, 3, 6);
  const Matrix pv = apply_sampling(model.sampler, model.basis);
  const Matrix pw = apply_sampling(model.sampler, model.weights);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector sampled = test::random_vector(rng, model.sample_count());
    const auto [q_gn, diag] = encode_gauss_newton(model, sampled);
    const double final_residual = (pv * q_gn + pw * quad_features(q_gn) - sampled).norm();
    CHECK(final_residual <= diag.initial_residual * (1 + 1e-12) + 1e-15);
    for (const auto& trace : diag.sweep) CHECK(trace.iterations <= 20);
  }
}

TEST_CASE("weighted-optimality certificate at the sparse reconstruction") {
  Rng rng(41);
  const QuadraticManifoldModel model = toy_model(rng, 40, 22, 3, 6);
  const Matrix pv = apply_sampling(model.sampler, model.basis);
  PseudoInverse pinv(pv, kEncoderRankTolerance, 1.0);

  const Vector s = test::random_vector(rng, 40);
  const Vector s_hat =
      reconstruct(model, apply_sampling(model.sampler, s), EncoderMode::sparse_linear);

  const auto objective = [&](const Vector& candidate) {
    return pinv.solve(Vector(apply_sampling(model.sampler, Vector(candidate - s)))).squaredNorm();
  };
  const double at_reconstruction = objective(s_hat);
  const double scale = pinv.solve(Vector(apply_sampling(model.sampler, s))).squaredNorm();
  CHECK(std::sqrt(at_reconstruction) <= 1e-8 * std::sqrt(scale));

  for (int trial = 0; trial < 20; ++trial) {
    const Vector z = test::random_vector(rng, 3);
    CHECK(objective(decode(model, z)) >= at_reconstruction - 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("reconstruction_error: variants") {
  Rng rng(42);
  const QuadraticManifoldModel model = toy_model(rng, 40, 20, 3, 6);

  const Vector on_manifold = decode(model, test::random_vector(rng, 3));
  CHECK(reconstruction_error(model, on_manifold, EncoderMode::sparse_linear) <=
        1e-16 * on_manifold.squaredNorm());

  // Pure POD with full sampling: the error of a state orthogonal to span(V)
  // is its whole squared norm.
  QuadraticManifoldModel pod;
  pod.basis = test::random_orthonormal(rng, 20, 3);
  pod.weights = Matrix::Zero(20, 6);
  pod.sampler = SamplingOperator::identity(20);
  Vector s = test::random_vector(rng, 20);
  s -= pod.basis * (pod.basis.transpose() * s);
  CHECK(reconstruction_error(pod, s, EncoderMode::full_linear) ==
        doctest::Approx(s.squaredNorm()).epsilon(1e-10));

  const Vector probe = test::random_vector(rng, 40);
  const Vector recomposed =
      decode(model, encode_sparse(model, apply_sampling(model.sampler, probe)));
  CHECK(reconstruction_error(model, probe, EncoderMode::sparse_linear) ==
        doctest::Approx((recomposed - probe).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("relative_error: basic values") {
  Matrix test_data(2, 1), approx(2, 1);
  test_data << 3, 4;
  approx << 3, 0;
  CHECK(relative_error(test_data, test_data) == 0.0);
  CHECK(relative_error(test_data, Matrix(Matrix::Zero(2, 1))) == doctest::Approx(1.0));
  CHECK(relative_error(test_data, approx) == doctest::Approx(0.8));
  CHECK_THROWS_AS(relative_error(Matrix(Matrix::Zero(2, 1)), approx), ValidationError);
  CHECK_THROWS_AS(relative_error(test_data, Matrix(Matrix::Zero(3, 1))), ValidationError);
}

TEST_CASE("validate_model: trained models pass, corrupted ones name the check") {
  Rng rng(43);
  QuadraticManifoldModel model = toy_model(rng, 30, 16, 3, 6);
  CHECK_NOTHROW(validate_model(model));

  QuadraticManifoldModel broken = model;
  broken.basis(0, 0) += 1e-3;
  try {
    validate_model(broken);
    FAIL("expected ModelValidationError");
  } catch (const ModelValidationError& e) {
    CHECK(e.failed_check() == "orthonormality");
  }

  QuadraticManifoldModel wrong_p = model;
  wrong_p.weights = Matrix::Zero(30, 5);
  try {
    validate_model(wrong_p);
    FAIL("expected ModelValidationError");
  } catch (const ModelValidationError& e) {
    CHECK(e.failed_check() == "feature_dim");
  }
}

TEST_SUITE_END();
