#include "qmsr/manifold.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

#include "qmsr/numerics.hpp"

namespace qmsr {

namespace {

PseudoInverse sampled_basis_inverse(const QuadraticManifoldModel& model) {
  const Matrix pv = apply_sampling(model.sampler, model.basis);
  PseudoInverse pinv(pv, kEncoderRankTolerance, 1.0);
  if (pinv.rank() < model.reduced_dim()) {
    throw RankDeficientError(pinv.rank(), model.reduced_dim());
  }
  return pinv;
}

}  // namespace

void validate_model(const QuadraticManifoldModel& model) {
  const Index n = model.basis.rows();
  const Index r = model.basis.cols();
  const Index p = model.weights.cols();

  if (n < 1 || r < 1) {
    throw ModelValidationError("shape", "basis must be n x r with n, r >= 1");
  }
  if (!is_finite(model.basis) || !is_finite(model.weights)) {
    throw ModelValidationError("finiteness", "basis or weights contain NaN/Inf");
  }
  if (model.weights.rows() != n) {
    throw ModelValidationError("shape", "weights row count does not match basis");
  }
  if (p != quad_feature_dim(r)) {
    throw ModelValidationError("feature_dim",
                               "weights have " + std::to_string(p) +
                                   " columns, expected r(r+1)/2 = " +
                                   std::to_string(quad_feature_dim(r)));
  }
  if (static_cast<Index>(model.selected_indices.size()) != r) {
    throw ModelValidationError("selected_indices",
                               "expected one selected index per basis column");
  }

  try {
    validate(model.sampler);
  } catch (const ValidationError& e) {
    throw ModelValidationError("sampler", e.what());
  }
  if (model.sampler.ambient_dim != n) {
    throw ModelValidationError("sampler", "sampler ambient dimension does not match basis");
  }
  if (model.sampler.sample_count() < r) {
    throw ModelValidationError("sampler", "fewer sampling points than basis columns");
  }

  const double ortho_defect =
      (model.basis.transpose() * model.basis - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (ortho_defect > 1e-10) {
    throw ModelValidationError("orthonormality",
                               "V^T V deviates from identity by " + std::to_string(ortho_defect));
  }

  // Encoder-annihilation identity (PV)^+ (PW) = 0, which makes the sparse
  // reconstruction idempotent. Holds whenever W was fitted by the final
  // ridge problem.
  const Matrix pv = apply_sampling(model.sampler, model.basis);
  const Matrix pw = apply_sampling(model.sampler, model.weights);
  PseudoInverse pinv(pv, kEncoderRankTolerance, 1.0);
  const double identity_norm = pinv.solve(pw).norm();
  const double bound = 1e-8 * std::max(1.0, model.weights.norm());
  if (identity_norm > bound) {
    throw ModelValidationError("encoder_annihilation",
                               "||(PV)^+ PW||_F = " + std::to_string(identity_norm) +
                                   " exceeds " + std::to_string(bound));
  }
}

Vector decode(const QuadraticManifoldModel& model, const Vector& q) {
  if (q.size() != model.reduced_dim()) {
    throw ValidationError("decode: reduced vector size mismatch");
  }
  return model.basis * q + model.weights * quad_features(q);
}

Matrix decode_matrix(const QuadraticManifoldModel& model, const Matrix& q) {
  if (q.rows() != model.reduced_dim()) {
    throw ValidationError("decode: reduced matrix row mismatch");
  }
  return model.basis * q + model.weights * quad_features_matrix(q);
}

Vector encode_full(const QuadraticManifoldModel& model, const Vector& s) {
  if (s.size() != model.ambient_dim()) {
    throw ValidationError("encode_full: state size mismatch");
  }
  return model.basis.transpose() * s;
}

Matrix encode_full_matrix(const QuadraticManifoldModel& model, const Matrix& s) {
  if (s.rows() != model.ambient_dim()) {
    throw ValidationError("encode_full: state row mismatch");
  }
  return model.basis.transpose() * s;
}

Vector encode_sparse(const QuadraticManifoldModel& model, const Vector& sampled) {
  if (sampled.size() != model.sample_count()) {
    throw ValidationError("encode_sparse: expected " + std::to_string(model.sample_count()) +
                          " sampled components, got " + std::to_string(sampled.size()));
  }
  return sampled_basis_inverse(model).solve(sampled);
}

Matrix encode_sparse_matrix(const QuadraticManifoldModel& model, const Matrix& sampled) {
  if (sampled.rows() != model.sample_count()) {
    throw ValidationError("encode_sparse: sampled matrix row mismatch");
  }
  return sampled_basis_inverse(model).solve(sampled);
}

std::pair<Vector, GaussNewtonDiagnostics> encode_gauss_newton(
    const QuadraticManifoldModel& model, const Vector& sampled,
    const GaussNewtonConfig& config) {
  if (config.max_iterations < 1) {
    throw ValidationError("encode_gauss_newton: max_iterations must be >= 1");
  }
  for (double lambda : config.damping_sweep) {
    if (!(lambda > 0)) {
      throw ValidationError("encode_gauss_newton: damping values must be positive");
    }
  }

  const Matrix pv = apply_sampling(model.sampler, model.basis);
  const Matrix pw = apply_sampling(model.sampler, model.weights);

  const auto sampled_residual = [&](const Vector& q) -> Vector {
    return pv * q + pw * quad_features(q) - sampled;
  };

  GaussNewtonDiagnostics diag;
  diag.initial_encoded = encode_sparse(model, sampled);
  diag.initial_residual = sampled_residual(diag.initial_encoded).norm();

  const double scale = sampled.norm() > 0 ? sampled.norm() : 1.0;

  double best_residual = diag.initial_residual;
  Vector best_q = diag.initial_encoded;
  diag.chosen = -1;

  for (double lambda : config.damping_sweep) {
    GaussNewtonTrace trace;
    trace.damping = lambda;

    Vector q = diag.initial_encoded;
    double previous_relative = diag.initial_residual / scale;

    for (int it = 0; it < config.max_iterations; ++it) {
      const Vector rho = sampled_residual(q);
      const Matrix jac = pv + pw * quad_features_jacobian(q);

      Matrix normal = jac.transpose() * jac;
      normal.diagonal().array() += lambda;
      Eigen::LLT<Matrix> llt(normal);
      if (llt.info() != Eigen::Success) {
        trace.skipped = true;
        break;
      }

      q -= llt.solve(jac.transpose() * rho);
      trace.iterations = it + 1;

      const double relative = sampled_residual(q).norm() / scale;
      if (std::abs(relative - previous_relative) < config.stop_tolerance) break;
      previous_relative = relative;
    }

    trace.encoded = q;
    trace.residual = sampled_residual(q).norm();
    diag.sweep.push_back(trace);

    if (!trace.skipped && trace.residual < best_residual) {
      best_residual = trace.residual;
      best_q = q;
      diag.chosen = static_cast<int>(diag.sweep.size()) - 1;
    }
  }

  return {best_q, diag};
}

Vector pick_full_data_encoding(const QuadraticManifoldModel& model,
                               const GaussNewtonDiagnostics& diagnostics,
                               const Vector& full_snapshot) {
  if (full_snapshot.size() != model.ambient_dim()) {
    throw ValidationError("pick_full_data_encoding: state size mismatch");
  }
  Vector best_q = diagnostics.initial_encoded;
  double best_err = (decode(model, best_q) - full_snapshot).norm();
  for (const auto& trace : diagnostics.sweep) {
    if (trace.skipped) continue;
    const double err = (decode(model, trace.encoded) - full_snapshot).norm();
    if (err < best_err) {
      best_err = err;
      best_q = trace.encoded;
    }
  }
  return best_q;
}

Vector reconstruct(const QuadraticManifoldModel& model, const Vector& sampled,
                   EncoderMode mode, const GaussNewtonConfig& config) {
  switch (mode) {
    case EncoderMode::sparse_linear:
      return decode(model, encode_sparse(model, sampled));
    case EncoderMode::gauss_newton:
      return decode(model, encode_gauss_newton(model, sampled, config).first);
    case EncoderMode::full_linear:
      throw ValidationError("reconstruct: full_linear needs the full state, use reconstruct_full");
  }
  throw ValidationError("reconstruct: unknown encoder mode");
}

Matrix reconstruct_matrix(const QuadraticManifoldModel& model, const Matrix& sampled,
                          EncoderMode mode, const GaussNewtonConfig& config) {
  if (mode == EncoderMode::sparse_linear) {
    return decode_matrix(model, encode_sparse_matrix(model, sampled));
  }
  if (mode == EncoderMode::gauss_newton) {
    Matrix encoded(model.reduced_dim(), sampled.cols());
    for (Index c = 0; c < sampled.cols(); ++c) {
      encoded.col(c) = encode_gauss_newton(model, sampled.col(c), config).first;
    }
    return decode_matrix(model, encoded);
  }
  throw ValidationError("reconstruct: full_linear needs the full state, use reconstruct_full");
}

Vector reconstruct_full(const QuadraticManifoldModel& model, const Vector& s) {
  return decode(model, encode_full(model, s));
}

Matrix reconstruct_full_matrix(const QuadraticManifoldModel& model, const Matrix& s) {
  return decode_matrix(model, encode_full_matrix(model, s));
}

double reconstruction_error(const QuadraticManifoldModel& model, const Vector& s,
                            EncoderMode mode, const GaussNewtonConfig& config) {
  if (s.size() != model.ambient_dim()) {
    throw ValidationError("reconstruction_error: state size mismatch");
  }
  Vector approx;
  if (mode == EncoderMode::full_linear) {
    approx = reconstruct_full(model, s);
  } else {
    approx = reconstruct(model, apply_sampling(model.sampler, s), mode, config);
  }
  return (approx - s).squaredNorm();
}

double relative_error(const Matrix& test, const Matrix& approx) {
  if (test.rows() != approx.rows() || test.cols() != approx.cols()) {
    throw ValidationError("relative_error: shape mismatch");
  }
  const double ref = test.norm();
  if (!(ref > 0)) {
    throw ValidationError("relative_error: reference data has zero norm");
  }
  return (approx - test).norm() / ref;
}

}  // namespace qmsr
