#include "qmsr/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "qmsr/parallel.hpp"

namespace qmsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Quantities shared by every candidate evaluation of one greedy run.
struct GreedyContext {
  const SvdFactors* svd = nullptr;
  Matrix target;        // T = Sigma * Psi^T, rho x k
  Vector target_row_sq; // ||T.row(j)||^2 per candidate row
  double target_sq = 0; // ||T||_F^2
  Matrix sampled_basis; // P Phi, m x rho (sparse encoder only)
  Matrix sampled_data;  // P S, m x k (sparse encoder only)
  bool full_encoder = false;
};

GreedyContext make_context(const SvdFactors& svd, const SamplingOperator& p,
                           const Matrix& s, bool full_encoder) {
  GreedyContext ctx;
  ctx.svd = &svd;
  ctx.target = svd.singular_values.asDiagonal() * svd.right_t;
  ctx.target_row_sq = ctx.target.rowwise().squaredNorm();
  ctx.target_sq = ctx.target.squaredNorm();
  ctx.full_encoder = full_encoder;
  if (!full_encoder) {
    ctx.sampled_basis = apply_sampling(p, svd.left);
    ctx.sampled_data = apply_sampling(p, s);
  }
  return ctx;
}

// Encoded training data (i x k) for the candidate index set, in selection
// order. Returns false when the sampled candidate basis loses full rank.
bool encode_selection(const GreedyContext& ctx, const std::vector<Index>& sel,
                      Matrix* encoded) {
  const Index i = static_cast<Index>(sel.size());
  if (ctx.full_encoder) {
    // V^T S with V made of left-singular vectors picks rows of the target.
    encoded->resize(i, ctx.target.cols());
    for (Index l = 0; l < i; ++l) {
      encoded->row(l) = ctx.target.row(sel[static_cast<std::size_t>(l)]);
    }
    return true;
  }
  Matrix pv(ctx.sampled_basis.rows(), i);
  for (Index l = 0; l < i; ++l) {
    pv.col(l) = ctx.sampled_basis.col(sel[static_cast<std::size_t>(l)]);
  }
  PseudoInverse pinv(pv, kEncoderRankTolerance, 1.0);
  if (pinv.rank() < i) return false;
  *encoded = pinv.solve(ctx.sampled_data);
  return true;
}

// Reduced greedy objective
//   J(sel) = min_W ||L(sel) + W h(F) - T||_F^2 + gamma ||W||_F^2
// where row sel[l] of L holds row l of the encoded data F. Uses the closed
// form J = ||R||^2 - tr(B^T B G^{-1}) with R = L - T, B = R h(F)^T and
// G = h(F) h(F)^T + gamma I, so the rho x k residual is never materialized.
double reduced_objective(const GreedyContext& ctx, const std::vector<Index>& sel,
                         double gamma) {
  Matrix f;
  if (!encode_selection(ctx, sel, &f)) return kInf;

  const Index i = static_cast<Index>(sel.size());
  const Matrix h = quad_features_matrix(f);

  Matrix gram = h * h.transpose();
  gram.diagonal().array() += gamma;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) return kInf;

  // ||R||^2 differs from ||T||^2 only in the lifted rows.
  double r_sq = ctx.target_sq;
  for (Index l = 0; l < i; ++l) {
    const Index row = sel[static_cast<std::size_t>(l)];
    r_sq -= ctx.target_row_sq(row);
    r_sq += (f.row(l) - ctx.target.row(row)).squaredNorm();
  }

  // B = R h^T = L h^T - T h^T; only the lifted rows of L are nonzero.
  Matrix b = -(ctx.target * h.transpose());
  const Matrix fh = f * h.transpose();
  for (Index l = 0; l < i; ++l) {
    b.row(sel[static_cast<std::size_t>(l)]) += fh.row(l);
  }

  const Matrix x = llt.solve(b.transpose());  // G^{-1} B^T, p x rho
  const double reduction = b.cwiseProduct(x.transpose()).sum();

  return std::max(0.0, r_sq - reduction);
}

void check_orthonormal(const Matrix& v, const char* what) {
  const Index r = v.cols();
  const double defect =
      (v.transpose() * v - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    throw ValidationError(std::string(what) + ": columns not orthonormal (defect " +
                          std::to_string(defect) + ")");
  }
}

struct GreedyResult {
  std::vector<Index> selected;
  std::vector<double> objectives;
};

GreedyResult run_greedy(const GreedyContext& ctx, const Matrix& s,
                        const SamplingOperator& p, const TrainingConfig& config,
                        Index pool, TrainingLog* log) {
  GreedyResult result;
  std::vector<char> taken(static_cast<std::size_t>(pool), 0);

  for (Index step = 1; step <= config.rank; ++step) {
    const auto t_step = Clock::now();
    std::vector<double> values(static_cast<std::size_t>(pool), kInf);

    parallel_for(0, pool, [&](Index j) {
      if (taken[static_cast<std::size_t>(j)]) return;
      if (config.objective == TrainingConfig::Objective::reduced) {
        std::vector<Index> sel = result.selected;
        sel.push_back(j);
        values[static_cast<std::size_t>(j)] = reduced_objective(ctx, sel, config.gamma);
      } else {
        Matrix v_partial(s.rows(), step - 1);
        for (Index l = 0; l < step - 1; ++l) {
          v_partial.col(l) = ctx.svd->left.col(result.selected[static_cast<std::size_t>(l)]);
        }
        values[static_cast<std::size_t>(j)] =
            greedy_objective_direct(ctx.svd->left.col(j), v_partial, p, s, config.gamma)
                .value;
      }
    });

    Index best = -1;
    double best_value = kInf;
    for (Index j = 0; j < pool; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      if (values[static_cast<std::size_t>(j)] < best_value) {
        best_value = values[static_cast<std::size_t>(j)];
        best = j;
      }
    }
    if (best < 0 || !(best_value < kInf)) {
      throw ValidationError("greedy selection failed at step " + std::to_string(step) +
                            ": every remaining candidate gives a rank-deficient "
                            "sampled basis");
    }

    taken[static_cast<std::size_t>(best)] = 1;
    result.selected.push_back(best);
    result.objectives.push_back(best_value);

    if (log != nullptr) {
      GreedyStep entry;
      entry.step = step;
      entry.chosen_index = best;
      entry.objective = best_value;
      entry.pool_size = pool - (step - 1);
      entry.seconds = seconds_since(t_step);
      log->steps.push_back(entry);

      Index skipped = 0;
      for (Index j = 0; j < pool; ++j) {
        if (!taken[static_cast<std::size_t>(j)] && std::isinf(values[static_cast<std::size_t>(j)])) ++skipped;
      }
      if (skipped > 0) {
        log->notes.push_back("step " + std::to_string(step) + ": skipped " +
                             std::to_string(skipped) +
                             " rank-deficient candidate(s)");
      }
    }
  }
  return result;
}

QuadraticManifoldModel train_core(const Matrix& s, const TrainingConfig& config,
                                  TrainingMethod method, TrainingLog* log) {
  require_finite(s, "train");
  const auto t0 = Clock::now();
  const Index n = s.rows();
  const Index k = s.cols();
  if (n < 1 || k < 1) {
    throw ValidationError("train: snapshot matrix must be nonempty");
  }
  if (config.rank < 1) {
    throw ValidationError("train: rank must be >= 1");
  }
  if (!(config.gamma > 0)) {
    throw ValidationError("train: gamma must be positive");
  }

  const bool needs_sampler = method != TrainingMethod::qm_full;
  if (needs_sampler) {
    if (config.samples < config.rank) {
      throw ValidationError("train: samples (m) must be >= rank (r)");
    }
    if (config.samples > n) {
      throw ValidationError("train: samples (m) cannot exceed the state dimension");
    }
  }

  SvdFactors svd = reduced_svd(s, config.rank_tolerance);
  const Index rho = svd.rank();

  const bool greedy = method != TrainingMethod::gappy_pod;
  Index pool = 0;
  if (greedy) {
    pool = config.candidates > 0 ? config.candidates
                                 : default_candidate_count(config.rank, k, rho);
    if (pool < config.rank) {
      throw ValidationError("train: candidate pool (M) must be >= rank (r)");
    }
  }

  Index required = std::max(pool, config.rank);
  if (needs_sampler) required = std::max(required, config.samples);
  if (rho < required) {
    throw ValidationError(
        "train: training data numerical rank " + std::to_string(rho) +
        " is below the required " + std::to_string(required) +
        "; lower the sample count m and/or the candidate pool M");
  }

  SamplingOperator sampler =
      needs_sampler ? qdeim_select(svd.left.leftCols(config.samples))
                    : SamplingOperator::identity(n);

  std::vector<Index> selected;
  if (greedy) {
    const GreedyContext ctx =
        make_context(svd, sampler, s, method == TrainingMethod::qm_full);
    selected = run_greedy(ctx, s, sampler, config, pool, log).selected;
  } else {
    selected.resize(static_cast<std::size_t>(config.rank));
    std::iota(selected.begin(), selected.end(), Index{0});
  }

  Matrix v(n, config.rank);
  for (Index l = 0; l < config.rank; ++l) {
    v.col(l) = svd.left.col(selected[static_cast<std::size_t>(l)]);
  }

  QuadraticManifoldModel model;
  model.basis = std::move(v);
  model.weights = greedy ? fit_weights(model.basis, sampler, s, config.gamma)
                         : Matrix::Zero(n, quad_feature_dim(config.rank));
  model.sampler = std::move(sampler);
  model.selected_indices = std::move(selected);
  model.gamma = config.gamma;
  model.method = method;
  model.provenance.candidate_pool = static_cast<std::uint64_t>(pool);
  model.provenance.training_columns = static_cast<std::uint64_t>(k);

  if (log != nullptr) log->total_seconds = seconds_since(t0);
  return model;
}

}  // namespace

Index default_candidate_count(Index rank, Index columns, Index numerical_rank) {
  return std::min({columns, numerical_rank, 4 * rank + 50});
}

Matrix fit_weights(const Matrix& v, const SamplingOperator& p, const Matrix& s,
                   double gamma) {
  require_finite(s, "fit_weights");
  if (v.rows() != s.rows() || v.rows() != p.ambient_dim) {
    throw ValidationError("fit_weights: dimension mismatch between basis, sampler and data");
  }
  if (s.cols() < 1) {
    throw ValidationError("fit_weights: need at least one snapshot");
  }

  const Matrix pv = apply_sampling(p, v);
  PseudoInverse pinv(pv, kEncoderRankTolerance, 1.0);
  if (pinv.rank() < v.cols()) {
    throw RankDeficientError(pinv.rank(), v.cols());
  }

  const Matrix encoded = pinv.solve(apply_sampling(p, s));
  const Matrix residual = v * encoded - s;
  const Matrix features = quad_features_matrix(encoded);
  Matrix w = ridge_lsq_left(residual, features, gamma);

  // The exact minimizer satisfies (PV)^+ P W = 0, which is what makes the
  // sparse reconstruction idempotent and exact on the manifold. Rounding in
  // the ridge solve leaves a small component violating it; project that
  // component out (a no-op in exact arithmetic).
  w.noalias() -= v * pinv.solve(apply_sampling(p, w));
  return w;
}

CandidateObjective greedy_objective_direct(const Vector& candidate,
                                           const Matrix& v_partial,
                                           const SamplingOperator& p,
                                           const Matrix& s, double gamma) {
  if (candidate.size() != s.rows() ||
      (v_partial.cols() > 0 && v_partial.rows() != s.rows())) {
    throw ValidationError("greedy_objective_direct: dimension mismatch");
  }

  const Index i = v_partial.cols() + 1;
  Matrix vc(s.rows(), i);
  if (v_partial.cols() > 0) vc.leftCols(v_partial.cols()) = v_partial;
  vc.col(i - 1) = candidate;
  check_orthonormal(vc, "greedy_objective_direct");

  const Matrix pvc = apply_sampling(p, vc);
  PseudoInverse pinv(pvc, kEncoderRankTolerance, 1.0);
  if (pinv.rank() < i) {
    return {kInf, Matrix()};
  }

  const Matrix encoded = pinv.solve(apply_sampling(p, s));
  const Matrix residual = vc * encoded - s;
  const Matrix features = quad_features_matrix(encoded);
  Matrix w = ridge_lsq_left(residual, features, gamma);
  const double value =
      (residual + w * features).squaredNorm() + gamma * w.squaredNorm();
  return {value, std::move(w)};
}

double greedy_objective_reduced(Index candidate_index,
                                const std::vector<Index>& selected,
                                const SvdFactors& svd,
                                const SamplingOperator& p, double gamma) {
  const Index pool = svd.rank();
  std::vector<Index> sel = selected;
  sel.push_back(candidate_index);
  for (Index idx : sel) {
    if (idx < 0 || idx >= pool) {
      throw ValidationError("greedy_objective_reduced: candidate index outside the pool");
    }
  }
  if (!(gamma > 0)) {
    throw ValidationError("greedy_objective_reduced: gamma must be positive");
  }

  // Without the raw data, the sampled training data is recovered from the
  // factors: P S = (P Phi) Sigma Psi^T up to the truncation tolerance.
  GreedyContext ctx;
  ctx.svd = &svd;
  ctx.target = svd.singular_values.asDiagonal() * svd.right_t;
  ctx.target_row_sq = ctx.target.rowwise().squaredNorm();
  ctx.target_sq = ctx.target.squaredNorm();
  ctx.full_encoder = p.is_identity();
  if (!ctx.full_encoder) {
    ctx.sampled_basis = apply_sampling(p, svd.left);
    ctx.sampled_data = ctx.sampled_basis * ctx.target;
  }
  return reduced_objective(ctx, sel, gamma);
}

QuadraticManifoldModel train_qmsr(const Matrix& s, const TrainingConfig& config,
                                  TrainingLog* log) {
  return train_core(s, config, TrainingMethod::qmsr, log);
}

QuadraticManifoldModel train_qm_full(const Matrix& s, const TrainingConfig& config,
                                     TrainingLog* log) {
  return train_core(s, config, TrainingMethod::qm_full, log);
}

QuadraticManifoldModel train_gappy_pod(const Matrix& s, const TrainingConfig& config,
                                       TrainingLog* log) {
  return train_core(s, config, TrainingMethod::gappy_pod, log);
}

}  // namespace qmsr
