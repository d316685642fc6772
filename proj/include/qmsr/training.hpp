#pragma once

#include <string>
#include <vector>

#include "qmsr/manifold.hpp"
#include "qmsr/numerics.hpp"
#include "qmsr/sampling.hpp"
#include "qmsr/types.hpp"

namespace qmsr {

struct TrainingConfig {
  Index rank = 0;        // r, manifold dimension
  Index samples = 0;     // m, number of sampling points (m >= r)
  Index candidates = 0;  // M, left-singular vectors scanned by the greedy; 0 = default
  double gamma = 1e-8;
  double rank_tolerance = kDefaultRankTolerance;

  enum class Objective { direct, reduced };
  Objective objective = Objective::reduced;
};

// Default candidate pool: min(k, numerical rank, 4r + 50).
Index default_candidate_count(Index rank, Index columns, Index numerical_rank);

struct GreedyStep {
  Index step = 0;          // 1-based greedy iteration
  Index chosen_index = 0;  // candidate index into the singular-vector pool
  double objective = 0;
  Index pool_size = 0;     // candidates evaluated this step
  double seconds = 0;
};

struct TrainingLog {
  std::vector<GreedyStep> steps;
  double total_seconds = 0;
  std::vector<std::string> notes;  // skipped candidates, rank diagnostics
};

// Final weight fit: W = argmin ||V f(PS) + W h(f(PS)) - S||_F^2 + gamma||W||_F^2
// with the sparse linear encoder f applied column-wise. Throws
// RankDeficientError when PV loses full column rank.
Matrix fit_weights(const Matrix& v, const SamplingOperator& p, const Matrix& s,
                   double gamma);

struct CandidateObjective {
  double value = 0;  // +inf when the sampled candidate basis is rank deficient
  Matrix weights;    // empty in the +inf case
};

// Greedy objective evaluated on the full n x k residual for the basis
// [v_partial, candidate]. Columns of [v_partial, candidate] must be
// orthonormal.
CandidateObjective greedy_objective_direct(const Vector& candidate,
                                           const Matrix& v_partial,
                                           const SamplingOperator& p,
                                           const Matrix& s, double gamma);

// Reduced-cost greedy objective over the rho x k residual in singular-vector
// coordinates. Shares its argmin over candidates with the direct objective.
double greedy_objective_reduced(Index candidate_index,
                                const std::vector<Index>& selected,
                                const SvdFactors& svd,
                                const SamplingOperator& p, double gamma);

// Sparse greedy training: SVD, QDEIM sampling from the first m left-singular
// vectors, greedy selection of r basis vectors from the first M, final ridge
// fit of W.
QuadraticManifoldModel train_qmsr(const Matrix& s, const TrainingConfig& config,
                                  TrainingLog* log = nullptr);

// Same greedy but with the full linear encoder V^T s everywhere; the model's
// sampler is recorded as the identity over all rows.
QuadraticManifoldModel train_qm_full(const Matrix& s, const TrainingConfig& config,
                                     TrainingLog* log = nullptr);

// Linear baseline: V = first r left-singular vectors, W = 0, QDEIM sampler.
// Reconstruction through the sparse encoder is classical gappy POD.
QuadraticManifoldModel train_gappy_pod(const Matrix& s, const TrainingConfig& config,
                                       TrainingLog* log = nullptr);

}  // namespace qmsr
