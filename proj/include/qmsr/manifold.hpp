#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmsr/featuremap.hpp"
#include "qmsr/sampling.hpp"
#include "qmsr/types.hpp"

namespace qmsr {

// How a model was fitted. Decides which encoder the evaluation pipeline uses
// by default and is persisted as one byte in the model file.
enum class TrainingMethod : std::uint8_t {
  qmsr = 0,       // greedy basis with the sparse linear encoder
  qm_full = 1,    // greedy basis with the full linear encoder V^T s
  gappy_pod = 2,  // first r left-singular vectors, W = 0
};

// Encoder used when reconstructing a state from data.
enum class EncoderMode {
  full_linear,    // q = V^T s, needs the full state
  sparse_linear,  // q = (PV)^+ P s, needs only the sampled components
  gauss_newton,   // damped Gauss-Newton refinement of the sparse encoding
};

struct ModelProvenance {
  std::string generator;            // dataset origin, free-form
  std::uint64_t candidate_pool = 0; // M used during greedy selection
  std::uint64_t training_columns = 0;
};

// Quadratic manifold {V q + W h(q)} together with the sampling operator it
// was trained against. Immutable after training; all operations below are
// pure and safe to call concurrently on a shared model.
struct QuadraticManifoldModel {
  Matrix basis;    // V, n x r, orthonormal columns
  Matrix weights;  // W, n x p with p = r(r+1)/2
  SamplingOperator sampler;
  std::vector<Index> selected_indices;  // singular-vector indices in selection order
  double gamma = 1e-8;
  TrainingMethod method = TrainingMethod::qmsr;
  ModelProvenance provenance;

  Index ambient_dim() const { return basis.rows(); }
  Index reduced_dim() const { return basis.cols(); }
  Index feature_dim() const { return weights.cols(); }
  Index sample_count() const { return sampler.sample_count(); }
};

// Checks the structural invariants (orthonormal V, p = r(r+1)/2, sampler
// consistency, finiteness, and the encoder-annihilation identity
// ||(PV)^+ P W||_F <= 1e-8 * max(1, ||W||_F)). Throws ModelValidationError
// naming the first failed check.
void validate_model(const QuadraticManifoldModel& model);

struct GaussNewtonConfig {
  int max_iterations = 20;
  // Stop when the change in ||residual|| / ||sampled|| between successive
  // iterates falls below this.
  double stop_tolerance = 1e-12;
  std::vector<double> damping_sweep = {1e-8, 1e-4, 1.0, 1e4, 1e8};
};

struct GaussNewtonTrace {
  double damping = 0;
  int iterations = 0;
  double residual = 0;  // ||P g(q) - sampled||_2 at the final iterate
  bool skipped = false; // damped normal matrix was singular
  Vector encoded;
};

struct GaussNewtonDiagnostics {
  double initial_residual = 0;  // residual of the sparse linear initializer
  Vector initial_encoded;
  std::vector<GaussNewtonTrace> sweep;
  // Index into sweep of the returned iterate; -1 keeps the initializer.
  int chosen = -1;
};

Vector decode(const QuadraticManifoldModel& model, const Vector& q);
Matrix decode_matrix(const QuadraticManifoldModel& model, const Matrix& q);

Vector encode_full(const QuadraticManifoldModel& model, const Vector& s);
Matrix encode_full_matrix(const QuadraticManifoldModel& model, const Matrix& s);

// Sparse linear encoder q = (PV)^+ sampled. Throws RankDeficientError when
// the numerical rank of PV drops below r (tolerance 1e-10 relative).
Vector encode_sparse(const QuadraticManifoldModel& model, const Vector& sampled);
Matrix encode_sparse_matrix(const QuadraticManifoldModel& model, const Matrix& sampled);

// Damped Gauss-Newton solve of min_q ||P(V q + W h(q)) - sampled||_2,
// initialized at the sparse linear encoding. Runs the whole damping sweep
// and returns the iterate with the smallest sampled residual; the sparse
// initializer is part of the comparison, so the result never has a larger
// sampled residual than the linear encoding.
std::pair<Vector, GaussNewtonDiagnostics> encode_gauss_newton(
    const QuadraticManifoldModel& model, const Vector& sampled,
    const GaussNewtonConfig& config = {});

// Among the sweep iterates (and the initializer), picks the encoding whose
// decoded point is closest to the given full snapshot. Mirrors experiment
// protocols that select the damping coefficient by full-data error.
Vector pick_full_data_encoding(const QuadraticManifoldModel& model,
                               const GaussNewtonDiagnostics& diagnostics,
                               const Vector& full_snapshot);

// decode(encode(sampled)). mode must be sparse_linear or gauss_newton.
Vector reconstruct(const QuadraticManifoldModel& model, const Vector& sampled,
                   EncoderMode mode, const GaussNewtonConfig& config = {});
Matrix reconstruct_matrix(const QuadraticManifoldModel& model, const Matrix& sampled,
                          EncoderMode mode, const GaussNewtonConfig& config = {});

// Reconstruction through the full linear encoder, g(V^T s).
Vector reconstruct_full(const QuadraticManifoldModel& model, const Vector& s);
Matrix reconstruct_full_matrix(const QuadraticManifoldModel& model, const Matrix& s);

// Squared reconstruction error ||g(f(s)) - s||_2^2 for a full snapshot; the
// sparse modes consume apply_sampling(P, s) internally.
double reconstruction_error(const QuadraticManifoldModel& model, const Vector& s,
                            EncoderMode mode, const GaussNewtonConfig& config = {});

// ||approx - test||_F / ||test||_F. Throws when the reference has zero norm.
double relative_error(const Matrix& test, const Matrix& approx);

}  // namespace qmsr
