// qmsr: train quadratic manifolds from snapshot data and reconstruct states
// from sparse samples. Subcommands: generate | train | reconstruct |
// evaluate | inspect. Exit codes: 0 success, 1 numerical or I/O failure,
// 2 usage error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qmsr/datagen.hpp"
#include "qmsr/manifold.hpp"
#include "qmsr/numerics.hpp"
#include "qmsr/parallel.hpp"
#include "qmsr/persistence.hpp"
#include "qmsr/training.hpp"

namespace {

using json = nlohmann::ordered_json;
using qmsr::Index;
using qmsr::Matrix;
using qmsr::Vector;

constexpr const char* kVersion = "0.1.0";

// Raised for argument problems detected after CLI11 parsing; mapped to the
// usage exit code.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_manifest(const std::filesystem::path& out, json manifest) {
  manifest["tool"] = "qmsr";
  manifest["version"] = kVersion;
  manifest["threads"] = qmsr::thread_cap();
  const std::filesystem::path path = out.string() + ".manifest.json";
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream stream(tmp, std::ios::trunc);
    stream << manifest.dump(2) << "\n";
    if (!stream) throw qmsr::IoError("cannot write manifest '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_training_log(const std::filesystem::path& path, const qmsr::TrainingLog& log) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream stream(tmp, std::ios::trunc);
    stream << "step,chosen_index,objective,pool_size,seconds\n";
    for (const auto& s : log.steps) {
      stream << s.step << ',' << s.chosen_index << ',';
      stream.precision(17);
      stream << s.objective << ',' << s.pool_size << ',' << s.seconds << '\n';
    }
    if (!stream) throw qmsr::IoError("cannot write training log '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string method_name(qmsr::TrainingMethod method) {
  switch (method) {
    case qmsr::TrainingMethod::qmsr: return "qmsr";
    case qmsr::TrainingMethod::qm_full: return "qm-full";
    case qmsr::TrainingMethod::gappy_pod: return "gappy-pod";
  }
  return "unknown";
}

// Platform-stable uniform doubles in (-scale, scale) from raw 64-bit state;
// used only by the synthetic `generate random` test generator.
class DeterministicRng {
public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  double uniform(double scale) {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double unit = static_cast<double>(z >> 11) * 0x1.0p-53;  // [0,1)
    return scale * (2.0 * unit - 1.0);
  }

private:
  std::uint64_t state_;
};

struct GenerateCommon {
  std::string out;
};

void run_generate(const std::string& generator, const Matrix& data,
                  const GenerateCommon& common, json params) {
  qmsr::write_matrix(common.out, data);
  json manifest;
  manifest["command"] = "generate";
  manifest["generator"] = generator;
  manifest["parameters"] = std::move(params);
  manifest["output"] = common.out;
  manifest["rows"] = data.rows();
  manifest["cols"] = data.cols();
  write_manifest(common.out, std::move(manifest));
  std::cout << "wrote " << data.rows() << " x " << data.cols() << " matrix to "
            << common.out << "\n";
}

struct TrainArgs {
  std::string data;
  std::string out;
  std::string log_path;
  std::string method = "qmsr";
  Index rank = 0;
  Index samples = 0;
  std::string samples_rule;  // "1r".."4r", alternative to an explicit m
  Index candidates = 0;
  double gamma = 1e-8;
  double rank_tolerance = qmsr::kDefaultRankTolerance;
  std::string objective = "reduced";
  bool center = false;
  std::string dataset_name;
};

Index resolve_samples(const TrainArgs& args) {
  if (args.samples_rule.empty()) return args.samples;
  if (args.samples > 0) {
    throw UsageError("--samples and --samples-rule are mutually exclusive");
  }
  for (const char* rule : {"1r", "2r", "3r", "4r"}) {
    if (args.samples_rule == rule) {
      return (rule[0] - '0') * args.rank;
    }
  }
  throw UsageError("--samples-rule must be one of 1r, 2r, 3r, 4r");
}

int run_train(const TrainArgs& args) {
  if (args.method != "qmsr" && args.method != "qm-full" && args.method != "gappy-pod") {
    throw UsageError("unknown method '" + args.method + "'");
  }
  if (args.rank < 1) throw UsageError("--rank must be >= 1");
  const Index samples = resolve_samples(args);
  const bool needs_samples = args.method != "qm-full";
  if (needs_samples && samples < args.rank) {
    throw UsageError("--samples (m) must be >= --rank (r)");
  }
  if (args.objective != "direct" && args.objective != "reduced") {
    throw UsageError("--objective must be 'direct' or 'reduced'");
  }
  if (!(args.gamma > 0)) throw UsageError("--gamma must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  Matrix data = qmsr::read_matrix(args.data);

  std::optional<Vector> shift;
  if (args.center) {
    shift = data.rowwise().mean();
    data.colwise() -= *shift;
  }

  qmsr::TrainingConfig config;
  config.rank = args.rank;
  config.samples = args.samples;
  config.candidates = args.candidates;
  config.gamma = args.gamma;
  config.rank_tolerance = args.rank_tolerance;
  config.objective = args.objective == "direct" ? qmsr::TrainingConfig::Objective::direct
                                                : qmsr::TrainingConfig::Objective::reduced;

  qmsr::TrainingLog log;
  qmsr::QuadraticManifoldModel model;
  if (args.method == "qmsr") {
    model = qmsr::train_qmsr(data, config, &log);
  } else if (args.method == "qm-full") {
    model = qmsr::train_qm_full(data, config, &log);
  } else {
    model = qmsr::train_gappy_pod(data, config, &log);
  }
  model.provenance.generator = args.dataset_name.empty()
                                   ? std::filesystem::path(args.data).stem().string()
                                   : args.dataset_name;

  qmsr::write_model(args.out, model);

  const std::string log_path =
      args.log_path.empty() ? args.out + ".log.csv" : args.log_path;
  write_training_log(log_path, log);

  std::string mean_path;
  if (shift) {
    mean_path = args.out + ".mean.qmx";
    qmsr::write_matrix(mean_path, *shift);
  }

  json manifest;
  manifest["command"] = "train";
  manifest["parameters"] = {
      {"data", args.data},
      {"method", args.method},
      {"rank", args.rank},
      {"samples", needs_samples ? args.samples : model.sample_count()},
      {"candidates", static_cast<std::int64_t>(model.provenance.candidate_pool)},
      {"gamma", args.gamma},
      {"rank_tolerance", args.rank_tolerance},
      {"objective", args.objective},
      {"center", args.center},
      {"dataset_name", model.provenance.generator},
      {"training_columns", static_cast<std::int64_t>(model.provenance.training_columns)},
  };
  manifest["output"] = args.out;
  manifest["training_log"] = log_path;
  if (!mean_path.empty()) manifest["mean_vector"] = mean_path;
  manifest["wall_time_s"] = seconds_since(t0);
  for (const auto& note : log.notes) manifest["notes"].push_back(note);
  write_manifest(args.out, std::move(manifest));

  std::cout << "trained " << args.method << " model (r=" << model.reduced_dim()
            << ", m=" << model.sample_count() << ", M=" << model.provenance.candidate_pool
            << ") -> " << args.out << "\n";
  return 0;
}

struct ReconstructArgs {
  std::string model;
  std::string input;
  std::string out;
  std::string encoder = "sparse-linear";
  std::string diagnostics;
  std::string shift_path;
  bool sampled = false;
};

int run_reconstruct(const ReconstructArgs& args) {
  if (args.encoder != "sparse-linear" && args.encoder != "gauss-newton") {
    throw UsageError("--encoder must be 'sparse-linear' or 'gauss-newton'");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const qmsr::QuadraticManifoldModel model = qmsr::read_model(args.model);
  Matrix input = qmsr::read_matrix(args.input);

  std::optional<Vector> shift;
  if (!args.shift_path.empty()) {
    Matrix m = qmsr::read_matrix(args.shift_path);
    if (m.cols() != 1 || m.rows() != model.ambient_dim()) {
      throw qmsr::ValidationError("shift vector must be n x 1");
    }
    shift = m.col(0);
  }

  Matrix samples;
  if (args.sampled) {
    if (input.rows() != model.sample_count()) {
      throw qmsr::ValidationError(
          "sampled input has " + std::to_string(input.rows()) + " rows, model expects m = " +
          std::to_string(model.sample_count()));
    }
    samples = std::move(input);
    if (shift) samples.colwise() -= qmsr::apply_sampling(model.sampler, *shift);
  } else {
    if (input.rows() != model.ambient_dim()) {
      throw qmsr::ValidationError(
          "full input has " + std::to_string(input.rows()) + " rows, model expects n = " +
          std::to_string(model.ambient_dim()));
    }
    if (shift) input.colwise() -= *shift;
    samples = qmsr::apply_sampling(model.sampler, input);
  }

  Matrix reconstruction(model.ambient_dim(), samples.cols());
  json diag_rows = json::array();

  if (args.encoder == "sparse-linear") {
    reconstruction = qmsr::reconstruct_matrix(model, samples, qmsr::EncoderMode::sparse_linear);
  } else {
    for (Index c = 0; c < samples.cols(); ++c) {
      const auto [encoded, diag] = qmsr::encode_gauss_newton(model, samples.col(c));
      reconstruction.col(c) = qmsr::decode(model, encoded);
      json row;
      row["column"] = c;
      row["sparse_linear_residual"] = diag.initial_residual;
      row["gauss_newton_residual"] =
          diag.chosen < 0 ? diag.initial_residual
                          : diag.sweep[static_cast<std::size_t>(diag.chosen)].residual;
      row["chosen_damping"] =
          diag.chosen < 0 ? json(nullptr)
                          : json(diag.sweep[static_cast<std::size_t>(diag.chosen)].damping);
      diag_rows.push_back(std::move(row));
    }
  }

  if (shift) reconstruction.colwise() += *shift;
  qmsr::write_matrix(args.out, reconstruction);

  std::string diag_path;
  if (args.encoder == "gauss-newton") {
    diag_path = args.diagnostics.empty() ? args.out + ".diagnostics.csv" : args.diagnostics;
    const std::filesystem::path tmp = diag_path + ".tmp";
    {
      std::ofstream stream(tmp, std::ios::trunc);
      stream << "column,sparse_linear_residual,gauss_newton_residual,chosen_damping\n";
      stream.precision(17);
      for (const auto& row : diag_rows) {
        stream << row["column"].get<Index>() << ','
               << row["sparse_linear_residual"].get<double>() << ','
               << row["gauss_newton_residual"].get<double>() << ',';
        if (row["chosen_damping"].is_null()) {
          stream << "initializer";
        } else {
          stream << row["chosen_damping"].get<double>();
        }
        stream << '\n';
      }
      if (!stream) throw qmsr::IoError("cannot write diagnostics '" + diag_path + "'");
    }
    std::filesystem::rename(tmp, diag_path);
  }

  json manifest;
  manifest["command"] = "reconstruct";
  manifest["parameters"] = {
      {"model", args.model},   {"input", args.input},     {"sampled", args.sampled},
      {"encoder", args.encoder}, {"shift", args.shift_path},
  };
  manifest["output"] = args.out;
  if (!diag_path.empty()) manifest["diagnostics"] = diag_path;
  manifest["wall_time_s"] = seconds_since(t0);
  write_manifest(args.out, std::move(manifest));

  std::cout << "reconstructed " << reconstruction.cols() << " column(s) -> " << args.out
            << "\n";
  return 0;
}

struct EvaluateArgs {
  std::vector<std::string> models;
  std::string test;
  std::string out;
  std::string encoder = "sparse-linear";
  std::string gn_selection = "sampled";
  std::string shift_path;
};

int run_evaluate(const EvaluateArgs& args) {
  if (args.encoder != "sparse-linear" && args.encoder != "gauss-newton") {
    throw UsageError("--encoder must be 'sparse-linear' or 'gauss-newton'");
  }
  if (args.gn_selection != "sampled" && args.gn_selection != "full") {
    throw UsageError("--gn-selection must be 'sampled' or 'full'");
  }

  const Matrix test = qmsr::read_matrix(args.test);
  if (test.cols() < 1 || test.rows() < 1) {
    throw qmsr::ValidationError("evaluate: test matrix is empty");
  }

  std::optional<Vector> shift;

  struct Row {
    std::string method;
    Index rank;
    Index samples;
    std::string encoder;
    double error;
    double seconds;
  };
  std::vector<Row> rows;

  for (const std::string& model_path : args.models) {
    const auto t0 = std::chrono::steady_clock::now();
    const qmsr::QuadraticManifoldModel model = qmsr::read_model(model_path);
    if (test.rows() != model.ambient_dim()) {
      throw qmsr::ValidationError("evaluate: test data dimension does not match model '" +
                                  model_path + "'");
    }
    if (!args.shift_path.empty() && !shift) {
      Matrix m = qmsr::read_matrix(args.shift_path);
      if (m.cols() != 1 || m.rows() != model.ambient_dim()) {
        throw qmsr::ValidationError("shift vector must be n x 1");
      }
      shift = m.col(0);
    }

    Matrix centered = test;
    if (shift) centered.colwise() -= *shift;

    std::string encoder_used;
    Matrix approx;
    if (model.method == qmsr::TrainingMethod::qm_full) {
      encoder_used = "full-linear";
      approx = qmsr::reconstruct_full_matrix(model, centered);
    } else if (args.encoder == "sparse-linear") {
      encoder_used = "sparse-linear";
      approx = qmsr::reconstruct_matrix(model, qmsr::apply_sampling(model.sampler, centered),
                                        qmsr::EncoderMode::sparse_linear);
    } else {
      encoder_used = args.gn_selection == "full" ? "gauss-newton-full-selection"
                                                 : "gauss-newton";
      const Matrix samples = qmsr::apply_sampling(model.sampler, centered);
      approx.resize(model.ambient_dim(), centered.cols());
      for (Index c = 0; c < centered.cols(); ++c) {
        const auto [encoded, diag] = qmsr::encode_gauss_newton(model, samples.col(c));
        if (args.gn_selection == "full") {
          approx.col(c) =
              qmsr::decode(model, qmsr::pick_full_data_encoding(model, diag, centered.col(c)));
        } else {
          approx.col(c) = qmsr::decode(model, encoded);
        }
      }
    }
    if (shift) approx.colwise() += *shift;

    Row row;
    row.method = method_name(model.method);
    row.rank = model.reduced_dim();
    row.samples = model.sample_count();
    row.encoder = encoder_used;
    row.error = qmsr::relative_error(test, approx);
    row.seconds = seconds_since(t0);
    rows.push_back(std::move(row));
  }

  const std::filesystem::path tmp = args.out + ".tmp";
  {
    std::ofstream stream(tmp, std::ios::trunc);
    stream << "method,r,m,encoder,relative_error,wall_time_s\n";
    stream.precision(17);
    for (const auto& row : rows) {
      stream << row.method << ',' << row.rank << ',' << row.samples << ',' << row.encoder
             << ',' << row.error << ',' << row.seconds << '\n';
    }
    if (!stream) throw qmsr::IoError("cannot write results '" + args.out + "'");
  }
  std::filesystem::rename(tmp, args.out);

  json manifest;
  manifest["command"] = "evaluate";
  manifest["parameters"] = {
      {"models", args.models},       {"test", args.test},
      {"encoder", args.encoder},     {"gn_selection", args.gn_selection},
      {"shift", args.shift_path},
  };
  manifest["output"] = args.out;
  write_manifest(args.out, std::move(manifest));

  for (const auto& row : rows) {
    std::cout << row.method << " r=" << row.rank << " m=" << row.samples << " ("
              << row.encoder << "): relative error " << row.error << "\n";
  }
  return 0;
}

int run_inspect(const std::string& model_path) {
  const qmsr::QuadraticManifoldModel model = qmsr::read_model(model_path);

  std::cout << "model: " << model_path << "\n"
            << "  method: " << method_name(model.method) << "\n"
            << "  state dimension n: " << model.ambient_dim() << "\n"
            << "  reduced dimension r: " << model.reduced_dim() << "\n"
            << "  feature dimension p: " << model.feature_dim() << "\n"
            << "  sample count m: " << model.sample_count() << "\n"
            << "  candidate pool M: " << model.provenance.candidate_pool << "\n"
            << "  gamma: " << model.gamma << "\n"
            << "  dataset: "
            << (model.provenance.generator.empty() ? "(unknown)" : model.provenance.generator)
            << "\n";

  std::cout << "  selected singular vectors (1-based):";
  for (Index idx : model.selected_indices) std::cout << ' ' << idx + 1;
  std::cout << "\n  sampling points (1-based):";
  for (Index idx : model.sampler.indices) std::cout << ' ' << idx + 1;
  std::cout << "\n";

  const Index r = model.reduced_dim();
  const double ortho =
      (model.basis.transpose() * model.basis - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  const Matrix pv = qmsr::apply_sampling(model.sampler, model.basis);
  const Matrix pw = qmsr::apply_sampling(model.sampler, model.weights);
  qmsr::PseudoInverse pinv(pv, qmsr::kEncoderRankTolerance, 1.0);
  const double annihilation = pinv.solve(pw).norm();
  const double annihilation_bound = 1e-8 * std::max(1.0, model.weights.norm());

  std::cout << "  invariant checks:\n"
            << "    orthonormality defect: " << ortho << " (bound 1e-10): "
            << (ortho <= 1e-10 ? "ok" : "FAIL") << "\n"
            << "    sampled basis rank: " << pinv.rank() << " of " << r << ": "
            << (pinv.rank() == r ? "ok" : "FAIL") << "\n"
            << "    encoder annihilation ||(PV)^+PW||: " << annihilation << " (bound "
            << annihilation_bound << "): " << (annihilation <= annihilation_bound ? "ok" : "FAIL")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic manifold sparse regression: training, sparse reconstruction, "
               "and linear baselines"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate snapshot datasets");
  generate->require_subcommand(1);
  GenerateCommon gen_common;

  auto* advection = generate->add_subcommand("advection", "1D periodic translating Gaussian pulse");
  Index adv_n = 256, adv_k = 200;
  double adv_speed = 2.5;
  advection->add_option("--n", adv_n, "grid cells")->capture_default_str();
  advection->add_option("--k", adv_k, "snapshot count")->capture_default_str();
  advection->add_option("--speed", adv_speed, "cells per snapshot")->capture_default_str();
  advection->add_option("--out", gen_common.out, "output matrix file")->required();
  advection->callback([&] {
    run_generate("advection", qmsr::gen_advection_pulse(adv_n, adv_k, adv_speed), gen_common,
                 {{"n", adv_n}, {"k", adv_k}, {"speed", adv_speed}});
  });

  auto* vlasov = generate->add_subcommand("vlasov", "2D transport of a particle density");
  qmsr::VlasovConfig vlasov_cfg;
  bool vlasov_auto_dt = false;
  vlasov->add_option("--grid", vlasov_cfg.grid, "grid points per dimension")->capture_default_str();
  vlasov->add_option("--dt", vlasov_cfg.dt, "time step")->capture_default_str();
  vlasov->add_option("--final-time", vlasov_cfg.final_time, "end of the time interval (exclusive)")
      ->capture_default_str();
  vlasov->add_option("--stride", vlasov_cfg.stride, "store every stride-th step")
      ->capture_default_str();
  vlasov->add_flag("--zero-potential", vlasov_cfg.zero_potential, "disable the potential term");
  vlasov->add_flag("--auto-dt", vlasov_auto_dt, "halve dt (doubling stride) until stable");
  vlasov->add_option("--out", gen_common.out, "output matrix file")->required();
  vlasov->callback([&] {
    if (vlasov_auto_dt) vlasov_cfg = qmsr::with_stable_dt(vlasov_cfg);
    run_generate("vlasov", qmsr::gen_vlasov(vlasov_cfg), gen_common,
                 {{"grid", vlasov_cfg.grid},
                  {"dt", vlasov_cfg.dt},
                  {"final_time", vlasov_cfg.final_time},
                  {"stride", vlasov_cfg.stride},
                  {"zero_potential", vlasov_cfg.zero_potential}});
  });

  auto* acoustic = generate->add_subcommand("acoustic", "2D acoustic wave, state [rho; v1; v2]");
  qmsr::AcousticConfig acoustic_cfg;
  bool acoustic_auto_dt = false;
  acoustic->add_option("--grid", acoustic_cfg.grid, "grid points per dimension")
      ->capture_default_str();
  acoustic->add_option("--dt", acoustic_cfg.dt, "time step")->capture_default_str();
  acoustic->add_option("--final-time", acoustic_cfg.final_time, "end of the time interval (exclusive)")
      ->capture_default_str();
  acoustic->add_option("--stride", acoustic_cfg.stride, "store every stride-th step")
      ->capture_default_str();
  acoustic->add_flag("--auto-dt", acoustic_auto_dt, "halve dt (doubling stride) until stable");
  acoustic->add_option("--out", gen_common.out, "output matrix file")->required();
  acoustic->callback([&] {
    if (acoustic_auto_dt) acoustic_cfg = qmsr::with_stable_dt(acoustic_cfg);
    run_generate("acoustic", qmsr::gen_acoustic(acoustic_cfg), gen_common,
                 {{"grid", acoustic_cfg.grid},
                  {"dt", acoustic_cfg.dt},
                  {"final_time", acoustic_cfg.final_time},
                  {"stride", acoustic_cfg.stride}});
  });

  auto* random = generate->add_subcommand("random", "Uniform random matrix for pipeline tests");
  Index rnd_rows = 100, rnd_cols = 40;
  std::uint64_t rnd_seed = 0;
  double rnd_scale = 1.0;
  random->add_option("--rows", rnd_rows, "row count")->capture_default_str();
  random->add_option("--cols", rnd_cols, "column count")->capture_default_str();
  random->add_option("--seed", rnd_seed, "random seed")->capture_default_str();
  random->add_option("--scale", rnd_scale, "entries drawn from (-scale, scale)")
      ->capture_default_str();
  random->add_option("--out", gen_common.out, "output matrix file")->required();
  random->callback([&] {
    if (rnd_rows < 1 || rnd_cols < 1) throw UsageError("--rows and --cols must be >= 1");
    DeterministicRng rng(rnd_seed);
    Matrix data(rnd_rows, rnd_cols);
    for (Index j = 0; j < rnd_cols; ++j) {
      for (Index i = 0; i < rnd_rows; ++i) data(i, j) = rng.uniform(rnd_scale);
    }
    run_generate("random", data, gen_common,
                 {{"rows", rnd_rows}, {"cols", rnd_cols}, {"seed", rnd_seed}, {"scale", rnd_scale}});
  });

  // train
  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model from a snapshot matrix");
  train->add_option("--data", train_args.data, "training matrix (QMX1)")->required();
  train->add_option("--out", train_args.out, "output model file (QMM1)")->required();
  train->add_option("--log", train_args.log_path, "training log CSV (default <out>.log.csv)");
  train->add_option("--method", train_args.method, "qmsr | qm-full | gappy-pod")
      ->capture_default_str();
  train->add_option("--rank,-r", train_args.rank, "reduced dimension r")->required();
  train->add_option("--samples,-m", train_args.samples, "number of sampling points m");
  train->add_option("--candidates,-M", train_args.candidates,
                    "greedy candidate pool M (0 = min(k, rank, 4r+50))")
      ->capture_default_str();
  train->add_option("--gamma", train_args.gamma, "ridge regularization")->capture_default_str();
  train->add_option("--rank-tolerance", train_args.rank_tolerance,
                    "relative SVD truncation tolerance")
      ->capture_default_str();
  train->add_option("--objective", train_args.objective, "greedy objective: direct | reduced")
      ->capture_default_str();
  train->add_flag("--center", train_args.center,
                  "subtract the column mean before training (writes <out>.mean.qmx)");
  train->add_option("--dataset-name", train_args.dataset_name,
                    "dataset label stored in the model (default: data file stem)");

  // reconstruct
  ReconstructArgs rec_args;
  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct states from samples");
  reconstruct->add_option("--model", rec_args.model, "model file")->required();
  reconstruct->add_option("--input", rec_args.input,
                          "matrix of full snapshots (n rows) or samples (m rows, with --sampled)")
      ->required();
  reconstruct->add_option("--out", rec_args.out, "output matrix of reconstructions")->required();
  reconstruct->add_flag("--sampled", rec_args.sampled, "input rows are already sampled components");
  reconstruct->add_option("--encoder", rec_args.encoder, "sparse-linear | gauss-newton")
      ->capture_default_str();
  reconstruct->add_option("--diagnostics", rec_args.diagnostics,
                          "Gauss-Newton diagnostics CSV (default <out>.diagnostics.csv)");
  reconstruct->add_option("--shift", rec_args.shift_path,
                          "n x 1 matrix subtracted before encoding and added back after decoding");

  // evaluate
  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Relative test error of one or more models");
  evaluate->add_option("--model", eval_args.models, "model file (repeatable)")
      ->required()
      ->take_all();
  evaluate->add_option("--test", eval_args.test, "test matrix (QMX1)")->required();
  evaluate->add_option("--out", eval_args.out, "results CSV")->required();
  evaluate->add_option("--encoder", eval_args.encoder, "sparse-linear | gauss-newton")
      ->capture_default_str();
  evaluate->add_option("--gn-selection", eval_args.gn_selection,
                       "pick Gauss-Newton damping by 'sampled' residual or 'full' data error")
      ->capture_default_str();
  evaluate->add_option("--shift", eval_args.shift_path, "n x 1 centering vector");

  // inspect
  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print model header and invariant checks");
  inspect->add_option("model", inspect_path, "model file")->required();

  try {
    // generate runs through its subcommand callbacks during parsing.
    app.parse(argc, argv);
    if (train->parsed()) return run_train(train_args);
    if (reconstruct->parsed()) return run_reconstruct(rec_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (inspect->parsed()) return run_inspect(inspect_path);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
