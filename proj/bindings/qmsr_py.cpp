// Python bindings for the qmsr core: generators, training, encoders, and the
// binary file formats. Matrices cross the boundary as numpy arrays.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qmsr/datagen.hpp"
#include "qmsr/featuremap.hpp"
#include "qmsr/manifold.hpp"
#include "qmsr/numerics.hpp"
#include "qmsr/persistence.hpp"
#include "qmsr/sampling.hpp"
#include "qmsr/training.hpp"

namespace py = pybind11;
using namespace qmsr;

namespace {

TrainingConfig make_config(Index rank, Index samples, Index candidates, double gamma,
                           double rank_tolerance, const std::string& objective) {
  TrainingConfig config;
  config.rank = rank;
  config.samples = samples;
  config.candidates = candidates;
  config.gamma = gamma;
  config.rank_tolerance = rank_tolerance;
  if (objective == "direct") {
    config.objective = TrainingConfig::Objective::direct;
  } else if (objective == "reduced") {
    config.objective = TrainingConfig::Objective::reduced;
  } else {
    throw ValidationError("objective must be 'direct' or 'reduced'");
  }
  return config;
}

EncoderMode parse_encoder(const std::string& name) {
  if (name == "sparse-linear") return EncoderMode::sparse_linear;
  if (name == "gauss-newton") return EncoderMode::gauss_newton;
  if (name == "full-linear") return EncoderMode::full_linear;
  throw ValidationError("encoder must be 'sparse-linear', 'gauss-newton' or 'full-linear'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quadratic manifold sparse regression: greedy training and sparse "
            "reconstruction of high-dimensional states";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<RankDeficientError>(m, "RankDeficientError", PyExc_RuntimeError);
  py::register_exception<ModelValidationError>(m, "ModelValidationError", PyExc_ValueError);

  py::enum_<TrainingMethod>(m, "TrainingMethod")
      .value("qmsr", TrainingMethod::qmsr)
      .value("qm_full", TrainingMethod::qm_full)
      .value("gappy_pod", TrainingMethod::gappy_pod);

  py::class_<SamplingOperator>(m, "SamplingOperator")
      .def(py::init([](Index ambient_dim, std::vector<Index> indices) {
             SamplingOperator p;
             p.ambient_dim = ambient_dim;
             p.indices = std::move(indices);
             validate(p);
             return p;
           }),
           py::arg("ambient_dim"), py::arg("indices"))
      .def_readonly("ambient_dim", &SamplingOperator::ambient_dim)
      .def_readonly("indices", &SamplingOperator::indices)
      .def_static("identity", &SamplingOperator::identity, py::arg("n"))
      .def("__len__", [](const SamplingOperator& p) { return p.indices.size(); })
      .def("__repr__", [](const SamplingOperator& p) {
        return "<SamplingOperator m=" + std::to_string(p.sample_count()) + " of n=" +
               std::to_string(p.ambient_dim) + ">";
      });

  m.def("qdeim_select", &qdeim_select, py::arg("u"),
        "QDEIM sampling points: column-pivoted QR pivots of U^T for an "
        "orthonormal U (n x m)");
  m.def("apply_sampling",
        py::overload_cast<const SamplingOperator&, const Matrix&>(&apply_sampling),
        py::arg("sampler"), py::arg("x"));

  py::class_<GaussNewtonConfig>(m, "GaussNewtonConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &GaussNewtonConfig::max_iterations)
      .def_readwrite("stop_tolerance", &GaussNewtonConfig::stop_tolerance)
      .def_readwrite("damping_sweep", &GaussNewtonConfig::damping_sweep);

  py::class_<GaussNewtonTrace>(m, "GaussNewtonTrace")
      .def_readonly("damping", &GaussNewtonTrace::damping)
      .def_readonly("iterations", &GaussNewtonTrace::iterations)
      .def_readonly("residual", &GaussNewtonTrace::residual)
      .def_readonly("skipped", &GaussNewtonTrace::skipped)
      .def_readonly("encoded", &GaussNewtonTrace::encoded);

  py::class_<GaussNewtonDiagnostics>(m, "GaussNewtonDiagnostics")
      .def_readonly("initial_residual", &GaussNewtonDiagnostics::initial_residual)
      .def_readonly("initial_encoded", &GaussNewtonDiagnostics::initial_encoded)
      .def_readonly("sweep", &GaussNewtonDiagnostics::sweep)
      .def_readonly("chosen", &GaussNewtonDiagnostics::chosen);

  py::class_<QuadraticManifoldModel>(m, "Model")
      .def_readonly("basis", &QuadraticManifoldModel::basis)
      .def_readonly("weights", &QuadraticManifoldModel::weights)
      .def_readonly("sampler", &QuadraticManifoldModel::sampler)
      .def_readonly("selected_indices", &QuadraticManifoldModel::selected_indices)
      .def_readonly("gamma", &QuadraticManifoldModel::gamma)
      .def_readonly("method", &QuadraticManifoldModel::method)
      .def_property_readonly("sample_indices",
                             [](const QuadraticManifoldModel& md) { return md.sampler.indices; })
      .def_property_readonly("n", &QuadraticManifoldModel::ambient_dim)
      .def_property_readonly("r", &QuadraticManifoldModel::reduced_dim)
      .def_property_readonly("p", &QuadraticManifoldModel::feature_dim)
      .def_property_readonly("m", &QuadraticManifoldModel::sample_count)
      .def("decode",
           [](const QuadraticManifoldModel& md, const Matrix& q) {
             return decode_matrix(md, q);
           },
           py::arg("q"), "Decode reduced coordinates (r x k) to states (n x k)")
      .def("encode_full",
           [](const QuadraticManifoldModel& md, const Matrix& s) {
             return encode_full_matrix(md, s);
           },
           py::arg("s"))
      .def("encode_sparse",
           [](const QuadraticManifoldModel& md, const Matrix& sampled) {
             return encode_sparse_matrix(md, sampled);
           },
           py::arg("sampled"))
      .def("encode_gauss_newton",
           [](const QuadraticManifoldModel& md, const Vector& sampled,
              const GaussNewtonConfig& config) {
             return encode_gauss_newton(md, sampled, config);
           },
           py::arg("sampled"), py::arg("config") = GaussNewtonConfig())
      .def("reconstruct",
           [](const QuadraticManifoldModel& md, const Matrix& sampled,
              const std::string& encoder) {
             return reconstruct_matrix(md, sampled, parse_encoder(encoder));
           },
           py::arg("sampled"), py::arg("encoder") = "sparse-linear",
           "Reconstruct states from sampled components (m x k)")
      .def("reconstruct_full",
           [](const QuadraticManifoldModel& md, const Matrix& s) {
             return reconstruct_full_matrix(md, s);
           },
           py::arg("s"), "Reconstruct through the full linear encoder V^T s")
      .def("validate", [](const QuadraticManifoldModel& md) { validate_model(md); })
      .def("__repr__", [](const QuadraticManifoldModel& md) {
        return "<Model n=" + std::to_string(md.ambient_dim()) + " r=" +
               std::to_string(md.reduced_dim()) + " m=" + std::to_string(md.sample_count()) +
               ">";
      });

  const auto train_wrapper = [](QuadraticManifoldModel (*fn)(const Matrix&,
                                                             const TrainingConfig&,
                                                             TrainingLog*)) {
    return [fn](const Matrix& s, Index rank, Index samples, Index candidates, double gamma,
                double rank_tolerance, const std::string& objective) {
      return fn(s, make_config(rank, samples, candidates, gamma, rank_tolerance, objective),
                nullptr);
    };
  };

  m.def("train_qmsr", train_wrapper(&train_qmsr), py::arg("snapshots"), py::arg("rank"),
        py::arg("samples"), py::arg("candidates") = 0, py::arg("gamma") = 1e-8,
        py::arg("rank_tolerance") = kDefaultRankTolerance, py::arg("objective") = "reduced",
        "Greedy quadratic-manifold training with the sparse linear encoder");
  m.def("train_qm_full", train_wrapper(&train_qm_full), py::arg("snapshots"), py::arg("rank"),
        py::arg("samples") = 0, py::arg("candidates") = 0, py::arg("gamma") = 1e-8,
        py::arg("rank_tolerance") = kDefaultRankTolerance, py::arg("objective") = "reduced",
        "Greedy quadratic-manifold training with the full linear encoder");
  m.def("train_gappy_pod", train_wrapper(&train_gappy_pod), py::arg("snapshots"),
        py::arg("rank"), py::arg("samples"), py::arg("candidates") = 0, py::arg("gamma") = 1e-8,
        py::arg("rank_tolerance") = kDefaultRankTolerance, py::arg("objective") = "reduced",
        "Linear gappy-POD baseline: first r left-singular vectors, W = 0");

  m.def("relative_error", &relative_error, py::arg("test"), py::arg("approx"),
        "||approx - test||_F / ||test||_F");

  m.def("reduced_svd",
        [](const Matrix& a, double rank_tolerance) {
          SvdFactors f = reduced_svd(a, rank_tolerance);
          return py::make_tuple(f.left, f.singular_values, f.right_t);
        },
        py::arg("a"), py::arg("rank_tolerance") = kDefaultRankTolerance,
        "Truncated SVD (U, s, Vt) keeping singular values above rank_tolerance * s[0]");
  m.def("pivoted_qr_column_order", &pivoted_qr_column_order, py::arg("a"));

  m.def("quad_features", &quad_features, py::arg("q"));
  m.def("quad_features_matrix", &quad_features_matrix, py::arg("q"));
  m.def("quad_features_jacobian", &quad_features_jacobian, py::arg("q"));

  m.def("gen_advection_pulse", &gen_advection_pulse, py::arg("n"), py::arg("k"),
        py::arg("speed") = 1.0);
  m.def("gen_vlasov",
        [](Index grid, double dt, double final_time, Index stride, bool zero_potential) {
          VlasovConfig c;
          c.grid = grid;
          c.dt = dt;
          c.final_time = final_time;
          c.stride = stride;
          c.zero_potential = zero_potential;
          return gen_vlasov(c);
        },
        py::arg("grid") = 128, py::arg("dt") = 2e-3, py::arg("final_time") = 5.0,
        py::arg("stride") = 1, py::arg("zero_potential") = false);
  m.def("gen_acoustic",
        [](Index grid, double dt, double final_time, Index stride) {
          AcousticConfig c;
          c.grid = grid;
          c.dt = dt;
          c.final_time = final_time;
          c.stride = stride;
          return gen_acoustic(c);
        },
        py::arg("grid") = 96, py::arg("dt") = 5e-3, py::arg("final_time") = 8.0,
        py::arg("stride") = 1);
  m.def("split_even_odd", &split_even_odd, py::arg("snapshots"),
        "Even columns -> train, odd columns -> test");

  m.def("read_matrix", &read_matrix, py::arg("path"));
  m.def("write_matrix", &write_matrix, py::arg("path"), py::arg("matrix"));
  m.def("read_model", &read_model, py::arg("path"));
  m.def("write_model", &write_model, py::arg("path"), py::arg("model"));
  m.def("read_csv_matrix", &read_csv_matrix, py::arg("path"));
  m.def("write_csv_matrix", &write_csv_matrix, py::arg("path"), py::arg("matrix"));
}
