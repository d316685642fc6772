#pragma once

#include <utility>

#include "qmsr/types.hpp"

namespace qmsr {

// Transport of a particle density u(t, x1, x2) on the periodic square
// [-1,1)^2:  du/dt = -x2 * du/dx1 + phi(x1) * du/dx2, second-order central
// differences in space, classical RK4 in time. State vectors are the grid
// values with x1 fastest, so n = grid^2.
struct VlasovConfig {
  Index grid = 128;
  double dt = 2e-3;
  double final_time = 5.0;
  Index stride = 1;  // store every stride-th step

  // phi(x1) = 0.2 + 0.2 cos(pi x1^4) + 0.1 sin(pi x1), or identically zero.
  bool zero_potential = false;

  // Initial density exp(-a1 (x1-c1)^2 - a2 (x2-c2)^2).
  double ic_center_x1 = 0.0;
  double ic_center_x2 = 0.0;
  double ic_sharpness_x1 = 100.0;
  double ic_sharpness_x2 = 100.0;
};

void validate(const VlasovConfig& config);

// Halves dt (doubling the stride) until the advective CFL condition holds,
// keeping the stored snapshot count roughly unchanged.
VlasovConfig with_stable_dt(VlasovConfig config);

Matrix gen_vlasov(const VlasovConfig& config);

// Linear acoustic wave on the periodic square [-4,4)^2 in first-order form:
// d(rho)/dt = -div v, dv/dt = -grad rho. State layout is [rho; v1; v2]
// stacked, each block grid^2 with x1 fastest, so n = 3*grid^2.
struct AcousticConfig {
  Index grid = 96;
  double dt = 5e-3;
  double final_time = 8.0;
  Index stride = 1;
};

void validate(const AcousticConfig& config);
AcousticConfig with_stable_dt(AcousticConfig config);

Matrix gen_acoustic(const AcousticConfig& config);

// 1D periodic Gaussian pulse translated by round(j*speed) grid cells in
// column j. Exact index arithmetic, no solver; every column is a permutation
// of column 0.
Matrix gen_advection_pulse(Index n, Index k, double speed = 2.5);

// Even-indexed columns (0, 2, ...) become training data, odd-indexed columns
// become test data.
std::pair<Matrix, Matrix> split_even_odd(const Matrix& s);

}  // namespace qmsr
