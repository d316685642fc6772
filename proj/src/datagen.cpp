#include "qmsr/datagen.hpp"

#include <cmath>
#include <string>

namespace qmsr {

namespace {

constexpr double kPi = 3.14159265358979323846;

// RK4 with second-order central differences stays stable while
// dt * (advective speeds) / dx remains under the imaginary-axis limit
// 2*sqrt(2); we require 2.5 to keep a margin.
constexpr double kCflLimit = 2.5;

double vlasov_potential(double x1) {
  return 0.2 + 0.2 * std::cos(kPi * x1 * x1 * x1 * x1) + 0.1 * std::sin(kPi * x1);
}

double vlasov_cfl(const VlasovConfig& c) {
  const double dx = 2.0 / static_cast<double>(c.grid);
  const double speed_x1 = 1.0;                          // |x2| <= 1 on [-1,1)
  const double speed_x2 = c.zero_potential ? 0.0 : 0.5; // |phi| <= 0.5
  return c.dt * (speed_x1 + speed_x2) / dx;
}

double acoustic_cfl(const AcousticConfig& c) {
  const double dx = 8.0 / static_cast<double>(c.grid);
  return c.dt * 2.0 / dx;  // unit wave speed in each direction
}

Index step_count(double final_time, double dt) {
  return static_cast<Index>(std::llround(final_time / dt));
}

}  // namespace

void validate(const VlasovConfig& c) {
  if (c.grid < 16) throw ValidationError("vlasov: grid must be >= 16");
  if (!(c.dt > 0) || !(c.final_time > 0)) {
    throw ValidationError("vlasov: dt and final_time must be positive");
  }
  if (c.stride < 1) throw ValidationError("vlasov: stride must be >= 1");
  if (!(c.ic_sharpness_x1 > 0) || !(c.ic_sharpness_x2 > 0)) {
    throw ValidationError("vlasov: initial-condition sharpness must be positive");
  }
  if (vlasov_cfl(c) > kCflLimit) {
    throw ValidationError("vlasov: dt " + std::to_string(c.dt) +
                          " violates the CFL bound at grid " + std::to_string(c.grid) +
                          "; reduce dt (see with_stable_dt)");
  }
}

VlasovConfig with_stable_dt(VlasovConfig c) {
  while (vlasov_cfl(c) > kCflLimit) {
    c.dt *= 0.5;
    c.stride *= 2;
  }
  return c;
}

Matrix gen_vlasov(const VlasovConfig& c) {
  validate(c);
  const Index n1 = c.grid;
  const Index n = n1 * n1;
  const double dx = 2.0 / static_cast<double>(n1);

  Vector x(n1);
  for (Index i = 0; i < n1; ++i) x(i) = -1.0 + static_cast<double>(i) * dx;

  Vector phi(n1);
  for (Index i = 0; i < n1; ++i) {
    phi(i) = c.zero_potential ? 0.0 : vlasov_potential(x(i));
  }

  // Grid values with x1 fastest: u(i + n1*j) ~ u(x1_i, x2_j).
  Vector u(n);
  for (Index j = 0; j < n1; ++j) {
    const double d2 = x(j) - c.ic_center_x2;
    for (Index i = 0; i < n1; ++i) {
      const double d1 = x(i) - c.ic_center_x1;
      u(i + n1 * j) =
          std::exp(-c.ic_sharpness_x1 * d1 * d1 - c.ic_sharpness_x2 * d2 * d2);
    }
  }

  const double inv_2dx = 1.0 / (2.0 * dx);
  const auto rhs = [&](const Vector& w, Vector& out) {
    for (Index j = 0; j < n1; ++j) {
      const Index jm = (j + n1 - 1) % n1;
      const Index jp = (j + 1) % n1;
      const double speed2 = x(j);
      for (Index i = 0; i < n1; ++i) {
        const Index im = (i + n1 - 1) % n1;
        const Index ip = (i + 1) % n1;
        const double d1 = (w(ip + n1 * j) - w(im + n1 * j)) * inv_2dx;
        const double d2 = (w(i + n1 * jp) - w(i + n1 * jm)) * inv_2dx;
        out(i + n1 * j) = -speed2 * d1 + phi(i) * d2;
      }
    }
  };

  const Index steps = std::max<Index>(1, step_count(c.final_time, c.dt));
  const Index cols = (steps + c.stride - 1) / c.stride;
  Matrix snapshots(n, cols);

  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  Index col = 0;
  for (Index step = 0; step < steps; ++step) {
    if (step % c.stride == 0) snapshots.col(col++) = u;

    rhs(u, k1);
    tmp = u + (0.5 * c.dt) * k1;
    rhs(tmp, k2);
    tmp = u + (0.5 * c.dt) * k2;
    rhs(tmp, k3);
    tmp = u + c.dt * k3;
    rhs(tmp, k4);
    u += (c.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!u.allFinite()) {
      throw ValidationError("vlasov: instability detected at time step " +
                            std::to_string(step + 1));
    }
  }
  return snapshots;
}

void validate(const AcousticConfig& c) {
  if (c.grid < 16) throw ValidationError("acoustic: grid must be >= 16");
  if (!(c.dt > 0) || !(c.final_time > 0)) {
    throw ValidationError("acoustic: dt and final_time must be positive");
  }
  if (c.stride < 1) throw ValidationError("acoustic: stride must be >= 1");
  if (acoustic_cfl(c) > kCflLimit) {
    throw ValidationError("acoustic: dt " + std::to_string(c.dt) +
                          " violates the CFL bound at grid " + std::to_string(c.grid) +
                          "; reduce dt (see with_stable_dt)");
  }
}

AcousticConfig with_stable_dt(AcousticConfig c) {
  while (acoustic_cfl(c) > kCflLimit) {
    c.dt *= 0.5;
    c.stride *= 2;
  }
  return c;
}

Matrix gen_acoustic(const AcousticConfig& c) {
  validate(c);
  const Index n1 = c.grid;
  const Index cells = n1 * n1;
  const Index n = 3 * cells;
  const double dx = 8.0 / static_cast<double>(n1);

  Vector x(n1);
  for (Index i = 0; i < n1; ++i) x(i) = -4.0 + static_cast<double>(i) * dx;

  // State [rho; v1; v2], each block x1 fastest.
  Vector state = Vector::Zero(n);
  const double sharp = (2.0 * kPi) * (2.0 * kPi);
  for (Index j = 0; j < n1; ++j) {
    const double d2 = x(j) - 2.0;
    for (Index i = 0; i < n1; ++i) {
      const double d1 = x(i) - 2.0;
      state(i + n1 * j) = std::exp(-sharp * (d1 * d1 + d2 * d2));
    }
  }

  const double inv_2dx = 1.0 / (2.0 * dx);
  const auto rhs = [&](const Vector& w, Vector& out) {
    const auto rho = [&](Index i, Index j) { return w(i + n1 * j); };
    const auto v1 = [&](Index i, Index j) { return w(cells + i + n1 * j); };
    const auto v2 = [&](Index i, Index j) { return w(2 * cells + i + n1 * j); };
    for (Index j = 0; j < n1; ++j) {
      const Index jm = (j + n1 - 1) % n1;
      const Index jp = (j + 1) % n1;
      for (Index i = 0; i < n1; ++i) {
        const Index im = (i + n1 - 1) % n1;
        const Index ip = (i + 1) % n1;
        const double div_v =
            (v1(ip, j) - v1(im, j)) * inv_2dx + (v2(i, jp) - v2(i, jm)) * inv_2dx;
        const double drho_dx1 = (rho(ip, j) - rho(im, j)) * inv_2dx;
        const double drho_dx2 = (rho(i, jp) - rho(i, jm)) * inv_2dx;
        out(i + n1 * j) = -div_v;
        out(cells + i + n1 * j) = -drho_dx1;
        out(2 * cells + i + n1 * j) = -drho_dx2;
      }
    }
  };

  const Index steps = std::max<Index>(1, step_count(c.final_time, c.dt));
  const Index cols = (steps + c.stride - 1) / c.stride;
  Matrix snapshots(n, cols);

  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  Index col = 0;
  for (Index step = 0; step < steps; ++step) {
    if (step % c.stride == 0) snapshots.col(col++) = state;

    rhs(state, k1);
    tmp = state + (0.5 * c.dt) * k1;
    rhs(tmp, k2);
    tmp = state + (0.5 * c.dt) * k2;
    rhs(tmp, k3);
    tmp = state + c.dt * k3;
    rhs(tmp, k4);
    state += (c.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!state.allFinite()) {
      throw ValidationError("acoustic: instability detected at time step " +
                            std::to_string(step + 1));
    }
  }
  return snapshots;
}

Matrix gen_advection_pulse(Index n, Index k, double speed) {
  if (n < 32) throw ValidationError("advection: n must be >= 32");
  if (k < 1) throw ValidationError("advection: k must be >= 1");

  // Gaussian pulse on [0,1) with standard deviation 0.045, centered at 0.25.
  // Narrow enough that a truncated subspace leaves a visible transport
  // barrier, wide enough that a few dozen samples pin the pulse down.
  const double width = 0.045;
  const double center = 0.25;
  Vector pulse(n);
  for (Index i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(n);
    const double d = xi - center;
    pulse(i) = std::exp(-d * d / (2.0 * width * width));
  }

  Matrix snapshots(n, k);
  for (Index j = 0; j < k; ++j) {
    const long long raw = std::llround(speed * static_cast<double>(j));
    const Index shift = static_cast<Index>(((raw % n) + n) % n);
    for (Index i = 0; i < n; ++i) {
      snapshots(i, j) = pulse((i - shift + n) % n);
    }
  }
  return snapshots;
}

std::pair<Matrix, Matrix> split_even_odd(const Matrix& s) {
  const Index k = s.cols();
  if (k < 2) {
    throw ValidationError("split_even_odd: need at least two columns");
  }
  const Index k_train = (k + 1) / 2;
  const Index k_test = k / 2;
  Matrix train(s.rows(), k_train);
  Matrix test(s.rows(), k_test);
  for (Index j = 0; j < k_train; ++j) train.col(j) = s.col(2 * j);
  for (Index j = 0; j < k_test; ++j) test.col(j) = s.col(2 * j + 1);
  return {std::move(train), std::move(test)};
}

}  // namespace qmsr
