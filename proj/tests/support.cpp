#include "support.hpp"

#include <Eigen/QR>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace qmsr::test {

std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
  // Box-Muller; u1 strictly positive to keep the log finite.
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

Index Rng::uniform_index(Index lo, Index hi) {
  return lo + static_cast<Index>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.gaussian();
  }
  return m;
}

Vector random_vector(Rng& rng, Index size) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = rng.gaussian();
  return v;
}

Matrix random_orthonormal(Rng& rng, Index rows, Index cols) {
  const Matrix a = random_matrix(rng, rows, cols);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  return q;
}

Vector jacobi_singular_values(const Matrix& a) {
  const Index n = a.cols();
  Matrix s = a.transpose() * a;

  // Cyclic Jacobi sweeps on the symmetric matrix S until off-diagonal mass
  // is negligible.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    }
    if (std::sqrt(off) <= 1e-14 * std::max(1.0, s.norm())) break;

    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (Index i = 0; i < n; ++i) {
          const double sip = s(i, p);
          const double siq = s(i, q);
          s(i, p) = c * sip - sn * siq;
          s(i, q) = sn * sip + c * siq;
        }
        for (Index i = 0; i < n; ++i) {
          const double spi = s(p, i);
          const double sqi = s(q, i);
          s(p, i) = c * spi - sn * sqi;
          s(q, i) = sn * spi + c * sqi;
        }
      }
    }
  }

  Vector eigenvalues = s.diagonal();
  std::sort(eigenvalues.data(), eigenvalues.data() + n, std::greater<double>());
  for (Index i = 0; i < n; ++i) {
    eigenvalues(i) = std::sqrt(std::max(0.0, eigenvalues(i)));
  }
  return eigenvalues;
}

std::vector<Index> greedy_column_order_oracle(const Matrix& a) {
  const Index cols = a.cols();
  const Index steps = std::min(a.rows(), cols);
  std::vector<Index> order;
  std::vector<bool> used(static_cast<std::size_t>(cols), false);

  for (Index step = 0; step < steps; ++step) {
    // Residual of column j against the span of the chosen original columns,
    // recomputed from scratch via a dense least-squares solve.
    Matrix chosen(a.rows(), static_cast<Index>(order.size()));
    for (Index l = 0; l < chosen.cols(); ++l) {
      chosen.col(l) = a.col(order[static_cast<std::size_t>(l)]);
    }

    Index pivot = -1;
    double best = -1.0;
    for (Index j = 0; j < cols; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      Vector residual = a.col(j);
      if (chosen.cols() > 0) {
        const Vector coeff =
            chosen.colPivHouseholderQr().solve(a.col(j));
        residual -= chosen * coeff;
      }
      const double norm2 = residual.squaredNorm();
      if (norm2 > best) {
        best = norm2;
        pivot = j;
      }
    }
    if (pivot < 0 || best <= 0.0) break;
    used[static_cast<std::size_t>(pivot)] = true;
    order.push_back(pivot);
  }

  for (Index j = 0; j < cols; ++j) {
    if (!used[static_cast<std::size_t>(j)]) order.push_back(j);
  }
  return order;
}

Vector gappy_reconstruction_oracle(const Matrix& v, const std::vector<Index>& rows,
                                   const Vector& s) {
  Matrix pv(static_cast<Index>(rows.size()), v.cols());
  Vector ps(static_cast<Index>(rows.size()));
  for (Index j = 0; j < pv.rows(); ++j) {
    pv.row(j) = v.row(rows[static_cast<std::size_t>(j)]);
    ps(j) = s(rows[static_cast<std::size_t>(j)]);
  }
  const Vector q = pv.colPivHouseholderQr().solve(ps);
  return v * q;
}

namespace {

// Compact SHA-256, only used to pin golden file bytes in tests.
struct Sha256 {
  std::array<std::uint32_t, 8> h = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                                    0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
  std::array<std::uint8_t, 64> block{};
  std::size_t block_len = 0;
  std::uint64_t total_bits = 0;

  static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void process() {
    static constexpr std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t(block[std::size_t(4 * i)]) << 24) |
             (std::uint32_t(block[std::size_t(4 * i + 1)]) << 16) |
             (std::uint32_t(block[std::size_t(4 * i + 2)]) << 8) |
             std::uint32_t(block[std::size_t(4 * i + 3)]);
    }
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    auto a = h;
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(a[4], 6) ^ rotr(a[4], 11) ^ rotr(a[4], 25);
      const std::uint32_t ch = (a[4] & a[5]) ^ (~a[4] & a[6]);
      const std::uint32_t t1 = a[7] + s1 + ch + k[i] + w[i];
      const std::uint32_t s0 = rotr(a[0], 2) ^ rotr(a[0], 13) ^ rotr(a[0], 22);
      const std::uint32_t maj = (a[0] & a[1]) ^ (a[0] & a[2]) ^ (a[1] & a[2]);
      const std::uint32_t t2 = s0 + maj;
      a[7] = a[6]; a[6] = a[5]; a[5] = a[4]; a[4] = a[3] + t1;
      a[3] = a[2]; a[2] = a[1]; a[1] = a[0]; a[0] = t1 + t2;
    }
    for (int i = 0; i < 8; ++i) h[std::size_t(i)] += a[std::size_t(i)];
  }

  void update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    total_bits += std::uint64_t(len) * 8;
    for (std::size_t i = 0; i < len; ++i) {
      block[block_len++] = bytes[i];
      if (block_len == 64) {
        process();
        block_len = 0;
      }
    }
  }

  std::string hex_digest() {
    block[block_len++] = 0x80;
    if (block_len > 56) {
      while (block_len < 64) block[block_len++] = 0;
      process();
      block_len = 0;
    }
    while (block_len < 56) block[block_len++] = 0;
    for (int i = 7; i >= 0; --i) block[block_len++] = std::uint8_t(total_bits >> (8 * i));
    process();

    std::string out;
    out.reserve(64);
    static const char* digits = "0123456789abcdef";
    for (std::uint32_t v : h) {
      for (int shift = 28; shift >= 0; shift -= 4) out.push_back(digits[(v >> shift) & 0xF]);
    }
    return out;
  }
};

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256_file: cannot open " + path.string());
  Sha256 hasher;
  char buf[4096];
  while (in) {
    in.read(buf, sizeof(buf));
    hasher.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return hasher.hex_digest();
}

std::filesystem::path make_scratch_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("qmsr_test_" + tag + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace qmsr::test
