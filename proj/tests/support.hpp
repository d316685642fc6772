#pragma once

// Shared test utilities: a platform-stable RNG, independent numerical
// oracles, and small helpers. Everything here stays independent of the
// implementation paths it is used to check.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qmsr/types.hpp"

namespace qmsr::test {

// splitmix64-based generator with a fixed bits-to-double mapping, so
// generated data (and golden hashes of it) are identical on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double gaussian();                      // Box-Muller, unit normal
  Index uniform_index(Index lo, Index hi);  // inclusive bounds

private:
  std::uint64_t state_;
};

Matrix random_matrix(Rng& rng, Index rows, Index cols);
Vector random_vector(Rng& rng, Index size);

// Matrix with orthonormal columns from a QR of a random matrix.
Matrix random_orthonormal(Rng& rng, Index rows, Index cols);

// Singular values of A through a cyclic Jacobi eigen-sweep on A^T A.
// Brute-force reference, independent of Eigen's SVD.
Vector jacobi_singular_values(const Matrix& a);

// Greedy column selection recomputing residual norms from scratch each step:
// step i projects every remaining original column onto the orthogonal
// complement of the span of the already-chosen original columns.
std::vector<Index> greedy_column_order_oracle(const Matrix& a);

// Independent gappy-POD reconstruction V (PV)^+ P s through a dense QR
// solve, bypassing the library's pseudo-inverse path.
Vector gappy_reconstruction_oracle(const Matrix& v, const std::vector<Index>& rows,
                                   const Vector& s);

// SHA-256 of a file, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

// Fresh scratch directory under the system temp dir; removed by the caller.
std::filesystem::path make_scratch_dir(const std::string& tag);

}  // namespace qmsr::test
