#pragma once

#include <filesystem>

#include "qmsr/manifold.hpp"
#include "qmsr/types.hpp"

namespace qmsr {

// Binary matrix format (QMX1), little-endian:
//   magic "QMX1" | rows u64 | cols u64 | rows*cols f64, column-major.
// Zero-column matrices are permitted. Writes go to a temporary file that is
// renamed into place, so failed writes leave no partial output.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

// Binary model format (QMM1), little-endian:
//   magic "QMM1" | n u64 | r u64 | p u64 | m u64 | M u64 | gamma f64 |
//   method u8 | name_len u64 | name bytes (UTF-8) |
//   selected indices r*u64 | sampler indices m*u64 |
//   V n*r f64 column-major | W n*p f64 column-major.
// read_model revalidates the full set of model invariants and rejects
// corrupt files with an error naming the failed check.
void write_model(const std::filesystem::path& path, const QuadraticManifoldModel& model);
QuadraticManifoldModel read_model(const std::filesystem::path& path);

// Rectangular CSV of decimal floats; one matrix row per line. Writing emits
// 17 significant digits so values round-trip exactly.
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace qmsr
