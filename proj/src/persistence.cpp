#include "qmsr/persistence.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>
#include <vector>

namespace qmsr {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; byte-swapped I/O is not implemented");

namespace {

constexpr char kMatrixMagic[4] = {'Q', 'M', 'X', '1'};
constexpr char kModelMagic[4] = {'Q', 'M', 'M', '1'};
constexpr std::uint64_t kMaxNameBytes = 1 << 20;

class AtomicFileWriter {
public:
  explicit AtomicFileWriter(const std::filesystem::path& path)
      : final_path_(path), temp_path_(path.string() + ".tmp") {
    stream_.open(temp_path_, std::ios::binary | std::ios::trunc);
    if (!stream_) {
      throw IoError("cannot open '" + temp_path_.string() + "' for writing");
    }
  }

  ~AtomicFileWriter() {
    if (!committed_) {
      stream_.close();
      std::error_code ec;
      std::filesystem::remove(temp_path_, ec);
    }
  }

  std::ostream& stream() { return stream_; }

  // Renames the temp file into place; failed writes leave no partial output.
  void commit() {
    stream_.flush();
    if (!stream_) {
      throw IoError("write to '" + temp_path_.string() + "' failed");
    }
    stream_.close();
    std::error_code ec;
    std::filesystem::rename(temp_path_, final_path_, ec);
    if (ec) {
      throw IoError("cannot rename '" + temp_path_.string() + "' to '" +
                    final_path_.string() + "': " + ec.message());
    }
    committed_ = true;
  }

private:
  std::filesystem::path final_path_;
  std::filesystem::path temp_path_;
  std::ofstream stream_;
  bool committed_ = false;
};

void write_u64(std::ostream& out, std::uint64_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

void write_f64(std::ostream& out, double value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

void write_payload(std::ostream& out, const Matrix& m) {
  if (m.size() > 0) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double)) * m.size());
  }
}

class FileReader {
public:
  explicit FileReader(const std::filesystem::path& path) : path_(path) {
    stream_.open(path, std::ios::binary);
    if (!stream_) {
      throw IoError("cannot open '" + path.string() + "' for reading");
    }
    stream_.seekg(0, std::ios::end);
    remaining_ = static_cast<std::uint64_t>(stream_.tellg());
    stream_.seekg(0, std::ios::beg);
  }

  std::uint64_t remaining() const { return remaining_; }

  void read_raw(void* dst, std::uint64_t bytes, const char* what) {
    if (bytes > remaining_) {
      throw IoError("'" + path_.string() + "': truncated while reading " + what);
    }
    stream_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (!stream_) {
      throw IoError("'" + path_.string() + "': read failed on " + what);
    }
    remaining_ -= bytes;
  }

  void expect_magic(const char magic[4], const char* format_name) {
    char buf[4];
    read_raw(buf, 4, "magic");
    if (std::memcmp(buf, magic, 4) != 0) {
      throw IoError("'" + path_.string() + "': bad magic, not a " + format_name + " file");
    }
  }

  std::uint64_t read_u64(const char* what) {
    std::uint64_t v = 0;
    read_raw(&v, sizeof(v), what);
    return v;
  }

  double read_f64(const char* what) {
    double v = 0;
    read_raw(&v, sizeof(v), what);
    return v;
  }

  Matrix read_payload(std::uint64_t rows, std::uint64_t cols, const char* what) {
    constexpr std::uint64_t max_elems =
        std::numeric_limits<std::uint64_t>::max() / sizeof(double);
    if (cols != 0 && rows > max_elems / cols) {
      throw IoError("'" + path_.string() + "': dimension overflow in " + what);
    }
    const std::uint64_t elems = rows * cols;
    if (elems > static_cast<std::uint64_t>(std::numeric_limits<Index>::max())) {
      throw IoError("'" + path_.string() + "': dimension overflow in " + what);
    }
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    if (elems > 0) read_raw(m.data(), elems * sizeof(double), what);
    return m;
  }

  void expect_exhausted() {
    if (remaining_ != 0) {
      throw IoError("'" + path_.string() + "': " + std::to_string(remaining_) +
                    " unexpected trailing byte(s)");
    }
  }

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
  std::ifstream stream_;
  std::uint64_t remaining_ = 0;
};

}  // namespace

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  AtomicFileWriter writer(path);
  writer.stream().write(kMatrixMagic, 4);
  write_u64(writer.stream(), static_cast<std::uint64_t>(m.rows()));
  write_u64(writer.stream(), static_cast<std::uint64_t>(m.cols()));
  write_payload(writer.stream(), m);
  writer.commit();
}

Matrix read_matrix(const std::filesystem::path& path) {
  FileReader reader(path);
  reader.expect_magic(kMatrixMagic, "QMX1 matrix");
  const std::uint64_t rows = reader.read_u64("row count");
  const std::uint64_t cols = reader.read_u64("column count");
  Matrix m = reader.read_payload(rows, cols, "matrix payload");
  reader.expect_exhausted();
  return m;
}

void write_model(const std::filesystem::path& path, const QuadraticManifoldModel& model) {
  AtomicFileWriter writer(path);
  std::ostream& out = writer.stream();

  out.write(kModelMagic, 4);
  write_u64(out, static_cast<std::uint64_t>(model.ambient_dim()));
  write_u64(out, static_cast<std::uint64_t>(model.reduced_dim()));
  write_u64(out, static_cast<std::uint64_t>(model.feature_dim()));
  write_u64(out, static_cast<std::uint64_t>(model.sample_count()));
  write_u64(out, model.provenance.candidate_pool);
  write_f64(out, model.gamma);
  const std::uint8_t method = static_cast<std::uint8_t>(model.method);
  out.write(reinterpret_cast<const char*>(&method), 1);

  const std::string& name = model.provenance.generator;
  write_u64(out, static_cast<std::uint64_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));

  for (Index idx : model.selected_indices) {
    write_u64(out, static_cast<std::uint64_t>(idx));
  }
  for (Index idx : model.sampler.indices) {
    write_u64(out, static_cast<std::uint64_t>(idx));
  }
  write_payload(out, model.basis);
  write_payload(out, model.weights);
  writer.commit();
}

QuadraticManifoldModel read_model(const std::filesystem::path& path) {
  FileReader reader(path);
  reader.expect_magic(kModelMagic, "QMM1 model");

  const std::uint64_t n = reader.read_u64("state dimension");
  const std::uint64_t r = reader.read_u64("reduced dimension");
  const std::uint64_t p = reader.read_u64("feature dimension");
  const std::uint64_t m = reader.read_u64("sample count");
  const std::uint64_t candidate_pool = reader.read_u64("candidate pool");
  const double gamma = reader.read_f64("gamma");

  std::uint8_t method_byte = 0;
  reader.read_raw(&method_byte, 1, "method byte");
  if (method_byte > 2) {
    throw IoError("'" + reader.path().string() + "': unknown training method byte " +
                  std::to_string(method_byte));
  }

  if (r < 1 || n < 1 || m < 1) {
    throw IoError("'" + reader.path().string() + "': degenerate model dimensions");
  }
  if (p != r * (r + 1) / 2) {
    throw ModelValidationError(
        "feature_dim", "header says p = " + std::to_string(p) + " but r = " +
                           std::to_string(r) + " requires r(r+1)/2 = " +
                           std::to_string(r * (r + 1) / 2));
  }

  const std::uint64_t name_len = reader.read_u64("generator name length");
  if (name_len > kMaxNameBytes || name_len > reader.remaining()) {
    throw IoError("'" + reader.path().string() + "': corrupt generator name length");
  }
  std::string name(name_len, '\0');
  if (name_len > 0) reader.read_raw(name.data(), name_len, "generator name");

  QuadraticManifoldModel model;
  model.provenance.generator = std::move(name);
  model.provenance.candidate_pool = candidate_pool;
  model.gamma = gamma;
  model.method = static_cast<TrainingMethod>(method_byte);

  model.selected_indices.resize(r);
  for (std::uint64_t i = 0; i < r; ++i) {
    model.selected_indices[i] = static_cast<Index>(reader.read_u64("selected index"));
  }
  model.sampler.ambient_dim = static_cast<Index>(n);
  model.sampler.indices.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    model.sampler.indices[i] = static_cast<Index>(reader.read_u64("sampler index"));
  }

  model.basis = reader.read_payload(n, r, "basis payload");
  model.weights = reader.read_payload(n, p, "weights payload");
  reader.expect_exhausted();

  validate_model(model);
  return model;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }

  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  std::size_t cols = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof() && !rows.empty()) {
      break;  // trailing newline
    }

    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t field = 0;
    while (true) {
      ++field;
      const std::size_t comma = line.find(',', pos);
      std::string token = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);

      const std::size_t first = token.find_first_not_of(" \t");
      const std::size_t last = token.find_last_not_of(" \t");
      if (first == std::string::npos) {
        throw IoError("'" + path.string() + "': empty field at line " +
                      std::to_string(line_no) + ", column " + std::to_string(field));
      }
      token = token.substr(first, last - first + 1);

      double value = 0;
      const auto result =
          std::from_chars(token.data(), token.data() + token.size(), value);
      if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
        throw IoError("'" + path.string() + "': cannot parse '" + token +
                      "' at line " + std::to_string(line_no) + ", column " +
                      std::to_string(field));
      }
      row.push_back(value);

      if (comma == std::string::npos) break;
      pos = comma + 1;
    }

    if (rows.empty()) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw IoError("'" + path.string() + "': ragged row at line " +
                    std::to_string(line_no) + " (" + std::to_string(row.size()) +
                    " fields, expected " + std::to_string(cols) + ")");
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) {
    throw IoError("'" + path.string() + "': empty CSV");
  }

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ValidationError("write_csv_matrix: CSV cannot represent an empty matrix");
  }
  AtomicFileWriter writer(path);
  std::ostream& out = writer.stream();

  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      // 17 significant digits round-trip binary64 exactly.
      const auto res = std::to_chars(buf, buf + sizeof(buf), m(i, j),
                                     std::chars_format::general, 17);
      out.write(buf, res.ptr - buf);
      out.put(j + 1 < m.cols() ? ',' : '\n');
    }
  }
  writer.commit();
}

}  // namespace qmsr
