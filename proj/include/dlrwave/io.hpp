#ifndef DLRWAVE_IO_HPP
#define DLRWAVE_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlrwave/linalg.hpp"

namespace dlrwave {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// One row of a convergence table: relerr of the rank-r run with M steps
// against the reference, and the observed order versus the previous M.
struct ConvergenceCell {
  int rank;
  long M;
  double tau;
  double relerr;
  std::optional<double> rate;
  std::string status = "ok";
};

namespace detail {

// Scientific notation with six digits after the point and a minimal exponent
// (no leading zeros), e.g. 5.000000e-3.
inline std::string sci6(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  std::string s(buf);
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  const char sign = exp[0];
  std::size_t i = 1;
  while (i + 1 < exp.size() && exp[i] == '0') ++i;
  return mant + "e" + sign + exp.substr(i);
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

}  // namespace detail

// CSV layout: header, then rows ordered (rank asc, M asc); the rate column is
// blank on the first M of each rank.
inline void write_csv(const std::vector<ConvergenceCell>& table,
                      const std::filesystem::path& path) {
  if (table.empty()) throw IoError("write_csv: empty table, nothing to write: " + path.string());
  std::ostringstream out;
  out << "rank,M,tau,relerr,rate,status\n";
  for (const auto& cell : table) {
    out << cell.rank << ',' << cell.M << ',' << detail::sci6(cell.tau) << ','
        << detail::sci6(cell.relerr) << ',';
    if (cell.rate) out << detail::sci6(*cell.rate);
    out << ',' << cell.status << '\n';
  }
  detail::write_file_atomic(path, out.str());
}

// Binary PGM (P5), one byte per pixel, values mapped linearly from [lo, hi]
// onto 0..255. A degenerate range maps everything to 0.
inline void write_pgm(const Matrix& field, const std::filesystem::path& path, double lo,
                      double hi) {
  if (!is_finite(field)) throw IoError("write_pgm: non-finite field: " + path.string());
  std::ostringstream out;
  out << "P5\n" << field.cols() << ' ' << field.rows() << "\n255\n";
  const double span = hi - lo;
  for (Index i = 0; i < field.rows(); ++i) {
    for (Index j = 0; j < field.cols(); ++j) {
      long pix = 0;
      if (span > 0) {
        pix = std::lround(255.0 * (field(i, j) - lo) / span);
        pix = std::max(0L, std::min(255L, pix));
      }
      out.put(static_cast<char>(static_cast<unsigned char>(pix)));
    }
  }
  detail::write_file_atomic(path, out.str());
}

// Dense matrix as CSV, one grid row per line, full 17-digit precision.
inline void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ostringstream out;
  char buf[48];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  detail::write_file_atomic(path, out.str());
}

// Compact binary container for cached reference fields. Layout: magic,
// row/col counts, then raw little-endian doubles in row-major order.
inline void write_matrix_binary(const Matrix& m, const std::filesystem::path& path) {
  std::string bytes;
  bytes.reserve(16 + sizeof(double) * static_cast<std::size_t>(m.size()));
  bytes.append("DLRW", 4);
  const std::uint32_t version = 1;
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  bytes.append(reinterpret_cast<const char*>(&version), 4);
  bytes.append(reinterpret_cast<const char*>(&rows), 4);
  bytes.append(reinterpret_cast<const char*>(&cols), 4);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      bytes.append(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  detail::write_file_atomic(path, bytes);
}

// Returns nothing if the file is absent or fails any sanity check; callers
// treat that as a cache miss and recompute.
inline std::optional<Matrix> read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint32_t version = 0, rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in || std::string(magic, 4) != "DLRW" || version != 1 || rows == 0 || cols == 0)
    return std::nullopt;
  if (rows > (1u << 20) || cols > (1u << 20)) return std::nullopt;
  Matrix m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!in) return std::nullopt;
      m(i, j) = v;
    }
  in.get();
  if (!in.eof()) return std::nullopt;  // trailing garbage
  if (!is_finite(m)) return std::nullopt;
  return m;
}

}  // namespace dlrwave

#endif
