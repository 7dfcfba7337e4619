#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace msf {

/// Formats a double deterministically with enough digits to round-trip.
/// All CSV/JSON emitters route numbers through here so that reruns produce
/// byte-identical files.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

/// Row-major matrix dump with a dimension header, for debugging exports.
inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  os << "# rows=" << m.rows() << " cols=" << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

}  // namespace msf
