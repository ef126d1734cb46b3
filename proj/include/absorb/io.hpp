#pragma once

// Serialization of matrices, vectors and partitions for the command-line
// front-end. CSV cells are written with 17 significant digits so every
// double survives a text round trip.

#include "json.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "absorb/numerics.hpp"

namespace absorb::io {

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Header "vertex,1,...,n" then one row per matrix row, labelled 1-based.
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << "vertex";
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << i + 1;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_number(m(i, j));
    out << '\n';
  }
}

inline nlohmann::json to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// 0-based indices to 1-based vertex labels.
inline nlohmann::json vertex_labels(const std::vector<Eigen::Index>& idx) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto i : idx) a.push_back(i + 1);
  return a;
}

/// Parses a CSV matrix written by write_matrix_csv.
inline Matrix read_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) return Matrix();
  ++pos;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = line.find(',');
    while (start != std::string::npos) {
      const std::size_t next = line.find(',', start + 1);
      row.push_back(std::stod(line.substr(start + 1, next == std::string::npos ? std::string::npos
                                                                                : next - start - 1)));
      start = next;
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace absorb::io
