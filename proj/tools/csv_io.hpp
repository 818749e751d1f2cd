#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "simscore/errors.hpp"

namespace simscore_cli {

struct CsvTable {
  Eigen::MatrixXd values;
  std::vector<std::string> header;  // empty when the file has none
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

inline bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// rows = samples, columns = components, optional header line of labels
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  simscore::require(in.good(), simscore::Err::ParseError, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::string line;
  bool first = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (first) {
      first = false;
      bool numeric = true;
      double v;
      for (const auto& c : cells) {
        if (!parse_double(c, &v)) numeric = false;
      }
      width = cells.size();
      if (!numeric) {
        table.header = cells;
        continue;
      }
    }
    simscore::require(cells.size() == width, simscore::Err::ParseError,
                      "ragged csv row in " + path);
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      simscore::require(parse_double(cells[j], &row[j]), simscore::Err::ParseError,
                        "non-numeric cell '" + cells[j] + "' in " + path);
    }
    rows.push_back(std::move(row));
  }
  simscore::require(!rows.empty(), simscore::Err::ParseError, "no data rows in " + path);
  table.values.resize(static_cast<int>(rows.size()), static_cast<int>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
  }
  return table;
}

inline void write_csv(const std::string& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& header = {}) {
  std::ofstream out(path);
  simscore::require(out.good(), simscore::Err::ParseError, "cannot write " + path);
  if (!header.empty()) {
    for (int j = 0; j < static_cast<int>(header.size()); ++j) {
      out << (j ? "," : "") << header[static_cast<std::size_t>(j)];
    }
    out << "\n";
  }
  char buf[40];
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace simscore_cli
