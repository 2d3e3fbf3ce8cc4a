#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgpcl/design.hpp"
#include "dgpcl/tricands.hpp"

namespace dgpcl {

inline constexpr const char* kCsvHeader =
    "rep,iter,n,method,sensitivity,specificity,f1,rmse,crps,fit_time_s,acq_time_s,seed";

// 17 significant digits round-trip any double bit-exactly.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_time(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string format_result_row(std::uint64_t rep, const RunRecord& r,
                                     const std::string& method, std::uint64_t seed) {
  std::ostringstream os;
  os << rep << ',' << r.iter << ',' << r.n << ',' << method << ',' << fmt_double(r.sensitivity)
     << ',' << fmt_double(r.specificity) << ',' << fmt_double(r.f1) << ',' << fmt_double(r.rmse)
     << ',' << fmt_double(r.crps) << ',' << fmt_time(r.fit_time_s) << ','
     << fmt_time(r.acq_time_s) << ',' << seed;
  return os.str();
}

namespace detail {

inline bool parse_csv_numbers(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string field = line.substr(pos, comma - pos);
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      return false;
    }
    while (used < field.size() &&
           (field[used] == ' ' || field[used] == '\t' || field[used] == '\r')) {
      ++used;
    }
    if (used != field.size()) return false;
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return !out.empty();
}

}  // namespace detail

// Reads a matrix of comma-separated doubles, one point per line. A single
// leading non-numeric line is treated as a header; blank lines are skipped.
inline Eigen::MatrixXd read_points_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first_content = true;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    std::vector<double> vals;
    if (!detail::parse_csv_numbers(line, vals)) {
      if (first_content) {
        first_content = false;
        continue;
      }
      throw std::invalid_argument("points csv: malformed numeric row at line " +
                                  std::to_string(lineno));
    }
    first_content = false;
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw std::invalid_argument("points csv: row at line " + std::to_string(lineno) + " has " +
                                  std::to_string(vals.size()) + " fields, expected " +
                                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::invalid_argument("points csv: no data rows");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return x;
}

inline void write_candidates_csv(std::ostream& os, const CandidateSet& cands) {
  const Eigen::Index d = cands.x.cols();
  for (Eigen::Index j = 0; j < d; ++j) os << 'x' << (j + 1) << ',';
  os << "origin\n";
  for (Eigen::Index i = 0; i < cands.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) os << fmt_double(cands.x(i, j)) << ',';
    os << (cands.origin[static_cast<std::size_t>(i)] == CandidateOrigin::internal ? "internal"
                                                                                  : "fringe")
       << '\n';
  }
}

inline void write_simplices_csv(std::ostream& os, const Triangulation& tri) {
  if (tri.simplices.empty()) return;
  const std::size_t k = tri.simplices.front().size();
  for (std::size_t j = 0; j < k; ++j) {
    os << 'v' << j;
    os << (j + 1 < k ? ',' : '\n');
  }
  for (const auto& s : tri.simplices) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      os << s[j];
      os << (j + 1 < s.size() ? ',' : '\n');
    }
  }
}

}  // namespace dgpcl
