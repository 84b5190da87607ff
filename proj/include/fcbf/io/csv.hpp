#pragma once
// Trajectory CSV: one row per log record, fixed column order, empty cells for
// quantities a controller does not have, 17 significant digits so that reading
// a file and writing it again reproduces it byte for byte.

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcbf/errors.hpp"
#include "fcbf/io/config.hpp"
#include "fcbf/sim.hpp"

namespace fcbf::io {

inline constexpr std::string_view kCsvHeader =
    "t,x,y,theta,v,u1,u2,uf1,uf2,nu1,nu2,delta,b,psi1,psi2,qp_status,solve_time_s";
inline constexpr int kCsvColumns = 17;

/// A CSV whose header or cell layout does not match kCsvHeader.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

namespace csv_detail {

inline void cell(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (v) out << format_double(*v);
}

inline std::optional<double> read_cell(const std::string& s, int line, int col) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col + 1) +
                      ": not a number: '" + s + "'");
  }
  return v;
}

inline std::optional<Vec2> pair(const std::optional<double>& a, const std::optional<double>& b,
                                int line) {
  if (a.has_value() != b.has_value()) {
    throw SchemaError("line " + std::to_string(line) + ": half-filled input pair");
  }
  if (!a) return std::nullopt;
  return Vec2(*a, *b);
}

inline RunStatus status_from_qp(const std::string& s) {
  if (s.empty() || s == "Optimal") return RunStatus::Completed;
  if (s == "Infeasible") return RunStatus::Infeasible;
  return RunStatus::SolverFailure;
}

}  // namespace csv_detail

/// Write the log. The timing column is left empty unless requested, so that
/// repeated runs of the same scenario produce identical files.
inline void write_csv(std::ostream& out, const TrajectoryLog& log, bool record_timing = false) {
  using csv_detail::cell;
  out << kCsvHeader << '\n';
  auto comp = [](const std::optional<Vec2>& v, int i) -> std::optional<double> {
    if (!v) return std::nullopt;
    return (*v)[i];
  };
  for (const auto& r : log.records) {
    out << format_double(r.t);
    cell(out, r.state.x);
    cell(out, r.state.y);
    cell(out, r.state.theta);
    cell(out, r.state.v);
    cell(out, comp(r.u, 0));
    cell(out, comp(r.u, 1));
    cell(out, comp(r.uf, 0));
    cell(out, comp(r.uf, 1));
    cell(out, comp(r.nu, 0));
    cell(out, comp(r.nu, 1));
    cell(out, r.delta);
    cell(out, r.b);
    cell(out, r.psi1);
    cell(out, r.psi2);
    out << ',' << r.qp_status;
    cell(out, record_timing ? r.solve_time : std::nullopt);
    out << '\n';
  }
}

inline std::string csv_string(const TrajectoryLog& log, bool record_timing = false) {
  std::ostringstream s;
  write_csv(s, log, record_timing);
  return s.str();
}

/// Read a trajectory CSV. The controller is inferred from the filter columns
/// (filtered when nu is present) and the run status from the last QP status.
inline TrajectoryLog read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty CSV");
  if (line != kCsvHeader) throw SchemaError("unexpected CSV header: '" + line + "'");
  TrajectoryLog log;
  log.controller = ControllerKind::HOCBF;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto p = line.find(',', start);
      cells.push_back(line.substr(start, p == std::string::npos ? std::string::npos : p - start));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    if (static_cast<int>(cells.size()) != kCsvColumns) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(kCsvColumns) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<std::optional<double>> v(kCsvColumns);
    for (int i = 0; i < kCsvColumns; ++i) {
      if (i != 15) v[i] = csv_detail::read_cell(cells[i], line_no, i);
    }
    for (int i : {0, 1, 2, 3, 4, 12, 13}) {
      if (!v[i]) throw SchemaError("line " + std::to_string(line_no) + ": required cell " +
                                   std::to_string(i + 1) + " is empty");
    }
    StepRecord r;
    r.t = *v[0];
    r.state = {*v[1], *v[2], *v[3], *v[4]};
    r.u = csv_detail::pair(v[5], v[6], line_no);
    r.uf = csv_detail::pair(v[7], v[8], line_no);
    r.nu = csv_detail::pair(v[9], v[10], line_no);
    r.delta = v[11];
    r.b = *v[12];
    r.psi1 = *v[13];
    r.psi2 = v[14];
    r.qp_status = cells[15];
    r.solve_time = v[16];
    if (r.nu || r.uf) log.controller = ControllerKind::FCBF;
    log.records.push_back(std::move(r));
  }
  log.summary.status = log.records.empty() ? RunStatus::Completed
                                           : csv_detail::status_from_qp(log.records.back().qp_status);
  for (const auto& r : log.records) {
    if (r.delta) ++log.summary.steps_completed;
  }
  return log;
}

inline TrajectoryLog read_csv_file(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return read_csv(in);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

}  // namespace fcbf::io
