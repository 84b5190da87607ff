#pragma once
// Command implementations behind the fcbf tool. Each returns a process exit
// code: 0 success, 1 config/usage error, 2 run-time failure, 3 verification
// failure. Human-readable output goes to the supplied streams.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fcbf/io/config.hpp"
#include "fcbf/io/csv.hpp"
#include "fcbf/io/manifest.hpp"
#include "fcbf/io/svg.hpp"
#include "fcbf/sim.hpp"
#include "fcbf/verify.hpp"

namespace fcbf::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2, kVerification = 3 };

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct RunOptions {
  std::string config_path;
  std::string controller;
  std::string out_csv;
  std::optional<std::string> out_svg;
  std::uint64_t seed = kDefaultSeed;
  bool record_timing = false;
};

struct SweepOptions {
  std::string config_path;
  std::string param;
  std::string values;
  std::string out_dir;
  int jobs = 1;
  bool record_timing = false;
};

struct CompareOptions {
  std::vector<std::string> csvs;
  std::optional<std::string> out_svg;
};

struct VerifyOptions {
  std::string config_path;
  std::uint64_t seed = kDefaultSeed;
  int samples = 500;
};

inline std::string summary_line(const RunSummary& s) {
  return fmt::format("status={} steps={} min_b={:.6g} goal_distance={:.6g} max_rate_u1={:.6g} max_rate_u2={:.6g}",
                     to_string(s.status), s.steps_completed, s.min_b, s.goal_distance, s.max_rate[0],
                     s.max_rate[1]);
}

inline bool is_runtime_failure(RunStatus s) {
  return s == RunStatus::SolverFailure || s == RunStatus::IntegrationFailure;
}

/// Apply one sweep parameter to a scenario.
inline void set_param(ScenarioConfig& c, const std::string& param, double value) {
  if (param == "k3") c.gains.k3.gain = value;
  else if (param == "alpha") c.gains.alpha.gain = value;
  else if (param == "tau") c.filter.tau = value;
  else if (param == "theta0") c.initial_state.theta = value;
  else throw ConfigError("unknown sweep parameter '" + param + "' (expected k3, alpha, tau or theta0)");
}

inline int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  io::RunManifest m;
  m.command = "run";
  m.started_utc = io::utc_now();
  ScenarioConfig c;
  std::string text;
  try {
    text = io::read_file(o.config_path);
    c = io::parse_config(text);
    c.controller = io::parse_controller(o.controller);
    c.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  }
  TrajectoryLog log;
  try {
    log = run(c);
    io::write_text_file(o.out_csv, io::csv_string(log, o.record_timing));
    if (o.out_svg) {
      io::write_text_file(*o.out_svg, io::trajectory_figure({{o.controller, log}}, c.unicycle));
    }
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kRuntime;
  }
  m.config_path = o.config_path;
  m.config_hash = io::git_blob_sha1(text);
  m.controller = o.controller;
  m.seed = o.seed;
  m.outputs.push_back(o.out_csv);
  if (o.out_svg) m.outputs.push_back(*o.out_svg);
  m.finished_utc = io::utc_now();
  try {
    io::write_text_file(o.out_csv + ".manifest", m.to_text());
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kRuntime;
  }
  out << summary_line(log.summary) << '\n';
  if (!log.summary.diagnostic.empty()) out << "diagnostic: " << log.summary.diagnostic << '\n';
  return is_runtime_failure(log.summary.status) ? kRuntime : kOk;
}

struct SweepItem {
  double value = 0.0;
  std::string csv;
  TrajectoryLog log;
  SmoothnessReport smooth;
  std::string error;
};

inline int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  io::RunManifest m;
  m.command = "sweep";
  m.started_utc = io::utc_now();
  ScenarioConfig base;
  std::string text;
  std::vector<double> values;
  try {
    text = io::read_file(o.config_path);
    base = io::parse_config(text);
    values = io::parse_number_list(o.values);
    if (values.empty()) throw ConfigError("--values is empty");
    ScenarioConfig probe = base;
    set_param(probe, o.param, values.front());
    if (o.jobs < 1) throw ConfigError("--jobs must be >= 1");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  }
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) {
    err << "cannot create '" << o.out_dir << "': " << ec.message() << '\n';
    return kRuntime;
  }

  std::vector<SweepItem> items(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      auto& it = items[i];
      it.value = values[i];
      it.csv = (std::filesystem::path(o.out_dir) / fmt::format("{}_{}.csv", o.param, i)).string();
      try {
        ScenarioConfig c = base;
        set_param(c, o.param, it.value);
        it.log = run(c);
        it.smooth = lipschitz_estimate(it.log, c);
        io::write_text_file(it.csv, io::csv_string(it.log, o.record_timing));
      } catch (const std::exception& e) {
        it.error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(o.jobs, static_cast<int>(items.size()));
    for (int j = 0; j < n; ++j) pool.emplace_back(worker);
  }

  // Combined outputs are written once every item has finished.
  const auto dir = std::filesystem::path(o.out_dir);
  std::string table = "param,value,file,status,steps,min_b,min_psi1,goal_distance,max_rate_u1,max_rate_u2,"
                      "total_variation_u1,total_variation_u2,bound_holds,error\n";
  io::KeyValueWriter report;
  report.put("sweep.param", o.param).put("sweep.count", static_cast<int>(items.size()));
  std::vector<std::pair<std::string, TrajectoryLog>> overlay;
  bool any_error = false;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const auto& s = it.log.summary;
    const std::string name = fmt::format("{}={}", o.param, io::format_double(it.value));
    if (!it.error.empty()) {
      any_error = true;
      table += fmt::format("{},{},{},error,,,,,,,,,,\"{}\"\n", o.param, io::format_double(it.value), it.csv,
                           it.error);
      report.put(fmt::format("item.{}.error", i), it.error);
      continue;
    }
    table += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},\n", o.param, io::format_double(it.value),
                         it.csv, to_string(s.status), s.steps_completed, io::format_double(s.min_b),
                         io::format_double(s.min_psi1), io::format_double(s.goal_distance),
                         io::format_double(it.smooth.max_rate[0]), io::format_double(it.smooth.max_rate[1]),
                         io::format_double(it.smooth.total_variation[0]),
                         io::format_double(it.smooth.total_variation[1]), it.smooth.bound_holds);
    report.put(fmt::format("item.{}.value", i), it.value);
    const std::string body = io::summary_text(s, fmt::format("item.{}.summary.", i)) +
                             io::smoothness_text(it.smooth, fmt::format("item.{}.smoothness.", i));
    overlay.emplace_back(name, it.log);
    out << name << ": " << summary_line(s) << '\n';
    m.outputs.push_back(it.csv);
    report.append(body);
  }
  try {
    const auto table_path = (dir / "sweep_summary.csv").string();
    const auto report_path = (dir / "sweep_report.txt").string();
    const auto svg_path = (dir / "sweep_overlay.svg").string();
    io::write_text_file(table_path, table);
    io::write_text_file(report_path, report.str());
    io::write_text_file(svg_path, io::trajectory_figure(overlay, base.unicycle));
    m.outputs.push_back(table_path);
    m.outputs.push_back(report_path);
    m.outputs.push_back(svg_path);
    m.config_path = o.config_path;
    m.config_hash = io::git_blob_sha1(text);
    m.controller = to_string(base.controller);
    m.finished_utc = io::utc_now();
    io::write_text_file((dir / "sweep.manifest").string(), m.to_text());
  } catch (const std::exception& e) {
    err << "sweep failed: " << e.what() << '\n';
    return kRuntime;
  }
  if (any_error) err << "some sweep items failed; see sweep_summary.csv\n";
  return any_error ? kRuntime : kOk;
}

inline int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err) {
  if (o.csvs.size() < 2) {
    err << "compare needs at least two CSV files\n";
    return kUsage;
  }
  std::map<std::string, TrajectoryLog> logs;
  std::vector<std::pair<std::string, TrajectoryLog>> ordered;
  try {
    for (const auto& path : o.csvs) {
      auto log = io::read_csv_file(path);
      std::string name = std::filesystem::path(path).stem().string();
      while (logs.count(name)) name += "'";
      logs.emplace(name, log);
      ordered.emplace_back(name, std::move(log));
    }
  } catch (const ConfigError& e) {
    err << "input error: " << e.what() << '\n';
    return kUsage;
  }
  // Goal and obstacle are not part of the CSV; goal distance uses the default scene.
  out << io::comparison_table(compare_controllers(logs, UnicycleParams{}));
  if (o.out_svg) {
    try {
      io::write_text_file(*o.out_svg, io::trajectory_figure(ordered));
      io::RunManifest m;
      m.command = "compare";
      m.started_utc = m.finished_utc = io::utc_now();
      m.inputs = o.csvs;
      m.outputs = {*o.out_svg};
      io::write_text_file(*o.out_svg + ".manifest", m.to_text());
    } catch (const std::exception& e) {
      err << "compare failed: " << e.what() << '\n';
      return kRuntime;
    }
  }
  return kOk;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  ScenarioConfig c;
  try {
    c = io::load_config(o.config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  }
  bool ok = true;
  try {
    const auto startup = startup_check(c.initial_state, c.initial_uf, c.unicycle, c.gains, c.input_bounds);
    out << io::startup_report_text(startup);
    ok = ok && startup.all_pass();
    // The tracking rows are undefined at the goal point itself.
    goal_heading(c.initial_state, c.unicycle);
    const auto reports = derivative_suite(c, o.samples, o.seed);
    out << io::deriv_report_text(reports);
    for (const auto& r : reports) ok = ok && r.pass;
  } catch (const GoalSingularity& e) {
    err << "verification failed: GoalSingularity: " << e.what() << '\n';
    return kVerification;
  }
  out << "verify.pass = " << (ok ? "true" : "false") << '\n';
  return ok ? kOk : kVerification;
}

}  // namespace fcbf::cli
