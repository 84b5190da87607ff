#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fcbf/cli.hpp"

using namespace fcbf;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = FCBF_CONFIG_DIR;

std::string cfg(const std::string& name) { return kConfigs + "/" + name; }

/// Fresh scratch directory per test.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fcbf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

std::string slurp(const fs::path& path) { return io::read_file(path.string()); }

cli::RunOptions run_opts(std::string config, std::string controller, std::string csv) {
  cli::RunOptions o;
  o.config_path = std::move(config);
  o.controller = std::move(controller);
  o.out_csv = std::move(csv);
  return o;
}

cli::CompareOptions compare_opts(std::vector<std::string> csvs) {
  cli::CompareOptions o;
  o.csvs = std::move(csvs);
  return o;
}

cli::SweepOptions sweep_opts(std::string values, const fs::path& dir, std::string param = "alpha",
                             std::string config = cfg("reference_fcbf.cfg"), int jobs = 1) {
  cli::SweepOptions o;
  o.config_path = std::move(config);
  o.param = std::move(param);
  o.values = std::move(values);
  o.out_dir = dir.string();
  o.jobs = jobs;
  return o;
}

cli::VerifyOptions verify_opts(std::string config) {
  cli::VerifyOptions o;
  o.config_path = std::move(config);
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario files

TEST(Config, ExpressionsAndComments) {
  const auto c = io::parse_config(
      "# header\n"
      "initial_state.theta = pi/12   # trailing comment\n"
      "input_bounds.u_max = 5, 5*1650\n"
      "gains.k3 = (1 + 2) / 4\n");
  EXPECT_DOUBLE_EQ(c.initial_state.theta, std::numbers::pi / 12.0);
  EXPECT_DOUBLE_EQ(c.input_bounds.u_max[1], 8250.0);
  EXPECT_DOUBLE_EQ(c.gains.k3.gain, 0.75);
}

TEST(Config, UnknownKeyIsRejectedWithLine) {
  try {
    io::parse_config("dt = 0.1\ngains.k4 = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("gains.k4"), std::string::npos) << e.what();
  }
}

TEST(Config, DuplicateKeyIsRejected) {
  EXPECT_THROW(io::parse_config("dt = 0.1\ndt = 0.2\n"), ConfigError);
}

TEST(Config, MalformedLinesAreRejected) {
  EXPECT_THROW(io::parse_config("dt 0.1\n"), ConfigError);
  EXPECT_THROW(io::parse_config("dt =\n"), ConfigError);
  EXPECT_THROW(io::parse_config("dt = 0.1x\n"), ConfigError);
  EXPECT_THROW(io::parse_config("input_bounds.u_min = 1\n"), ConfigError);
  EXPECT_THROW(io::parse_config("controller = mpc\n"), ConfigError);
}

TEST(Config, NonPositiveGainIsRejected) {
  EXPECT_THROW(io::parse_config("gains.k1 = 0\n"), ConfigError);
  EXPECT_THROW(io::parse_config("filter.tau = -1e-3\n"), ConfigError);
}

TEST(Config, WriteThenParseRoundTrips) {
  ScenarioConfig c;
  c.initial_state.theta = std::numbers::pi / 7.0;
  c.gains.alpha.gain = 0.1;
  c.filter.tau = 2e-3;
  c.controller = ControllerKind::SpHOCBF;
  c.input_bounds.u_min = {-1.0 / 3.0, -1234.5};
  const std::string text = io::write_config(c);
  const auto back = io::parse_config(text);
  EXPECT_EQ(io::write_config(back), text);
  EXPECT_EQ(back.initial_state.theta, c.initial_state.theta);
  EXPECT_EQ(back.input_bounds.u_min[0], c.input_bounds.u_min[0]);
  EXPECT_EQ(back.controller, ControllerKind::SpHOCBF);
}

TEST(Config, ShippedScenariosLoad) {
  for (const char* name : {"reference_fcbf.cfg", "reference_hocbf.cfg", "reference_sp_hocbf.cfg", "sp_hocbf_pi6.cfg"}) {
    EXPECT_NO_THROW(io::load_config(cfg(name))) << name;
  }
  EXPECT_EQ(io::load_config(cfg("reference_fcbf.cfg")).controller, ControllerKind::FCBF);
  EXPECT_EQ(io::load_config(cfg("reference_hocbf.cfg")).controller, ControllerKind::HOCBF);
  EXPECT_DOUBLE_EQ(io::load_config(cfg("sp_hocbf_pi6.cfg")).initial_state.theta, std::numbers::pi / 6.0);
}

// ---------------------------------------------------------------------------
// Trajectory CSV

TEST(Csv, HeaderAndEmptyCells) {
  auto c = io::load_config(cfg("reference_hocbf.cfg"));
  c.horizon_T = 0.3;
  const std::string text = io::csv_string(run(c));
  std::istringstream in(text);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,x,y,theta,v,u1,u2,uf1,uf2,nu1,nu2,delta,b,psi1,psi2,qp_status,solve_time_s");
  // A direct controller has no filter columns and, by default, no timing.
  EXPECT_NE(first.find(",,,,,"), std::string::npos) << first;
  EXPECT_EQ(first.back(), ',');
}

TEST(Csv, RoundTripIsByteIdentical) {
  for (const char* name : {"reference_hocbf.cfg", "reference_fcbf.cfg"}) {
    auto c = io::load_config(cfg(name));
    if (c.controller == ControllerKind::FCBF) {
      c.initial_state.theta = std::numbers::pi / 3.0;
      c.gains.alpha.gain = 10.0;
    }
    const std::string text = io::csv_string(run(c), true);
    std::istringstream in(text);
    EXPECT_EQ(io::csv_string(io::read_csv(in), true), text) << name;
  }
}

TEST(Csv, SameScenarioGivesSameBytes) {
  const auto c = io::load_config(cfg("reference_sp_hocbf.cfg"));
  EXPECT_EQ(io::csv_string(run(c)), io::csv_string(run(c)));
}

TEST(Csv, SchemaErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return io::read_csv(in);
  };
  const std::string header(io::kCsvHeader);
  EXPECT_THROW(parse(""), io::SchemaError);
  EXPECT_THROW(parse("t,x,y\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "\n0,1,2\n"), io::SchemaError);
  EXPECT_THROW(parse(header + "\n0,1,2,3,4,5,,,,,,,8,9,,Optimal,\n"), io::SchemaError);  // half pair
  EXPECT_THROW(parse(header + "\n0,a,2,3,4,,,,,,,,8,9,,,\n"), io::SchemaError);
  EXPECT_NO_THROW(parse(header + "\n0,1,2,3,4,,,,,,,,8,9,,,\n"));
}

// ---------------------------------------------------------------------------
// Manifests

TEST(Manifest, GitBlobHashMatchesGit) {
  // Reference ids from `git hash-object`.
  EXPECT_EQ(io::git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(io::git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Manifest, StringValuesAreWrittenVerbatim) {
  io::KeyValueWriter w;
  w.put("a", "text").put("b", true).put("c", std::string("s"));
  EXPECT_EQ(w.str(), "a = text\nb = true\nc = s\n");
}

// ---------------------------------------------------------------------------
// Commands

TEST(CmdRun, WritesCsvManifestAndSvg) {
  const auto dir = scratch("run");
  auto o = run_opts(cfg("reference_hocbf.cfg"), "hocbf", (dir / "h.csv").string());
  o.out_svg = (dir / "h.svg").string();
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(o, out, err), cli::kOk) << err.str();
  EXPECT_NE(out.str().find("status=Completed"), std::string::npos) << out.str();
  const auto manifest = io::parse_key_values(slurp(dir / "h.csv.manifest"));
  std::map<std::string, std::string> m;
  for (const auto& kv : manifest) m[kv.key] = kv.value;
  EXPECT_EQ(m["command"], "run");
  EXPECT_EQ(m["controller"], "hocbf");
  EXPECT_EQ(m["config_sha1"], io::git_blob_sha1(slurp(cfg("reference_hocbf.cfg"))));
  EXPECT_EQ(m["seed"], std::to_string(cli::kDefaultSeed));
  EXPECT_EQ(m["output.0"], o.out_csv);
  EXPECT_FALSE(m["started_utc"].empty());
  EXPECT_EQ(slurp(dir / "h.svg").rfind("<svg", 0), 0u);
  EXPECT_EQ(io::read_csv_file(o.out_csv).records.size(), 51u);
}

TEST(CmdRun, RepeatedRunsGiveIdenticalCsv) {
  const auto dir = scratch("repeat");
  std::ostringstream out, err;
  auto a = run_opts(cfg("reference_sp_hocbf.cfg"), "sp-hocbf", (dir / "a.csv").string());
  a.seed = 7;
  cli::RunOptions b = a;
  b.out_csv = (dir / "b.csv").string();
  ASSERT_EQ(cli::cmd_run(a, out, err), cli::kOk);
  ASSERT_EQ(cli::cmd_run(b, out, err), cli::kOk);
  EXPECT_EQ(slurp(a.out_csv), slurp(b.out_csv));
}

TEST(CmdRun, ReferenceFilteredScenarioProducesFullLog) {
  const auto dir = scratch("fcbf");
  const auto o = run_opts(cfg("reference_fcbf.cfg"), "fcbf", (dir / "f.csv").string());
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), cli::kOk) << err.str();
  const auto log = io::read_csv_file(o.out_csv);
  EXPECT_EQ(log.records.size(), 51u) << out.str();
}

TEST(CmdRun, ConfigProblemsExitOne) {
  const auto dir = scratch("badrun");
  std::ostringstream out, err;
  const auto missing = run_opts((dir / "none.cfg").string(), "fcbf", (dir / "x.csv").string());
  EXPECT_EQ(cli::cmd_run(missing, out, err), cli::kUsage);
  const auto bad = run_opts(write(dir / "bad.cfg", "gains.k1 = 0\n"), "fcbf", (dir / "x.csv").string());
  EXPECT_EQ(cli::cmd_run(bad, out, err), cli::kUsage);
  const auto unknown = run_opts(cfg("reference_fcbf.cfg"), "mpc", (dir / "x.csv").string());
  EXPECT_EQ(cli::cmd_run(unknown, out, err), cli::kUsage);
  EXPECT_FALSE(fs::exists(dir / "x.csv"));
}

TEST(CmdCompare, NeedsTwoFiles) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_compare(compare_opts({"only.csv"}), out, err), cli::kUsage);
}

TEST(CmdCompare, SchemaMismatchExitsOne) {
  const auto dir = scratch("schema");
  const auto good = write(dir / "good.csv", std::string(io::kCsvHeader) + "\n0,1,2,3,4,,,,,,,,8,9,,,\n");
  const auto bad = write(dir / "bad.csv", "t,x,y\n0,1,2\n");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_compare(compare_opts({good, bad}), out, err), cli::kUsage);
  EXPECT_NE(err.str().find("bad.csv"), std::string::npos) << err.str();
}

TEST(CmdCompare, TableAndFigureUseCsvDataOnly) {
  const auto dir = scratch("compare");
  std::ostringstream out, err;
  for (const char* c : {"hocbf", "sp-hocbf"}) {
    const std::string name = std::string(c) == "hocbf" ? "reference_hocbf.cfg" : "reference_sp_hocbf.cfg";
    ASSERT_EQ(cli::cmd_run(run_opts(cfg(name), c, (dir / (std::string(c) + ".csv")).string()), out, err), cli::kOk);
  }
  out.str("");
  auto o = compare_opts({(dir / "sp-hocbf.csv").string(), (dir / "hocbf.csv").string()});
  o.out_svg = (dir / "cmp.svg").string();
  ASSERT_EQ(cli::cmd_compare(o, out, err), cli::kOk) << err.str();
  const std::string table = out.str();
  EXPECT_LT(table.find("\nhocbf "), table.find("\nsp-hocbf ")) << table;
  const std::string svg = slurp(dir / "cmp.svg");
  // No scene is known from CSV files, so no obstacle or goal disc is drawn.
  EXPECT_EQ(svg.find("<ellipse"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "cmp.svg.manifest"));
}

TEST(CmdVerify, ShippedScenarioPasses) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(verify_opts(cfg("reference_fcbf.cfg")), out, err), cli::kOk) << out.str() << err.str();
  EXPECT_NE(out.str().find("verify.pass = true"), std::string::npos);
}

TEST(CmdVerify, StartAtGoalIsVerificationFailure) {
  const auto dir = scratch("verify_goal");
  const auto path = write(dir / "goal.cfg", "unicycle.goal_x = -3\nunicycle.goal_y = 0\n");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(verify_opts(path), out, err), cli::kVerification);
  EXPECT_NE(err.str().find("GoalSingularity"), std::string::npos) << err.str();
}

TEST(CmdVerify, InvalidGainIsConfigError) {
  const auto dir = scratch("verify_gain");
  const auto path = write(dir / "gain.cfg", "gains.k1 = 0\n");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(verify_opts(path), out, err), cli::kUsage);
}

TEST(CmdSweep, EmptyValuesOrUnknownParamExitOne) {
  const auto dir = scratch("sweep_bad");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_sweep(sweep_opts("", dir), out, err), cli::kUsage);
  EXPECT_EQ(cli::cmd_sweep(sweep_opts("1,2", dir, "k9"), out, err), cli::kUsage);
}

TEST(CmdSweep, ParallelMatchesSerial) {
  const auto serial = scratch("sweep_1"), parallel = scratch("sweep_3");
  std::ostringstream out, err;
  const std::string values = "pi/4, pi/3, 5*pi/12";
  ASSERT_EQ(cli::cmd_sweep(sweep_opts(values, serial, "theta0", cfg("reference_sp_hocbf.cfg"), 1), out, err),
            cli::kOk) << err.str();
  ASSERT_EQ(cli::cmd_sweep(sweep_opts(values, parallel, "theta0", cfg("reference_sp_hocbf.cfg"), 3), out, err),
            cli::kOk) << err.str();
  for (int i = 0; i < 3; ++i) {
    const std::string f = "theta0_" + std::to_string(i) + ".csv";
    EXPECT_EQ(slurp(serial / f), slurp(parallel / f)) << f;
  }
  for (const char* f : {"sweep_summary.csv", "sweep_report.txt", "sweep_overlay.svg", "sweep.manifest"}) {
    EXPECT_TRUE(fs::exists(parallel / f)) << f;
  }
  EXPECT_NO_THROW(io::parse_key_values(slurp(parallel / "sweep_report.txt")));
}
