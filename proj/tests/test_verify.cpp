#include <gtest/gtest.h>

#include <numbers>

#include "fcbf/verify.hpp"

using namespace fcbf;

namespace {

StepRecord at(double t, double x, double y, std::optional<Vec2> u = std::nullopt) {
  StepRecord r;
  r.t = t;
  r.state = {x, y, 0.0, 1.0};
  r.u = u;
  return r;
}

TrajectoryLog hocbf_log(std::vector<StepRecord> records) {
  TrajectoryLog log;
  log.controller = ControllerKind::HOCBF;
  log.records = std::move(records);
  return log;
}

}  // namespace

TEST(DerivCheck, DefaultSuitePasses) {
  const ScenarioConfig c;
  const auto reports = derivative_suite(c, 500);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.operation << " max rel err " << r.max_rel_error;
    EXPECT_LE(r.max_rel_error, 1e-5) << r.operation;
    EXPECT_EQ(r.n_samples, 500);
  }
}

TEST(DerivCheck, CorruptedCoefficientIsCaught) {
  const ScenarioConfig c;
  for (const auto& r : derivative_suite(c, 100, 7, 1e-3)) {
    EXPECT_FALSE(r.pass) << r.operation << " max rel err " << r.max_rel_error;
  }
}

TEST(DerivCheck, ConstantScalarUsesAbsoluteError) {
  const ScenarioConfig c;
  DerivCheck flat{"flat", [](const Vec6&) { return 5.0; }, [](const Vec6&, const Vec2&) { return 0.0; },
                  [](const Vec6&, const Vec2&) { return Vec6::Zero().eval(); }};
  const auto r = fd_check_row(flat, c, 100, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_rel_error, 0.0);
}

TEST(DerivCheck, RequiresEnoughSamples) {
  const ScenarioConfig c;
  EXPECT_THROW(fd_check_row(default_deriv_checks(c)[0], c, 99, 1), std::invalid_argument);
}

TEST(DerivCheck, SeedIsRecordedAndReplays) {
  const ScenarioConfig c;
  const auto chk = default_deriv_checks(c)[1];
  const auto a = fd_check_row(chk, c, 100, 42);
  const auto b = fd_check_row(chk, c, 100, 42);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.max_rel_error, b.max_rel_error);
  EXPECT_TRUE(a.worst_sample == b.worst_sample);
}

TEST(Smoothness, ConstantInputHasZeroRate) {
  const ScenarioConfig c;
  std::vector<StepRecord> recs;
  for (int k = 0; k < 5; ++k) recs.push_back(at(0.1 * k, 3, 0, Vec2(0.5, 10)));
  const auto rep = lipschitz_estimate(hocbf_log(recs), c);
  EXPECT_EQ(rep.lipschitz_estimate, 0.0);
  EXPECT_EQ(rep.total_variation, Vec2::Zero());
}

TEST(Smoothness, SingleJumpQuotient) {
  const ScenarioConfig c;
  const auto rep = lipschitz_estimate(
      hocbf_log({at(0.0, 3, 0, Vec2(0, 0)), at(0.1, 3, 0, Vec2(1, 0)), at(0.2, 3, 0, Vec2(1, 0))}), c);
  EXPECT_NEAR(rep.lipschitz_estimate, 10.0, 1e-12);
  EXPECT_NEAR(rep.total_variation[0], 1.0, 1e-15);
  EXPECT_TRUE(rep.bound_trace.empty());
}

TEST(Smoothness, FilteredBoundTrace) {
  ScenarioConfig c;
  c.gains.alpha.gain = 2.0;
  TrajectoryLog log;
  log.controller = ControllerKind::FCBF;
  log.records = {at(0.0, 3, 0, Vec2(1, 0)), at(0.1, 3, 0, Vec2(1.5, 0))};
  const auto rep = lipschitz_estimate(log, c);
  ASSERT_EQ(rep.bound_trace.size(), 1u);
  // max(2 (1 + 5), 2 (5 - 1)) and max(2 * 5M, 2 * 5M)
  EXPECT_DOUBLE_EQ(rep.bound_trace[0][0], 12.0);
  EXPECT_DOUBLE_EQ(rep.bound_trace[0][1], 2 * 5 * 1650.0);
  EXPECT_TRUE(rep.bound_holds);
  log.records[1].u = Vec2(1 + 0.1 * 12.0 + 1e-3, 0);
  EXPECT_FALSE(lipschitz_estimate(log, c).bound_holds);
}

TEST(Smoothness, BoundHoldsOnFeasibleFilteredRun) {
  ScenarioConfig c;
  c.initial_state.theta = std::numbers::pi / 3;
  c.gains.alpha.gain = 10.0;
  const auto log = run(c);
  ASSERT_EQ(log.summary.status, RunStatus::Completed);
  const auto rep = lipschitz_estimate(log, c);
  EXPECT_TRUE(rep.bound_holds);
  EXPECT_EQ(rep.bound_trace.size(), 50u);
}

TEST(Safety, FixedDistance) {
  const UnicycleParams p;
  std::vector<StepRecord> recs;
  for (int k = 0; k < 8; ++k) {
    const double a = k * std::numbers::pi / 4;
    recs.push_back(at(0.1 * k, 3 * std::cos(a), 3 * std::sin(a)));
  }
  const auto rep = safety_report(hocbf_log(recs), p, ClassKLinear{10});
  EXPECT_NEAR(rep.min_b, 8.0, 1e-12);
  EXPECT_FALSE(rep.first_violation_time);
}

TEST(Safety, FirstViolationTime) {
  const UnicycleParams p;
  const auto rep = safety_report(
      hocbf_log({at(0.0, -2, 0), at(0.1, -1.2, 0), at(0.2, -0.9, 0), at(0.3, -0.5, 0), at(0.4, 2, 0)}),
      p, ClassKLinear{10});
  ASSERT_TRUE(rep.first_violation_time);
  EXPECT_DOUBLE_EQ(*rep.first_violation_time, 0.2);
  EXPECT_NEAR(rep.min_b, 0.25 - 1.0, 1e-12);
  // heading +x at 1 m/s from (-2, 0): psi1 = 2 (-2) + 10 * 3
  EXPECT_LE(rep.min_psi1, 2 * (-0.5) + 10 * (0.25 - 1.0) + 1e-12);
}

TEST(Compare, IdenticalLogsHaveZeroDeltas) {
  ScenarioConfig c;
  c.controller = ControllerKind::HOCBF;
  const auto log = run(c);
  const auto rows = compare_controllers({{"a", log}, {"b", log}}, c.unicycle);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(max_abs_delta(rows[0], rows[1]), 0.0);
}

TEST(Compare, OrderIndependent) {
  ScenarioConfig h;
  h.controller = ControllerKind::HOCBF;
  ScenarioConfig s = h;
  s.controller = ControllerKind::SpHOCBF;
  const auto lh = run(h), ls = run(s);
  std::map<std::string, TrajectoryLog> m1, m2;
  m1.emplace("hocbf", lh);
  m1.emplace("sp-hocbf", ls);
  m2.emplace("sp-hocbf", ls);
  m2.emplace("hocbf", lh);
  const auto r1 = compare_controllers(m1, h.unicycle), r2 = compare_controllers(m2, h.unicycle);
  ASSERT_EQ(r1.size(), r2.size());
  for (size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].name, r2[i].name);
    EXPECT_EQ(max_abs_delta(r1[i], r2[i]), 0.0);
  }
  EXPECT_EQ(r1[0].name, "hocbf");
  EXPECT_EQ(r1[0].max_rate, lh.summary.max_rate);
  EXPECT_THROW(compare_controllers({{"only", lh}}, h.unicycle), std::invalid_argument);
}
