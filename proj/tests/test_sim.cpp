#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fcbf/sim.hpp"
#include "oracles.hpp"

using namespace fcbf;

namespace {

ScenarioConfig reference(ControllerKind kind) {
  ScenarioConfig c;
  c.controller = kind;
  return c;
}

/// A filtered scenario that stays feasible for the whole horizon: steeper
/// initial heading and faster bound gains than the reference one.
ScenarioConfig feasible_filtered() {
  ScenarioConfig c = reference(ControllerKind::FCBF);
  c.initial_state.theta = std::numbers::pi / 3;
  c.gains.alpha.gain = 10.0;
  return c;
}

/// Far from the obstacle, already heading straight at the goal, filter at rest.
const SystemState kIdle{10.0, 0.0, std::numbers::pi, 1.0};

}  // namespace

TEST(StepFcbf, IdleIsCostMinimal) {
  const auto c = reference(ControllerKind::FCBF);
  const auto out = step_fcbf(kIdle, {0, 0}, c, 0.0);
  ASSERT_EQ(out.status, QpStatus::Optimal);
  EXPECT_NEAR((*out.record.nu)[0], 0.0, 1e-9);
  EXPECT_NEAR((*out.record.nu)[1], 0.0, 1e-9);
  EXPECT_NEAR(*out.record.delta, 0.0, 1e-9);
  EXPECT_NEAR(out.state.x, 9.9, 1e-9);
}

TEST(StepFcbf, ReferenceStepZeroIsFeasible) {
  const auto c = reference(ControllerKind::FCBF);
  const auto out = step_fcbf(c.initial_state, c.initial_uf, c, 0.0);
  EXPECT_EQ(out.status, QpStatus::Optimal) << out.diagnostic;
  if (out.status == QpStatus::Optimal) {
    EXPECT_TRUE(out.record.nu->allFinite());
    EXPECT_GE(eval_psi_chain(out.state, c.unicycle, c.gains.k1, c.gains.k2).psi0, 0.0);
  }
}

TEST(StepFcbf, ReferenceStepZeroVerdictMatchesOracle) {
  // Whatever the verdict on the reference start, the exhaustive oracle must agree.
  const auto c = reference(ControllerKind::FCBF);
  auto p = QpProblem::with_dim(kDecisionDim);
  const auto cost = build_cost(ControllerKind::FCBF, c.qp.Q, 0.0, std::nullopt);
  p.H = cost.H;
  p.f = cost.f;
  p.rows = fcbf_rows(c.initial_state, c.initial_uf, c);
  const auto sol = solve(p);
  const auto ref = oracle::brute_force_qp(p);
  EXPECT_EQ(sol.status == QpStatus::Optimal, ref.has_value());
  if (ref) {
    EXPECT_LE((sol.z - *ref).norm(), 1e-7);
  }
}

TEST(StepFcbf, TightenedUpperBoundCapsCommand) {
  auto c = reference(ControllerKind::FCBF);
  const FilteredInput uf{0.3, 0.0};
  c.input_bounds.u_max[0] = uf.uf1;
  // Heading away from the goal so the tracking term wants a large positive turn.
  const SystemState s{10.0, 0.0, std::numbers::pi - 0.5, 1.0};
  const auto out = step_fcbf(s, uf, c, 0.0);
  ASSERT_EQ(out.status, QpStatus::Optimal) << out.diagnostic;
  EXPECT_LE((*out.record.nu)[0], uf.uf1 + 1e-8);
  EXPECT_LE(out.uf.uf1, uf.uf1 + 1e-8);
}

TEST(StepFcbf, RejectsWrongController) {
  EXPECT_THROW(step_fcbf(kIdle, {0, 0}, reference(ControllerKind::HOCBF), 0.0), ConfigError);
  EXPECT_THROW(step_hocbf(kIdle, reference(ControllerKind::FCBF), std::nullopt, 0.0), ConfigError);
}

TEST(StepHocbf, IdleIsCostMinimal) {
  const auto c = reference(ControllerKind::HOCBF);
  const auto out = step_hocbf(kIdle, c, std::nullopt, 0.0);
  ASSERT_EQ(out.status, QpStatus::Optimal);
  EXPECT_NEAR((*out.record.u)[0], 0.0, 1e-9);
  EXPECT_NEAR((*out.record.u)[1], 0.0, 1e-9);
  EXPECT_NEAR(*out.record.delta, 0.0, 1e-9);
}

TEST(StepHocbf, PenaltyCentredOnOptimumKeepsOptimum) {
  const auto h = reference(ControllerKind::HOCBF);
  const auto base = step_hocbf(h.initial_state, h, std::nullopt, 0.0);
  ASSERT_EQ(base.status, QpStatus::Optimal);
  const auto sp = reference(ControllerKind::SpHOCBF);
  const auto pen = step_hocbf(sp.initial_state, sp, *base.record.u, 0.0);
  ASSERT_EQ(pen.status, QpStatus::Optimal);
  EXPECT_NEAR((*pen.record.u - *base.record.u).norm(), 0.0, 1e-7 * (1 + base.record.u->norm()));
  EXPECT_NEAR(*pen.record.delta, *base.record.delta, 1e-7);
}

TEST(StepHocbf, InputsStayInBox) {
  for (auto kind : {ControllerKind::HOCBF, ControllerKind::SpHOCBF}) {
    auto c = reference(kind);
    c.initial_state.theta = std::numbers::pi / 6;
    const auto log = run(c);
    for (const auto& r : log.records) {
      if (!r.u) continue;
      for (int k = 0; k < 2; ++k) {
        EXPECT_GE((*r.u)[k], c.input_bounds.u_min[k] - 1e-9);
        EXPECT_LE((*r.u)[k], c.input_bounds.u_max[k] + 1e-9);
      }
    }
  }
}

TEST(Run, RecordLayout) {
  const auto c = reference(ControllerKind::HOCBF);
  const auto log = run(c);
  ASSERT_EQ(log.summary.status, RunStatus::Completed) << log.summary.diagnostic;
  ASSERT_EQ(log.records.size(), 51u);
  EXPECT_EQ(log.summary.steps_completed, 50);
  for (size_t k = 0; k < log.records.size(); ++k)
    EXPECT_NEAR(log.records[k].t, 0.1 * static_cast<double>(k), 1e-12);
  EXPECT_FALSE(log.records.back().u);
  EXPECT_TRUE(log.records.back().qp_status.empty());
  EXPECT_TRUE(log.startup.all_pass());
}

TEST(Run, SummaryMatchesRecords) {
  const auto c = feasible_filtered();
  const auto log = run(c);
  ASSERT_EQ(log.summary.status, RunStatus::Completed) << log.summary.diagnostic;
  double min_b = INFINITY, cost = 0;
  Vec2 rate = Vec2::Zero();
  for (size_t k = 0; k < log.records.size(); ++k) {
    const auto& r = log.records[k];
    const double dx = r.state.x - c.unicycle.obstacle_x, dy = r.state.y - c.unicycle.obstacle_y;
    min_b = std::min(min_b, dx * dx + dy * dy - c.unicycle.obstacle_r * c.unicycle.obstacle_r);
    if (r.nu) cost += (r.nu->squaredNorm() + c.qp.Q * *r.delta * *r.delta) * c.dt;
    if (k > 0) rate = rate.cwiseMax(((*r.u - *log.records[k - 1].u) / c.dt).cwiseAbs());
  }
  EXPECT_NEAR(log.summary.min_b, min_b, 1e-12);
  EXPECT_NEAR(log.summary.cost_proxy, cost, 1e-9 * cost);
  EXPECT_NEAR((log.summary.max_rate - rate).norm(), 0.0, 1e-9);
  const auto& last = log.records.back().state;
  EXPECT_DOUBLE_EQ(log.summary.goal_distance, std::hypot(last.x - 1.5, last.y));
}

TEST(Run, FilteredStaysInBoundsAndRateLimited) {
  const auto c = feasible_filtered();
  const auto log = run(c);
  ASSERT_EQ(log.summary.status, RunStatus::Completed) << log.summary.diagnostic;
  const double a = c.gains.alpha.gain;
  for (size_t k = 0; k < log.records.size(); ++k) {
    const Vec2 uf = *log.records[k].uf;
    for (int i = 0; i < 2; ++i) {
      const double lo = c.input_bounds.u_min[i], hi = c.input_bounds.u_max[i];
      EXPECT_GE(uf[i], lo - 1e-9);
      EXPECT_LE(uf[i], hi + 1e-9);
      if (k + 1 < log.records.size()) {
        const double next = (*log.records[k + 1].uf)[i];
        const double bound = std::max(a * (uf[i] - lo), a * (hi - uf[i]));
        EXPECT_LE(std::abs(next - uf[i]) / c.dt, bound + 1e-6);
      }
    }
  }
}

TEST(Run, StopsOnInfeasibleStepAndRecordsIt) {
  // Two rows that cannot both hold: a barrier that demands a hard turn while
  // the turn-rate box is pinned at zero.
  auto c = reference(ControllerKind::HOCBF);
  c.initial_state = {-1.3, 0.0, 0.0, 2.0};
  c.input_bounds.u_min = {-1e-6, -1e-6};
  c.input_bounds.u_max = {1e-6, 1e-6};
  const auto log = run(c);
  EXPECT_EQ(log.summary.status, RunStatus::Infeasible);
  ASSERT_FALSE(log.records.empty());
  EXPECT_EQ(log.records.back().qp_status, "Infeasible");
  EXPECT_FALSE(log.records.back().u);
  EXPECT_LT(log.records.size(), 51u);
}

TEST(Run, ReplayReproducesNextState) {
  for (const auto& c : {reference(ControllerKind::HOCBF), reference(ControllerKind::SpHOCBF),
                        feasible_filtered()}) {
    const auto log = run(c);
    for (size_t k = 0; k + 1 < log.records.size(); ++k) {
      if (!log.records[k].delta) continue;
      const auto [s, uf] = replay_step(log.records[k], c);
      EXPECT_LE((s.vec() - log.records[k + 1].state.vec()).cwiseAbs().maxCoeff(), 1e-9);
      if (uf) {
        EXPECT_LE((uf->vec() - *log.records[k + 1].uf).cwiseAbs().maxCoeff(), 1e-9);
      }
    }
  }
}

TEST(Run, Deterministic) {
  const auto c = feasible_filtered();
  const auto a = run(c), b = run(c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_TRUE(a.records[k].state.vec() == b.records[k].state.vec());
    EXPECT_EQ(a.records[k].active_set, b.records[k].active_set);
  }
}

TEST(Run, HalvingDtKeepsTerminalPosition) {
  auto c = reference(ControllerKind::FCBF);
  const auto coarse = run(c);
  c.dt /= 2;
  const auto fine = run(c);
  ASSERT_EQ(coarse.summary.status, RunStatus::Completed) << coarse.summary.diagnostic;
  ASSERT_EQ(fine.summary.status, RunStatus::Completed) << fine.summary.diagnostic;
  const auto& a = coarse.records.back().state;
  const auto& b = fine.records.back().state;
  EXPECT_LE(std::hypot(a.x - b.x, a.y - b.y), 0.05);
}

TEST(Run, StepCountRoundsUp) {
  ScenarioConfig c;
  EXPECT_EQ(c.steps(), 50);
  c.horizon_T = 0.25;
  EXPECT_EQ(c.steps(), 3);
  c.dt = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}
