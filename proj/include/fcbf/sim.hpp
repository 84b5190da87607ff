#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fcbf/cbf_constraints.hpp"
#include "fcbf/integrate.hpp"
#include "fcbf/log.hpp"
#include "fcbf/model.hpp"
#include "fcbf/qp.hpp"

namespace fcbf {

struct QpSettings {
  double Q = 1e5;
  /// Weight of the consecutive-input penalty; only the sp-HOCBF controller uses it.
  double smoothness_weight = 0.1;
};

/// Everything one closed-loop run needs. Defaults are the reference obstacle
/// scenario: start at (-3, 0) heading pi/12 at 2 m/s, unit obstacle at the
/// origin, goal at (1.5, 0).
struct ScenarioConfig {
  double dt = 0.1;
  double horizon_T = 5.0;
  SystemState initial_state{-3.0, 0.0, std::numbers::pi / 12.0, 2.0};
  FilteredInput initial_uf{0.0, 0.0};
  ControllerKind controller = ControllerKind::FCBF;
  Gains gains;
  QpSettings qp;
  FilterParams filter;
  UnicycleParams unicycle;
  InputBounds input_bounds;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
    if (!(horizon_T >= dt) || !std::isfinite(horizon_T)) throw ConfigError("horizon_T must be >= dt");
    if (!initial_state.finite()) throw ConfigError("initial_state must be finite");
    if (!std::isfinite(initial_uf.uf1) || !std::isfinite(initial_uf.uf2))
      throw ConfigError("initial_uf must be finite");
    gains.validate();
    if (!(qp.Q > 0.0)) throw ConfigError("qp.Q must be > 0");
    if (!(qp.smoothness_weight >= 0.0)) throw ConfigError("qp.smoothness_weight must be >= 0");
    filter.validate();
    unicycle.validate();
    input_bounds.validate();
  }

  [[nodiscard]] int steps() const {
    // Guard against T/dt landing a hair above an integer.
    return static_cast<int>(std::ceil(horizon_T / dt - 1e-9));
  }
};

/// One log line. Control-related fields are empty on the terminal record and
/// on the record of a step whose QP failed.
struct StepRecord {
  double t = 0.0;
  SystemState state;
  std::optional<Vec2> u;   // input applied to the vehicle (uf for the filtered controller)
  std::optional<Vec2> uf;  // filter state, filtered controller only
  std::optional<Vec2> nu;  // filter command, filtered controller only
  std::optional<double> delta;
  double b = 0.0;
  double psi1 = 0.0;
  std::optional<double> psi2;
  std::string qp_status;  // empty when no QP was solved
  std::vector<int> active_set;
  std::optional<double> solve_time;
};

enum class RunStatus { Completed, Infeasible, SolverFailure, IntegrationFailure };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::SolverFailure: return "SolverFailure";
    case RunStatus::IntegrationFailure: return "IntegrationFailure";
  }
  return "?";
}

struct RunSummary {
  RunStatus status = RunStatus::Completed;
  int steps_completed = 0;
  double min_b = 0.0;
  double min_psi1 = 0.0;
  Vec2 max_rate = Vec2::Zero();  // max |du/dt| per channel over consecutive records
  double goal_distance = 0.0;
  double cost_proxy = 0.0;  // sum (|input|^2 + Q delta^2) dt
  double mean_solve_time = 0.0;
  std::string diagnostic;
};

struct TrajectoryLog {
  ControllerKind controller = ControllerKind::FCBF;
  std::vector<StepRecord> records;
  StartupReport startup;
  RunSummary summary;
};

struct StepOutcome {
  SystemState state;
  FilteredInput uf;
  StepRecord record;
  QpStatus status = QpStatus::Optimal;
  std::string diagnostic;
};

namespace sim_detail {

inline void fill_barrier(StepRecord& r, const ScenarioConfig& c) {
  const auto chain = eval_psi_chain(r.state, c.unicycle, c.gains.k1, c.gains.k2);
  r.b = chain.psi0;
  r.psi1 = chain.psi1;
  if (r.u) r.psi2 = chain.psi2((*r.u)[0], (*r.u)[1]);
}

inline QpProblem assemble(const QpCost& cost, std::vector<ConstraintRow> rows) {
  auto p = QpProblem::with_dim(kDecisionDim);
  p.H = cost.H;
  p.f = cost.f;
  p.rows = std::move(rows);
  return p;
}

}  // namespace sim_detail

/// Advance the filtered vehicle by one control period: solve for (nu, delta),
/// hold nu over [t, t + dt] and integrate vehicle and filter together.
inline Vec6 advance_filtered(const SystemState& s, const FilteredInput& uf, const AuxInput& nu,
                             const ScenarioConfig& c, double t0, double t1) {
  auto field = [&](double, const Vec6& z) {
    return augmented_deriv(state_of(z), input_of(z), nu, c.unicycle, c.filter);
  };
  return integrate(field, pack(s, uf), t0, t1);
}

/// Advance the unfiltered vehicle with u held over [t0, t1].
inline Vec4 advance_direct(const SystemState& s, const Vec2& u, const ScenarioConfig& c, double t0,
                           double t1) {
  const FilteredInput held = FilteredInput::from(u);
  auto field = [&](double, const Vec4& z) {
    return unicycle_deriv(SystemState::from(z), held, c.unicycle);
  };
  return integrate(field, s.vec(), t0, t1);
}

inline std::vector<ConstraintRow> fcbf_rows(const SystemState& s, const FilteredInput& uf,
                                            const ScenarioConfig& c) {
  std::vector<ConstraintRow> rows;
  rows.push_back(fcbf_row(s, uf, c.unicycle, c.filter, c.gains.k1, c.gains.k2, c.gains.k3));
  for (auto& r : input_bound_rows(uf, c.filter, c.input_bounds, c.gains.alpha, c.gains.alpha))
    rows.push_back(std::move(r));
  rows.push_back(clf_row_fcbf(s, uf, c.unicycle, c.filter, c.gains.c3));
  return rows;
}

inline StepOutcome step_fcbf(const SystemState& s, const FilteredInput& uf,
                             const ScenarioConfig& c, double t, QpWarmStart* warm = nullptr) {
  if (c.controller != ControllerKind::FCBF) throw ConfigError("step_fcbf requires the FCBF controller");
  StepOutcome out;
  out.record.t = t;
  out.record.state = s;
  out.record.uf = uf.vec();
  out.record.u = uf.vec();
  sim_detail::fill_barrier(out.record, c);

  const auto cost = build_cost(ControllerKind::FCBF, c.qp.Q, 0.0, std::nullopt);
  const auto sol = solve(sim_detail::assemble(cost, fcbf_rows(s, uf, c)), {}, warm);
  out.status = sol.status;
  out.diagnostic = sol.diagnostic;
  out.record.qp_status = to_string(sol.status);
  out.record.active_set = sol.active_set;
  out.record.solve_time = sol.solve_time;
  if (sol.status != QpStatus::Optimal) {
    out.state = s;
    out.uf = uf;
    return out;
  }
  const AuxInput nu{sol.z[kIn1], sol.z[kIn2]};
  out.record.nu = nu.vec();
  out.record.delta = sol.z[kDelta];
  const Vec6 next = advance_filtered(s, uf, nu, c, t, t + c.dt);
  out.state = state_of(next);
  out.uf = input_of(next);
  return out;
}

inline std::vector<ConstraintRow> hocbf_rows(const SystemState& s, const ScenarioConfig& c) {
  return {hocbf_row(s, {}, c.unicycle, c.gains.k1, c.gains.k2),
          clf_row_hocbf(s, c.unicycle, c.gains.c3)};
}

/// Unfiltered benchmark step: the QP picks u directly within the box bounds.
inline StepOutcome step_hocbf(const SystemState& s, const ScenarioConfig& c,
                              const std::optional<Vec2>& prev_u, double t,
                              QpWarmStart* warm = nullptr) {
  if (c.controller == ControllerKind::FCBF) throw ConfigError("step_hocbf requires an HOCBF controller");
  const double weight = c.controller == ControllerKind::SpHOCBF ? c.qp.smoothness_weight : 0.0;
  // The first penalized step measures the change from the configured initial input.
  const Vec2 prev = prev_u.value_or(c.initial_uf.vec());

  StepOutcome out;
  out.record.t = t;
  out.record.state = s;
  const auto cost = build_cost(c.controller, c.qp.Q, weight, prev);
  auto problem = sim_detail::assemble(cost, hocbf_rows(s, c));
  problem.lb[kIn1] = c.input_bounds.u_min[0];
  problem.lb[kIn2] = c.input_bounds.u_min[1];
  problem.ub[kIn1] = c.input_bounds.u_max[0];
  problem.ub[kIn2] = c.input_bounds.u_max[1];
  const auto sol = solve(problem, {}, warm);
  out.status = sol.status;
  out.diagnostic = sol.diagnostic;
  out.record.qp_status = to_string(sol.status);
  out.record.active_set = sol.active_set;
  out.record.solve_time = sol.solve_time;
  if (sol.status != QpStatus::Optimal) {
    sim_detail::fill_barrier(out.record, c);
    out.state = s;
    return out;
  }
  const Vec2 u(sol.z[kIn1], sol.z[kIn2]);
  out.record.u = u;
  out.record.delta = sol.z[kDelta];
  sim_detail::fill_barrier(out.record, c);
  out.state = SystemState::from(advance_direct(s, u, c, t, t + c.dt));
  return out;
}

/// Recompute the summary metrics from the records.
inline RunSummary summarize(const std::vector<StepRecord>& records, const ScenarioConfig& c,
                            RunStatus status, std::string diagnostic = {}) {
  RunSummary s;
  s.status = status;
  s.diagnostic = std::move(diagnostic);
  if (records.empty()) return s;
  s.min_b = records.front().b;
  s.min_psi1 = records.front().psi1;
  int solves = 0;
  double solve_total = 0.0;
  const StepRecord* prev_with_u = nullptr;
  for (const auto& r : records) {
    s.min_b = std::min(s.min_b, r.b);
    s.min_psi1 = std::min(s.min_psi1, r.psi1);
    if (r.delta) {
      ++s.steps_completed;
      const Vec2 effort = r.nu ? *r.nu : *r.u;
      s.cost_proxy += (effort.squaredNorm() + c.qp.Q * (*r.delta) * (*r.delta)) * c.dt;
    }
    if (r.solve_time) {
      ++solves;
      solve_total += *r.solve_time;
    }
    if (r.u) {
      if (prev_with_u) {
        const Vec2 rate = (*r.u - *prev_with_u->u).cwiseAbs() / (r.t - prev_with_u->t);
        s.max_rate = s.max_rate.cwiseMax(rate);
      }
      prev_with_u = &r;
    }
  }
  const auto& last = records.back();
  s.goal_distance = std::hypot(last.state.x - c.unicycle.goal_x, last.state.y - c.unicycle.goal_y);
  s.mean_solve_time = solves ? solve_total / solves : 0.0;
  return s;
}

/// Closed-loop run over ceil(T / dt) control periods. Stops at the first step
/// whose QP is not solved to optimality and records it.
inline TrajectoryLog run(const ScenarioConfig& c) {
  c.validate();
  TrajectoryLog log;
  log.controller = c.controller;
  log.startup = startup_check(c.initial_state, c.initial_uf, c.unicycle, c.gains, c.input_bounds);
  for (const auto& chk : log.startup.checks) {
    if (!chk.pass) logger().warn("startup_check: {} = {} < 0; continuing", chk.name, chk.value);
  }

  const int n = c.steps();
  SystemState s = c.initial_state;
  FilteredInput uf = c.initial_uf;
  std::optional<Vec2> prev_u;
  QpWarmStart warm;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;

  for (int k = 0; k < n; ++k) {
    const double t = k * c.dt;
    StepOutcome out;
    try {
      out = c.controller == ControllerKind::FCBF ? step_fcbf(s, uf, c, t, &warm)
                                                 : step_hocbf(s, c, prev_u, t, &warm);
    } catch (const StepSizeUnderflow& e) {
      status = RunStatus::IntegrationFailure;
      diagnostic = e.what();
      break;
    } catch (const GoalSingularity& e) {
      status = RunStatus::SolverFailure;
      diagnostic = e.what();
      break;
    }
    log.records.push_back(out.record);
    if (out.status != QpStatus::Optimal) {
      status = out.status == QpStatus::Infeasible ? RunStatus::Infeasible : RunStatus::SolverFailure;
      diagnostic = "t=" + std::to_string(t) + ": " + out.diagnostic;
      logger().info("run stopped at step {}: {}", k, diagnostic);
      break;
    }
    s = out.state;
    uf = out.uf;
    if (out.record.u) prev_u = out.record.u;
    if (!s.finite()) {
      status = RunStatus::IntegrationFailure;
      diagnostic = "non-finite state";
      break;
    }
  }

  if (status == RunStatus::Completed) {
    StepRecord last;
    last.t = n * c.dt;
    last.state = s;
    if (c.controller == ControllerKind::FCBF) {
      last.uf = uf.vec();
      last.u = uf.vec();
    }
    sim_detail::fill_barrier(last, c);
    log.records.push_back(last);
  }
  log.summary = summarize(log.records, c, status, diagnostic);
  return log;
}

/// Re-integrate record k from its logged state and inputs; returns the
/// predicted (state, uf) at record k + 1.
inline std::pair<SystemState, std::optional<FilteredInput>> replay_step(const StepRecord& r,
                                                                        const ScenarioConfig& c) {
  if (!r.delta) throw std::invalid_argument("replay_step: record has no applied control");
  if (r.nu) {
    const Vec6 next = advance_filtered(r.state, FilteredInput::from(*r.uf), AuxInput::from(*r.nu),
                                       c, r.t, r.t + c.dt);
    return {state_of(next), input_of(next)};
  }
  return {SystemState::from(advance_direct(r.state, *r.u, c, r.t, r.t + c.dt)), std::nullopt};
}

}  // namespace fcbf
