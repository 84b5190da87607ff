#pragma once
// Post-hoc analyzers: finite-difference certification of the closed-form rates
// used in the QP rows, smoothness/Lipschitz estimates, safety margins and
// cross-controller comparison tables.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fcbf/cbf_constraints.hpp"
#include "fcbf/integrate.hpp"
#include "fcbf/model.hpp"
#include "fcbf/sim.hpp"

namespace fcbf {

// ---------------------------------------------------------------------------
// Derivative certification

/// A scalar of the augmented point z = (x, y, theta, v, w1, w2), the closed-form
/// rate claimed for it under a held command, and the flow that rate refers to.
/// For the unfiltered benchmark w is the held input u and the flow leaves it
/// unchanged; for the filtered controller w is uf and the command is nu.
struct DerivCheck {
  std::string name;
  std::function<double(const Vec6&)> scalar;
  std::function<double(const Vec6&, const Vec2&)> analytic_rate;
  std::function<Vec6(const Vec6&, const Vec2&)> flow;
};

struct DerivCheckReport {
  std::string operation;
  double max_rel_error = 0.0;
  Eigen::VectorXd worst_sample;  // (z, command) at the worst error
  double threshold = 1e-5;
  int n_samples = 0;
  std::uint64_t seed = 0;
  bool pass = false;
};

struct DerivCheckOptions {
  double threshold = 1e-5;
  double step = 1e-5;            // finite-difference time step (s)
  double absolute_below = 1e-8;  // switch to absolute error under this rate magnitude
};

namespace verify_detail {

inline Vec6 flow_point(const DerivCheck& c, const Vec6& z0, const Vec2& cmd, double t) {
  if (t == 0.0) return z0;
  const double dir = t > 0 ? 1.0 : -1.0;
  auto field = [&](double, const Vec6& z) -> Vec6 { return dir * c.flow(z, cmd); };
  IntegratorOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-15;
  return integrate(field, z0, 0.0, std::abs(t), opts);
}

/// Random point well inside the safe set and away from the goal, with the
/// filter state and command spanning the input box.
inline std::pair<Vec6, Vec2> sample(std::mt19937_64& rng, const ScenarioConfig& c) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto& p = c.unicycle;
  const auto& bd = c.input_bounds;
  auto in_box = [&](int i) {
    return 0.5 * (bd.u_min[i] + bd.u_max[i]) + 0.5 * (bd.u_max[i] - bd.u_min[i]) * U(rng);
  };
  while (true) {
    const double x = p.obstacle_x + 4.0 * U(rng);
    const double y = p.obstacle_y + 4.0 * U(rng);
    const double dx = x - p.obstacle_x, dy = y - p.obstacle_y;
    if (dx * dx + dy * dy < 1.2 * p.obstacle_r * p.obstacle_r) continue;
    if (std::hypot(x - p.goal_x, y - p.goal_y) < 0.1) continue;
    Vec6 z;
    z << x, y, std::numbers::pi * U(rng), 1.5 + 1.5 * U(rng), in_box(0), in_box(1);
    return {z, Vec2(in_box(0), in_box(1))};
  }
}

}  // namespace verify_detail

/// Compare the closed-form rate against a 5-point central difference of the
/// scalar along the integrated flow at n_samples seeded random points.
inline DerivCheckReport fd_check_row(const DerivCheck& check, const ScenarioConfig& config,
                                     int n_samples, std::uint64_t seed,
                                     const DerivCheckOptions& opts = {}) {
  if (n_samples < 100) throw std::invalid_argument("fd_check_row: n_samples must be >= 100");
  DerivCheckReport rep;
  rep.operation = check.name;
  rep.threshold = opts.threshold;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.worst_sample = Eigen::VectorXd::Zero(8);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_samples; ++k) {
    const auto [z, cmd] = verify_detail::sample(rng, config);
    const double h = opts.step;
    auto g = [&](double t) { return check.scalar(verify_detail::flow_point(check, z, cmd, t)); };
    const double fd = (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h);
    const double an = check.analytic_rate(z, cmd);
    const double denom = std::abs(fd) < opts.absolute_below ? 1.0 : std::abs(fd);
    const double err = std::abs(an - fd) / denom;
    if (!(err <= rep.max_rel_error)) {
      rep.max_rel_error = std::isfinite(err) ? err : INFINITY;
      rep.worst_sample << z, cmd;
    }
  }
  rep.pass = rep.max_rel_error <= opts.threshold;
  return rep;
}

/// The closed forms used by the controllers. `mutation` perturbs the first
/// command coefficient of each row by that relative amount, which the check
/// must then reject.
inline std::vector<DerivCheck> default_deriv_checks(const ScenarioConfig& c, double mutation = 0.0) {
  const auto& p = c.unicycle;
  const auto& g = c.gains;
  const auto fp = c.filter;
  auto filtered_flow = [p, fp](const Vec6& z, const Vec2& nu) {
    return augmented_deriv(state_of(z), input_of(z), AuxInput::from(nu), p, fp);
  };
  auto held_flow = [p](const Vec6& z, const Vec2&) {
    Vec6 d = Vec6::Zero();
    d.head<4>() = unicycle_deriv(state_of(z), input_of(z), p);
    return d;
  };
  // Rows are affine in the decision vector; with delta = 0 the row value
  // coeffs . (cmd, 0) - rhs is the certified rate plus the class-K term.
  auto rate_of = [mutation](const ConstraintRow& row, const Vec2& cmd) {
    Vec2 a = row.coeffs.head<2>();
    a[0] += mutation * std::max(1.0, std::abs(a[0]));
    return a.dot(cmd) - row.rhs;
  };

  std::vector<DerivCheck> checks;
  checks.push_back(
      {"psi0_dot",
       [p](const Vec6& z) {
         const auto s = state_of(z);
         const double dx = s.x - p.obstacle_x, dy = s.y - p.obstacle_y;
         return dx * dx + dy * dy - p.obstacle_r * p.obstacle_r;
       },
       [p, g, mutation](const Vec6& z, const Vec2&) {
         const double d = eval_psi_chain(state_of(z), p, g.k1, g.k2).psi0_dot;
         return d + mutation * std::max(1.0, std::abs(d));
       },
       held_flow});
  checks.push_back(
      {"fcbf_row",
       [p, g](const Vec6& z) {
         const auto uf = input_of(z);
         return eval_psi_chain(state_of(z), p, g.k1, g.k2).psi2(uf.uf1, uf.uf2);
       },
       [p, g, fp, rate_of](const Vec6& z, const Vec2& nu) {
         const auto s = state_of(z);
         const auto uf = input_of(z);
         const auto row = fcbf_row(s, uf, p, fp, g.k1, g.k2, g.k3);
         return rate_of(row, nu) - g.k3(eval_psi_chain(s, p, g.k1, g.k2).psi2(uf.uf1, uf.uf2));
       },
       filtered_flow});
  checks.push_back({"clf_row_fcbf",
                    [p](const Vec6& z) {
                      const double s = clf_sliding_variable(state_of(z), input_of(z), p);
                      return s * s;
                    },
                    [p, g, fp, rate_of](const Vec6& z, const Vec2& nu) {
                      const auto s = state_of(z);
                      const auto uf = input_of(z);
                      const double sv = clf_sliding_variable(s, uf, p);
                      return rate_of(clf_row_fcbf(s, uf, p, fp, g.c3), nu) - g.c3 * sv * sv;
                    },
                    filtered_flow});
  checks.push_back({"clf_row_hocbf",
                    [p](const Vec6& z) {
                      const auto s = state_of(z);
                      const double e = s.theta - goal_heading(s, p).theta_d;
                      return e * e;
                    },
                    [p, g, rate_of](const Vec6& z, const Vec2&) {
                      const auto s = state_of(z);
                      const double e = s.theta - goal_heading(s, p).theta_d;
                      return rate_of(clf_row_hocbf(s, p, g.c3), input_of(z).vec()) - g.c3 * e * e;
                    },
                    held_flow});
  return checks;
}

inline std::vector<DerivCheckReport> derivative_suite(const ScenarioConfig& c, int n_samples = 500,
                                                      std::uint64_t seed = 20240601,
                                                      double mutation = 0.0) {
  std::vector<DerivCheckReport> out;
  std::uint64_t s = seed;
  for (const auto& chk : default_deriv_checks(c, mutation)) out.push_back(fd_check_row(chk, c, n_samples, s++));
  return out;
}

// ---------------------------------------------------------------------------
// Smoothness

struct SmoothnessReport {
  Vec2 max_rate = Vec2::Zero();         // max |du| / dt per channel
  Vec2 total_variation = Vec2::Zero();  // sum |du| per channel
  double lipschitz_estimate = 0.0;      // max over channels of max_rate
  std::vector<Vec2> bound_trace;        // filtered logs: rate bound at each step start
  std::vector<Vec2> observed_rate;      // per step, aligned with bound_trace when present
  bool bound_holds = true;              // every observed rate within its bound + slack
};

/// Rates of the applied input between consecutive records. For filtered logs
/// also the pointwise rate bound max(alpha (uf - u_min), alpha (u_max - uf)) at
/// each step start and whether every step respects it (slack 1e-6).
inline SmoothnessReport lipschitz_estimate(const TrajectoryLog& log, const ScenarioConfig& c) {
  SmoothnessReport rep;
  const StepRecord* prev = nullptr;
  const bool filtered = log.controller == ControllerKind::FCBF;
  for (const auto& r : log.records) {
    if (!r.u) continue;
    if (prev) {
      const Vec2 du = (*r.u - *prev->u).cwiseAbs();
      const Vec2 rate = du / (r.t - prev->t);
      rep.max_rate = rep.max_rate.cwiseMax(rate);
      rep.total_variation += du;
      rep.observed_rate.push_back(rate);
      if (filtered) {
        Vec2 bound;
        for (int i = 0; i < 2; ++i) {
          const double uf = (*prev->u)[i];
          bound[i] = std::max(c.gains.alpha(uf - c.input_bounds.u_min[i]),
                              c.gains.alpha(c.input_bounds.u_max[i] - uf));
          if (rate[i] > bound[i] + 1e-6) rep.bound_holds = false;
        }
        rep.bound_trace.push_back(bound);
      }
    }
    prev = &r;
  }
  rep.lipschitz_estimate = rep.max_rate.maxCoeff();
  return rep;
}

// ---------------------------------------------------------------------------
// Safety

struct SafetyReport {
  double min_b = INFINITY;
  double min_psi1 = INFINITY;
  std::optional<double> first_violation_time;  // first sample with b < -tolerance
};

/// Barrier values recomputed from the logged states, one per sample.
inline SafetyReport safety_report(const TrajectoryLog& log, const UnicycleParams& p,
                                  const ClassKLinear& k1, double tolerance = 0.0) {
  SafetyReport rep;
  for (const auto& r : log.records) {
    const double dx = r.state.x - p.obstacle_x, dy = r.state.y - p.obstacle_y;
    const double b = dx * dx + dy * dy - p.obstacle_r * p.obstacle_r;
    const double bdot = 2.0 * r.state.v * (dx * std::cos(r.state.theta) + dy * std::sin(r.state.theta));
    rep.min_b = std::min(rep.min_b, b);
    rep.min_psi1 = std::min(rep.min_psi1, bdot + k1(b));
    if (!rep.first_violation_time && b < -tolerance) rep.first_violation_time = r.t;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Comparison

struct ComparisonRow {
  std::string name;
  std::string status;
  int steps = 0;
  double min_b = 0.0;
  double goal_distance = 0.0;
  Vec2 max_rate = Vec2::Zero();
  double mean_solve_time = 0.0;
};

/// Largest absolute difference between the numeric columns of two rows.
inline double max_abs_delta(const ComparisonRow& a, const ComparisonRow& b) {
  double d = std::abs(a.min_b - b.min_b);
  d = std::max(d, std::abs(a.goal_distance - b.goal_distance));
  d = std::max(d, (a.max_rate - b.max_rate).cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(a.mean_solve_time - b.mean_solve_time));
  d = std::max(d, static_cast<double>(std::abs(a.steps - b.steps)));
  return d;
}

inline ComparisonRow comparison_row(const std::string& name, const TrajectoryLog& log,
                                    const UnicycleParams& p) {
  ComparisonRow row;
  row.name = name;
  row.status = to_string(log.summary.status);
  const auto safety = safety_report(log, p, ClassKLinear{1.0});
  row.min_b = safety.min_b;
  if (!log.records.empty()) {
    const auto& s = log.records.back().state;
    row.goal_distance = std::hypot(s.x - p.goal_x, s.y - p.goal_y);
  }
  int solves = 0;
  double total = 0.0;
  const StepRecord* prev = nullptr;
  for (const auto& r : log.records) {
    if (r.delta) ++row.steps;
    if (r.solve_time) {
      ++solves;
      total += *r.solve_time;
    }
    if (!r.u) continue;
    if (prev) row.max_rate = row.max_rate.cwiseMax((*r.u - *prev->u).cwiseAbs() / (r.t - prev->t));
    prev = &r;
  }
  row.mean_solve_time = solves ? total / solves : 0.0;
  return row;
}

/// One row per named log, ordered by name, so the table does not depend on the
/// order in which logs were supplied.
inline std::vector<ComparisonRow> compare_controllers(const std::map<std::string, TrajectoryLog>& logs,
                                                      const UnicycleParams& p) {
  if (logs.size() < 2) throw std::invalid_argument("compare_controllers needs at least two logs");
  std::vector<ComparisonRow> rows;
  for (const auto& [name, log] : logs) rows.push_back(comparison_row(name, log, p));
  return rows;
}

}  // namespace fcbf
