#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fcbf/errors.hpp"
#include "fcbf/log.hpp"
#include "fcbf/model.hpp"

namespace fcbf {

/// Linear class-kappa function alpha(s) = gain * s.
struct ClassKLinear {
  double gain = 1.0;

  [[nodiscard]] double operator()(double s) const { return gain * s; }

  /// Strict class-kappa needs a positive slope.
  void validate(const std::string& name) const {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
      throw ConfigError(name + " must be a finite gain > 0 (strict class-kappa)");
    }
  }
};

/// Gains shared by the barrier chains, the bound rows and the Lyapunov row.
/// `alpha` is used for every k^min / k^max of the input bound barriers.
struct Gains {
  ClassKLinear k1{10.0};
  ClassKLinear k2{10.0};
  ClassKLinear k3{1.0};
  ClassKLinear alpha{1.0};
  double c3 = 10.0;

  void validate() const {
    k1.validate("gains.k1");
    k2.validate("gains.k2");
    k3.validate("gains.k3");
    alpha.validate("gains.alpha");
    if (!(c3 > 0.0) || !std::isfinite(c3)) throw ConfigError("gains.c3 must be > 0");
  }
};

struct InputBounds {
  Vec2 u_min{-5.0, -5.0 * 1650.0};
  Vec2 u_max{5.0, 5.0 * 1650.0};

  void validate() const {
    for (int i = 0; i < 2; ++i) {
      if (!std::isfinite(u_min[i]) || !std::isfinite(u_max[i])) {
        throw ConfigError("input bounds must be finite");
      }
      if (!(u_min[i] < u_max[i])) throw ConfigError("input bounds require u_min < u_max");
    }
  }
};

// Decision vector layouts. FCBF: [nu1, nu2, delta]; HOCBF / sp-HOCBF: [u1, u2, delta].
inline constexpr int kDecisionDim = 3;
inline constexpr int kIn1 = 0;
inline constexpr int kIn2 = 1;
inline constexpr int kDelta = 2;

enum class Sense { GE, LE };

/// One affine inequality `coeffs . z (>= | <=) rhs` over the QP decision vector.
struct ConstraintRow {
  Eigen::VectorXd coeffs;
  double rhs = 0.0;
  Sense sense = Sense::GE;

  /// Signed satisfaction margin; nonnegative iff z satisfies the row.
  [[nodiscard]] double margin(const Eigen::VectorXd& z) const {
    const double lhs = coeffs.dot(z);
    return sense == Sense::GE ? lhs - rhs : rhs - lhs;
  }
};

/// Values of the obstacle barrier chain at (state, input).
/// psi2(u) = psi2_const + psi2_coeff_u1 * u1 + psi2_coeff_u2 * u2.
struct PsiChainValues {
  double psi0 = 0.0;
  double psi0_dot = 0.0;
  double psi1 = 0.0;
  double psi2_const = 0.0;
  double psi2_coeff_u1 = 0.0;
  double psi2_coeff_u2 = 0.0;

  [[nodiscard]] double psi2(double u1, double u2) const {
    return psi2_const + psi2_coeff_u1 * u1 + psi2_coeff_u2 * u2;
  }
};

namespace detail {

// Obstacle-relative geometry. `along` is the offset projected on the heading,
// `lateral` the offset projected on the heading's left normal (sign flipped).
struct ObstacleGeometry {
  double dx, dy, c, s, along, lateral;
};

inline ObstacleGeometry geometry(const SystemState& st, const UnicycleParams& p) {
  ObstacleGeometry g{};
  g.dx = st.x - p.obstacle_x;
  g.dy = st.y - p.obstacle_y;
  g.c = std::cos(st.theta);
  g.s = std::sin(st.theta);
  g.along = g.dx * g.c + g.dy * g.s;
  g.lateral = g.dy * g.c - g.dx * g.s;
  return g;
}

}  // namespace detail

/// Barrier chain for the circular obstacle:
///   psi0 = |p - p_o|^2 - r_o^2, psi1 = psi0' + k1 psi0, psi2 = psi1' + k2 psi1.
/// psi2 is affine in the input: heading rate enters through 2 v lateral, force
/// through 2 along / M.
inline PsiChainValues eval_psi_chain(const SystemState& st, const UnicycleParams& p,
                                     const ClassKLinear& k1, const ClassKLinear& k2) {
  const auto g = detail::geometry(st, p);
  PsiChainValues out;
  out.psi0 = g.dx * g.dx + g.dy * g.dy - p.obstacle_r * p.obstacle_r;
  out.psi0_dot = 2.0 * st.v * g.along;
  out.psi1 = out.psi0_dot + k1(out.psi0);
  // psi1' = psi0'' + k1 psi0', psi0'' = 2 v^2 + 2 v lateral u1 + 2 along u2 / M
  out.psi2_const = 2.0 * st.v * st.v + k1(out.psi0_dot) + k2(out.psi1);
  out.psi2_coeff_u1 = 2.0 * st.v * g.lateral;
  out.psi2_coeff_u2 = 2.0 * g.along / p.mass_M;
  return out;
}

/// Same chain; the input argument is accepted for call-site symmetry with the
/// filtered variants and does not change psi0..psi1.
inline PsiChainValues eval_psi_chain(const SystemState& st, const FilteredInput& /*uf*/,
                                     const UnicycleParams& p, const ClassKLinear& k1,
                                     const ClassKLinear& k2) {
  return eval_psi_chain(st, p, k1, k2);
}

/// Time derivative of psi2(x, uf) along the augmented flow, split into the part
/// driven by the vehicle state and the gradient with respect to uf:
///   d/dt psi2 = drift + input_grad . uf_dot
struct Psi2Rate {
  double drift = 0.0;
  Vec2 input_grad = Vec2::Zero();
};

inline Psi2Rate psi2_rate(const SystemState& st, const FilteredInput& uf, const UnicycleParams& p,
                          const ClassKLinear& k1, const ClassKLinear& k2) {
  const auto g = detail::geometry(st, p);
  const double M = p.mass_M;
  const double v = st.v;
  const double vdot = uf.uf2 / M;
  const double along_dot = v + uf.uf1 * g.lateral;
  const double lateral_dot = -uf.uf1 * g.along;
  const double psi0_dot = 2.0 * v * g.along;
  const double psi0_ddot = 2.0 * vdot * g.along + 2.0 * v * along_dot;

  // psi2 = 2 v^2 + (k1 + k2) psi0' + k1 k2 psi0 + a1 uf1 + a2 uf2
  const double a1_dot = 2.0 * vdot * g.lateral + 2.0 * v * lateral_dot;
  const double a2_dot = 2.0 * along_dot / M;

  Psi2Rate r;
  r.drift = 4.0 * v * vdot + (k1.gain + k2.gain) * psi0_ddot + k1.gain * k2.gain * psi0_dot +
            a1_dot * uf.uf1 + a2_dot * uf.uf2;
  r.input_grad = {2.0 * v * g.lateral, 2.0 * g.along / M};
  return r;
}

/// psi2(x, u) >= 0 over [u1, u2, delta].
inline ConstraintRow hocbf_row(const SystemState& st, const FilteredInput& u,
                               const UnicycleParams& p, const ClassKLinear& k1,
                               const ClassKLinear& k2) {
  const auto chain = eval_psi_chain(st, u, p, k1, k2);
  ConstraintRow row{Eigen::VectorXd::Zero(kDecisionDim), -chain.psi2_const, Sense::GE};
  row.coeffs[kIn1] = chain.psi2_coeff_u1;
  row.coeffs[kIn2] = chain.psi2_coeff_u2;
  return row;
}

/// Filtered barrier row psi2' + k3 psi2 >= 0 over [nu1, nu2, delta], where psi2
/// is evaluated at the filter state and its rate depends on nu through the filter.
inline ConstraintRow fcbf_row(const SystemState& st, const FilteredInput& uf,
                              const UnicycleParams& p, const FilterParams& fp,
                              const ClassKLinear& k1, const ClassKLinear& k2,
                              const ClassKLinear& k3) {
  const auto chain = eval_psi_chain(st, p, k1, k2);
  const auto rate = psi2_rate(st, uf, p, k1, k2);
  const double psi0f = chain.psi2(uf.uf1, uf.uf2);

  ConstraintRow row{Eigen::VectorXd::Zero(kDecisionDim), 0.0, Sense::GE};
  row.coeffs[kIn1] = rate.input_grad[0] / fp.tau;
  row.coeffs[kIn2] = rate.input_grad[1] / fp.tau;
  const double constant = rate.drift - rate.input_grad.dot(uf.vec()) / fp.tau + k3(psi0f);
  row.rhs = -constant;

  if (row.coeffs.head<2>().norm() < 1e-10) {
    logger().debug("fcbf_row: command coefficients vanish (|a| = {:.3e}) at x={} y={} theta={}",
                   row.coeffs.head<2>().norm(), st.x, st.y, st.theta);
  }
  return row;
}

/// Rate/saturation barriers on each filtered channel:
///   (nu_i - uf_i)/tau + kmin (uf_i - u_min_i) >= 0
///  -(nu_i - uf_i)/tau + kmax (u_max_i - uf_i) >= 0
/// Returned in the order [min_1, max_1, min_2, max_2].
inline std::array<ConstraintRow, 4> input_bound_rows(const FilteredInput& uf,
                                                     const FilterParams& fp,
                                                     const InputBounds& bounds,
                                                     const ClassKLinear& kmin,
                                                     const ClassKLinear& kmax) {
  std::array<ConstraintRow, 4> rows;
  const Vec2 u = uf.vec();
  for (int i = 0; i < 2; ++i) {
    if (u[i] < bounds.u_min[i] || u[i] > bounds.u_max[i]) {
      logger().warn("input_bound_rows: uf{} = {} outside [{}, {}]", i + 1, u[i], bounds.u_min[i],
                    bounds.u_max[i]);
    }
    const double inv_tau = 1.0 / fp.tau;
    ConstraintRow lo{Eigen::VectorXd::Zero(kDecisionDim), 0.0, Sense::GE};
    lo.coeffs[i] = inv_tau;
    lo.rhs = u[i] * inv_tau - kmin(u[i] - bounds.u_min[i]);
    ConstraintRow hi{Eigen::VectorXd::Zero(kDecisionDim), 0.0, Sense::LE};
    hi.coeffs[i] = inv_tau;
    hi.rhs = u[i] * inv_tau + kmax(bounds.u_max[i] - u[i]);
    rows[2 * i] = std::move(lo);
    rows[2 * i + 1] = std::move(hi);
  }
  return rows;
}

/// Desired heading toward the goal and its rate along the unicycle flow.
struct GoalHeading {
  double theta_d = 0.0;
  double theta_d_dot = 0.0;
};

inline constexpr double kGoalSingularityRadiusSq = 1e-9;

inline GoalHeading goal_heading(const SystemState& st, const UnicycleParams& p) {
  const double ex = p.goal_x - st.x;
  const double ey = p.goal_y - st.y;
  const double r2 = ex * ex + ey * ey;
  if (r2 < kGoalSingularityRadiusSq) {
    throw GoalSingularity("vehicle is on the goal point; desired heading undefined");
  }
  GoalHeading h;
  h.theta_d = std::atan2(ey, ex);
  h.theta_d_dot = st.v * (ey * std::cos(st.theta) - ex * std::sin(st.theta)) / r2;
  return h;
}

/// Sliding variable of the filtered Lyapunov function V = s^2.
inline double clf_sliding_variable(const SystemState& st, const FilteredInput& uf,
                                   const UnicycleParams& p) {
  return 10.0 * (st.theta - goal_heading(st, p).theta_d) + uf.uf1 + uf.uf2;
}

/// Relaxed Lyapunov row V' + c3 V <= delta over [nu1, nu2, delta] with
/// V = (10 (theta - theta_d) + uf1 + uf2)^2.
inline ConstraintRow clf_row_fcbf(const SystemState& st, const FilteredInput& uf,
                                  const UnicycleParams& p, const FilterParams& fp, double c3) {
  const auto h = goal_heading(st, p);
  const double s = 10.0 * (st.theta - h.theta_d) + uf.uf1 + uf.uf2;
  const double gain = 2.0 * s / fp.tau;
  // V' = 2 s [10 (uf1 - theta_d') + (nu1 - uf1)/tau + (nu2 - uf2)/tau]
  const double drift = 2.0 * s * (10.0 * (uf.uf1 - h.theta_d_dot) - (uf.uf1 + uf.uf2) / fp.tau);

  ConstraintRow row{Eigen::VectorXd::Zero(kDecisionDim), 0.0, Sense::LE};
  row.coeffs[kIn1] = gain;
  row.coeffs[kIn2] = gain;
  row.coeffs[kDelta] = -1.0;
  row.rhs = -(drift + c3 * s * s);
  return row;
}

/// Relaxed Lyapunov row for the unfiltered benchmark, V = (theta - theta_d)^2,
/// over [u1, u2, delta].
inline ConstraintRow clf_row_hocbf(const SystemState& st, const UnicycleParams& p, double c3) {
  const auto h = goal_heading(st, p);
  const double e = st.theta - h.theta_d;
  ConstraintRow row{Eigen::VectorXd::Zero(kDecisionDim), 0.0, Sense::LE};
  row.coeffs[kIn1] = 2.0 * e;
  row.coeffs[kDelta] = -1.0;
  row.rhs = 2.0 * e * h.theta_d_dot - c3 * e * e;
  return row;
}

struct SetMembership {
  std::string name;
  double value = 0.0;
  bool pass = false;
};

struct StartupReport {
  std::vector<SetMembership> checks;

  [[nodiscard]] bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

/// Initial-condition membership in every set whose forward invariance the
/// controller relies on: C_0, C_1, C_{0,f} and the input bound sets.
inline StartupReport startup_check(const SystemState& x0, const FilteredInput& uf0,
                                   const UnicycleParams& p, const Gains& gains,
                                   const InputBounds& bounds) {
  const auto chain = eval_psi_chain(x0, p, gains.k1, gains.k2);
  StartupReport r;
  auto add = [&r](std::string name, double value) {
    r.checks.push_back({std::move(name), value, value >= 0.0});
  };
  add("psi0", chain.psi0);
  add("psi1", chain.psi1);
  add("psi0_f", chain.psi2(uf0.uf1, uf0.uf2));
  const Vec2 u = uf0.vec();
  for (int i = 0; i < 2; ++i) {
    add("psi_min_" + std::to_string(i + 1), u[i] - bounds.u_min[i]);
    add("psi_max_" + std::to_string(i + 1), bounds.u_max[i] - u[i]);
  }
  return r;
}

}  // namespace fcbf
