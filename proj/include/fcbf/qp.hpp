#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcbf/cbf_constraints.hpp"
#include "fcbf/errors.hpp"

namespace fcbf {

/// min 1/2 z'Hz + f'z  s.t. every row, lb <= z <= ub.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  std::vector<ConstraintRow> rows;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  /// Unconstrained boxes for an n-variable problem.
  static QpProblem with_dim(int n) {
    QpProblem p;
    p.H = Eigen::MatrixXd::Zero(n, n);
    p.f = Eigen::VectorXd::Zero(n);
    p.lb = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    p.ub = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    return p;
  }

  [[nodiscard]] int dim() const { return static_cast<int>(f.size()); }

  void validate() const {
    const auto n = f.size();
    if (H.rows() != n || H.cols() != n) throw BadProblem("H dimension does not match f");
    if (lb.size() != n || ub.size() != n) throw BadProblem("box bounds dimension mismatch");
    if (!H.allFinite() || !f.allFinite()) throw BadProblem("H and f must be finite");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()))
      throw BadProblem("H is not symmetric");
    if (n > 0) {
      const Eigen::MatrixXd sym = 0.5 * (H + H.transpose());
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues()(0);
      if (min_eig < -1e-10) throw BadProblem("H is indefinite");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isnan(lb[i]) || std::isnan(ub[i]) || lb[i] > ub[i])
        throw BadProblem("box bounds require lb <= ub");
    }
    for (const auto& r : rows) {
      if (r.coeffs.size() != n) throw BadProblem("constraint row length does not match problem");
      if (!r.coeffs.allFinite() || !std::isfinite(r.rhs)) throw BadProblem("non-finite row");
    }
  }
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "Optimal";
    case QpStatus::Infeasible: return "Infeasible";
    case QpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;
};

/// Constraint indexing used by active sets and multipliers: general rows come
/// first (0..m-1), then for variable j the lower bound at m + 2j and the upper
/// bound at m + 2j + 1. Every constraint is read as c_i(z) >= 0 with
/// multiplier lambda_i >= 0.
inline int lower_bound_index(int m, int j) { return m + 2 * j; }
inline int upper_bound_index(int m, int j) { return m + 2 * j + 1; }

struct QpSolution {
  Eigen::VectorXd z;
  QpStatus status = QpStatus::IterationLimit;
  std::vector<int> active_set;
  Eigen::VectorXd multipliers;  // size m + 2n in the unified indexing
  KktResiduals kkt_residuals;
  double solve_time = 0.0;
  int iterations = 0;
  /// Infeasible only: constraints whose phase-1 multipliers certify inconsistency.
  std::vector<int> infeasible_subsystem;
  /// Infeasible only: total violation left by phase 1 (normalized rows).
  double residual_violation = 0.0;
  std::string diagnostic;
};

struct QpOptions {
  int max_iterations = 200;
  double infeasibility_threshold = 1e-7;
  double max_condition = 1e12;
};

/// Caller-owned warm start, carried between consecutive control steps.
struct QpWarmStart {
  std::vector<int> active;
};

namespace qp_detail {

// All constraints as a_i . z >= b_i with unit max-norm coefficient rows.
struct Normalized {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd scale;  // original row = scale * normalized row
  std::vector<bool> present;
  int m = 0;
};

inline Normalized normalize(const QpProblem& p) {
  const int n = p.dim();
  const int m = static_cast<int>(p.rows.size());
  Normalized c;
  c.m = m;
  c.A = Eigen::MatrixXd::Zero(m + 2 * n, n);
  c.b = Eigen::VectorXd::Zero(m + 2 * n);
  c.scale = Eigen::VectorXd::Ones(m + 2 * n);
  c.present.assign(m + 2 * n, false);
  for (int i = 0; i < m; ++i) {
    const auto& r = p.rows[i];
    const double sign = r.sense == Sense::GE ? 1.0 : -1.0;
    const double s = r.coeffs.cwiseAbs().maxCoeff();
    if (s == 0.0) {
      c.scale[i] = 1.0;
      c.b[i] = sign * r.rhs;
      c.present[i] = true;  // 0 >= b: handled by the caller
      continue;
    }
    c.A.row(i) = sign * r.coeffs.transpose() / s;
    c.b[i] = sign * r.rhs / s;
    c.scale[i] = s;
    c.present[i] = true;
  }
  for (int j = 0; j < n; ++j) {
    const int lo = lower_bound_index(m, j);
    const int hi = upper_bound_index(m, j);
    if (std::isfinite(p.lb[j])) {
      c.A(lo, j) = 1.0;
      c.b[lo] = p.lb[j];
      c.present[lo] = true;
    }
    if (std::isfinite(p.ub[j])) {
      c.A(hi, j) = -1.0;
      c.b[hi] = -p.ub[j];
      c.present[hi] = true;
    }
  }
  return c;
}

enum class Outcome { Optimal, Unbounded, IterationLimit, IllConditioned };

struct ActiveSetResult {
  Eigen::VectorXd z;
  std::vector<int> working;
  Eigen::VectorXd lambda;  // normalized multipliers, size of constraint list
  Outcome outcome = Outcome::IterationLimit;
  int iterations = 0;
  std::string diagnostic;
};

// Orthonormal basis of null(A_W) and least-squares multipliers via QR of A_W'.
struct WorkingFactor {
  Eigen::MatrixXd Z;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr;
  int k = 0;
};

inline WorkingFactor factor_working(const Eigen::MatrixXd& Aw, int n) {
  WorkingFactor wf;
  wf.k = static_cast<int>(Aw.rows());
  if (wf.k == 0) {
    wf.Z = Eigen::MatrixXd::Identity(n, n);
    return wf;
  }
  wf.qr.compute(Aw.transpose());
  const Eigen::MatrixXd Q = wf.qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  wf.Z = Q.rightCols(n - wf.k);
  return wf;
}

inline double condition_number(const Eigen::MatrixXd& Aw) {
  if (Aw.rows() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / smin;
}

/// Primal active-set iteration from a feasible point. Handles positive
/// semidefinite H: directions of zero curvature with a descent component are
/// followed as rays until a constraint blocks them.
inline ActiveSetResult primal_active_set(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                                         const Normalized& c, Eigen::VectorXd z,
                                         std::vector<int> working, const QpOptions& opts) {
  const int n = static_cast<int>(f.size());
  const int total = static_cast<int>(c.b.size());
  const double h_scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  const double curvature_tol = 1e-11 * h_scale;

  ActiveSetResult res;
  std::vector<bool> in_w(total, false);
  for (int i : working) in_w[i] = true;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter + 1;
    Eigen::MatrixXd Aw(working.size(), n);
    for (std::size_t r = 0; r < working.size(); ++r) Aw.row(r) = c.A.row(working[r]);
    if (condition_number(Aw) > opts.max_condition) {
      res.outcome = Outcome::IllConditioned;
      res.diagnostic = "working-set matrix condition number above limit";
      break;
    }
    const auto wf = factor_working(Aw, n);
    const Eigen::VectorXd g = H * z + f;
    const double g_scale = std::max(1.0, g.cwiseAbs().maxCoeff());

    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    bool ray = false;
    const int r = n - wf.k;
    if (r > 0) {
      const Eigen::MatrixXd Hz = wf.Z.transpose() * H * wf.Z;
      const Eigen::VectorXd gz = wf.Z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Hz + Hz.transpose()));
      const auto& ev = es.eigenvalues();
      const auto& E = es.eigenvectors();
      Eigen::VectorXd flat = Eigen::VectorXd::Zero(r);  // gradient part with zero curvature
      Eigen::VectorXd newton = Eigen::VectorXd::Zero(r);
      for (int j = 0; j < r; ++j) {
        const double proj = E.col(j).dot(gz);
        if (ev(j) <= curvature_tol) {
          flat += proj * E.col(j);
        } else {
          newton -= (proj / ev(j)) * E.col(j);
        }
      }
      if (flat.cwiseAbs().maxCoeff() > 1e-12 * g_scale) {
        p = -(wf.Z * flat);
        p /= p.cwiseAbs().maxCoeff();
        ray = true;
      } else {
        p = wf.Z * newton;
      }
    }

    const double z_scale = std::max(1.0, z.cwiseAbs().maxCoeff());
    if (!ray && p.cwiseAbs().maxCoeff() <= 1e-13 * z_scale) {
      // Stationary on the working set: check multipliers.
      Eigen::VectorXd lam_w = Eigen::VectorXd::Zero(wf.k);
      if (wf.k > 0) {
        const Eigen::VectorXd qtg = wf.qr.householderQ().transpose() * g;
        lam_w = wf.qr.matrixQR()
                    .topLeftCorner(wf.k, wf.k)
                    .triangularView<Eigen::Upper>()
                    .solve(qtg.head(wf.k));
      }
      int drop = -1;
      double most_negative = -1e-10 * g_scale;
      for (int w = 0; w < wf.k; ++w) {
        if (lam_w[w] < most_negative ||
            (drop >= 0 && lam_w[w] == most_negative && working[w] < working[drop])) {
          most_negative = lam_w[w];
          drop = w;
        }
      }
      if (drop < 0) {
        res.outcome = Outcome::Optimal;
        res.z = z;
        res.working = working;
        res.lambda = Eigen::VectorXd::Zero(total);
        for (int w = 0; w < wf.k; ++w) res.lambda[working[w]] = std::max(0.0, lam_w[w]);
        return res;
      }
      in_w[working[drop]] = false;
      working.erase(working.begin() + drop);
      continue;
    }

    // Ratio test; lowest index wins ties.
    double step = ray ? std::numeric_limits<double>::infinity() : 1.0;
    int blocking = -1;
    for (int i = 0; i < total; ++i) {
      if (!c.present[i] || in_w[i]) continue;
      const double ap = c.A.row(i).dot(p);
      if (ap >= -1e-14) continue;
      const double slack = c.A.row(i).dot(z) - c.b[i];
      const double alpha = std::max(0.0, slack) / -ap;
      if (alpha < step) {
        step = alpha;
        blocking = i;
      }
    }
    if (ray && blocking < 0) {
      res.outcome = Outcome::Unbounded;
      res.diagnostic = "objective unbounded below along a zero-curvature direction";
      break;
    }
    z += step * p;
    if (blocking >= 0) {
      working.push_back(blocking);
      in_w[blocking] = true;
    }
  }
  res.z = z;
  res.working = working;
  res.lambda = Eigen::VectorXd::Zero(total);
  if (res.outcome == Outcome::IterationLimit && res.diagnostic.empty()) {
    res.diagnostic = "active-set iteration cap reached";
  }
  return res;
}

// Elastic feasibility problem over [z; t]: min sum t, a_i z + t_i >= b_i,
// t >= 0, box bounds on z kept hard.
struct PhaseOne {
  Eigen::VectorXd z;
  double violation = 0.0;
  std::vector<int> evidence;
  ActiveSetResult raw;
};

inline PhaseOne phase_one(const Normalized& c, int n, const Eigen::VectorXd& z_start,
                          const QpOptions& opts) {
  const int m = c.m;
  const int nv = n + m;
  Normalized e;
  e.m = m + m;  // elastic rows, then t >= 0
  const int total = 2 * m + 2 * n;
  e.A = Eigen::MatrixXd::Zero(total, nv);
  e.b = Eigen::VectorXd::Zero(total);
  e.scale = Eigen::VectorXd::Ones(total);
  e.present.assign(total, false);
  for (int i = 0; i < m; ++i) {
    e.A.block(i, 0, 1, n) = c.A.row(i);
    e.A(i, n + i) = 1.0;
    e.b[i] = c.b[i];
    e.present[i] = c.present[i];
    e.A(m + i, n + i) = 1.0;
    e.present[m + i] = true;
  }
  for (int k = 0; k < 2 * n; ++k) {
    e.A.block(2 * m + k, 0, 1, n) = c.A.row(m + k);
    e.b[2 * m + k] = c.b[m + k];
    e.present[2 * m + k] = c.present[m + k];
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(nv);
  for (int j = 0; j < n; ++j) {
    double v = z_start[j];
    if (c.present[lower_bound_index(m, j)]) v = std::max(v, c.b[lower_bound_index(m, j)]);
    if (c.present[upper_bound_index(m, j)]) v = std::min(v, -c.b[upper_bound_index(m, j)]);
    w[j] = v;
  }
  for (int i = 0; i < m; ++i) {
    if (!c.present[i]) continue;
    w[n + i] = std::max(0.0, c.b[i] - c.A.row(i).dot(w.head(n)));
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv);
  cost.tail(m).setOnes();
  QpOptions o = opts;
  o.max_iterations = std::max(opts.max_iterations, 4 * (nv + total));

  PhaseOne out;
  out.raw = primal_active_set(Eigen::MatrixXd::Zero(nv, nv), cost, e, w, {}, o);
  out.z = out.raw.z.head(n);
  out.violation = out.raw.z.tail(m).sum();
  if (out.raw.outcome == Outcome::Optimal) {
    for (int i = 0; i < m; ++i) {
      if (out.raw.lambda[i] > 1e-9) out.evidence.push_back(i);
    }
    for (int k = 0; k < 2 * n; ++k) {
      if (out.raw.lambda[2 * m + k] > 1e-9) out.evidence.push_back(m + k);
    }
  }
  return out;
}

}  // namespace qp_detail

/// Residuals of the first-order optimality conditions at (z, multipliers), with
/// multipliers in the unified indexing and every constraint read as c_i(z) >= 0:
/// (|Hz + f - sum lambda_i grad c_i|_inf, max violation, max |lambda_i c_i(z)|).
inline KktResiduals kkt_check(const QpProblem& p, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& multipliers) {
  const int n = p.dim();
  const int m = static_cast<int>(p.rows.size());
  KktResiduals r;
  Eigen::VectorXd grad = p.H * z + p.f;
  auto account = [&](const Eigen::VectorXd& a, double value, double lambda) {
    grad -= lambda * a;
    r.primal = std::max(r.primal, std::max(0.0, -value));
    r.complementarity = std::max(r.complementarity, std::abs(lambda * value));
  };
  for (int i = 0; i < m; ++i) {
    const auto& row = p.rows[i];
    const double sign = row.sense == Sense::GE ? 1.0 : -1.0;
    const double lambda = i < multipliers.size() ? multipliers[i] : 0.0;
    account(sign * row.coeffs, row.margin(z), lambda);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    const int lo = lower_bound_index(m, j);
    const int hi = upper_bound_index(m, j);
    const double llo = lo < multipliers.size() ? multipliers[lo] : 0.0;
    const double lhi = hi < multipliers.size() ? multipliers[hi] : 0.0;
    if (std::isfinite(p.lb[j])) account(e, z[j] - p.lb[j], llo);
    if (std::isfinite(p.ub[j])) account(-e, p.ub[j] - z[j], lhi);
  }
  r.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

namespace qp_detail {

// Re-solve the equality-constrained problem on the final working set with a
// full-pivoting LU of the KKT matrix; accepted only if it stays feasible.
inline bool polish(const QpProblem& p, const Normalized& c, std::vector<int>& working,
                   Eigen::VectorXd& z, Eigen::VectorXd& lambda) {
  const int n = p.dim();
  const int k = static_cast<int>(working.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
  Eigen::VectorXd rhs(n + k);
  K.topLeftCorner(n, n) = p.H;
  rhs.head(n) = -p.f;
  for (int w = 0; w < k; ++w) {
    K.block(0, n + w, n, 1) = -c.A.row(working[w]).transpose();
    K.block(n + w, 0, 1, n) = c.A.row(working[w]);
    rhs[n + w] = c.b[working[w]];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) return false;
  Eigen::VectorXd sol = lu.solve(rhs);
  // Large multipliers amplify any leftover row residual in the complementarity
  // products; a few refinement sweeps bring it to rounding level.
  for (int it = 0; it < 3; ++it) sol += lu.solve(rhs - K * sol);
  const Eigen::VectorXd zp = sol.head(n);
  const double tol = 1e-9 * std::max(1.0, zp.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < c.present.size(); ++i) {
    if (c.present[i] && c.A.row(i).dot(zp) - c.b[i] < -tol) return false;
  }
  for (int w = 0; w < k; ++w) {
    if (sol[n + w] < -1e-9) return false;
  }
  z = zp;
  for (int w = 0; w < k; ++w) lambda[working[w]] = std::max(0.0, sol[n + w]);
  return true;
}

}  // namespace qp_detail

/// Dense convex QP by a primal active-set method. A feasible start comes from
/// the warm-start working set when it yields one, otherwise from an elastic
/// phase 1 that minimizes total row violation. Infeasible is a status; malformed
/// problems raise BadProblem.
inline QpSolution solve(const QpProblem& problem, const QpOptions& opts = {},
                        QpWarmStart* warm = nullptr) {
  using namespace qp_detail;
  const auto start = std::chrono::steady_clock::now();
  problem.validate();
  const int n = problem.dim();
  const int m = static_cast<int>(problem.rows.size());
  const Normalized c = normalize(problem);
  const int total = m + 2 * n;

  QpSolution sol;
  sol.multipliers = Eigen::VectorXd::Zero(total);
  auto finish = [&](QpSolution& s) -> QpSolution& {
    s.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
  };

  // Rows with vanishing coefficients are either vacuous or contradictory.
  std::vector<int> zero_rows;
  for (int i = 0; i < m; ++i) {
    if (problem.rows[i].coeffs.cwiseAbs().maxCoeff() == 0.0) zero_rows.push_back(i);
  }
  Normalized cw = c;
  for (int i : zero_rows) {
    if (cw.b[i] > opts.infeasibility_threshold) {
      sol.status = QpStatus::Infeasible;
      sol.z = Eigen::VectorXd::Zero(n);
      sol.infeasible_subsystem = {i};
      sol.residual_violation = cw.b[i];
      sol.diagnostic = "row " + std::to_string(i) + " has zero coefficients and positive rhs";
      return finish(sol);
    }
    cw.present[i] = false;
  }

  auto feasible = [&](const Eigen::VectorXd& z) {
    const double tol = 1e-10 * std::max(1.0, z.cwiseAbs().maxCoeff());
    for (int i = 0; i < total; ++i) {
      if (cw.present[i] && cw.A.row(i).dot(z) - cw.b[i] < -tol) return false;
    }
    return true;
  };

  Eigen::VectorXd z0;
  std::vector<int> w0;
  bool have_start = false;

  if (warm && !warm->active.empty()) {
    // Keep a linearly independent subset of the previous working set.
    std::vector<int> cand;
    Eigen::MatrixXd Aw(0, n);
    for (int i : warm->active) {
      if (i < 0 || i >= total || !cw.present[i]) continue;
      Eigen::MatrixXd trial(Aw.rows() + 1, n);
      trial << Aw, cw.A.row(i);
      if (Eigen::FullPivLU<Eigen::MatrixXd>(trial).rank() == trial.rows()) {
        Aw = trial;
        cand.push_back(i);
      }
    }
    Eigen::VectorXd zc = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(total);
    if (!cand.empty() && polish(problem, cw, cand, zc, lam) && feasible(zc)) {
      z0 = zc;
      w0 = cand;
      have_start = true;
    }
  }

  if (!have_start) {
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(n);
    if (feasible(guess)) {
      z0 = guess;
    } else {
      const auto p1 = phase_one(cw, n, guess, opts);
      sol.iterations += p1.raw.iterations;
      if (p1.raw.outcome != Outcome::Optimal) {
        sol.status = QpStatus::IterationLimit;
        sol.z = p1.z;
        sol.diagnostic = "phase 1: " + p1.raw.diagnostic;
        return finish(sol);
      }
      if (p1.violation > opts.infeasibility_threshold) {
        sol.status = QpStatus::Infeasible;
        sol.z = p1.z;
        sol.infeasible_subsystem = p1.evidence;
        sol.residual_violation = p1.violation;
        std::ostringstream msg;
        msg << "phase 1 total violation " << p1.violation << "; inconsistent constraints:";
        for (int i : p1.evidence) msg << ' ' << i;
        sol.diagnostic = msg.str();
        return finish(sol);
      }
      z0 = p1.z;
    }
  }

  auto res = primal_active_set(problem.H, problem.f, cw, z0, w0, opts);
  sol.iterations += res.iterations;
  sol.z = res.z;
  if (res.outcome != Outcome::Optimal) {
    sol.status = QpStatus::IterationLimit;
    sol.diagnostic = res.diagnostic;
    return finish(sol);
  }

  Eigen::VectorXd lambda_n = res.lambda;
  polish(problem, cw, res.working, sol.z, lambda_n);
  // Feasibility tolerances scale with |z|; simple bounds are hard limits, so
  // remove any sub-tolerance overshoot.
  sol.z = sol.z.cwiseMax(problem.lb).cwiseMin(problem.ub);
  for (int i = 0; i < total; ++i) sol.multipliers[i] = lambda_n[i] / c.scale[i];
  sol.active_set = res.working;
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.kkt_residuals = kkt_check(problem, sol.z, sol.multipliers);
  sol.status = QpStatus::Optimal;
  if (warm) warm->active = sol.active_set;
  return finish(sol);
}

enum class ControllerKind { FCBF, HOCBF, SpHOCBF };

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::FCBF: return "fcbf";
    case ControllerKind::HOCBF: return "hocbf";
    case ControllerKind::SpHOCBF: return "sp-hocbf";
  }
  return "?";
}

struct QpCost {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
};

/// Per-step objective over the 3-variable decision vector: input norm plus
/// Q delta^2, optionally plus a penalty on the change from the previous input.
inline QpCost build_cost(ControllerKind kind, double Q, double smoothness_weight,
                         const std::optional<Vec2>& prev_u) {
  if (!(Q > 0.0)) throw ConfigError("qp.Q must be > 0");
  if (smoothness_weight < 0.0) throw ConfigError("qp.smoothness_weight must be >= 0");
  QpCost c;
  c.H = Eigen::MatrixXd::Zero(kDecisionDim, kDecisionDim);
  c.f = Eigen::VectorXd::Zero(kDecisionDim);
  c.H(kIn1, kIn1) = 2.0;
  c.H(kIn2, kIn2) = 2.0;
  c.H(kDelta, kDelta) = 2.0 * Q;
  if (kind == ControllerKind::SpHOCBF && smoothness_weight > 0.0) {
    if (!prev_u) throw MissingPrevInput("sp-HOCBF cost requires the previous input");
    c.H(kIn1, kIn1) += 2.0 * smoothness_weight;
    c.H(kIn2, kIn2) += 2.0 * smoothness_weight;
    c.f[kIn1] = -2.0 * smoothness_weight * (*prev_u)[0];
    c.f[kIn2] = -2.0 * smoothness_weight * (*prev_u)[1];
  }
  return c;
}

}  // namespace fcbf
