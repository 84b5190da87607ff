#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcbf/errors.hpp"

namespace fcbf {

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double min_step = 1e-12;
  int max_steps = 1'000'000;
};

struct IntegratorStats {
  int accepted = 0;
  int rejected = 0;
};

/// Adaptive embedded Runge-Kutta 5(4) with Dormand-Prince coefficients and
/// first-same-as-last reuse. `deriv(t, y)` returns dy/dt; any control input is
/// captured by the callable and held constant across the interval.
template <typename Vector, typename Deriv>
Vector integrate(Deriv&& deriv, const Vector& initial, double t0, double t1,
                 const IntegratorOptions& opts = {}, IntegratorStats* stats = nullptr) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: requires t1 > t0");

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // Difference between the 5th- and embedded 4th-order weights.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Vector y = initial;
  double t = t0;
  Vector k1 = deriv(t, y);

  const auto err_norm = [&](const Vector& err, const Vector& ya, const Vector& yb) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      const double r = err[i] / scale;
      acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
  };

  // Initial step from the derivative scale.
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, t1 - t0);
  }

  int steps = 0;
  while (t < t1) {
    if (++steps > opts.max_steps) {
      throw StepSizeUnderflow("integrate: step budget exhausted");
    }
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    if (h < opts.min_step && !last) {
      std::ostringstream msg;
      msg << "integrate: adaptive step " << h << " s below " << opts.min_step << " s at t=" << t;
      throw StepSizeUnderflow(msg.str());
    }

    const Vector k2 = deriv(t + c2 * h, Vector(y + h * a21 * k1));
    const Vector k3 = deriv(t + c3 * h, Vector(y + h * (a31 * k1 + a32 * k2)));
    const Vector k4 = deriv(t + c4 * h, Vector(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vector k5 =
        deriv(t + c5 * h, Vector(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vector k6 = deriv(
        t + h, Vector(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const Vector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = deriv(t + h, y_new);
    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = err_norm(err, y, y_new);
    if (en <= 1.0) {
      t = last ? t1 : t + h;
      y = y_new;
      k1 = k7;
      if (stats) ++stats->accepted;
      const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= factor;
    } else {
      if (stats) ++stats->rejected;
      const double factor =
          std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
      h *= factor;
      if (h < opts.min_step) {
        std::ostringstream msg;
        msg << "integrate: adaptive step " << h << " s below " << opts.min_step
            << " s at t=" << t;
        throw StepSizeUnderflow(msg.str());
      }
    }
  }
  return y;
}

}  // namespace fcbf
