#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fcbf/errors.hpp"

namespace fcbf {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Unicycle state: planar position (m), heading (rad, never wrapped), speed (m/s).
struct SystemState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;

  [[nodiscard]] Vec4 vec() const { return {x, y, theta, v}; }
  static SystemState from(const Vec4& s) { return {s[0], s[1], s[2], s[3]}; }
  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta) && std::isfinite(v);
  }
};

/// Input actually applied to the vehicle: angular velocity (rad/s) and driving force (N).
struct FilteredInput {
  double uf1 = 0.0;
  double uf2 = 0.0;

  [[nodiscard]] Vec2 vec() const { return {uf1, uf2}; }
  static FilteredInput from(const Vec2& u) { return {u[0], u[1]}; }
};

/// Command fed into the input regularization filter. Unbounded.
struct AuxInput {
  double nu1 = 0.0;
  double nu2 = 0.0;

  [[nodiscard]] Vec2 vec() const { return {nu1, nu2}; }
  static AuxInput from(const Vec2& n) { return {n[0], n[1]}; }
};

struct UnicycleParams {
  double mass_M = 1650.0;
  double obstacle_x = 0.0;
  double obstacle_y = 0.0;
  double obstacle_r = 1.0;
  double goal_x = 1.5;
  double goal_y = 0.0;
  double goal_tol_rd = 0.1;

  void validate() const {
    if (!(mass_M > 0.0)) throw ConfigError("unicycle.mass_M must be > 0");
    if (!(obstacle_r > 0.0)) throw ConfigError("unicycle.obstacle_r must be > 0");
    if (!(goal_tol_rd > 0.0)) throw ConfigError("unicycle.goal_tol_rd must be > 0");
  }
};

struct FilterParams {
  double tau = 2e-3;
  int order_ma = 1;

  void validate() const {
    if (!(tau > 0.0)) throw ConfigError("filter.tau must be > 0");
    if (order_ma < 1) throw ConfigError("filter.order_ma must be >= 1");
    if (order_ma != 1) {
      throw UnsupportedConfiguration("filter.order_ma = " + std::to_string(order_ma) +
                                     " is not supported; only the first-order filter is implemented");
    }
  }
};

/// Unicycle vector field with the input entering through heading rate and force.
inline Vec4 unicycle_deriv(const SystemState& s, const FilteredInput& u, const UnicycleParams& p) {
  return {s.v * std::cos(s.theta), s.v * std::sin(s.theta), u.uf1, u.uf2 / p.mass_M};
}

/// First-order low-pass filter: the filtered input relaxes toward the command.
inline Vec2 filter_deriv(const FilteredInput& uf, const AuxInput& nu, const FilterParams& fp) {
  return {(nu.nu1 - uf.uf1) / fp.tau, (nu.nu2 - uf.uf2) / fp.tau};
}

/// Vehicle driven by the filter state, with the filter driven by the command.
/// Layout: (x, y, theta, v, uf1, uf2).
inline Vec6 augmented_deriv(const SystemState& s, const FilteredInput& uf, const AuxInput& nu,
                            const UnicycleParams& p, const FilterParams& fp) {
  Vec6 out;
  out.head<4>() = unicycle_deriv(s, uf, p);
  out.tail<2>() = filter_deriv(uf, nu, fp);
  return out;
}

inline Vec6 pack(const SystemState& s, const FilteredInput& uf) {
  Vec6 out;
  out << s.x, s.y, s.theta, s.v, uf.uf1, uf.uf2;
  return out;
}

inline SystemState state_of(const Vec6& z) { return {z[0], z[1], z[2], z[3]}; }
inline FilteredInput input_of(const Vec6& z) { return {z[4], z[5]}; }

}  // namespace fcbf
