#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hbpl/objectives.hpp"

namespace hbpl {

struct IntegrationOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  Eigen::Index n_samples = 1001;
  long max_steps = 10'000'000;
};

struct TrajectoryMeta {
  std::string function_id;
  std::string dynamics;  // "heavy-ball" or "gradient-flow"
  std::optional<double> alpha;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// Uniformly sampled solution. Columns of `positions` / `velocities` are the
/// states at `times`; `velocities` has zero columns for gradient flow.
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd positions;
  Eigen::MatrixXd velocities;
  Eigen::VectorXd values;   // F(x(t)) − F*
  Eigen::VectorXd grad_sq;  // ‖∇F(x(t))‖²
  TrajectoryMeta meta;

  Eigen::Index size() const { return times.size(); }
  Eigen::Index dim() const { return positions.rows(); }
  bool has_velocities() const { return velocities.cols() == times.size() && times.size() > 0; }
};

/// Uniform grid t_i = t_end·i/(n−1), i = 0..n−1.
Eigen::VectorXd uniform_grid(double t_end, Eigen::Index n_samples);

/// Solves ẍ + αẋ + ∇F(x) = 0 as the first-order system (x, v).
Trajectory integrate_heavy_ball(const ObjectiveFunction& fn, double alpha, const Vector& x0, const Vector& v0,
                                double t_end, const IntegrationOptions& opts = {});

/// Heavy ball started at rest.
Trajectory integrate_heavy_ball(const ObjectiveFunction& fn, double alpha, const Vector& x0, double t_end,
                                const IntegrationOptions& opts = {});

/// Solves ẋ + ∇F(x) = 0.
Trajectory integrate_gradient_flow(const ObjectiveFunction& fn, const Vector& x0, double t_end,
                                   const IntegrationOptions& opts = {});

template <typename Scalar>
struct PositionVelocity {
  Scalar x;
  Scalar v;
};

/// Exact solution of ẍ + αẋ + μx = 0, x(0) = x0, ẋ(0) = 0.
///
/// Written with e^{−αt/2} factored out so that all three regimes share one
/// numerically stable form; near-critical discriminants fall back to the
/// critical formula (error O((βt)²) with β below 1e-8·α).
template <typename Scalar>
PositionVelocity<Scalar> closed_form_1d_quadratic(Scalar mu, Scalar alpha, Scalar x0, Scalar t) {
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  const Scalar half = alpha / Scalar(2);
  const Scalar disc = alpha * alpha - Scalar(4) * mu;
  const Scalar decay = exp(-half * t);
  if (disc > Scalar(0)) {
    const Scalar beta = sqrt(disc) / Scalar(2);
    if (beta > Scalar(1e-8) * alpha) {
      // cosh/sinh expanded into the two real exponentials to avoid overflow.
      const Scalar slow = exp((beta - half) * t);
      const Scalar fast = exp((-beta - half) * t);
      const Scalar x = x0 * Scalar(0.5) * ((Scalar(1) + half / beta) * slow + (Scalar(1) - half / beta) * fast);
      const Scalar v = -x0 * mu / beta * Scalar(0.5) * (slow - fast);
      return {x, v};
    }
  } else if (disc < Scalar(0)) {
    const Scalar omega = sqrt(-disc) / Scalar(2);
    if (omega > Scalar(1e-8) * alpha) {
      const Scalar x = x0 * decay * (cos(omega * t) + half / omega * sin(omega * t));
      const Scalar v = -x0 * decay * mu / omega * sin(omega * t);
      return {x, v};
    }
  }
  return {x0 * (Scalar(1) + half * t) * decay, -x0 * mu * t * decay};
}

/// Asymptotic decay exponent of F = μx²/2 along the exact 1-D solution:
/// α when α ≤ 2√μ, α − √(α² − 4μ) otherwise.
double quadratic_gap_decay_exponent(double mu, double alpha);

}  // namespace hbpl
