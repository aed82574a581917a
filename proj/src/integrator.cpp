#include "hbpl/integrator.hpp"

#include <span>
#include <vector>

#include "hbpl/dormand_prince.hpp"
#include "hbpl/error.hpp"

namespace hbpl {

namespace {

void validate(const ObjectiveFunction& fn, const Vector& x0, double t_end, const IntegrationOptions& opts) {
  if (!fn.has_gradient()) {
    throw Error(ErrorCode::kMissingGradient, "objective '" + fn.id + "' has no gradient to integrate");
  }
  if (x0.size() != fn.dim) {
    throw Error(ErrorCode::kInvalidDimension, "initial point has dimension " + std::to_string(x0.size()) +
                                                  ", objective expects " + std::to_string(fn.dim));
  }
  if (!(t_end > 0.0)) throw Error(ErrorCode::kInvalidConstants, "t_end must be positive");
  if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidConstants, "tolerances must be positive");
  }
  if (opts.n_samples < 2) throw Error(ErrorCode::kInvalidConstants, "need at least two samples");
}

DormandPrinceOptions<double> solver_options(const IntegrationOptions& opts) {
  DormandPrinceOptions<double> o;
  o.abs_tol = opts.abs_tol;
  o.rel_tol = opts.rel_tol;
  o.max_steps = opts.max_steps;
  return o;
}

Trajectory allocate(const ObjectiveFunction& fn, double t_end, const IntegrationOptions& opts, bool velocities) {
  Trajectory traj;
  traj.times = uniform_grid(t_end, opts.n_samples);
  traj.positions.resize(fn.dim, opts.n_samples);
  if (velocities) traj.velocities.resize(fn.dim, opts.n_samples);
  traj.values.resize(opts.n_samples);
  traj.grad_sq.resize(opts.n_samples);
  traj.meta.function_id = fn.id;
  traj.meta.abs_tol = opts.abs_tol;
  traj.meta.rel_tol = opts.rel_tol;
  return traj;
}

}  // namespace

Eigen::VectorXd uniform_grid(double t_end, Eigen::Index n_samples) {
  Eigen::VectorXd grid(n_samples);
  const double denom = static_cast<double>(n_samples - 1);
  for (Eigen::Index i = 0; i < n_samples; ++i) grid(i) = t_end * static_cast<double>(i) / denom;
  return grid;
}

Trajectory integrate_heavy_ball(const ObjectiveFunction& fn, double alpha, const Vector& x0, const Vector& v0,
                                double t_end, const IntegrationOptions& opts) {
  validate(fn, x0, t_end, opts);
  if (v0.size() != fn.dim) throw Error(ErrorCode::kInvalidDimension, "initial velocity dimension mismatch");
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidConstants, "damping alpha must be positive");

  Trajectory traj = allocate(fn, t_end, opts, true);
  traj.meta.dynamics = "heavy-ball";
  traj.meta.alpha = alpha;

  const Eigen::Index d = fn.dim;
  Vector y0(2 * d);
  y0 << x0, v0;
  auto rhs = [&fn, alpha, d](double, const Vector& y, Vector& dy) {
    dy.head(d) = y.tail(d);
    dy.tail(d) = -alpha * y.tail(d) - fn.grad(y.head(d));
  };
  auto observe = [&](std::size_t i, const Vector& y) {
    const auto col = static_cast<Eigen::Index>(i);
    traj.positions.col(col) = y.head(d);
    traj.velocities.col(col) = y.tail(d);
  };
  const auto stats = integrate_dense<double>(
      rhs, y0, std::span<const double>(traj.times.data(), static_cast<std::size_t>(traj.times.size())),
      solver_options(opts), observe);
  traj.meta.accepted_steps = stats.accepted;
  traj.meta.rejected_steps = stats.rejected;

  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const Vector x = traj.positions.col(i);
    traj.values(i) = fn.gap(x);
    traj.grad_sq(i) = fn.grad(x).squaredNorm();
  }
  return traj;
}

Trajectory integrate_heavy_ball(const ObjectiveFunction& fn, double alpha, const Vector& x0, double t_end,
                                const IntegrationOptions& opts) {
  return integrate_heavy_ball(fn, alpha, x0, Vector::Zero(x0.size()), t_end, opts);
}

Trajectory integrate_gradient_flow(const ObjectiveFunction& fn, const Vector& x0, double t_end,
                                   const IntegrationOptions& opts) {
  validate(fn, x0, t_end, opts);
  Trajectory traj = allocate(fn, t_end, opts, false);
  traj.meta.dynamics = "gradient-flow";

  auto rhs = [&fn](double, const Vector& y, Vector& dy) { dy = -fn.grad(y); };
  auto observe = [&](std::size_t i, const Vector& y) { traj.positions.col(static_cast<Eigen::Index>(i)) = y; };
  const auto stats = integrate_dense<double>(
      rhs, x0, std::span<const double>(traj.times.data(), static_cast<std::size_t>(traj.times.size())),
      solver_options(opts), observe);
  traj.meta.accepted_steps = stats.accepted;
  traj.meta.rejected_steps = stats.rejected;

  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const Vector x = traj.positions.col(i);
    traj.values(i) = fn.gap(x);
    traj.grad_sq(i) = fn.grad(x).squaredNorm();
  }
  return traj;
}

double quadratic_gap_decay_exponent(double mu, double alpha) {
  const double disc = alpha * alpha - 4.0 * mu;
  if (disc <= 0.0) return alpha;
  return alpha - std::sqrt(disc);
}

}  // namespace hbpl
