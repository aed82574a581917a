#include "hbpl/moreau.hpp"

#include <algorithm>
#include <cmath>

#include "hbpl/detail/scalar_search.hpp"
#include "hbpl/error.hpp"

namespace hbpl {

namespace {

constexpr long kProxIterations = 2'000'000;

void validate(const MoreauHandle& handle) {
  if (!(handle.lambda > 0.0)) throw Error(ErrorCode::kInvalidConstants, "lambda must be positive");
  if (!handle.base.eval) throw Error(ErrorCode::kInvalidConstants, "base objective has no evaluation oracle");
}

Vector prox_gradient_descent(const MoreauHandle& h, const Vector& x, double tol) {
  const ObjectiveFunction& f = h.base;
  const double lambda = h.lambda;
  auto sub_grad = [&](const Vector& y) -> Vector { return f.grad(y) + (y - x) / lambda; };
  Vector y = x;
  if (f.lipschitz_L) {
    const double step = lambda / (1.0 + lambda * *f.lipschitz_L);
    for (long it = 0; it < kProxIterations; ++it) {
      const Vector g = sub_grad(y);
      if (g.norm() <= tol) return y;
      y -= step * g;
    }
  } else {
    // Armijo backtracking on φ(y) = F(y) + ‖y − x‖²/(2λ).
    auto phi = [&](const Vector& z) { return f.eval(z) + (z - x).squaredNorm() / (2.0 * lambda); };
    double step = lambda;
    for (long it = 0; it < kProxIterations; ++it) {
      const Vector g = sub_grad(y);
      const double gn2 = g.squaredNorm();
      if (std::sqrt(gn2) <= tol) return y;
      const double fy = phi(y);
      step = std::min(lambda, 2.0 * step);
      Vector trial = y - step * g;
      while (phi(trial) > fy - 0.5 * step * gn2 && step > 1e-300) {
        step *= 0.5;
        trial = y - step * g;
      }
      y = trial;
    }
  }
  throw Error(ErrorCode::kProxBudgetExceeded, "prox subproblem did not reach tolerance");
}

Vector prox_scalar(const MoreauHandle& h, const Vector& x, double tol) {
  const double x0 = x(0);
  auto phi = [&](double y) {
    Vector p(1);
    p(0) = y;
    return h.base.eval(p) + (y - x0) * (y - x0) / (2.0 * h.lambda);
  };
  // A subgradient of magnitude at most M moves the prox at most λM from x.
  double radius = h.lambda * (h.lipschitz_M ? *h.lipschitz_M : 1.0);
  for (int grow = 0; grow < 200; ++grow) {
    const auto res = detail::golden_section(phi, x0 - radius, x0 + radius, tol * (1.0 + std::abs(x0)), 4000);
    const bool at_edge = std::abs(std::abs(res.argmin - x0) - radius) <= 1e-9 * (radius + std::abs(x0));
    if (!at_edge || h.lipschitz_M) {
      if (!res.converged) break;
      return Vector::Constant(1, res.argmin);
    }
    radius *= 2.0;
  }
  throw Error(ErrorCode::kProxBudgetExceeded, "scalar prox search did not converge");
}

}  // namespace

Vector prox(const MoreauHandle& handle, const Vector& x, double tol) {
  validate(handle);
  if (x.size() != handle.base.dim) throw Error(ErrorCode::kInvalidDimension, "prox point dimension mismatch");
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidConstants, "prox tolerance must be positive");
  if (handle.base.exact_prox) return handle.base.exact_prox(handle.lambda, x);
  if (handle.base.has_gradient()) return prox_gradient_descent(handle, x, tol);
  if (handle.base.dim == 1) return prox_scalar(handle, x, tol);
  throw Error(ErrorCode::kMissingOracle,
              "objective '" + handle.base.id + "' has neither a prox, a gradient, nor dimension one");
}

EnvelopePoint envelope_value_grad(const MoreauHandle& handle, const Vector& x) {
  EnvelopePoint out;
  out.prox = prox(handle, x);
  const Vector diff = x - out.prox;
  out.value = handle.base.eval(out.prox) + diff.squaredNorm() / (2.0 * handle.lambda);
  out.gradient = diff / handle.lambda;
  return out;
}

ObjectiveFunction envelope_objective(const MoreauHandle& handle) {
  validate(handle);
  ObjectiveFunction fn;
  fn.id = "moreau(" + handle.base.id + ")";
  fn.dim = handle.base.dim;
  fn.eval = [handle](const Vector& x) { return envelope_value_grad(handle, x).value; };
  fn.grad = [handle](const Vector& x) -> Vector { return envelope_value_grad(handle, x).gradient; };
  fn.f_star = handle.base.f_star;
  fn.lipschitz_L = 1.0 / handle.lambda;
  if (handle.mu_ns) fn.pl_mu = pl_transfer(*handle.mu_ns, handle.lambda, PlTransfer::kBaseToEnvelope);
  fn.is_convex = true;
  fn.project_to_minimizers = handle.base.project_to_minimizers;
  return fn;
}

double pl_transfer(double mu, double lambda, PlTransfer direction) {
  if (!(mu > 0.0) || !(lambda > 0.0)) throw Error(ErrorCode::kInvalidConstants, "mu and lambda must be positive");
  if (direction == PlTransfer::kBaseToEnvelope) return mu / (lambda * mu + 1.0);
  return mu / 4.0;
}

double moreau_alpha(double lambda, double mu) {
  if (!(mu > 0.0) || !(lambda > 0.0)) throw Error(ErrorCode::kInvalidConstants, "mu and lambda must be positive");
  const double s = std::sqrt(lambda * mu + 1.0);
  return (2.0 * s - 1.0) / (std::sqrt(lambda) * s);
}

RateCertificate moreau_certificate(double lambda, double mu) {
  const double s = std::sqrt(lambda * mu + 1.0);
  RateCertificate cert;
  cert.alpha = moreau_alpha(lambda, mu);
  cert.delta = 1.0 / std::sqrt(lambda);
  cert.exponent_m = 2.0 * mu * std::sqrt(lambda) / (mu * lambda + 1.0 + s);
  cert.constant_C = (lambda + 1.0 / mu) * (1.0 + s);
  cert.lipschitz_scaled_constant = cert.constant_C / lambda;
  cert.regime = Regime::kMoreau;
  cert.quantity = Quantity::kObjectiveGap;
  cert.binding = BindingRate::kDamping;
  return cert;
}

MoreauRun nonsmooth_heavy_ball(const MoreauHandle& handle, const Vector& x0, double t_end,
                               const IntegrationOptions& opts) {
  validate(handle);
  if (!handle.mu_ns) {
    throw Error(ErrorCode::kMissingConstant, "nonsmooth heavy ball needs the (ns-PL) constant mu_ns");
  }
  const double lambda = handle.lambda;
  const double mu = *handle.mu_ns;

  MoreauRun run;
  run.certificate = moreau_certificate(lambda, mu);
  run.alpha = run.certificate.alpha;
  const ObjectiveFunction env = envelope_objective(handle);
  run.traj = integrate_heavy_ball(env, run.alpha, x0, t_end, opts);
  run.traj.meta.dynamics = "moreau-heavy-ball";

  const Eigen::Index n = run.traj.size();
  run.prox_gap.resize(n);
  run.gap_lambda.resize(n);
  run.prox_gap_bound.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = run.traj.positions.col(i);
    run.prox_gap(i) = handle.base.gap(prox(handle, x));
    run.gap_lambda(i) = handle.base.gap(x);
  }
  const double initial = run.traj.values(0);  // F_λ(x0) − F*
  const double m = run.certificate.exponent_m;
  for (Eigen::Index i = 0; i < n; ++i) run.prox_gap_bound(i) = run.certificate.bound(run.traj.times(i), initial);

  if (handle.lipschitz_M) {
    const double s = std::sqrt(lambda * mu + 1.0);
    const double c = std::sqrt(std::max(0.0, initial) * (1.0 + s));
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::exp(-0.5 * m * run.traj.times(i));
      b(i) = 2.0 * std::max(std::sqrt(2.0) * *handle.lipschitz_M * lambda, c / mu * e) * c * e;
    }
    run.gap_lambda_bound = std::move(b);
  }
  return run;
}

}  // namespace hbpl
