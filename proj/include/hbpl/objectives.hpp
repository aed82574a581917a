#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace hbpl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using ProxMap = std::function<Vector(double lambda, const Vector&)>;
using ScalarFunction = std::function<double(double)>;

/// Evaluation/gradient oracle plus the constants the rate theory needs.
///
/// Values are immutable once built; every callable captures its data by value
/// (or through shared const storage), so evaluation is reentrant.
struct ObjectiveFunction {
  std::string id;
  Eigen::Index dim = 0;
  ScalarField eval;
  VectorField grad;  // empty for eval-only objectives
  double f_star = 0.0;
  std::optional<double> lipschitz_L;
  std::optional<double> pl_mu;
  bool is_convex = false;
  ProxMap exact_prox;

  // Nearest point of the minimizer set. Shipped exactly by every built-in.
  VectorField project_to_minimizers;
  // dist(0, ∂F(x)) for objectives without a gradient.
  ScalarField subgradient_norm;
  // True when x lies within `margin` of a point where F is not twice
  // differentiable (finite-difference checks skip those points).
  std::function<bool(const Vector&, double margin)> near_kink;
  // Constant Hessian, only for quadratics.
  std::optional<Matrix> hessian;

  bool has_gradient() const { return static_cast<bool>(grad); }
  double gap(const Vector& x) const { return eval(x) - f_star; }
  double distance_to_minimizers(const Vector& x) const;
};

/// F(x) = ½⟨Ax, x⟩ with spectrum {0, mu, L} ∪ uniform[mu, L]^(dim-3),
/// conjugated by the Q factor of a seeded Gaussian matrix.
ObjectiveFunction make_quadratic(Eigen::Index dim, double mu, double L, std::uint64_t seed);

/// F(x, y) = c·(y − f(x))². PL with constant 2c; minimizers are the graph of f.
ObjectiveFunction make_graph_residual(double c, ScalarFunction f, ScalarFunction f_prime,
                                      bool f_is_affine = false);

/// The sin-valley instance: c·(y − sin x)².
ObjectiveFunction make_sin_valley(double c);

/// Nonconvex 1-D function flat on [−eps, eps] with (x∓eps)² + 3 sin²(x∓eps) outside.
ObjectiveFunction make_piecewise_nonconvex(double eps);

/// F(x) = (max{|x| − 1, 0})², minimizer set [−1, 1].
ObjectiveFunction make_flat_bottom();

/// F(x) = |x| in one dimension. Eval-only, with soft-threshold prox.
ObjectiveFunction make_abs();

}  // namespace hbpl
