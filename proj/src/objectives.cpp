#include "hbpl/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "hbpl/detail/scalar_search.hpp"
#include "hbpl/error.hpp"

namespace hbpl {

double ObjectiveFunction::distance_to_minimizers(const Vector& x) const {
  if (!project_to_minimizers) {
    throw Error(ErrorCode::kMissingOracle, "objective '" + id + "' ships no minimizer projection");
  }
  return (x - project_to_minimizers(x)).norm();
}

ObjectiveFunction make_quadratic(Eigen::Index dim, double mu, double L, std::uint64_t seed) {
  if (dim < 3) {
    throw Error(ErrorCode::kInvalidDimension, "quadratic needs dim >= 3 to carry the spectrum {0, mu, L}");
  }
  if (!(mu > 0.0)) throw Error(ErrorCode::kInvalidConstants, "quadratic needs mu > 0");
  if (mu > L) throw Error(ErrorCode::kInvalidConstants, "quadratic needs mu <= L");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> filler(mu, L);

  Matrix gaussian(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) gaussian(i, j) = normal(rng);
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian).householderQ();

  Vector spectrum(dim);
  spectrum(0) = 0.0;
  spectrum(1) = mu;
  spectrum(2) = L;
  for (Eigen::Index i = 3; i < dim; ++i) spectrum(i) = filler(rng);

  Matrix a = q.transpose() * spectrum.asDiagonal() * q;
  a = (0.5 * (a + a.transpose())).eval();

  // Minimizer set is the kernel, spanned by the row of Q paired with eigenvalue 0.
  const Vector kernel = q.row(0).transpose().normalized();

  auto hessian = std::make_shared<const Matrix>(a);
  ObjectiveFunction fn;
  fn.id = "quadratic";
  fn.dim = dim;
  fn.eval = [hessian](const Vector& x) { return 0.5 * x.dot(*hessian * x); };
  fn.grad = [hessian](const Vector& x) -> Vector { return *hessian * x; };
  fn.f_star = 0.0;
  fn.lipschitz_L = L;
  fn.pl_mu = mu;
  fn.is_convex = true;
  fn.project_to_minimizers = [kernel](const Vector& x) -> Vector { return kernel * kernel.dot(x); };
  fn.hessian = a;
  return fn;
}

namespace {

// Nearest point of the graph {(s, f(s))} to (x, y). Any minimizer lies within
// |y − f(x)| of x, so a grid over that window plus golden refinement suffices.
Vector project_onto_graph(const ScalarFunction& f, double x, double y) {
  const double radius = std::abs(y - f(x));
  Vector out(2);
  if (radius == 0.0) {
    out << x, y;
    return out;
  }
  auto sq_dist = [&](double s) {
    const double dy = f(s) - y;
    return (s - x) * (s - x) + dy * dy;
  };
  constexpr int kGrid = 801;
  const double h = 2.0 * radius / (kGrid - 1);
  int best = 0;
  double best_val = sq_dist(x - radius);
  for (int k = 1; k < kGrid; ++k) {
    const double v = sq_dist(x - radius + k * h);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double center = x - radius + best * h;
  const auto refined =
      detail::golden_section(sq_dist, center - h, center + h, 1e-14 * (1.0 + std::abs(center)));
  const double s = refined.value < best_val ? refined.argmin : center;
  out << s, f(s);
  return out;
}

}  // namespace

ObjectiveFunction make_graph_residual(double c, ScalarFunction f, ScalarFunction f_prime,
                                      bool f_is_affine) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidConstants, "graph residual needs c > 0");
  ObjectiveFunction fn;
  fn.id = "graph-residual";
  fn.dim = 2;
  fn.eval = [c, f](const Vector& p) {
    const double r = p(1) - f(p(0));
    return c * r * r;
  };
  fn.grad = [c, f, f_prime](const Vector& p) -> Vector {
    const double r = p(1) - f(p(0));
    Vector g(2);
    g << -2.0 * c * r * f_prime(p(0)), 2.0 * c * r;
    return g;
  };
  fn.f_star = 0.0;
  fn.pl_mu = 2.0 * c;
  fn.is_convex = f_is_affine;
  fn.project_to_minimizers = [f](const Vector& p) { return project_onto_graph(f, p(0), p(1)); };
  return fn;
}

ObjectiveFunction make_sin_valley(double c) {
  auto fn = make_graph_residual(
      c, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
  fn.id = "sin-valley";
  return fn;
}

ObjectiveFunction make_piecewise_nonconvex(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidConstants, "piecewise needs eps > 0");
  // Shift to the nearest end of the flat interval; zero inside it.
  auto offset = [eps](double x) {
    if (x > eps) return x - eps;
    if (x < -eps) return x + eps;
    return 0.0;
  };
  ObjectiveFunction fn;
  fn.id = "piecewise";
  fn.dim = 1;
  fn.eval = [offset](const Vector& x) {
    const double u = offset(x(0));
    const double s = std::sin(u);
    return u * u + 3.0 * s * s;
  };
  fn.grad = [offset](const Vector& x) -> Vector {
    const double u = offset(x(0));
    return Vector::Constant(1, 2.0 * u + 3.0 * std::sin(2.0 * u));
  };
  fn.f_star = 0.0;
  fn.pl_mu = 1.0 / 32.0;
  fn.lipschitz_L = 14.0;
  fn.is_convex = false;
  fn.project_to_minimizers = [eps](const Vector& x) -> Vector {
    return Vector::Constant(1, std::clamp(x(0), -eps, eps));
  };
  fn.near_kink = [eps](const Vector& x, double margin) {
    return std::abs(std::abs(x(0)) - eps) < margin;
  };
  return fn;
}

ObjectiveFunction make_flat_bottom() {
  ObjectiveFunction fn;
  fn.id = "flat-bottom";
  fn.dim = 1;
  fn.eval = [](const Vector& x) {
    const double r = std::max(std::abs(x(0)) - 1.0, 0.0);
    return r * r;
  };
  fn.grad = [](const Vector& x) -> Vector {
    const double r = std::max(std::abs(x(0)) - 1.0, 0.0);
    return Vector::Constant(1, 2.0 * r * (x(0) < 0.0 ? -1.0 : 1.0));
  };
  fn.f_star = 0.0;
  // |F'|² = 4F off [−1, 1], so the PL ratio is identically 2 there.
  fn.pl_mu = 2.0;
  fn.lipschitz_L = 2.0;
  fn.is_convex = true;
  fn.project_to_minimizers = [](const Vector& x) -> Vector {
    return Vector::Constant(1, std::clamp(x(0), -1.0, 1.0));
  };
  fn.near_kink = [](const Vector& x, double margin) { return std::abs(std::abs(x(0)) - 1.0) < margin; };
  return fn;
}

ObjectiveFunction make_abs() {
  ObjectiveFunction fn;
  fn.id = "abs";
  fn.dim = 1;
  fn.eval = [](const Vector& x) { return x.lpNorm<1>(); };
  fn.f_star = 0.0;
  fn.is_convex = true;
  fn.exact_prox = [](double lambda, const Vector& x) -> Vector {
    return x.unaryExpr([lambda](double v) {
      return std::copysign(std::max(std::abs(v) - lambda, 0.0), v);
    });
  };
  fn.project_to_minimizers = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  fn.subgradient_norm = [](const Vector& x) {
    // Minimal-norm subgradient of ‖·‖₁: sign(x_i) off zero, 0 on zero coordinates.
    return std::sqrt(static_cast<double>((x.array() != 0.0).count()));
  };
  fn.near_kink = [](const Vector& x, double margin) { return (x.array().abs() < margin).any(); };
  return fn;
}

}  // namespace hbpl
