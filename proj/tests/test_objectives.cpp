#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hbpl/error.hpp"
#include "hbpl/objectives.hpp"
#include "hbpl/registry.hpp"

using namespace hbpl;

namespace {

constexpr double kPi = std::numbers::pi;

Vector central_difference(const ObjectiveFunction& fn, const Vector& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (fn.eval(xp) - fn.eval(xm)) / (2.0 * h);
  }
  return g;
}

std::vector<Vector> box_samples(Eigen::Index dim, int n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vector> out;
  for (int k = 0; k < n; ++k) {
    Vector x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = u(rng);
    out.push_back(x);
  }
  return out;
}

std::vector<ObjectiveFunction> smooth_builtins() {
  return {make_quadratic(5, 0.1, 1.0, 3), make_quadratic(3, 1.0, 3.0, 0), make_sin_valley(0.125),
          make_sin_valley(1.0), make_piecewise_nonconvex(1.0), make_flat_bottom()};
}

}  // namespace

TEST(Quadratic, TwoPointSpectrumWhenMuEqualsL) {
  const auto fn = make_quadratic(3, 1.0, 1.0, 0);
  ASSERT_TRUE(fn.hessian);
  Eigen::SelfAdjointEigenSolver<Matrix> es(*fn.hessian);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()(1), 1.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()(2), 1.0, 1e-14);
  EXPECT_EQ(*fn.pl_mu, 1.0);
}

TEST(Quadratic, ExtremeEigenvaluesAreExact) {
  const auto fn = make_quadratic(100, 0.01, 1.0, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(*fn.hessian);
  const auto& ev = es.eigenvalues();
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  EXPECT_NEAR(ev(1), 0.01, 1e-12);
  EXPECT_NEAR(ev(ev.size() - 1), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(*fn.lipschitz_L / *fn.pl_mu, 100.0);
  EXPECT_TRUE(fn.is_convex);
}

TEST(Quadratic, SampledPlRatioAtLeastMu) {
  // Brute-force ratio ‖∇F‖²/(2F) over Gaussian samples.
  const auto fn = make_quadratic(100, 0.1, 1.0, 7);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  double worst = INFINITY;
  for (int k = 0; k < 1000; ++k) {
    Vector x(100);
    for (auto& xi : x) xi = n01(rng);
    const double gap = fn.gap(x);
    if (gap > 1e-12) worst = std::min(worst, fn.grad(x).squaredNorm() / (2.0 * gap));
  }
  EXPECT_GE(worst, 0.1 * (1.0 - 1e-9));
}

TEST(Quadratic, DeterministicForSeed) {
  const auto a = make_quadratic(20, 0.1, 1.0, 42);
  const auto b = make_quadratic(20, 0.1, 1.0, 42);
  EXPECT_TRUE((*a.hessian).cwiseEqual(*b.hessian).all());
  const auto c = make_quadratic(20, 0.1, 1.0, 43);
  EXPECT_FALSE((*a.hessian).cwiseEqual(*c.hessian).all());
}

TEST(Quadratic, RejectsBadArguments) {
  EXPECT_THROW(make_quadratic(2, 0.1, 1.0, 0), Error);
  EXPECT_THROW(make_quadratic(3, 2.0, 1.0, 0), Error);
  EXPECT_THROW(make_quadratic(3, 0.0, 1.0, 0), Error);
  try {
    make_quadratic(2, 0.1, 1.0, 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDimension);
  }
  try {
    make_quadratic(3, 2.0, 1.0, 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConstants);
  }
}

TEST(SinValley, ConstantsAndMinimizerCurve) {
  EXPECT_DOUBLE_EQ(*make_sin_valley(1.0).pl_mu, 2.0);
  const auto fn = make_sin_valley(0.125);
  EXPECT_DOUBLE_EQ(*fn.pl_mu, 0.25);
  EXPECT_FALSE(fn.is_convex);
  EXPECT_FALSE(fn.lipschitz_L);
  const Vector p{{kPi / 2, 1.0}};
  EXPECT_EQ(fn.eval(p), 0.0);
  EXPECT_NEAR(fn.grad(p).norm(), 0.0, 1e-16);
  EXPECT_THROW(make_sin_valley(0.0), Error);
}

TEST(GraphResidual, AffineIsConvex) {
  const auto fn = make_graph_residual(1.0, [](double x) { return x; }, [](double) { return 1.0; }, true);
  EXPECT_TRUE(fn.is_convex);
  EXPECT_DOUBLE_EQ(fn.eval(Vector{{0.0, 2.0}}), 4.0);
}

TEST(Piecewise, ValuesAndConstants) {
  const auto fn = make_piecewise_nonconvex(1.0);
  EXPECT_EQ(fn.eval(Vector::Constant(1, 0.5)), 0.0);
  EXPECT_EQ(fn.grad(Vector::Constant(1, 0.5))(0), 0.0);
  const Vector x = Vector::Constant(1, 1.0 + kPi);
  EXPECT_NEAR(fn.eval(x), kPi * kPi, 1e-12);
  EXPECT_NEAR(fn.grad(x)(0), 2 * kPi, 1e-12);
  EXPECT_DOUBLE_EQ(*fn.pl_mu, 1.0 / 32.0);
  EXPECT_DOUBLE_EQ(*fn.lipschitz_L, 14.0);
  EXPECT_THROW(make_piecewise_nonconvex(0.0), Error);
}

TEST(Piecewise, GridPlRatioAboveOneThirtySecond) {
  const auto fn = make_piecewise_nonconvex(1.0);
  double worst = INFINITY;
  const int n = 200001;
  for (int i = 0; i < n; ++i) {
    const double x = -10.0 + 20.0 * i / (n - 1);
    if (std::abs(x) <= 1.0) continue;
    const Vector p = Vector::Constant(1, x);
    const double f = fn.eval(p);
    if (f > 0) worst = std::min(worst, fn.grad(p).squaredNorm() / (2 * f));
  }
  EXPECT_GE(worst, 1.0 / 32.0);
}

TEST(FlatBottom, ValuesAndGridPlConstant) {
  const auto fn = make_flat_bottom();
  EXPECT_EQ(fn.eval(Vector::Constant(1, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(fn.eval(Vector::Constant(1, 3.0)), 4.0);
  EXPECT_DOUBLE_EQ(fn.grad(Vector::Constant(1, 3.0))(0), 4.0);
  EXPECT_DOUBLE_EQ(*fn.pl_mu, 2.0);
  double worst = INFINITY;
  for (int i = 0; i <= 100000; ++i) {
    const Vector p = Vector::Constant(1, -5.0 + 10.0 * i / 100000);
    const double f = fn.eval(p);
    if (f > 1e-14) worst = std::min(worst, fn.grad(p).squaredNorm() / (2 * f));
  }
  EXPECT_NEAR(worst, 2.0, 1e-9);
}

TEST(Abs, EvalOnlyWithSoftThreshold) {
  const auto fn = make_abs();
  EXPECT_FALSE(fn.has_gradient());
  EXPECT_FALSE(fn.pl_mu);
  EXPECT_EQ(fn.eval(Vector::Constant(1, 0.0)), 0.0);
  EXPECT_EQ(fn.eval(Vector::Constant(1, -2.0)), 2.0);
  EXPECT_EQ(fn.exact_prox(1.0, Vector::Constant(1, 3.0))(0), 2.0);
  // Brute-force argmin of |y| + (y − 3)²/2.
  double best_y = 0, best = INFINITY;
  for (int i = 0; i <= 600000; ++i) {
    const double y = -3.0 + 6.0 * i / 600000;
    const double v = std::abs(y) + 0.5 * (y - 3) * (y - 3);
    if (v < best) best = v, best_y = y;
  }
  EXPECT_NEAR(best_y, 2.0, 1e-5);
}

TEST(Builtins, NeverBelowFStar) {
  for (const auto& fn : smooth_builtins()) {
    for (const auto& x : box_samples(fn.dim, 1000, -5, 5, 1)) EXPECT_GE(fn.eval(x), fn.f_star) << fn.id;
  }
}

TEST(Builtins, GradientMatchesFiniteDifferences) {
  for (const auto& fn : smooth_builtins()) {
    int checked = 0;
    for (const auto& x : box_samples(fn.dim, 300, -5, 5, 2)) {
      if (fn.near_kink && fn.near_kink(x, 1e-3)) continue;
      if (checked == 100) break;
      ++checked;
      const Vector g = fn.grad(x);
      const Vector fd = central_difference(fn, x);
      EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << fn.id;
    }
    EXPECT_EQ(checked, 100) << fn.id;
  }
}

TEST(Builtins, PlInequalityHolds) {
  for (const auto& fn : smooth_builtins()) {
    if (!fn.pl_mu) continue;
    const double mu = *fn.pl_mu;
    const double half_width = fn.id == "piecewise" ? 10.0 : 5.0;
    for (const auto& x : box_samples(fn.dim, 1000, -half_width, half_width, 3)) {
      EXPECT_LE(2 * mu * fn.gap(x), fn.grad(x).squaredNorm() * (1 + 1e-12)) << fn.id;
    }
  }
}

TEST(Builtins, DescentAndCocoercivityForConvexSmooth) {
  for (const auto& fn : smooth_builtins()) {
    if (!fn.is_convex || !fn.lipschitz_L) continue;
    const double L = *fn.lipschitz_L;
    const auto xs = box_samples(fn.dim, 1000, -5, 5, 4);
    const auto ys = box_samples(fn.dim, 1000, -5, 5, 5);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const Vector& x = xs[k];
      const Vector& y = ys[k];
      const Vector gy = fn.grad(y);
      const double lhs = fn.eval(x) - fn.eval(y);
      const double scale = 1e-10 * (1 + std::abs(fn.eval(x)) + std::abs(fn.eval(y)));
      EXPECT_LE(lhs, gy.dot(x - y) + 0.5 * L * (x - y).squaredNorm() + scale) << fn.id;
      EXPECT_GE(lhs, gy.dot(x - y) + (fn.grad(x) - gy).squaredNorm() / (2 * L) - scale) << fn.id;
    }
  }
}

TEST(Registry, BuildsEveryId) {
  for (const auto& id : registered_objectives()) {
    nlohmann::json params = nlohmann::json::object();
    if (id == "quadratic") params = {{"dim", 5}, {"mu", 0.5}};
    const auto fn = make_objective(id, params);
    EXPECT_EQ(fn.id, id);
  }
  EXPECT_EQ(make_objective("piecewise", {{"eps", 2.0}}).eval(Vector::Constant(1, 1.5)), 0.0);
}

TEST(Registry, UnknownIdAndKeysAreRejected) {
  try {
    make_objective("rosenbrock", nlohmann::json::object());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownFunction);
  }
  EXPECT_THROW(make_objective("sin-valley", {{"k", 1}}), Error);
}
