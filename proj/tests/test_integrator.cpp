#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hbpl/error.hpp"
#include "hbpl/integrator.hpp"

using namespace hbpl;

namespace {

// F(x) = ½ μ x² in one dimension.
ObjectiveFunction quadratic_1d(double mu) {
  ObjectiveFunction fn;
  fn.id = "quadratic-1d";
  fn.dim = 1;
  fn.eval = [mu](const Vector& x) { return 0.5 * mu * x.squaredNorm(); };
  fn.grad = [mu](const Vector& x) -> Vector { return mu * x; };
  fn.lipschitz_L = mu;
  fn.pl_mu = mu;
  fn.is_convex = true;
  return fn;
}

double max_position_error(const Trajectory& traj, double mu, double alpha, double x0) {
  double err = 0;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    err = std::max(err, std::abs(traj.positions(0, i) - closed_form_1d_quadratic(mu, alpha, x0, traj.times(i)).x));
  }
  return err;
}

}  // namespace

TEST(ClosedForm, InitialConditionAndCriticalValue) {
  const auto p0 = closed_form_1d_quadratic(1.0, 2.0, 1.0, 0.0);
  EXPECT_EQ(p0.x, 1.0);
  EXPECT_EQ(p0.v, 0.0);
  EXPECT_NEAR(closed_form_1d_quadratic(1.0, 2.0, 1.0, 1.0).x, 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(closed_form_1d_quadratic(1.0, 2.0, 1.0, 1.0).x, 0.735759, 1e-6);
}

TEST(ClosedForm, SatisfiesTheOde) {
  // Residual of ẍ + αẋ + μx via differences of the exact velocity.
  for (double alpha : {0.5, 2.0, 3.0}) {
    for (double t : {0.3, 1.7, 4.0}) {
      const double h = 1e-5;
      const auto p = closed_form_1d_quadratic(1.3, alpha, 0.7, t);
      const double acc = (closed_form_1d_quadratic(1.3, alpha, 0.7, t + h).v -
                          closed_form_1d_quadratic(1.3, alpha, 0.7, t - h).v) / (2 * h);
      EXPECT_NEAR(acc + alpha * p.v + 1.3 * p.x, 0.0, 1e-8);
      const double vel = (closed_form_1d_quadratic(1.3, alpha, 0.7, t + h).x -
                          closed_form_1d_quadratic(1.3, alpha, 0.7, t - h).x) / (2 * h);
      EXPECT_NEAR(vel, p.v, 1e-8);
    }
  }
}

TEST(ClosedForm, LongDoubleAgrees) {
  const auto d = closed_form_1d_quadratic(1.0, 3.0, 1.0, 2.5);
  const auto ld = closed_form_1d_quadratic<long double>(1.0L, 3.0L, 1.0L, 2.5L);
  EXPECT_NEAR(d.x, static_cast<double>(ld.x), 1e-15);
}

TEST(ClosedForm, OverdampedDecayExponent) {
  EXPECT_NEAR(quadratic_gap_decay_exponent(1.0, 3.0), 3.0 - std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(3.0 - std::sqrt(5.0), 0.7639, 1e-4);
  EXPECT_DOUBLE_EQ(quadratic_gap_decay_exponent(1.0, 1.5), 1.5);
  // Log-slope of F = μx²/2 from the formula at large t.
  auto logF = [](double t) {
    const double x = closed_form_1d_quadratic(1.0, 3.0, 1.0, t).x;
    return std::log(0.5 * x * x);
  };
  EXPECT_NEAR(-(logF(40.0) - logF(30.0)) / 10.0, 3.0 - std::sqrt(5.0), 1e-9);
}

TEST(HeavyBall, CriticalExampleMatchesOracle) {
  const auto traj = integrate_heavy_ball(quadratic_1d(1.0), 2.0, Vector::Ones(1), 10.0);
  EXPECT_LE(max_position_error(traj, 1.0, 2.0, 1.0), 1e-8);
}

TEST(HeavyBall, OracleEquivalenceAcrossRegimes) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mu_dist(0.1, 4.0), ratio(0.2, 2.5), x_dist(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double mu = mu_dist(rng);
    // Every third triple is exactly critical; the rest straddle 2√μ.
    const double alpha = k % 3 == 0 ? 2 * std::sqrt(mu) : ratio(rng) * 2 * std::sqrt(mu);
    const double x0 = x_dist(rng);
    const auto traj = integrate_heavy_ball(quadratic_1d(mu), alpha, Vector::Constant(1, x0), 10.0);
    EXPECT_LE(max_position_error(traj, mu, alpha, x0), 1e-8) << "mu=" << mu << " alpha=" << alpha;
  }
}

TEST(HeavyBall, HalvingRelTolDoesNotDegradeAccuracy) {
  for (double alpha : {1.0, 2.0, 3.0}) {
    IntegrationOptions coarse;
    coarse.abs_tol = 1e-10;
    coarse.rel_tol = 1e-8;
    IntegrationOptions fine = coarse;
    fine.rel_tol = coarse.rel_tol / 2;
    const double e1 = max_position_error(integrate_heavy_ball(quadratic_1d(1.0), alpha, Vector::Ones(1), 10.0, coarse),
                                         1.0, alpha, 1.0);
    const double e2 = max_position_error(integrate_heavy_ball(quadratic_1d(1.0), alpha, Vector::Ones(1), 10.0, fine),
                                         1.0, alpha, 1.0);
    EXPECT_LE(e2, 2 * e1 + 1e-15) << alpha;
  }
}

TEST(HeavyBall, GridContractAndInvariants) {
  const auto fn = make_quadratic(10, 0.1, 1.0, 3);
  IntegrationOptions opts;
  opts.n_samples = 257;
  const auto traj = integrate_heavy_ball(fn, 0.7, Vector::Ones(10), 30.0, opts);
  const Eigen::VectorXd grid = uniform_grid(30.0, 257);
  ASSERT_EQ(traj.size(), 257);
  EXPECT_TRUE(traj.times.cwiseEqual(grid).all());
  EXPECT_EQ(traj.times(0), 0.0);
  for (Eigen::Index i = 1; i < traj.size(); ++i) EXPECT_GT(traj.times(i), traj.times(i - 1));
  EXPECT_EQ(traj.positions.cols(), 257);
  EXPECT_EQ(traj.velocities.cols(), 257);
  EXPECT_EQ(traj.values.size(), 257);
  EXPECT_EQ(traj.grad_sq.size(), 257);
  EXPECT_GT(traj.meta.accepted_steps, 0);
  const double f0 = traj.values(0);
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    EXPECT_GE(traj.values(i), -1e-12 * (1 + std::abs(f0)));
    EXPECT_LE(traj.values(i), f0 + 1e-9 * (1 + f0));
  }
}

TEST(HeavyBall, SublevelInvarianceOnSinValley) {
  const auto fn = make_sin_valley(0.125);
  const Vector x0{{4.5, 4.5}};
  const auto traj = integrate_heavy_ball(fn, 1.0, x0, 60.0);
  const double f0 = fn.gap(x0);
  EXPECT_LE(traj.values.maxCoeff(), f0 + 1e-9 * (1 + f0));
}

TEST(HeavyBall, RestAtCriticalPoint) {
  const auto fn = make_sin_valley(0.125);
  const Vector x0{{std::numbers::pi / 2, 1.0}};
  const auto traj = integrate_heavy_ball(fn, 1.0, x0, 5.0);
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    EXPECT_EQ(traj.positions.col(i), x0);
    EXPECT_EQ(traj.values(i), 0.0);
  }
}

TEST(HeavyBall, NonzeroInitialVelocity) {
  // x(t) for v0 ≠ 0 is a linear combination of two oracle solutions; check
  // against the explicit critical solution (x0 + (v0 + x0)t)e^{−t}.
  const Vector x0 = Vector::Ones(1), v0 = Vector::Constant(1, 0.5);
  const auto traj = integrate_heavy_ball(quadratic_1d(1.0), 2.0, x0, v0, 8.0);
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const double t = traj.times(i);
    EXPECT_NEAR(traj.positions(0, i), (1.0 + 1.5 * t) * std::exp(-t), 1e-8);
  }
}

TEST(HeavyBall, ReachesTinyGapOnIllConditionedQuadratic) {
  const double kappa = 10, mu = 1 / kappa;
  const auto fn = make_quadratic(100, mu, 1.0, 7);
  const double alpha = (2 * std::sqrt(kappa) - std::sqrt(kappa - 1)) * std::sqrt(mu);
  const auto traj = integrate_heavy_ball(fn, alpha, Vector::Ones(100), 200.0);
  EXPECT_LT(traj.values(traj.size() - 1), 1e-10);
}

TEST(GradientFlow, OneDimensionalExactDecay) {
  const auto traj = integrate_gradient_flow(quadratic_1d(1.0), Vector::Ones(1), 10.0);
  EXPECT_FALSE(traj.has_velocities());
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const double exact = 0.5 * std::exp(-2 * traj.times(i));
    EXPECT_LE(std::abs(traj.values(i) - exact), 1e-8 * exact);
  }
}

TEST(GradientFlow, ConstantAtMinimizer) {
  const auto traj = integrate_gradient_flow(make_flat_bottom(), Vector::Constant(1, 0.3), 5.0);
  EXPECT_TRUE((traj.positions.array() == 0.3).all());
}

TEST(GradientFlow, SlowerThanTunedHeavyBallWhenIllConditioned) {
  const double kappa = 200, mu = 1 / kappa;
  const auto fn = make_quadratic(100, mu, 1.0, 7);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  Vector x0(100);
  for (auto& v : x0) v = n01(rng);
  const double alpha = (2 * std::sqrt(kappa) - std::sqrt(kappa - 1)) * std::sqrt(mu);
  IntegrationOptions opts;
  opts.n_samples = 2001;
  const auto gf = integrate_gradient_flow(fn, x0, 2000.0, opts);
  const auto hb = integrate_heavy_ball(fn, alpha, x0, 2000.0, opts);
  auto first_below = [](const Trajectory& t) -> double {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (t.values(i) < 1e-6) return t.times(i);
    }
    return INFINITY;
  };
  EXPECT_LT(first_below(hb), first_below(gf));
}

TEST(Integrator, Errors) {
  EXPECT_THROW(integrate_heavy_ball(make_abs(), 1.0, Vector::Ones(1), 1.0), Error);
  EXPECT_THROW(integrate_heavy_ball(quadratic_1d(1.0), 1.0, Vector::Ones(2), 1.0), Error);
  IntegrationOptions tiny;
  tiny.max_steps = 5;
  try {
    integrate_heavy_ball(quadratic_1d(1.0), 1.0, Vector::Ones(1), 100.0, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrationBudgetExceeded);
  }
  ObjectiveFunction blow = quadratic_1d(1.0);
  blow.grad = [](const Vector& x) -> Vector { return -x.array().square().matrix() * 1e3; };
  blow.eval = [](const Vector& x) { return x.squaredNorm(); };
  try {
    IntegrationOptions capped;
    capped.max_steps = 100000;
    integrate_heavy_ball(blow, 0.1, Vector::Constant(1, 10.0), 100.0, capped);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kNumericalBlowup || e.code() == ErrorCode::kIntegrationBudgetExceeded);
  }
}
