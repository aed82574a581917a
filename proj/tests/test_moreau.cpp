#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hbpl/certificates.hpp"
#include "hbpl/error.hpp"
#include "hbpl/moreau.hpp"
#include "hbpl/verify.hpp"

using namespace hbpl;

namespace {

// Brute-force argmin of F(y) + (y − x)²/(2λ) on a fine 1-D grid.
double brute_prox(const ObjectiveFunction& fn, double lambda, double x) {
  double best_y = x, best = INFINITY;
  const int n = 400000;
  for (int i = 0; i <= n; ++i) {
    const double y = x - 10 + 20.0 * i / n;
    const double v = fn.eval(Vector::Constant(1, y)) + (y - x) * (y - x) / (2 * lambda);
    if (v < best) best = v, best_y = y;
  }
  return best_y;
}

MoreauHandle abs_handle(double lambda) {
  MoreauHandle h;
  h.base = make_abs();
  h.lambda = lambda;
  return h;
}

MoreauHandle numeric_abs_handle(double lambda) {
  MoreauHandle h = abs_handle(lambda);
  h.base.exact_prox = nullptr;
  return h;
}

}  // namespace

TEST(Prox, AbsExamples) {
  EXPECT_EQ(prox(abs_handle(1), Vector::Constant(1, 3))(0), 2.0);
  EXPECT_EQ(prox(abs_handle(2), Vector::Constant(1, 1))(0), 0.0);
  EXPECT_NEAR(brute_prox(make_abs(), 1, 3), 2.0, 1e-4);
  EXPECT_NEAR(brute_prox(make_abs(), 2, 1), 0.0, 1e-4);
}

TEST(Prox, NumericPathsAgreeWithBruteForce) {
  for (double x : {-4.0, -0.3, 0.0, 0.7, 3.0}) {
    EXPECT_NEAR(prox(numeric_abs_handle(1.5), Vector::Constant(1, x))(0), brute_prox(make_abs(), 1.5, x), 1e-4);
    MoreauHandle fb;
    fb.base = make_flat_bottom();
    fb.lambda = 0.7;
    EXPECT_NEAR(prox(fb, Vector::Constant(1, x))(0), brute_prox(fb.base, 0.7, x), 1e-4) << x;
  }
  // Golden section with a known slope bound.
  MoreauHandle m = numeric_abs_handle(1.0);
  m.lipschitz_M = 1.0;
  EXPECT_NEAR(prox(m, Vector::Constant(1, 3))(0), 2.0, 1e-9);
}

TEST(Prox, OptimalityMargin) {
  MoreauHandle fb;
  fb.base = make_flat_bottom();
  fb.lambda = 0.5;
  auto obj = [&](double y, double x) { return fb.base.eval(Vector::Constant(1, y)) + (y - x) * (y - x) / (2 * fb.lambda); };
  for (double x : {-3.0, 0.4, 2.2}) {
    const double p = prox(fb, Vector::Constant(1, x))(0);
    for (int k = -50; k <= 50; ++k) EXPECT_GE(obj(p + 0.1 * k, x), obj(p, x) - 1e-12);
  }
}

TEST(Prox, FixedAtMinimizers) {
  MoreauHandle fb;
  fb.base = make_flat_bottom();
  fb.lambda = 3;
  EXPECT_NEAR(prox(fb, Vector::Constant(1, 0.5))(0), 0.5, 1e-12);
  EXPECT_EQ(prox(abs_handle(1), Vector::Zero(1))(0), 0.0);
  EXPECT_NEAR(prox(numeric_abs_handle(1), Vector::Zero(1))(0), 0.0, 1e-9);
}

TEST(Prox, Nonexpansive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  MoreauHandle fb;
  fb.base = make_flat_bottom();
  fb.lambda = 0.8;
  for (int k = 0; k < 200; ++k) {
    const Vector x = Vector::Constant(1, u(rng)), y = Vector::Constant(1, u(rng));
    for (const auto& h : {abs_handle(1.3), fb}) {
      EXPECT_LE((prox(h, x) - prox(h, y)).norm(), (x - y).norm() * (1 + 1e-10));
    }
  }
}

TEST(Prox, MissingOracle) {
  MoreauHandle h = numeric_abs_handle(1);
  h.base.dim = 2;
  try {
    prox(h, Vector::Ones(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingOracle);
  }
}

TEST(Envelope, HuberValues) {
  const auto p = envelope_value_grad(abs_handle(1), Vector::Constant(1, 3));
  EXPECT_EQ(p.value, 2.5);
  EXPECT_EQ(p.gradient(0), 1.0);
  EXPECT_EQ(p.prox(0), 2.0);
  const auto q = envelope_value_grad(abs_handle(1), Vector::Constant(1, 0.5));
  EXPECT_EQ(q.value, 0.125);
  EXPECT_EQ(q.gradient(0), 0.5);
  const auto z = envelope_value_grad(abs_handle(1), Vector::Zero(1));
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.gradient(0), 0.0);
}

TEST(Envelope, BelowBaseAndLipschitzGradient) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  const auto h = abs_handle(0.7);
  for (int k = 0; k < 300; ++k) {
    const Vector x = Vector::Constant(1, u(rng)), y = Vector::Constant(1, u(rng));
    const auto ex = envelope_value_grad(h, x), ey = envelope_value_grad(h, y);
    EXPECT_LE(ex.value, h.base.eval(x) + 1e-15);
    EXPECT_LE((ex.gradient - ey.gradient).norm(), (x - y).norm() / h.lambda * (1 + 1e-12));
  }
}

TEST(Envelope, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  MoreauHandle fb;
  fb.base = make_flat_bottom();
  fb.lambda = 0.5;
  for (const auto& h : {abs_handle(1.0), fb}) {
    const ObjectiveFunction env = envelope_objective(h);
    for (int k = 0; k < 100; ++k) {
      const Vector x = Vector::Constant(1, u(rng));
      const double step = 1e-6 * (1 + x.norm());
      const double fd = (env.eval(x + Vector::Constant(1, step)) - env.eval(x - Vector::Constant(1, step))) / (2 * step);
      const double g = env.grad(x)(0);
      EXPECT_LE(std::abs(fd - g), 1e-5 * std::max(1.0, std::abs(g))) << x(0);
    }
  }
}

TEST(Envelope, SharedMinimizers) {
  MoreauHandle fb;
  fb.base = make_flat_bottom();
  fb.lambda = 2;
  for (double x : {-1.0, 0.0, 0.3, 1.0}) {
    EXPECT_NEAR(envelope_value_grad(fb, Vector::Constant(1, x)).value, 0.0, 1e-12);
  }
  const ObjectiveFunction env = envelope_objective(abs_handle(1));
  EXPECT_EQ(env.id, "moreau(abs)");
  EXPECT_DOUBLE_EQ(*env.lipschitz_L, 1.0);
}

TEST(PlTransfer, Formulas) {
  EXPECT_DOUBLE_EQ(pl_transfer(1, 1, PlTransfer::kBaseToEnvelope), 0.5);
  EXPECT_DOUBLE_EQ(pl_transfer(4, 123, PlTransfer::kEnvelopeToBase), 1.0);
  const double round = pl_transfer(pl_transfer(1, 1, PlTransfer::kBaseToEnvelope), 1, PlTransfer::kEnvelopeToBase);
  EXPECT_DOUBLE_EQ(round, 0.125);
  EXPECT_LT(round, 1.0);
}

TEST(MoreauAlpha, UnitExample) {
  const double s2 = std::sqrt(2.0);
  EXPECT_NEAR(moreau_alpha(1, 1), (2 * s2 - 1) / s2, 1e-12);
  EXPECT_NEAR(moreau_alpha(1, 1), 1.29289, 1e-5);
  const auto c = moreau_certificate(1, 1);
  EXPECT_NEAR(c.exponent_m, 2 - s2, 1e-12);
  EXPECT_NEAR(c.exponent_m, 2 / (2 + s2), 1e-12);
  EXPECT_NEAR(c.constant_C, 2 * (1 + s2), 1e-12);
}

TEST(MoreauAlpha, PrintedAndSimplifiedFormsAgree) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logu(-3, 3);
  for (int k = 0; k < 100; ++k) {
    const double lambda = std::exp(logu(rng)), mu = std::exp(logu(rng));
    const double s = std::sqrt(lambda * mu + 1);
    const double printed = (2 * lambda * mu + 1 + s) / (std::sqrt(lambda) * (lambda * mu + 1 + s));
    const double a = moreau_alpha(lambda, mu);
    EXPECT_NEAR(a, printed, 1e-12 * printed);
    const double Lp = 1 / lambda, mup = mu / (lambda * mu + 1);
    const auto conv = optimal_damping_convex(Lp, mup, 0.1);
    EXPECT_NEAR(a, conv.gap.alpha, 1e-12 * a);
    EXPECT_NEAR(moreau_certificate(lambda, mu).exponent_m, conv.gap.exponent_m, 1e-12 * a);
  }
}

TEST(NonsmoothHeavyBall, AbsDemoEnvelope) {
  MoreauHandle h = abs_handle(1);
  h.mu_ns = 0.5;
  h.lipschitz_M = 1;
  IntegrationOptions opts;
  opts.n_samples = 2001;
  const auto run = nonsmooth_heavy_ball(h, Vector::Constant(1, 3), 40.0, opts);
  EXPECT_EQ(run.traj.meta.dynamics, "moreau-heavy-ball");
  EXPECT_NEAR(run.alpha, moreau_alpha(1, 0.5), 1e-15);
  ASSERT_EQ(run.prox_gap.size(), run.traj.size());
  ASSERT_TRUE(run.gap_lambda_bound);
  for (Eigen::Index i = 0; i < run.traj.size(); ++i) {
    EXPECT_LE(run.prox_gap(i), run.prox_gap_bound(i) * (1 + 1e-6) + 1e-14) << run.traj.times(i);
    EXPECT_LE(run.gap_lambda(i), (*run.gap_lambda_bound)(i) * (1 + 1e-6) + 1e-14) << run.traj.times(i);
  }
  EXPECT_TRUE(check_envelope(run.traj, run.certificate, run.prox_gap).passed());
}

TEST(NonsmoothHeavyBall, StartAtMinimizer) {
  MoreauHandle h = abs_handle(1);
  h.mu_ns = 0.5;
  const auto run = nonsmooth_heavy_ball(h, Vector::Zero(1), 10.0);
  EXPECT_EQ(run.prox_gap.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(run.traj.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(NonsmoothHeavyBall, MissingConstant) {
  try {
    nonsmooth_heavy_ball(abs_handle(1), Vector::Ones(1), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingConstant);
  }
}
