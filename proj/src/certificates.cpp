#include "hbpl/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hbpl/error.hpp"

namespace hbpl {

namespace {

constexpr double kRelTie = 1e-12;

void validate_constants(double L, double mu) {
  if (!(mu > 0.0) || !(L > 0.0) || !std::isfinite(L) || !std::isfinite(mu)) {
    throw Error(ErrorCode::kInvalidConstants, "L and mu must be positive and finite");
  }
  if (mu > L) throw Error(ErrorCode::kInvalidConstants, "mu exceeds L (kappa < 1)");
}

void validate_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::kInvalidConstants, "delta must be positive");
}

bool same_constants(double L, double mu) { return L - mu <= kRelTie * L; }

// Convex window (L/δ, α−], open at α− when μ = L and δ ≤ √L.
bool in_convex_window(double L, double mu, double delta, double alpha, bool* strict_case = nullptr) {
  const double lower = L / delta;
  const double upper = alpha_minus(L, mu, delta);
  const bool strict = same_constants(L, mu) && delta <= std::sqrt(L) * (1.0 + kRelTie);
  if (strict_case) *strict_case = strict;
  if (!(alpha > lower)) return false;
  return strict ? alpha < upper : alpha <= upper * (1.0 + kRelTie);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kNonconvexSmallKappa: return "nonconvex-small-kappa";
    case Regime::kNonconvexLargeKappa: return "nonconvex-large-kappa";
    case Regime::kConvexKappaOne: return "convex-kappa-one";
    case Regime::kConvexKappaGtOne: return "convex-kappa-gt-one";
    case Regime::kNonconvexGeneral: return "nonconvex";
    case Regime::kConvexGeneral: return "convex";
    case Regime::kMoreau: return "moreau";
  }
  return "unknown";
}

std::string_view to_string(Quantity quantity) {
  return quantity == Quantity::kObjectiveGap ? "objective-gap" : "grad-norm-sq";
}

std::string_view to_string(BindingRate binding) {
  switch (binding) {
    case BindingRate::kDamping: return "damping";
    case BindingRate::kLyapunov: return "lyapunov";
    case BindingRate::kTie: return "tie";
  }
  return "unknown";
}

double RateCertificate::bound(double t, double initial) const {
  double b = constant_C * initial * std::exp(-exponent_m * t);
  if (polynomial_factor) b *= 1.0 + *polynomial_factor * t;
  return b;
}

bool AlphaRegion::contains(double alpha, double rel_tol) const {
  if (!(alpha > lower_open) || !(alpha < upper_open)) return false;
  if (alpha <= left_closed_end * (1.0 + rel_tol)) return true;
  return alpha >= right_closed_start * (1.0 - rel_tol);
}

double alpha_minus(double L, double mu, double delta) {
  const double s = delta + L / delta;
  return 0.5 * (delta + 3.0 * L / delta - std::sqrt(std::max(0.0, s * s - 4.0 * mu)));
}

double alpha_plus(double L, double mu, double delta) {
  const double s = delta + L / delta;
  return 0.5 * (delta + 3.0 * L / delta + std::sqrt(std::max(0.0, s * s - 4.0 * mu)));
}

AlphaRegion feasible_alpha_region(double L, double mu, double delta) {
  validate_constants(L, mu);
  validate_delta(delta);
  return {L / delta, alpha_minus(L, mu, delta), alpha_plus(L, mu, delta), delta + 2.0 * L / delta};
}

RateCertificate rate_nonconvex(double L, double mu, double delta, double alpha) {
  const AlphaRegion region = feasible_alpha_region(L, mu, delta);
  if (!region.contains(alpha)) {
    throw Error(ErrorCode::kInfeasibleDamping, "alpha = " + fmt(alpha) + " is outside (" + fmt(region.lower_open) +
                                                   ", " + fmt(region.left_closed_end) + "] U [" +
                                                   fmt(region.right_closed_start) + ", " +
                                                   fmt(region.upper_open) + ")");
  }
  const double a = delta + 2.0 * L / delta - alpha;
  const double R = 2.0 * (alpha - L / delta);

  RateCertificate cert;
  cert.alpha = alpha;
  cert.delta = delta;
  cert.regime = Regime::kNonconvexGeneral;
  cert.quantity = Quantity::kObjectiveGap;
  if (std::abs(a - R) <= kRelTie * std::max(a, R)) {
    cert.exponent_m = std::min(a, R);
    cert.constant_C = 1.0;
    cert.polynomial_factor = a;
    cert.binding = BindingRate::kTie;
    return cert;
  }
  cert.exponent_m = std::min(a, R);
  cert.constant_C = 1.0 + a / std::abs(a - R);
  cert.binding = R < a ? BindingRate::kDamping : BindingRate::kLyapunov;
  return cert;
}

ConvexCertificates rate_convex(double L, double mu, double delta, double alpha) {
  validate_constants(L, mu);
  validate_delta(delta);
  bool strict = false;
  if (!in_convex_window(L, mu, delta, alpha, &strict)) {
    const std::string window = "(" + fmt(L / delta) + ", " + fmt(alpha_minus(L, mu, delta)) + (strict ? ")" : "]");
    std::string msg = "alpha = " + fmt(alpha) + " is outside the window " + window;
    if (strict) msg += " (open at alpha- because mu = L and delta <= sqrt(L))";
    throw Error(ErrorCode::kInfeasibleDamping, msg);
  }
  const double gap_den = delta + L / delta - alpha;
  const double c_grad = 2.0 * (1.0 + L / (delta * gap_den));
  const double c_gap = (delta + 2.0 * L / delta - alpha) / (mu * gap_den);
  const double m = 2.0 * (alpha - L / delta);

  ConvexCertificates out;
  out.grad.exponent_m = m;
  out.grad.constant_C = c_grad;
  out.grad.alpha = alpha;
  out.grad.delta = delta;
  out.grad.regime = Regime::kConvexGeneral;
  out.grad.quantity = Quantity::kGradNormSq;
  out.grad.binding = BindingRate::kDamping;
  out.grad.lipschitz_scaled_constant = L * c_grad;

  out.gap = out.grad;
  out.gap.quantity = Quantity::kObjectiveGap;
  out.gap.constant_C = c_gap;
  out.gap.statement_constant = 2.0 * c_grad / mu;
  out.gap.lipschitz_scaled_constant = L * c_gap;
  return out;
}

RateCertificate optimal_damping_nonconvex(double L, double mu, double eps, SmallKappaSign sign) {
  validate_constants(L, mu);
  const double kappa = L / mu;
  const double rmu = std::sqrt(mu);
  RateCertificate cert;
  cert.quantity = Quantity::kObjectiveGap;

  if (kappa < 9.0 / 8.0) {
    const double r2mu = std::sqrt(2.0 * mu);
    if (!(eps > 0.0)) throw Error(ErrorCode::kVacuousEpsilon, "eps must be positive when kappa < 9/8");
    if (eps >= r2mu) throw Error(ErrorCode::kVacuousEpsilon, "eps >= sqrt(2 mu) leaves a nonpositive exponent");
    const double disc = std::sqrt(std::max(0.0, 9.0 - 8.0 * kappa));
    const double root = std::sqrt(std::max(0.0, 9.0 * mu - 8.0 * L));
    const double pm = sign == SmallKappaSign::kPlus ? 1.0 : -1.0;
    cert.alpha = rmu / (2.0 * std::sqrt(2.0)) * (5.0 + pm * disc) - 0.5 * eps;
    // "+" sits at δ−, "−" at δ+.
    cert.delta = (3.0 * rmu - pm * root) / (2.0 * std::sqrt(2.0));
    cert.exponent_m = r2mu - eps;
    cert.constant_C = (4.0 * eps + 2.0 * r2mu) / eps;
    cert.statement_constant = 2.0 * (2.0 * eps + r2mu) / (3.0 * eps);
    cert.epsilon = eps;
    cert.regime = Regime::kNonconvexSmallKappa;
    cert.binding = BindingRate::kDamping;
    return cert;
  }

  const double rk = std::sqrt(kappa);
  const double rk1 = std::sqrt(kappa - 1.0);
  cert.alpha = (2.0 * rk - rk1) * rmu;
  cert.delta = std::sqrt(L);
  cert.exponent_m = 2.0 * (rk - rk1) * rmu;
  cert.regime = Regime::kNonconvexLargeKappa;
  const double den = 8.0 * kappa - 9.0;
  if (den <= kRelTie * 9.0) {
    // a = R: the constant degenerates into the polynomial envelope.
    cert.constant_C = 1.0;
    cert.polynomial_factor = cert.exponent_m;
    cert.binding = BindingRate::kTie;
  } else {
    cert.constant_C = 4.0 * rk1 * (3.0 * rk1 + rk) / den;
    cert.binding = BindingRate::kDamping;
  }
  return cert;
}

ConvexCertificates optimal_damping_convex(double L, double mu, double eps) {
  validate_constants(L, mu);
  const double rmu = std::sqrt(mu);
  ConvexCertificates out;
  RateCertificate& g = out.grad;
  g.quantity = Quantity::kGradNormSq;
  g.binding = BindingRate::kDamping;
  g.delta = std::sqrt(L);

  if (same_constants(L, mu)) {
    if (!(eps > 0.0)) throw Error(ErrorCode::kVacuousEpsilon, "eps must be positive when kappa = 1");
    if (eps >= rmu) throw Error(ErrorCode::kVacuousEpsilon, "eps >= sqrt(mu) leaves a nonpositive exponent");
    const double q = 1.0 + rmu / eps;
    g.alpha = 2.0 * rmu - eps;
    g.exponent_m = 2.0 * (rmu - eps);
    g.constant_C = 2.0 * q;
    g.epsilon = eps;
    g.regime = Regime::kConvexKappaOne;
    g.lipschitz_scaled_constant = L * g.constant_C;
    out.gap = g;
    out.gap.quantity = Quantity::kObjectiveGap;
    out.gap.constant_C = q / mu;
    out.gap.statement_constant = 2.0 * g.constant_C / mu;
    out.gap.lipschitz_scaled_constant = L * q / mu;
    return out;
  }

  const double kappa = L / mu;
  const double rk = std::sqrt(kappa);
  const double rk1 = std::sqrt(kappa - 1.0);
  const double q = 1.0 + std::sqrt(kappa / (kappa - 1.0));
  g.alpha = (2.0 * rk - rk1) * rmu;
  g.exponent_m = 2.0 * (rk - rk1) * rmu;
  g.constant_C = 2.0 * q;
  g.regime = Regime::kConvexKappaGtOne;
  g.lipschitz_scaled_constant = L * g.constant_C;
  out.gap = g;
  out.gap.quantity = Quantity::kObjectiveGap;
  out.gap.constant_C = q / mu;
  out.gap.statement_constant = 2.0 * g.constant_C / mu;
  out.gap.lipschitz_scaled_constant = L * q / mu;
  return out;
}

double damping_cubic(double delta, double alpha, double L, double mu) {
  return ((alpha * delta - (alpha * alpha + L + mu)) * delta + 3.0 * L * alpha) * delta - 2.0 * L * L;
}

double delta_for_alpha(double alpha, double L, double mu) {
  validate_constants(L, mu);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kInvalidConstants, "alpha must be positive");

  auto p = [&](double d) { return damping_cubic(d, alpha, L, mu); };
  // Every admissible root has α > L/δ; large-δ roots sit near (L + μ)/α.
  const double lo = 0.5 * L / alpha;
  const double hi = std::max({10.0 * std::max(alpha, std::sqrt(L)), 4.0 * (L + mu) / alpha, 2.0 * lo});

  std::vector<double> candidates;
  const int n_scan = 4000;
  const double ratio = std::log(hi / lo);
  double prev_d = lo;
  double prev_p = p(lo);
  if (prev_p == 0.0) candidates.push_back(lo);
  for (int i = 1; i <= n_scan; ++i) {
    const double d = lo * std::exp(ratio * i / n_scan);
    const double pd = p(d);
    if (pd == 0.0) {
      candidates.push_back(d);
    } else if (prev_p != 0.0 && (pd < 0.0) != (prev_p < 0.0)) {
      candidates.push_back(bisect(p, prev_d, d, 0.0, 200));
    }
    prev_d = d;
    prev_p = pd;
  }
  // Even-multiplicity roots show no sign change; they sit at critical points.
  const double qa = 3.0 * alpha;
  const double qb = -2.0 * (alpha * alpha + L + mu);
  const double qc = 3.0 * L * alpha;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc >= 0.0) {
    const double scale = 2.0 * L * L + 3.0 * L * alpha * alpha;
    for (double sgn : {-1.0, 1.0}) {
      const double d = (-qb + sgn * std::sqrt(disc)) / (2.0 * qa);
      if (d > 0.0 && std::abs(p(d)) <= 1e-13 * scale) candidates.push_back(d);
    }
  }

  double best = -1.0;
  for (double d : candidates) {
    const double am = alpha_minus(L, mu, d);
    if (std::abs(am - alpha) > 1e-10 * alpha) continue;  // root of the α+ branch
    if (!in_convex_window(L, mu, d, alpha)) continue;
    if (d > best) best = d;  // exponent 2(α − L/δ) grows with δ
  }
  if (best < 0.0) {
    throw Error(ErrorCode::kNoFeasibleDelta,
                "no delta with alpha-(delta) = " + fmt(alpha) + " inside the convex window");
  }
  return best;
}

FactorComparison compare_factors(double L, double mu) {
  validate_constants(L, mu);
  FactorComparison r;
  r.kappa = L / mu;
  const double rmu = std::sqrt(mu);
  const double hb = 2.0 * (std::sqrt(r.kappa) - std::sqrt(std::max(0.0, r.kappa - 1.0))) * rmu;
  r.heavy_ball = hb;
  r.gradient_flow = 2.0 * mu;
  r.unique_minimizer_lyapunov = (2.0 - std::sqrt(2.0)) * rmu;
  r.quasi_strong_convexity = std::sqrt(2.0 * mu / r.kappa);
  r.heavy_ball_beats_gradient_flow = hb > r.gradient_flow;
  r.heavy_ball_beats_unique_minimizer = hb > r.unique_minimizer_lyapunov;
  r.heavy_ball_beats_quasi_strong = hb > r.quasi_strong_convexity;
  r.printed_window_predicts_heavy_ball = 2.0 * std::sqrt(L) - 1.0 <= mu && mu <= 1.0;

  r.kappa_star_unique_minimizer = (19.0 + 6.0 * std::sqrt(2.0)) / 8.0;
  r.kappa_star_quasi_strong = (1.0 + std::sqrt(2.0)) / 2.0;
  // Both comparisons are homogeneous in √μ, so the crossings depend on κ only.
  auto hb_unit = [](double k) { return 2.0 * (std::sqrt(k) - std::sqrt(k - 1.0)); };
  r.kappa_star_unique_minimizer_bisected =
      bisect([&](double k) { return hb_unit(k) - (2.0 - std::sqrt(2.0)); }, 1.0, 100.0);
  r.kappa_star_quasi_strong_bisected =
      bisect([&](double k) { return hb_unit(k) - std::sqrt(2.0 / k); }, 1.0, 100.0);
  return r;
}

}  // namespace hbpl
