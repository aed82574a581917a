#pragma once

#include <optional>
#include <string_view>

namespace hbpl {

enum class Regime {
  kNonconvexSmallKappa,
  kNonconvexLargeKappa,
  kConvexKappaOne,
  kConvexKappaGtOne,
  kNonconvexGeneral,
  kConvexGeneral,
  kMoreau,
};

enum class Quantity { kObjectiveGap, kGradNormSq };

/// Which term attains m = min{a, R} in the nonconvex bound.
enum class BindingRate {
  kDamping,   // m = 2(α − L/δ)
  kLyapunov,  // m = δ + 2L/δ − α
  kTie,       // a = R, envelope (1 + a·t)e^{−mt}
};

std::string_view to_string(Regime regime);
std::string_view to_string(Quantity quantity);
std::string_view to_string(BindingRate binding);

/// Envelope q(t) ≤ C·(F(x0) − F*)·e^{−m t}, optionally times (1 + a·t).
struct RateCertificate {
  double exponent_m = 0.0;
  double constant_C = 0.0;
  double alpha = 0.0;
  std::optional<double> delta;
  Regime regime = Regime::kNonconvexGeneral;
  Quantity quantity = Quantity::kObjectiveGap;
  double epsilon = 0.0;
  BindingRate binding = BindingRate::kDamping;
  std::optional<double> polynomial_factor;
  // The other printed value of the constant where two disagree:
  // the value stated with the rate for convex and small-κ certificates.
  std::optional<double> statement_constant;
  // Convex certificates only: the constant rescaled by L. The printed convex
  // constants are not invariant under F → sF and coincide with this one
  // only when L = 1.
  std::optional<double> lipschitz_scaled_constant;

  /// Value of the envelope at time t for initial gap `initial`.
  double bound(double t, double initial) const;
};

/// (lower_open, left_closed_end] ∪ [right_closed_start, upper_open).
struct AlphaRegion {
  double lower_open = 0.0;
  double left_closed_end = 0.0;
  double right_closed_start = 0.0;
  double upper_open = 0.0;

  /// Closed ends accept a relative slack `rel_tol` for rounding in α±.
  bool contains(double alpha, double rel_tol = 1e-12) const;
};

double alpha_minus(double L, double mu, double delta);
double alpha_plus(double L, double mu, double delta);

/// Dampings for which the Lyapunov decay V(t) ≤ V(0)e^{−2(α − L/δ)t} holds
/// with a = δ + 2L/δ − α.
AlphaRegion feasible_alpha_region(double L, double mu, double delta);

/// Objective-gap rate for a PL function (no convexity) at a given (δ, α).
RateCertificate rate_nonconvex(double L, double mu, double delta, double alpha);

struct ConvexCertificates {
  RateCertificate grad;
  RateCertificate gap;
};

/// Gradient-norm and gap rates for convex PL functions at a given (δ, α).
ConvexCertificates rate_convex(double L, double mu, double delta, double alpha);

/// Sign choice in α = (√μ/(2√2))(5 ± √(9 − 8κ)) − ε/2 for κ < 9/8.
enum class SmallKappaSign { kPlus, kMinus };

/// Rate-optimal damping for PL functions. ε is used only when κ < 9/8.
RateCertificate optimal_damping_nonconvex(double L, double mu, double eps,
                                          SmallKappaSign sign = SmallKappaSign::kPlus);

/// Rate-optimal damping for convex PL functions. ε is used only when κ = 1.
ConvexCertificates optimal_damping_convex(double L, double mu, double eps);

/// αδ³ − (α² + L + μ)δ² + 3Lαδ − 2L², whose positive roots contain every δ
/// with α−(δ) = α.
double damping_cubic(double delta, double alpha, double L, double mu);

/// δ > 0 with α−(δ) = α and α admissible for the convex rate at that δ.
/// Among several, returns the one with the largest exponent 2(α − L/δ).
double delta_for_alpha(double alpha, double L, double mu);

struct FactorComparison {
  double kappa = 0.0;
  double heavy_ball = 0.0;                // 2(√κ − √(κ−1))√μ
  double gradient_flow = 0.0;             // 2μ
  double unique_minimizer_lyapunov = 0.0; // (2 − √2)√μ
  double quasi_strong_convexity = 0.0;    // √(2μ/κ)
  bool heavy_ball_beats_gradient_flow = false;
  bool heavy_ball_beats_unique_minimizer = false;
  bool heavy_ball_beats_quasi_strong = false;
  // Printed regime window 2√L − 1 ≤ μ ≤ 1 for heavy ball over gradient flow;
  // evaluated separately because it is not scale invariant.
  bool printed_window_predicts_heavy_ball = false;
  double kappa_star_unique_minimizer = 0.0;       // (19 + 6√2)/8
  double kappa_star_quasi_strong = 0.0;           // (1 + √2)/2
  double kappa_star_unique_minimizer_bisected = 0.0;
  double kappa_star_quasi_strong_bisected = 0.0;
};

FactorComparison compare_factors(double L, double mu);

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double abs_tol = 1e-14, int max_iter = 200) {
  double flo = f(lo);
  for (int i = 0; i < max_iter && hi - lo > abs_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace hbpl
