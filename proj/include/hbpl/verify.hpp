#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "hbpl/certificates.hpp"
#include "hbpl/integrator.hpp"
#include "hbpl/objectives.hpp"

namespace hbpl {

inline constexpr double kEnvelopeSlack = 1e-6;
inline constexpr double kMarginalSlack = 1e-4;
inline constexpr double kEnvelopeFloor = 1e-14;

enum class CheckStatus { kPass, kMarginal, kFail };

std::string_view to_string(CheckStatus status);

struct EnvelopeCheck {
  RateCertificate certificate;
  double max_ratio = 0.0;
  std::optional<double> first_violation_time;
  CheckStatus status = CheckStatus::kPass;
  bool truncated = false;  // some samples had a bound below the floor
  Eigen::Index samples_checked = 0;

  bool passed() const { return status == CheckStatus::kPass; }
};

/// Pointwise observed ≤ bound. Ratios use bound + floor; samples whose bound
/// fell below the floor are skipped and flag the check as truncated.
EnvelopeCheck check_bound(const Eigen::VectorXd& times, const Eigen::VectorXd& observed,
                          const Eigen::VectorXd& bound);

/// Envelope C·(F(x0) − F*)·e^{−mt}(1 + a·t) for the certificate's quantity.
Eigen::VectorXd envelope_curve(const Trajectory& traj, const RateCertificate& cert);

/// Checks the certificate's quantity (values or grad_sq) against its envelope.
EnvelopeCheck check_envelope(const Trajectory& traj, const RateCertificate& cert);

/// Same with an explicit observed series, e.g. F(prox(x_λ(t))) − F*.
EnvelopeCheck check_envelope(const Trajectory& traj, const RateCertificate& cert, const Eigen::VectorXd& observed);

struct EnergySeries {
  Eigen::VectorXd times;
  Eigen::VectorXd U;
  Eigen::VectorXd V;
  std::optional<double> a;
  std::optional<double> delta;
  double max_increase = 0.0;  // max over i ≤ j of series_j − series_i
};

/// U = F − F* + ½‖ẋ‖².
EnergySeries total_energy(const Trajectory& traj);

/// V = a(F − F*) + ⟨∇F(x), ẋ⟩ + (δ/2)‖ẋ‖².
EnergySeries lyapunov_series(const Trajectory& traj, const ObjectiveFunction& fn, double a, double delta);

/// Pointwise V(t) ≤ V(0)e^{−Rt} check.
EnvelopeCheck check_lyapunov_decay(const EnergySeries& series, double R);

/// u0·e^{G(t)} + ∫₀ᵗ e^{G(t)−G(r)} h(r) dr with G = ∫ g, by the trapezoid rule.
Eigen::VectorXd gronwall_envelope(double u0, const Eigen::VectorXd& g, const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& grid);

struct DecayFit {
  double rate = 0.0;  // negated slope of log(series)
  double r_squared = 0.0;
  Eigen::Index n_used = 0;
};

/// Least squares of log(series) against t over the trailing `window_fraction`
/// of the samples, dropping values at or below 1e2·ε_mach·series[0].
DecayFit fit_decay_rate(const Eigen::VectorXd& times, const Eigen::VectorXd& series, double window_fraction = 0.5);

/// First time the series drops to `threshold`, interpolated in log space.
std::optional<double> time_to_threshold(const Eigen::VectorXd& times, const Eigen::VectorXd& series,
                                        double threshold);

/// Index of the last sample above the fit floor 1e2·ε_mach·series[0].
Eigen::Index last_above_floor(const Eigen::VectorXd& series);

}  // namespace hbpl
