#include "hbpl/verify.hpp"

#include <cmath>
#include <limits>

#include "hbpl/error.hpp"

namespace hbpl {

namespace {

double fit_floor(const Eigen::VectorXd& series) {
  return 1e2 * std::numeric_limits<double>::epsilon() * std::abs(series(0));
}

void require_velocities(const Trajectory& traj) {
  if (!traj.has_velocities()) {
    throw Error(ErrorCode::kMissingVelocities, "trajectory of '" + traj.meta.dynamics + "' carries no velocities");
  }
}

double max_forward_increase(const Eigen::VectorXd& s) {
  if (s.size() == 0) return 0.0;
  double running_min = s(0);
  double worst = 0.0;
  for (Eigen::Index i = 1; i < s.size(); ++i) {
    worst = std::max(worst, s(i) - running_min);
    running_min = std::min(running_min, s(i));
  }
  return worst;
}

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kMarginal: return "tolerance-marginal";
    case CheckStatus::kFail: return "fail";
  }
  return "unknown";
}

EnvelopeCheck check_bound(const Eigen::VectorXd& times, const Eigen::VectorXd& observed,
                          const Eigen::VectorXd& bound) {
  if (times.size() != observed.size() || times.size() != bound.size()) {
    throw Error(ErrorCode::kInvalidDimension, "series lengths differ");
  }
  EnvelopeCheck out;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (bound(i) < kEnvelopeFloor) {
      out.truncated = true;
      continue;
    }
    const double ratio = observed(i) / (bound(i) + kEnvelopeFloor);
    ++out.samples_checked;
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (ratio > 1.0 + kEnvelopeSlack && !out.first_violation_time) out.first_violation_time = times(i);
  }
  if (out.max_ratio <= 1.0 + kEnvelopeSlack) {
    out.status = CheckStatus::kPass;
  } else if (out.max_ratio <= 1.0 + kMarginalSlack) {
    out.status = CheckStatus::kMarginal;
  } else {
    out.status = CheckStatus::kFail;
  }
  return out;
}

Eigen::VectorXd envelope_curve(const Trajectory& traj, const RateCertificate& cert) {
  Eigen::VectorXd bound(traj.size());
  const double initial = traj.values(0);
  for (Eigen::Index i = 0; i < traj.size(); ++i) bound(i) = cert.bound(traj.times(i), initial);
  return bound;
}

EnvelopeCheck check_envelope(const Trajectory& traj, const RateCertificate& cert, const Eigen::VectorXd& observed) {
  EnvelopeCheck out = check_bound(traj.times, observed, envelope_curve(traj, cert));
  out.certificate = cert;
  return out;
}

EnvelopeCheck check_envelope(const Trajectory& traj, const RateCertificate& cert) {
  return check_envelope(traj, cert, cert.quantity == Quantity::kObjectiveGap ? traj.values : traj.grad_sq);
}

EnergySeries total_energy(const Trajectory& traj) {
  require_velocities(traj);
  EnergySeries out;
  out.times = traj.times;
  out.U = traj.values + 0.5 * traj.velocities.colwise().squaredNorm().transpose();
  out.max_increase = max_forward_increase(out.U);
  return out;
}

EnergySeries lyapunov_series(const Trajectory& traj, const ObjectiveFunction& fn, double a, double delta) {
  require_velocities(traj);
  if (!fn.has_gradient()) throw Error(ErrorCode::kMissingGradient, "Lyapunov series needs the gradient");
  EnergySeries out = total_energy(traj);
  out.a = a;
  out.delta = delta;
  out.V.resize(traj.size());
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const Vector x = traj.positions.col(i);
    const Vector v = traj.velocities.col(i);
    out.V(i) = a * traj.values(i) + fn.grad(x).dot(v) + 0.5 * delta * v.squaredNorm();
  }
  out.max_increase = max_forward_increase(out.V);
  return out;
}

EnvelopeCheck check_lyapunov_decay(const EnergySeries& series, double R) {
  if (series.V.size() != series.times.size()) throw Error(ErrorCode::kInvalidDimension, "no Lyapunov values");
  Eigen::VectorXd bound(series.times.size());
  for (Eigen::Index i = 0; i < bound.size(); ++i) bound(i) = series.V(0) * std::exp(-R * series.times(i));
  return check_bound(series.times, series.V, bound);
}

Eigen::VectorXd gronwall_envelope(double u0, const Eigen::VectorXd& g, const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& grid) {
  const Eigen::Index n = grid.size();
  if (g.size() != n || h.size() != n) throw Error(ErrorCode::kInvalidDimension, "series lengths differ");
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  double G = 0.0;
  double integral = 0.0;  // ∫ e^{−G} h
  double prev = h(0);     // e^{−G(0)} h(0)
  out(0) = u0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double dt = grid(i) - grid(i - 1);
    if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidConstants, "grid must be increasing");
    G += 0.5 * dt * (g(i) + g(i - 1));
    const double cur = std::exp(-G) * h(i);
    integral += 0.5 * dt * (cur + prev);
    prev = cur;
    out(i) = std::exp(G) * (u0 + integral);
  }
  return out;
}

DecayFit fit_decay_rate(const Eigen::VectorXd& times, const Eigen::VectorXd& series, double window_fraction) {
  if (times.size() != series.size()) throw Error(ErrorCode::kInvalidDimension, "series lengths differ");
  if (!(window_fraction > 0.0) || window_fraction > 1.0) {
    throw Error(ErrorCode::kInvalidConstants, "window_fraction must lie in (0, 1]");
  }
  const Eigen::Index n = series.size();
  if (n == 0) throw Error(ErrorCode::kInsufficientData, "empty series");
  const double floor = fit_floor(series);
  const auto start = n - static_cast<Eigen::Index>(std::ceil(window_fraction * static_cast<double>(n)));

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = std::max<Eigen::Index>(0, start); i < n; ++i) {
    if (!(series(i) > floor)) continue;
    const double t = times(i);
    const double y = std::log(series(i));
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    syy += y * y;
    ++used;
  }
  if (used < 10) {
    throw Error(ErrorCode::kInsufficientData,
                "only " + std::to_string(used) + " samples above the floor in the fit window");
  }
  const double k = static_cast<double>(used);
  const double ctt = stt - st * st / k;
  const double cty = sty - st * sy / k;
  const double cyy = syy - sy * sy / k;
  DecayFit fit;
  fit.n_used = used;
  const double slope = cty / ctt;
  fit.rate = -slope;
  fit.r_squared = cyy > 0.0 ? (cty * cty) / (ctt * cyy) : 1.0;
  return fit;
}

std::optional<double> time_to_threshold(const Eigen::VectorXd& times, const Eigen::VectorXd& series,
                                        double threshold) {
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    if (series(i) > threshold) continue;
    if (i == 0) return times(0);
    const double a = series(i - 1);
    const double b = series(i);
    if (b > 0.0 && a > 0.0) {
      const double w = (std::log(a) - std::log(threshold)) / (std::log(a) - std::log(b));
      return times(i - 1) + w * (times(i) - times(i - 1));
    }
    return times(i);
  }
  return std::nullopt;
}

Eigen::Index last_above_floor(const Eigen::VectorXd& series) {
  if (series.size() == 0) return -1;
  const double floor = fit_floor(series);
  for (Eigen::Index i = series.size() - 1; i >= 0; --i) {
    if (series(i) > floor) return i;
  }
  return -1;
}

}  // namespace hbpl
