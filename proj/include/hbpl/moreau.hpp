#pragma once

#include <optional>
#include <string_view>

#include "hbpl/certificates.hpp"
#include "hbpl/integrator.hpp"
#include "hbpl/objectives.hpp"

namespace hbpl {

/// Convex base objective paired with a smoothing parameter λ.
struct MoreauHandle {
  ObjectiveFunction base;
  double lambda = 1.0;
  std::optional<double> mu_ns;        // asserted (ns-PL) constant of the base
  std::optional<double> lipschitz_M;  // Lipschitz constant of the base itself
};

/// argmin_y F(y) + ‖y − x‖²/(2λ).
///
/// Uses the base's exact prox when registered. Otherwise: gradient descent on
/// the strongly convex subproblem (differentiable bases), or golden section on
/// [x − λM, x + λM] for one-dimensional eval-only bases, widening the bracket
/// when M is unknown.
Vector prox(const MoreauHandle& handle, const Vector& x, double tol = 1e-12);

struct EnvelopePoint {
  double value = 0.0;
  Vector gradient;
  Vector prox;
};

/// F_λ(x) = F(p) + ‖x − p‖²/(2λ) and ∇F_λ(x) = (x − p)/λ with p = prox(x).
EnvelopePoint envelope_value_grad(const MoreauHandle& handle, const Vector& x);

/// The envelope as a smooth objective: L = 1/λ, PL constant transferred from
/// mu_ns when set, minimizers shared with the base.
ObjectiveFunction envelope_objective(const MoreauHandle& handle);

enum class PlTransfer { kBaseToEnvelope, kEnvelopeToBase };

double pl_transfer(double mu, double lambda, PlTransfer direction);

/// Damping (2λμ + 1 + s)/(√λ(λμ + 1 + s)) with s = √(λμ + 1).
double moreau_alpha(double lambda, double mu);

/// Objective-gap certificate for F(prox(x_λ(t))) − F* measured against
/// F_λ(x0) − F*.
RateCertificate moreau_certificate(double lambda, double mu);

struct MoreauRun {
  Trajectory traj;            // heavy ball on F_λ; values are F_λ − F*
  Eigen::VectorXd prox_gap;   // F(prox(x_λ(t))) − F*
  Eigen::VectorXd gap_lambda; // F(x_λ(t)) − F*
  Eigen::VectorXd prox_gap_bound;
  std::optional<Eigen::VectorXd> gap_lambda_bound;
  double alpha = 0.0;
  RateCertificate certificate;
};

MoreauRun nonsmooth_heavy_ball(const MoreauHandle& handle, const Vector& x0, double t_end,
                               const IntegrationOptions& opts = {});

}  // namespace hbpl
