#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hbpl/certificates.hpp"
#include "hbpl/geometry.hpp"
#include "hbpl/io.hpp"
#include "hbpl/objectives.hpp"

namespace hbpl {

enum class Dynamics { kHeavyBall, kGradientFlow, kMoreauHeavyBall };

/// Parsed run configuration. See README for the JSON layout.
struct RunConfig {
  std::string function_id;
  json params = json::object();
  Dynamics dynamics = Dynamics::kHeavyBall;
  json alpha_spec;  // number or string; null for gradient flow
  double epsilon = 0.1;
  json L_spec;      // null, number, or "sublevel"
  std::optional<double> mu;
  std::optional<Box> sublevel_box;
  json x0 = "ones";
  std::optional<Vector> v0;
  std::optional<double> t_end;
  Eigen::Index n_samples = 1001;
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  std::optional<double> mu_ns;
  std::optional<double> lipschitz_M;
  std::vector<std::string> checks{"envelope", "energy", "lyapunov", "sublevel", "fit"};
  std::string output_dir = ".";
  std::string name = "run";
};

/// Throws Error(kConfig) naming the offending field.
RunConfig parse_run_config(const json& doc);

/// Applies "a.b.c=value" to `doc`; value is parsed as JSON, else kept as a string.
void apply_override(json& doc, const std::string& assignment);

struct ResolvedAlpha {
  double alpha = 0.0;
  std::optional<RateCertificate> gap;
  std::optional<RateCertificate> grad;
  std::string certificate_note;
};

/// Maps an alpha spec (number, "optimal-convex", "optimal-nonconvex",
/// "2*sqrt(mu)", "optimal-convex±offset", "optimal-nonconvex±offset") to a
/// damping and the best certificate available for it.
ResolvedAlpha resolve_alpha(const json& spec, double L, double mu, double eps, bool convex);

/// Largest-exponent nonconvex certificate over δ with α in the feasible region.
std::optional<RateCertificate> best_nonconvex_certificate(double L, double mu, double alpha);

/// Sampled gradient-Lipschitz estimate on {F ≤ F(x0)} ∩ box, times 1.05.
double sublevel_lipschitz(const ObjectiveFunction& fn, const Vector& x0, const Box& box, std::uint64_t seed);

/// Box covering {F ≤ F(x0)} for the sin-valley over one period in x.
Box sin_valley_sublevel_box(double c, const Vector& x0);

struct RunOutcome {
  json summary;
  int exit_code = 0;  // 0 pass, 1 check failure
};

RunOutcome execute_run(const RunConfig& cfg);

/// Quadratic dim 100, L = 1, μ = 1/κ; gradient flow and heavy ball with
/// α*, α* ± 0.1, 2√μ. x0 has N(0, 1) entries from mt19937_64(seed + 1).
RunOutcome repro_example1(double kappa, std::uint64_t seed, const std::string& out_dir,
                          Eigen::Index n_samples = 4001);

/// Sin-valley c = 1/8, μ = 1/4, sublevel-set L; gradient flow and heavy ball
/// with α* and 2√μ.
RunOutcome repro_example2(const Vector& start, const std::string& out_dir, Eigen::Index n_samples = 2001);

}  // namespace hbpl
