#include "hbpl/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <numbers>
#include <random>
#include <regex>
#include <set>

#include "hbpl/error.hpp"
#include "hbpl/integrator.hpp"
#include "hbpl/moreau.hpp"
#include "hbpl/registry.hpp"
#include "hbpl/verify.hpp"

namespace hbpl {

namespace {

constexpr double kHorizonDecades = 40.0;
constexpr double kHorizonCap = 1e4;
constexpr double kSublevelSafety = 1.05;

Error config_error(const std::string& field, const std::string& what) {
  return Error(ErrorCode::kConfig, "field '" + field + "': " + what);
}

double number_field(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw config_error(key, "expected a number");
  return v.get<double>();
}

double positive_field(const json& doc, const std::string& key) {
  const double v = number_field(doc, key);
  if (!(v > 0.0) || !std::isfinite(v)) throw config_error(key, "expected a positive number");
  return v;
}

Vector vector_field(const json& v, const std::string& key) {
  if (!v.is_array()) throw config_error(key, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw config_error(key, "expected an array of numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Vector gaussian_point(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x(i) = normal(rng);
  return x;
}

Vector resolve_x0(const json& spec, const ObjectiveFunction& fn, std::uint64_t seed) {
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "ones") return Vector::Ones(fn.dim);
    if (s == "gaussian") return gaussian_point(fn.dim, seed);
    throw config_error("x0", "expected an array, \"ones\" or \"gaussian\"");
  }
  Vector x0 = vector_field(spec, "x0");
  if (x0.size() != fn.dim) {
    throw config_error("x0", "has " + std::to_string(x0.size()) + " entries, objective dimension is " +
                                 std::to_string(fn.dim));
  }
  return x0;
}

double horizon_for(double m) { return std::min(kHorizonCap, kHorizonDecades / m); }

json skipped(const std::string& reason) { return {{"status", "skipped"}, {"reason", reason}}; }

bool wants(const RunConfig& cfg, const std::string& check) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), check) != cfg.checks.end();
}

struct CheckTally {
  bool failed = false;
  void record(const json& result) {
    if (result.contains("status") && result["status"] == "fail") failed = true;
  }
};

json energy_check(const Trajectory& traj) {
  const EnergySeries e = total_energy(traj);
  const double limit = 1e-9 * (1.0 + e.U(0));
  return {{"max_increase", e.max_increase},
          {"limit", limit},
          {"status", e.max_increase <= limit ? "pass" : "fail"}};
}

json sublevel_check(const Trajectory& traj) {
  const double f0 = traj.values(0);
  const double excess = traj.values.maxCoeff() - f0;
  const double limit = 1e-9 * (1.0 + std::abs(f0));
  return {{"max_excess", excess}, {"limit", limit}, {"status", excess <= limit ? "pass" : "fail"}};
}

json fit_report(const Eigen::VectorXd& times, const Eigen::VectorXd& series) {
  try {
    return to_json(fit_decay_rate(times, series));
  } catch (const Error& e) {
    return {{"status", "skipped"}, {"reason", e.what()}};
  }
}

// Fit over the samples before the series reaches the roundoff floor.
json fit_until_floor(const Eigen::VectorXd& times, const Eigen::VectorXd& series) {
  const Eigen::Index last = last_above_floor(series);
  if (last < 0) return skipped("series is at the floor from the start");
  return fit_report(times.head(last + 1), series.head(last + 1));
}

json lyapunov_check(const Trajectory& traj, const ObjectiveFunction& fn, const RateCertificate& cert, double L,
                    double mu) {
  if (!cert.delta) return skipped("certificate carries no delta");
  const double delta = *cert.delta;
  if (!feasible_alpha_region(L, mu, delta).contains(cert.alpha)) return skipped("alpha outside the Lyapunov region");
  const double a = delta + 2.0 * L / delta - cert.alpha;
  const double R = 2.0 * (cert.alpha - L / delta);
  const EnergySeries series = lyapunov_series(traj, fn, a, delta);
  json out = to_json(check_lyapunov_decay(series, R));
  out.erase("certificate");
  out["a"] = a;
  out["delta"] = delta;
  out["R"] = R;
  return out;
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

ResolvedAlpha certify_alpha(double alpha, double L, double mu, bool convex) {
  ResolvedAlpha r;
  r.alpha = alpha;
  if (convex) {
    try {
      const double delta = delta_for_alpha(alpha, L, mu);
      const ConvexCertificates certs = rate_convex(L, mu, delta, alpha);
      r.gap = certs.gap;
      r.grad = certs.grad;
      r.certificate_note = "convex rate at delta from the damping cubic";
      return r;
    } catch (const Error&) {
    }
  }
  if (auto cert = best_nonconvex_certificate(L, mu, alpha)) {
    r.gap = cert;
    r.certificate_note = "nonconvex rate at the best feasible delta";
  } else {
    r.certificate_note = "no certificate covers this damping";
  }
  return r;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  static const std::set<std::string> known{
      "function", "params", "dynamics", "alpha", "epsilon", "L", "mu", "sublevel_box", "x0", "v0", "t_end",
      "n_samples", "abs_tol", "rel_tol", "seed", "lambda", "mu_ns", "lipschitz_M", "checks", "output_dir", "name"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw config_error(key, "unknown field");
  }

  RunConfig cfg;
  if (!doc.contains("function") || !doc["function"].is_string()) {
    throw config_error("function", "required string naming a registered objective");
  }
  cfg.function_id = doc["function"].get<std::string>();
  const auto ids = registered_objectives();
  if (std::find(ids.begin(), ids.end(), cfg.function_id) == ids.end()) {
    throw Error(ErrorCode::kUnknownFunction, "field 'function': no registered objective '" + cfg.function_id + "'");
  }
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw config_error("params", "expected an object");
    cfg.params = doc["params"];
  }
  if (doc.contains("dynamics")) {
    const json& d = doc["dynamics"];
    if (d == "heavy-ball") {
      cfg.dynamics = Dynamics::kHeavyBall;
    } else if (d == "gradient-flow") {
      cfg.dynamics = Dynamics::kGradientFlow;
    } else if (d == "moreau-heavy-ball") {
      cfg.dynamics = Dynamics::kMoreauHeavyBall;
    } else {
      throw config_error("dynamics", "expected heavy-ball, gradient-flow or moreau-heavy-ball");
    }
  }
  if (doc.contains("alpha")) {
    const json& a = doc["alpha"];
    if (!a.is_number() && !a.is_string()) throw config_error("alpha", "expected a number or a spec string");
    cfg.alpha_spec = a;
  }
  if (cfg.dynamics == Dynamics::kHeavyBall && cfg.alpha_spec.is_null()) {
    throw config_error("alpha", "required for heavy-ball dynamics");
  }
  if (doc.contains("epsilon")) cfg.epsilon = positive_field(doc, "epsilon");
  if (doc.contains("L")) {
    const json& l = doc["L"];
    if (l.is_number()) {
      positive_field(doc, "L");
    } else if (l != "sublevel") {
      throw config_error("L", "expected a positive number or \"sublevel\"");
    }
    cfg.L_spec = l;
  }
  if (doc.contains("mu")) cfg.mu = positive_field(doc, "mu");
  if (doc.contains("sublevel_box")) {
    const json& b = doc["sublevel_box"];
    if (!b.is_object() || !b.contains("lower") || !b.contains("upper")) {
      throw config_error("sublevel_box", "expected {\"lower\": [...], \"upper\": [...]}");
    }
    Box box{vector_field(b["lower"], "sublevel_box.lower"), vector_field(b["upper"], "sublevel_box.upper")};
    if (box.lower.size() != box.upper.size() || !(box.lower.array() < box.upper.array()).all()) {
      throw config_error("sublevel_box", "lower must be strictly below upper in every coordinate");
    }
    cfg.sublevel_box = box;
  }
  if (doc.contains("x0")) cfg.x0 = doc["x0"];
  if (doc.contains("v0")) cfg.v0 = vector_field(doc["v0"], "v0");
  if (doc.contains("t_end")) cfg.t_end = positive_field(doc, "t_end");
  if (doc.contains("n_samples")) {
    const json& n = doc["n_samples"];
    if (!n.is_number_integer() || n.get<long long>() < 2) throw config_error("n_samples", "expected an integer >= 2");
    cfg.n_samples = n.get<Eigen::Index>();
  }
  if (doc.contains("abs_tol")) cfg.abs_tol = positive_field(doc, "abs_tol");
  if (doc.contains("rel_tol")) cfg.rel_tol = positive_field(doc, "rel_tol");
  if (doc.contains("seed")) {
    const json& sd = doc["seed"];
    if (!sd.is_number_integer() || sd.get<long long>() < 0) throw config_error("seed", "expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("lambda")) cfg.lambda = positive_field(doc, "lambda");
  if (doc.contains("mu_ns")) cfg.mu_ns = positive_field(doc, "mu_ns");
  if (doc.contains("lipschitz_M")) cfg.lipschitz_M = positive_field(doc, "lipschitz_M");
  if (doc.contains("checks")) {
    static const std::set<std::string> valid{"envelope", "energy", "lyapunov", "sublevel", "fit"};
    const json& c = doc["checks"];
    if (!c.is_array()) throw config_error("checks", "expected an array of check names");
    cfg.checks.clear();
    for (const auto& item : c) {
      if (!item.is_string() || !valid.count(item.get<std::string>())) {
        throw config_error("checks", "entries must be among envelope, energy, lyapunov, sublevel, fit");
      }
      cfg.checks.push_back(item.get<std::string>());
    }
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw config_error("output_dir", "expected a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
      throw config_error("name", "expected a nonempty string");
    }
    cfg.name = doc["name"].get<std::string>();
  }
  return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kConfig, "override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorCode::kConfig, "override key '" + key + "' has an empty component");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::optional<RateCertificate> best_nonconvex_certificate(double L, double mu, double alpha) {
  std::optional<RateCertificate> best;
  const double root_L = std::sqrt(L);
  constexpr int kScan = 4000;
  for (int i = 0; i <= kScan; ++i) {
    const double delta = root_L * std::pow(10.0, -3.0 + 6.0 * i / kScan);
    if (!feasible_alpha_region(L, mu, delta).contains(alpha)) continue;
    const RateCertificate cert = rate_nonconvex(L, mu, delta, alpha);
    if (!best || cert.exponent_m > best->exponent_m) best = cert;
  }
  return best;
}

ResolvedAlpha resolve_alpha(const json& spec, double L, double mu, double eps, bool convex) {
  if (spec.is_number()) {
    const double alpha = spec.get<double>();
    if (!(alpha > 0.0)) throw config_error("alpha", "must be positive");
    return certify_alpha(alpha, L, mu, convex);
  }
  if (!spec.is_string()) throw config_error("alpha", "expected a number or a spec string");
  const std::string s = spec.get<std::string>();

  if (s == "optimal-convex") {
    if (!convex) throw config_error("alpha", "optimal-convex needs a convex objective");
    const ConvexCertificates certs = optimal_damping_convex(L, mu, eps);
    return {certs.gap.alpha, certs.gap, certs.grad, "optimal convex damping"};
  }
  if (s == "optimal-nonconvex") {
    const RateCertificate cert = optimal_damping_nonconvex(L, mu, eps);
    return {cert.alpha, cert, std::nullopt, "optimal nonconvex damping"};
  }
  if (s == "2*sqrt(mu)") return certify_alpha(2.0 * std::sqrt(mu), L, mu, convex);

  static const std::regex offset_form(R"(^(optimal-convex|optimal-nonconvex)([+-])(.+)$)");
  std::smatch m;
  if (std::regex_match(s, m, offset_form)) {
    double offset = 0.0;
    try {
      std::size_t used = 0;
      offset = std::stod(m[3].str(), &used);
      if (used != m[3].str().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw config_error("alpha", "offset in '" + s + "' is not a number");
    }
    double base = 0.0;
    if (m[1] == "optimal-convex") {
      if (!convex) throw config_error("alpha", "optimal-convex needs a convex objective");
      base = optimal_damping_convex(L, mu, eps).gap.alpha;
    } else {
      base = optimal_damping_nonconvex(L, mu, eps).alpha;
    }
    const double alpha = m[2] == "+" ? base + offset : base - offset;
    if (!(alpha > 0.0)) throw config_error("alpha", "'" + s + "' resolves to a nonpositive damping");
    return certify_alpha(alpha, L, mu, convex);
  }
  throw config_error("alpha", "unrecognized spec '" + s + "'");
}

Box sin_valley_sublevel_box(double c, const Vector& x0) {
  const double f0 = c * std::pow(x0(1) - std::sin(x0(0)), 2);
  const double r = std::sqrt(f0 / c);
  Box box;
  box.lower.resize(2);
  box.upper.resize(2);
  box.lower << x0(0) - std::numbers::pi, -1.0 - r;
  box.upper << x0(0) + std::numbers::pi, 1.0 + r;
  return box;
}

double sublevel_lipschitz(const ObjectiveFunction& fn, const Vector& x0, const Box& box, std::uint64_t seed) {
  const LipschitzEstimate est = estimate_lipschitz_grad(fn, box, 40000, seed, fn.gap(x0));
  if (!(est.L_hat > 0.0)) throw Error(ErrorCode::kEmptyEstimate, "no sampled pair inside the sublevel set");
  return kSublevelSafety * est.L_hat;
}

RunOutcome execute_run(const RunConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const ObjectiveFunction fn = make_objective(cfg.function_id, cfg.params);
  const Vector x0 = resolve_x0(cfg.x0, fn, cfg.seed);
  if (cfg.v0 && cfg.v0->size() != fn.dim) throw config_error("v0", "dimension does not match the objective");
  if (cfg.dynamics == Dynamics::kGradientFlow && cfg.v0) throw config_error("v0", "gradient flow has no velocity");

  IntegrationOptions opts;
  opts.abs_tol = cfg.abs_tol;
  opts.rel_tol = cfg.rel_tol;
  opts.n_samples = cfg.n_samples;

  std::filesystem::create_directories(cfg.output_dir);
  const std::string csv_path = join_path(cfg.output_dir, cfg.name + ".csv");
  const std::string json_path = join_path(cfg.output_dir, cfg.name + ".json");

  json summary;
  summary["function"] = cfg.function_id;
  summary["params"] = cfg.params;
  summary["seed"] = cfg.seed;
  summary["x0"] = to_json(x0);
  CheckTally tally;
  json checks = json::object();

  if (cfg.dynamics == Dynamics::kMoreauHeavyBall) {
    const std::optional<double> mu_ns = cfg.mu_ns ? cfg.mu_ns : cfg.mu;
    if (!mu_ns) throw config_error("mu_ns", "required for moreau-heavy-ball");
    MoreauHandle handle{fn, cfg.lambda, mu_ns, cfg.lipschitz_M};
    const RateCertificate cert = moreau_certificate(cfg.lambda, *mu_ns);
    const double t_end = cfg.t_end ? *cfg.t_end : horizon_for(cert.exponent_m);
    const MoreauRun run = nonsmooth_heavy_ball(handle, x0, t_end, opts);

    summary["dynamics"] = "moreau-heavy-ball";
    summary["lambda"] = cfg.lambda;
    summary["mu_ns"] = *mu_ns;
    summary["alpha"] = run.alpha;
    summary["t_end"] = t_end;
    summary["certificate"] = to_json(cert);
    summary["trajectory"] = trajectory_summary(run.traj);

    if (wants(cfg, "envelope")) {
      const EnvelopeCheck c46 = check_envelope(run.traj, cert, run.prox_gap);
      checks["envelope"] = to_json(c46);
      if (run.gap_lambda_bound) {
        checks["envelope_lipschitz"] = to_json(check_bound(run.traj.times, run.gap_lambda, *run.gap_lambda_bound));
        checks["envelope_lipschitz"].erase("certificate");
      }
    }
    if (wants(cfg, "energy")) checks["energy"] = energy_check(run.traj);
    if (wants(cfg, "sublevel")) checks["sublevel"] = sublevel_check(run.traj);
    if (wants(cfg, "fit")) checks["fit"] = fit_until_floor(run.traj.times, run.traj.values);

    auto cols = trajectory_columns(run.traj);
    cols.push_back({"U", total_energy(run.traj).U});
    write_csv(csv_path, cols);
    std::vector<CsvColumn> bounds{{"t", run.traj.times},
                                  {"prox_gap", run.prox_gap},
                                  {"prox_gap_bound", run.prox_gap_bound},
                                  {"gap_lambda", run.gap_lambda}};
    if (run.gap_lambda_bound) bounds.push_back({"gap_lambda_bound", *run.gap_lambda_bound});
    const std::string bounds_path = join_path(cfg.output_dir, cfg.name + "_bounds.csv");
    write_csv(bounds_path, bounds);
    summary["outputs"] = {{"trajectory_csv", csv_path}, {"bounds_csv", bounds_path}, {"summary_json", json_path}};
  } else {
    std::optional<double> L = fn.lipschitz_L;
    if (cfg.L_spec.is_number()) L = cfg.L_spec.get<double>();
    if (cfg.L_spec == "sublevel") {
      Box box;
      if (cfg.sublevel_box) {
        box = *cfg.sublevel_box;
      } else if (cfg.function_id == "sin-valley") {
        box = sin_valley_sublevel_box(cfg.params.value("c", 0.125), x0);
      } else {
        throw config_error("sublevel_box", "required for L = \"sublevel\" on '" + cfg.function_id + "'");
      }
      if (box.dim() != fn.dim) throw config_error("sublevel_box", "dimension does not match the objective");
      L = sublevel_lipschitz(fn, x0, box, cfg.seed);
      summary["L_estimate"] = {{"box_lower", to_json(box.lower)}, {"box_upper", to_json(box.upper)},
                               {"safety_factor", kSublevelSafety}};
    }
    const std::optional<double> mu = cfg.mu ? cfg.mu : fn.pl_mu;
    summary["L"] = L ? json(*L) : json(nullptr);
    summary["mu"] = mu ? json(*mu) : json(nullptr);

    ResolvedAlpha resolved;
    Trajectory traj;
    double t_end = 0.0;
    if (cfg.dynamics == Dynamics::kHeavyBall) {
      const bool symbolic = cfg.alpha_spec.is_string();
      if (!L || !mu) {
        if (symbolic) throw config_error(!L ? "L" : "mu", "needed to resolve the alpha spec");
        resolved.alpha = cfg.alpha_spec.get<double>();
        resolved.certificate_note = "no certificate without L and mu";
      } else {
        if (*mu > *L) throw config_error("mu", "exceeds L");
        resolved = resolve_alpha(cfg.alpha_spec, *L, *mu, cfg.epsilon, fn.is_convex);
      }
      if (cfg.t_end) {
        t_end = *cfg.t_end;
      } else if (resolved.gap) {
        t_end = horizon_for(resolved.gap->exponent_m);
      } else {
        throw config_error("t_end", "required when no certificate fixes the horizon");
      }
      const Vector v0 = cfg.v0 ? *cfg.v0 : Vector::Zero(fn.dim);
      traj = integrate_heavy_ball(fn, resolved.alpha, x0, v0, t_end, opts);
      summary["dynamics"] = "heavy-ball";
      summary["alpha_spec"] = cfg.alpha_spec;
      summary["alpha"] = resolved.alpha;
      summary["epsilon"] = cfg.epsilon;
    } else {
      if (cfg.t_end) {
        t_end = *cfg.t_end;
      } else if (mu) {
        t_end = horizon_for(2.0 * *mu);
      } else {
        throw config_error("t_end", "required when mu is unknown");
      }
      traj = integrate_gradient_flow(fn, x0, t_end, opts);
      summary["dynamics"] = "gradient-flow";
    }
    summary["t_end"] = t_end;
    summary["trajectory"] = trajectory_summary(traj);
    summary["certificate"] = resolved.gap ? to_json(*resolved.gap) : json(nullptr);
    summary["grad_certificate"] = resolved.grad ? to_json(*resolved.grad) : json(nullptr);
    summary["certificate_note"] = resolved.certificate_note;

    auto cols = trajectory_columns(traj);
    if (traj.has_velocities()) cols.push_back({"U", total_energy(traj).U});

    if (wants(cfg, "envelope")) {
      if (resolved.gap) {
        const EnvelopeCheck c = check_envelope(traj, *resolved.gap);
        checks["envelope"] = to_json(c);
        if (resolved.grad) checks["envelope_grad"] = to_json(check_envelope(traj, *resolved.grad));
      } else {
        checks["envelope"] = skipped(cfg.dynamics == Dynamics::kHeavyBall ? resolved.certificate_note
                                                                          : "no certificate for gradient flow");
      }
    }
    if (wants(cfg, "energy")) {
      checks["energy"] = traj.has_velocities() ? energy_check(traj) : skipped("gradient flow has no velocity");
    }
    if (wants(cfg, "lyapunov")) {
      if (traj.has_velocities() && resolved.gap && L && mu) {
        checks["lyapunov"] = lyapunov_check(traj, fn, *resolved.gap, *L, *mu);
        if (checks["lyapunov"].contains("a")) {
          const auto& lc = checks["lyapunov"];
          cols.push_back({"V", lyapunov_series(traj, fn, lc["a"].get<double>(), lc["delta"].get<double>()).V});
        }
      } else {
        checks["lyapunov"] = skipped("needs heavy-ball dynamics and a certificate with delta");
      }
    }
    if (wants(cfg, "sublevel")) {
      const bool at_rest = !cfg.v0 || cfg.v0->isZero(0.0);
      checks["sublevel"] = at_rest ? sublevel_check(traj) : skipped("initial velocity is nonzero");
    }
    if (wants(cfg, "fit")) checks["fit"] = fit_until_floor(traj.times, traj.values);
    if (resolved.gap) cols.push_back({"envelope", envelope_curve(traj, *resolved.gap)});
    write_csv(csv_path, cols);
    summary["outputs"] = {{"trajectory_csv", csv_path}, {"summary_json", json_path}};
  }

  for (const auto& [_, result] : checks.items()) tally.record(result);
  summary["checks"] = checks;
  summary["passed"] = !tally.failed;
  summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json(json_path, summary);
  return {summary, tally.failed ? 1 : 0};
}

namespace {

struct CurveSpec {
  std::string name;
  bool heavy_ball = true;
  double alpha = 0.0;
  std::optional<RateCertificate> gap;
};

struct CurveResult {
  json report;
  bool failed = false;
};

CurveResult run_curve(const ObjectiveFunction& fn, const CurveSpec& spec, const Vector& x0, double t_end,
                      const IntegrationOptions& opts, const std::string& out_dir, double threshold) {
  CurveResult out;
  const Trajectory traj = spec.heavy_ball ? integrate_heavy_ball(fn, spec.alpha, x0, t_end, opts)
                                          : integrate_gradient_flow(fn, x0, t_end, opts);
  auto cols = trajectory_columns(traj);
  json report = {{"name", spec.name}, {"dynamics", traj.meta.dynamics}};
  report["alpha"] = spec.heavy_ball ? json(spec.alpha) : json(nullptr);
  const auto ttt = time_to_threshold(traj.times, traj.values, threshold);
  report["time_to_threshold"] = ttt ? json(*ttt) : json(nullptr);
  report["fit"] = fit_until_floor(traj.times, traj.values);
  report["final_gap"] = traj.values(traj.size() - 1);
  report["accepted_steps"] = traj.meta.accepted_steps;
  report["sublevel"] = sublevel_check(traj);
  if (report["sublevel"]["status"] == "fail") out.failed = true;
  if (traj.has_velocities()) {
    cols.push_back({"U", total_energy(traj).U});
    report["energy"] = energy_check(traj);
    if (report["energy"]["status"] == "fail") out.failed = true;
  }
  if (spec.gap) {
    const EnvelopeCheck check = check_envelope(traj, *spec.gap);
    report["envelope"] = to_json(check);
    if (check.status == CheckStatus::kFail) out.failed = true;
    cols.push_back({"envelope", envelope_curve(traj, *spec.gap)});
  } else {
    report["envelope"] = skipped("no certificate covers this damping");
  }
  const std::string path = join_path(out_dir, spec.name + ".csv");
  write_csv(path, cols);
  report["csv"] = path;
  out.report = std::move(report);
  return out;
}

RunOutcome run_curves(const ObjectiveFunction& fn, const std::vector<CurveSpec>& specs, const Vector& x0,
                      double t_end, const IntegrationOptions& opts, const std::string& out_dir, double threshold,
                      json summary) {
  std::vector<std::future<CurveResult>> futures;
  futures.reserve(specs.size());
  for (const auto& spec : specs) {
    futures.push_back(std::async(std::launch::async, run_curve, std::cref(fn), std::cref(spec), std::cref(x0),
                                 t_end, std::cref(opts), std::cref(out_dir), threshold));
  }
  json curves = json::array();
  bool failed = false;
  for (auto& f : futures) {
    CurveResult r = f.get();
    failed = failed || r.failed;
    curves.push_back(std::move(r.report));
  }
  std::vector<std::pair<double, std::string>> order;
  for (const auto& c : curves) {
    const double t = c["time_to_threshold"].is_null() ? std::numeric_limits<double>::infinity()
                                                      : c["time_to_threshold"].get<double>();
    order.emplace_back(t, c["name"].get<std::string>());
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  json ranking = json::array();
  for (const auto& [t, name] : order) ranking.push_back(name);

  summary["t_end"] = t_end;
  summary["threshold"] = threshold;
  summary["curves"] = curves;
  summary["ranking_by_time_to_threshold"] = ranking;
  summary["passed"] = !failed;
  write_json(join_path(out_dir, "summary.json"), summary);
  return {summary, failed ? 1 : 0};
}

}  // namespace

RunOutcome repro_example1(double kappa, std::uint64_t seed, const std::string& out_dir, Eigen::Index n_samples) {
  if (!(kappa > 1.0)) throw config_error("kappa", "must exceed 1");
  const double L = 1.0;
  const double mu = 1.0 / kappa;
  const ObjectiveFunction fn = make_quadratic(100, mu, L, seed);
  const Vector x0 = gaussian_point(fn.dim, seed);
  std::filesystem::create_directories(out_dir);

  const ConvexCertificates star = optimal_damping_convex(L, mu, 0.1);
  const double alpha_star = star.gap.alpha;
  std::vector<CurveSpec> specs;
  specs.push_back({"gradient_flow", false, 0.0, std::nullopt});
  specs.push_back({"heavy_ball_alpha_star", true, alpha_star, star.gap});
  for (const auto& [name, alpha] : {std::pair{"heavy_ball_alpha_star_minus", alpha_star - 0.1},
                                    std::pair{"heavy_ball_alpha_star_plus", alpha_star + 0.1},
                                    std::pair{"heavy_ball_2sqrt_mu", 2.0 * std::sqrt(mu)}}) {
    specs.push_back({name, true, alpha, certify_alpha(alpha, L, mu, true).gap});
  }

  IntegrationOptions opts;
  opts.n_samples = n_samples;
  const double t_end = horizon_for(star.gap.exponent_m);
  json summary = {{"example", "example1"}, {"kappa", kappa}, {"mu", mu}, {"L", L}, {"dim", fn.dim},
                  {"seed", seed}, {"x0_rule", "N(0,1) entries from mt19937_64(seed + 1)"},
                  {"alpha_star", alpha_star}};
  return run_curves(fn, specs, x0, t_end, opts, out_dir, 1e-6, summary);
}

RunOutcome repro_example2(const Vector& start, const std::string& out_dir, Eigen::Index n_samples) {
  if (start.size() != 2) throw config_error("start", "expected two coordinates");
  const double c = 0.125;
  const ObjectiveFunction fn = make_sin_valley(c);
  const double mu = *fn.pl_mu;
  const double L = sublevel_lipschitz(fn, start, sin_valley_sublevel_box(c, start), 0);
  std::filesystem::create_directories(out_dir);

  const RateCertificate star = optimal_damping_nonconvex(L, mu, 0.1);
  std::vector<CurveSpec> specs;
  specs.push_back({"gradient_flow", false, 0.0, std::nullopt});
  specs.push_back({"heavy_ball_alpha_star", true, star.alpha, star});
  const double alpha2 = 2.0 * std::sqrt(mu);
  specs.push_back({"heavy_ball_2sqrt_mu", true, alpha2, best_nonconvex_certificate(L, mu, alpha2)});

  IntegrationOptions opts;
  opts.n_samples = n_samples;
  const double t_end = horizon_for(star.exponent_m);
  json summary = {{"example", "example2"}, {"c", c}, {"mu", mu}, {"L", L}, {"kappa", L / mu},
                  {"start", to_json(start)}, {"L_rule", "sampled sublevel-set estimate times 1.05"}};
  RunOutcome out = run_curves(fn, specs, start, t_end, opts, out_dir, 1e-6, summary);
  // Heavy-ball runs must land on the valley floor.
  for (auto& curve : out.summary["curves"]) {
    if (curve["dynamics"] != "heavy-ball") continue;
    const bool ok = curve["final_gap"].get<double>() < 1e-10;
    curve["residual"] = {{"final_gap", curve["final_gap"]}, {"limit", 1e-10}, {"status", ok ? "pass" : "fail"}};
    if (!ok) out.exit_code = 1;
  }
  out.summary["passed"] = out.exit_code == 0;
  write_json(join_path(out_dir, "summary.json"), out.summary);
  return out;
}

}  // namespace hbpl
