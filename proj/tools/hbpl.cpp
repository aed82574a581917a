// Command-line front end: run, certify, check-geometry, moreau, compare, repro.
//
// Exit status: 0 when every check passes, 1 when a check fails or the
// numerics break down, 2 for configuration errors.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbpl/certificates.hpp"
#include "hbpl/error.hpp"
#include "hbpl/geometry.hpp"
#include "hbpl/io.hpp"
#include "hbpl/moreau.hpp"
#include "hbpl/registry.hpp"
#include "hbpl/runner.hpp"

namespace {

using hbpl::json;

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

int exit_code_for(const hbpl::Error& e) {
  switch (e.code()) {
    case hbpl::ErrorCode::kIntegrationBudgetExceeded:
    case hbpl::ErrorCode::kNumericalBlowup:
    case hbpl::ErrorCode::kProxBudgetExceeded:
    case hbpl::ErrorCode::kInsufficientData:
      return kCheckFailure;
    default:
      return kConfigError;
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hbpl::Error(hbpl::ErrorCode::kConfig, "cannot read config '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw hbpl::Error(hbpl::ErrorCode::kConfig, "config '" + path + "' is not valid JSON");
  return doc;
}

json parse_inline_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw hbpl::Error(hbpl::ErrorCode::kConfig, what + " is not valid JSON");
  return doc;
}

hbpl::Vector parse_point(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw hbpl::Error(hbpl::ErrorCode::kConfig, what + ": '" + text + "' is not a comma-separated list of numbers");
    }
  }
  if (values.empty()) throw hbpl::Error(hbpl::ErrorCode::kConfig, what + " is empty");
  return Eigen::Map<hbpl::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void print(const json& doc) { std::cout << doc.dump(2) << '\n'; }

struct RunArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string output_dir;
};

int cmd_run(const RunArgs& a) {
  json doc = read_json_file(a.config);
  for (const auto& o : a.overrides) hbpl::apply_override(doc, o);
  if (!a.output_dir.empty()) doc["output_dir"] = a.output_dir;
  const hbpl::RunConfig cfg = hbpl::parse_run_config(doc);
  const hbpl::RunOutcome out = hbpl::execute_run(cfg);
  print(out.summary);
  return out.exit_code;
}

struct CertifyArgs {
  double L = 1.0;
  double mu = 1.0;
  double eps = 0.1;
  std::optional<double> delta;
  std::optional<double> alpha;
  std::string sign = "+";
};

int cmd_certify(const CertifyArgs& a) {
  json out = {{"L", a.L}, {"mu", a.mu}, {"kappa", a.L / a.mu}};
  if (a.sign != "+" && a.sign != "-") throw hbpl::Error(hbpl::ErrorCode::kConfig, "--sign must be + or -");
  const auto sign = a.sign == "+" ? hbpl::SmallKappaSign::kPlus : hbpl::SmallKappaSign::kMinus;
  out["optimal_nonconvex"] = hbpl::to_json(hbpl::optimal_damping_nonconvex(a.L, a.mu, a.eps, sign));
  const auto convex = hbpl::optimal_damping_convex(a.L, a.mu, a.eps);
  out["optimal_convex"] = {{"grad", hbpl::to_json(convex.grad)}, {"gap", hbpl::to_json(convex.gap)}};

  std::optional<double> delta = a.delta;
  if (a.alpha && !delta) {
    try {
      delta = hbpl::delta_for_alpha(*a.alpha, a.L, a.mu);
      out["delta_for_alpha"] = *delta;
    } catch (const hbpl::Error& e) {
      out["delta_for_alpha"] = {{"error", e.what()}};
    }
  }
  if (delta) {
    out["region"] = hbpl::to_json(hbpl::feasible_alpha_region(a.L, a.mu, *delta));
    if (a.alpha) {
      auto attempt = [&](const char* key, auto&& fn) {
        try {
          out[key] = fn();
        } catch (const hbpl::Error& e) {
          out[key] = {{"error", e.what()}};
        }
      };
      attempt("nonconvex", [&] { return hbpl::to_json(hbpl::rate_nonconvex(a.L, a.mu, *delta, *a.alpha)); });
      attempt("convex", [&] {
        const auto c = hbpl::rate_convex(a.L, a.mu, *delta, *a.alpha);
        return json{{"grad", hbpl::to_json(c.grad)}, {"gap", hbpl::to_json(c.gap)}};
      });
    }
  }
  print(out);
  return kPass;
}

struct GeometryArgs {
  std::string function;
  std::string params = "{}";
  std::string kind = "PL";
  double parameter = 0.0;
  double lower = -5.0;
  double upper = 5.0;
  long n = 1000;
  std::uint64_t seed = 0;
  bool estimate_pl = false;
  bool estimate_lipschitz = false;
};

int cmd_check_geometry(const GeometryArgs& a) {
  const hbpl::ObjectiveFunction fn = hbpl::make_objective(a.function, parse_inline_json(a.params, "--params"));
  if (!(a.lower < a.upper)) throw hbpl::Error(hbpl::ErrorCode::kConfig, "--lower must be below --upper");
  const hbpl::Box box = hbpl::Box::cube(fn.dim, a.lower, a.upper);
  json out = {{"function", a.function}, {"box", {a.lower, a.upper}}};
  int code = kPass;
  if (a.estimate_pl) {
    const auto est = hbpl::estimate_pl(fn, box, a.n, a.seed);
    out["estimate_pl"] = {{"mu_hat", est.mu_hat}, {"witness", hbpl::to_json(est.witness)},
                          {"samples_used", est.samples_used}};
  }
  if (a.estimate_lipschitz) {
    const auto est = hbpl::estimate_lipschitz_grad(fn, box, a.n, a.seed);
    out["estimate_lipschitz_grad"] = {{"L_hat", est.L_hat}, {"lower_bound", est.lower_bound},
                                      {"pairs_used", est.pairs_used}};
  }
  if (a.parameter > 0.0) {
    const auto report =
        hbpl::check_condition(fn, hbpl::parse_condition_kind(a.kind), a.parameter, box, a.n, a.seed);
    out["report"] = hbpl::to_json(report);
    if (!report.holds) code = kCheckFailure;
  }
  print(out);
  return code;
}

struct MoreauArgs {
  std::string function = "abs";
  std::string params = "{}";
  double lambda = 1.0;
  double mu = 0.0;
  std::optional<double> M;
  std::string x0 = "3";
  std::optional<double> t_end;
  long n_samples = 1001;
  std::string output_dir = ".";
  std::string name = "moreau";
};

int cmd_moreau(const MoreauArgs& a) {
  json doc = {{"function", a.function},  {"params", parse_inline_json(a.params, "--params")},
              {"dynamics", "moreau-heavy-ball"}, {"lambda", a.lambda},
              {"x0", hbpl::to_json(parse_point(a.x0, "--x0"))},
              {"n_samples", a.n_samples}, {"output_dir", a.output_dir}, {"name", a.name},
              {"checks", {"envelope", "energy", "sublevel"}}};
  if (a.mu > 0.0) doc["mu_ns"] = a.mu;
  if (a.M) doc["lipschitz_M"] = *a.M;
  if (a.t_end) doc["t_end"] = *a.t_end;
  const hbpl::RunOutcome out = hbpl::execute_run(hbpl::parse_run_config(doc));
  print(out.summary);
  return out.exit_code;
}

int cmd_compare(double L, double mu) {
  print(hbpl::to_json(hbpl::compare_factors(L, mu)));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-ball and gradient-flow rate laboratory"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Integrate one configured trajectory and verify it");
  run->add_option("-c,--config", run_args.config, "JSON run configuration")->required();
  run->add_option("--set", run_args.overrides, "Override a config key: key.sub=value");
  run->add_option("-o,--output-dir", run_args.output_dir, "Directory for CSV/JSON output");

  CertifyArgs cert_args;
  auto* certify = app.add_subcommand("certify", "Rate certificates for (L, mu) and optionally (delta, alpha)");
  certify->add_option("--L", cert_args.L, "Gradient Lipschitz constant")->required();
  certify->add_option("--mu", cert_args.mu, "PL constant")->required();
  certify->add_option("--eps", cert_args.eps, "Epsilon for the kappa <= 9/8 and kappa = 1 branches");
  certify->add_option("--delta", cert_args.delta, "Lyapunov parameter delta");
  certify->add_option("--alpha", cert_args.alpha, "Damping to certify");
  certify->add_option("--sign", cert_args.sign, "Sign choice for kappa < 9/8 (+ or -)");

  GeometryArgs geo_args;
  auto* geometry = app.add_subcommand("check-geometry", "Sampled check of PL, QG, EB, qSC or ns-PL");
  geometry->add_option("-f,--function", geo_args.function, "Registered objective id")->required();
  geometry->add_option("--params", geo_args.params, "Objective parameters as JSON");
  geometry->add_option("--kind", geo_args.kind, "PL, QG, EB, qSC or ns-PL");
  geometry->add_option("--parameter", geo_args.parameter, "Condition constant; omit to skip the check");
  geometry->add_option("--lower", geo_args.lower, "Lower corner of the cube box");
  geometry->add_option("--upper", geo_args.upper, "Upper corner of the cube box");
  geometry->add_option("-n,--samples", geo_args.n, "Sample count");
  geometry->add_option("--seed", geo_args.seed, "Sampling seed");
  geometry->add_flag("--estimate-pl", geo_args.estimate_pl, "Report the sampled PL constant");
  geometry->add_flag("--estimate-lipschitz", geo_args.estimate_lipschitz, "Report the sampled gradient Lipschitz constant");

  MoreauArgs moreau_args;
  auto* moreau = app.add_subcommand("moreau", "Heavy ball on the Moreau envelope with its bounds");
  moreau->add_option("-f,--function", moreau_args.function, "Registered convex objective id");
  moreau->add_option("--params", moreau_args.params, "Objective parameters as JSON");
  moreau->add_option("--lambda", moreau_args.lambda, "Envelope parameter");
  moreau->add_option("--mu", moreau_args.mu, "Asserted ns-PL constant of the base")->required();
  moreau->add_option("--M", moreau_args.M, "Lipschitz constant of the base, enables the second bound");
  moreau->add_option("--x0", moreau_args.x0, "Initial point, comma separated");
  moreau->add_option("--t-end", moreau_args.t_end, "Horizon");
  moreau->add_option("--n-samples", moreau_args.n_samples, "Output samples");
  moreau->add_option("-o,--output-dir", moreau_args.output_dir, "Output directory");
  moreau->add_option("--name", moreau_args.name, "Output file stem");

  double cmp_L = 1.0;
  double cmp_mu = 1.0;
  auto* compare = app.add_subcommand("compare", "Worst-case rate factors and crossing thresholds");
  compare->add_option("--L", cmp_L, "Gradient Lipschitz constant")->required();
  compare->add_option("--mu", cmp_mu, "PL constant")->required();

  auto* repro = app.add_subcommand("repro", "Reproduce the two numerical examples");
  repro->require_subcommand(1);
  double kappa = 10.0;
  std::uint64_t seed = 7;
  std::string ex1_dir = "example1";
  auto* ex1 = repro->add_subcommand("example1", "Quadratic, gradient flow vs heavy ball");
  ex1->add_option("--kappa", kappa, "Condition number (10, 100 or 200 in the original set)");
  ex1->add_option("--seed", seed, "Matrix seed");
  ex1->add_option("-o,--output-dir", ex1_dir, "Output directory");
  std::string start = "4.5,4.5";
  std::string ex2_dir = "example2";
  auto* ex2 = repro->add_subcommand("example2", "Sin valley from one starting point");
  ex2->add_option("--start", start, "Starting point x,y");
  ex2->add_option("-o,--output-dir", ex2_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*certify) return cmd_certify(cert_args);
    if (*geometry) return cmd_check_geometry(geo_args);
    if (*moreau) return cmd_moreau(moreau_args);
    if (*compare) return cmd_compare(cmp_L, cmp_mu);
    if (*ex1) {
      const auto out = hbpl::repro_example1(kappa, seed, ex1_dir);
      print(out.summary);
      return out.exit_code;
    }
    if (*ex2) {
      const auto out = hbpl::repro_example2(parse_point(start, "--start"), ex2_dir);
      print(out.summary);
      return out.exit_code;
    }
  } catch (const hbpl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
