#include "hbpl/io.hpp"

#include <cstdio>
#include <fstream>

#include "hbpl/error.hpp"

namespace hbpl {

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json to_json(const RateCertificate& cert) {
  return {
      {"exponent_m", cert.exponent_m},
      {"constant_C", cert.constant_C},
      {"alpha", cert.alpha},
      {"delta", optional_json(cert.delta)},
      {"regime", std::string(to_string(cert.regime))},
      {"quantity", std::string(to_string(cert.quantity))},
      {"epsilon", cert.epsilon},
      {"polynomial_factor", optional_json(cert.polynomial_factor)},
      {"binding", std::string(to_string(cert.binding))},
      {"statement_constant", optional_json(cert.statement_constant)},
      {"lipschitz_scaled_constant", optional_json(cert.lipschitz_scaled_constant)},
  };
}

json to_json(const AlphaRegion& region) {
  return {{"lower_open", region.lower_open},
          {"left_closed_end", region.left_closed_end},
          {"right_closed_start", region.right_closed_start},
          {"upper_open", region.upper_open}};
}

json to_json(const EnvelopeCheck& check) {
  return {{"certificate", to_json(check.certificate)},
          {"max_ratio", check.max_ratio},
          {"first_violation_time", optional_json(check.first_violation_time)},
          {"status", std::string(to_string(check.status))},
          {"passed", check.passed()},
          {"truncated", check.truncated},
          {"samples_checked", check.samples_checked}};
}

json to_json(const ConditionReport& report) {
  return {{"kind", std::string(to_string(report.kind))},
          {"parameter", report.parameter},
          {"sample_count", report.sample_count},
          {"worst_margin", report.worst_margin},
          {"witness", to_json(report.witness)},
          {"witness_gap", report.witness_value},
          {"holds", report.holds},
          {"single_projection", report.single_projection}};
}

json to_json(const FactorComparison& cmp) {
  return {
      {"kappa", cmp.kappa},
      {"factors",
       {{"heavy_ball", cmp.heavy_ball},
        {"gradient_flow", cmp.gradient_flow},
        {"unique_minimizer_lyapunov", cmp.unique_minimizer_lyapunov},
        {"quasi_strong_convexity", cmp.quasi_strong_convexity}}},
      {"heavy_ball_beats",
       {{"gradient_flow", cmp.heavy_ball_beats_gradient_flow},
        {"unique_minimizer_lyapunov", cmp.heavy_ball_beats_unique_minimizer},
        {"quasi_strong_convexity", cmp.heavy_ball_beats_quasi_strong}}},
      {"printed_window_predicts_heavy_ball", cmp.printed_window_predicts_heavy_ball},
      {"kappa_star",
       {{"unique_minimizer_lyapunov", cmp.kappa_star_unique_minimizer},
        {"unique_minimizer_lyapunov_bisected", cmp.kappa_star_unique_minimizer_bisected},
        {"quasi_strong_convexity", cmp.kappa_star_quasi_strong},
        {"quasi_strong_convexity_bisected", cmp.kappa_star_quasi_strong_bisected}}},
  };
}

json to_json(const DecayFit& fit) {
  return {{"rate", fit.rate}, {"r_squared", fit.r_squared}, {"n_used", fit.n_used}};
}

json trajectory_summary(const Trajectory& traj) {
  const Eigen::Index last = traj.size() - 1;
  json doc = {
      {"function", traj.meta.function_id},
      {"dynamics", traj.meta.dynamics},
      {"alpha", optional_json(traj.meta.alpha)},
      {"abs_tol", traj.meta.abs_tol},
      {"rel_tol", traj.meta.rel_tol},
      {"n_samples", traj.size()},
      {"accepted_steps", traj.meta.accepted_steps},
      {"rejected_steps", traj.meta.rejected_steps},
  };
  if (last >= 0) {
    doc["final"] = {{"t", traj.times(last)},
                    {"F_minus_Fstar", traj.values(last)},
                    {"grad_norm_sq", traj.grad_sq(last)},
                    {"x", to_json(Eigen::VectorXd(traj.positions.col(last)))}};
    doc["initial_gap"] = traj.values(0);
  }
  return doc;
}

std::vector<CsvColumn> trajectory_columns(const Trajectory& traj) {
  std::vector<CsvColumn> cols{{"t", traj.times}, {"F_minus_Fstar", traj.values}, {"grad_norm_sq", traj.grad_sq}};
  if (traj.dim() <= 3) {
    for (Eigen::Index i = 0; i < traj.dim(); ++i) {
      cols.push_back({"x_" + std::to_string(i + 1), traj.positions.row(i).transpose()});
    }
    if (traj.has_velocities()) {
      for (Eigen::Index i = 0; i < traj.dim(); ++i) {
        cols.push_back({"v_" + std::to_string(i + 1), traj.velocities.row(i).transpose()});
      }
    }
  }
  return cols;
}

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot open '" + path + "' for writing");
  const Eigen::Index rows = columns.empty() ? 0 : columns.front().values.size();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].values.size() != rows) throw Error(ErrorCode::kInvalidDimension, "CSV columns differ in length");
    out << (c ? "," : "") << columns[c].name;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_double(columns[c].values(r));
    out << '\n';
  }
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace hbpl
