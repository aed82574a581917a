#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hbpl/certificates.hpp"
#include "hbpl/geometry.hpp"
#include "hbpl/integrator.hpp"
#include "hbpl/verify.hpp"

namespace hbpl {

using json = nlohmann::json;

/// Round-trippable "%.17g" rendering used for every CSV cell.
std::string format_double(double value);

json to_json(const Eigen::VectorXd& v);
json to_json(const RateCertificate& cert);
json to_json(const AlphaRegion& region);
json to_json(const EnvelopeCheck& check);
json to_json(const ConditionReport& report);
json to_json(const FactorComparison& cmp);
json to_json(const DecayFit& fit);

/// meta + final values + step counts.
json trajectory_summary(const Trajectory& traj);

struct CsvColumn {
  std::string name;
  Eigen::VectorXd values;
};

/// t, F_minus_Fstar, grad_norm_sq, then x_1.. and v_1.. when dim ≤ 3.
std::vector<CsvColumn> trajectory_columns(const Trajectory& traj);

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns);
void write_json(const std::string& path, const json& doc);

}  // namespace hbpl
