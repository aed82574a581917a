#include "hbpl/registry.hpp"

#include <initializer_list>

#include "hbpl/error.hpp"

namespace hbpl {

namespace {

template <typename T>
T param_or(const nlohmann::json& params, const char* key, T fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kConfig, std::string("parameter '") + key + "' has the wrong type");
  }
}

void require_keys(const std::string& id, const nlohmann::json& params, std::initializer_list<const char*> allowed) {
  if (params.is_null()) return;
  if (!params.is_object()) throw Error(ErrorCode::kConfig, "params for '" + id + "' must be an object");
  for (const auto& [key, value] : params.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw Error(ErrorCode::kConfig, "unknown parameter '" + key + "' for '" + id + "'");
  }
}

}  // namespace

ObjectiveFunction make_objective(const std::string& id, const nlohmann::json& params) {
  if (id == "quadratic") {
    require_keys(id, params, {"dim", "mu", "L", "seed"});
    if (!params.is_object() || !params.contains("mu")) {
      throw Error(ErrorCode::kConfig, "quadratic requires parameter 'mu'");
    }
    return make_quadratic(param_or<Eigen::Index>(params, "dim", 100), param_or<double>(params, "mu", 0.0),
                          param_or<double>(params, "L", 1.0), param_or<std::uint64_t>(params, "seed", 0));
  }
  if (id == "sin-valley") require_keys(id, params, {"c"});
  if (id == "piecewise") require_keys(id, params, {"eps"});
  if (id == "flat-bottom" || id == "abs") require_keys(id, params, {});
  if (id == "sin-valley") return make_sin_valley(param_or<double>(params, "c", 0.125));
  if (id == "piecewise") return make_piecewise_nonconvex(param_or<double>(params, "eps", 1.0));
  if (id == "flat-bottom") return make_flat_bottom();
  if (id == "abs") return make_abs();
  throw Error(ErrorCode::kUnknownFunction, "no registered objective named '" + id + "'");
}

std::vector<std::string> registered_objectives() {
  return {"quadratic", "sin-valley", "piecewise", "flat-bottom", "abs"};
}

}  // namespace hbpl
