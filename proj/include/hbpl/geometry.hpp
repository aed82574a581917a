#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hbpl/objectives.hpp"

namespace hbpl {

enum class ConditionKind { kPL, kQG, kEB, kQSC, kNsPL };

std::string_view to_string(ConditionKind kind);
/// Parses "PL", "QG", "EB", "qSC", "ns-PL"; throws kConfig otherwise.
ConditionKind parse_condition_kind(std::string_view text);

/// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  static Box cube(Eigen::Index dim, double lo, double hi);
  Eigen::Index dim() const { return lower.size(); }
};

/// Sample points: a tensor grid with round(n^(1/dim)) points per axis when
/// dim ≤ 2, otherwise n seeded uniform draws. Columns are points.
Matrix sample_box(const Box& box, Eigen::Index n, std::uint64_t seed);

struct PLEstimate {
  double mu_hat = 0.0;
  Vector witness;
  Eigen::Index samples_used = 0;
};

/// min over samples with F − F* > 1e-12 of ‖∇F‖²/(2(F − F*)).
PLEstimate estimate_pl(const ObjectiveFunction& fn, const Box& box, Eigen::Index n, std::uint64_t seed);

struct ConditionReport {
  ConditionKind kind = ConditionKind::kPL;
  double parameter = 0.0;
  Eigen::Index sample_count = 0;
  double worst_margin = 0.0;  // min of RHS − LHS
  Vector witness;
  double witness_value = 0.0;  // F(witness) − F*
  bool holds = false;
  // qSC quantifies over every projection onto X*; only the oracle's one is used.
  bool single_projection = false;
};

/// Evaluates the defining inequality of `kind` at the sample points of `box`.
/// `projection` overrides fn.project_to_minimizers for the distance-based kinds.
ConditionReport check_condition(const ObjectiveFunction& fn, ConditionKind kind, double parameter, const Box& box,
                                Eigen::Index n, std::uint64_t seed,
                                const VectorField& projection = VectorField());

/// Same, on explicit sample points (columns of `points`).
ConditionReport check_condition_at(const ObjectiveFunction& fn, ConditionKind kind, double parameter,
                                   const Matrix& points, const VectorField& projection = VectorField());

/// Constant conversions licensed by the implications between the conditions.
double convert_constants(ConditionKind from, ConditionKind to, double value, bool is_convex,
                         std::optional<double> L = std::nullopt);

struct LipschitzEstimate {
  double L_hat = 0.0;
  bool lower_bound = true;  // sampled, so never an upper bound
  Eigen::Index pairs_used = 0;
};

/// max ‖∇F(x) − ∇F(y)‖/‖x − y‖ over seeded pairs in `box`: global pairs,
/// short-range pairs, and pairs along a finite-difference power iteration for
/// the top curvature direction. With `max_value` set, only pairs whose points
/// both satisfy F − F* ≤ max_value count.
LipschitzEstimate estimate_lipschitz_grad(const ObjectiveFunction& fn, const Box& box, Eigen::Index n_pairs,
                                          std::uint64_t seed, std::optional<double> max_value = std::nullopt);

}  // namespace hbpl
