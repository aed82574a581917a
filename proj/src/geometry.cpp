#include "hbpl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hbpl/error.hpp"

namespace hbpl {

namespace {

constexpr double kNearMinimum = 1e-12;

void require_gradient(const ObjectiveFunction& fn) {
  if (!fn.has_gradient()) throw Error(ErrorCode::kMissingGradient, "objective '" + fn.id + "' has no gradient");
}

void require_box(const ObjectiveFunction& fn, const Box& box) {
  if (box.dim() != fn.dim || box.upper.size() != fn.dim) {
    throw Error(ErrorCode::kInvalidDimension, "box dimension does not match objective '" + fn.id + "'");
  }
}

Vector uniform_point(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) x(i) = box.lower(i) + unit(rng) * (box.upper(i) - box.lower(i));
  return x;
}

double gradient_norm(const ObjectiveFunction& fn, const Vector& x) {
  if (fn.has_gradient()) return fn.grad(x).norm();
  if (fn.subgradient_norm) return fn.subgradient_norm(x);
  throw Error(ErrorCode::kMissingGradient, "objective '" + fn.id + "' has neither gradient nor subgradient oracle");
}

}  // namespace

std::string_view to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kPL: return "PL";
    case ConditionKind::kQG: return "QG";
    case ConditionKind::kEB: return "EB";
    case ConditionKind::kQSC: return "qSC";
    case ConditionKind::kNsPL: return "ns-PL";
  }
  return "unknown";
}

ConditionKind parse_condition_kind(std::string_view text) {
  for (auto k : {ConditionKind::kPL, ConditionKind::kQG, ConditionKind::kEB, ConditionKind::kQSC,
                 ConditionKind::kNsPL}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::kConfig, "unknown condition kind '" + std::string(text) + "'");
}

Box Box::cube(Eigen::Index dim, double lo, double hi) {
  return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

Matrix sample_box(const Box& box, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidConstants, "need at least one sample");
  const Eigen::Index d = box.dim();
  if (d == 1 || d == 2) {
    const auto per_axis = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d)))));
    auto coord = [&](Eigen::Index axis, Eigen::Index k) {
      if (per_axis == 1) return 0.5 * (box.lower(axis) + box.upper(axis));
      return box.lower(axis) +
             (box.upper(axis) - box.lower(axis)) * static_cast<double>(k) / static_cast<double>(per_axis - 1);
    };
    if (d == 1) {
      Matrix pts(1, per_axis);
      for (Eigen::Index k = 0; k < per_axis; ++k) pts(0, k) = coord(0, k);
      return pts;
    }
    Matrix pts(2, per_axis * per_axis);
    for (Eigen::Index i = 0; i < per_axis; ++i) {
      for (Eigen::Index j = 0; j < per_axis; ++j) {
        pts(0, i * per_axis + j) = coord(0, i);
        pts(1, i * per_axis + j) = coord(1, j);
      }
    }
    return pts;
  }
  std::mt19937_64 rng(seed);
  Matrix pts(d, n);
  for (Eigen::Index k = 0; k < n; ++k) pts.col(k) = uniform_point(box, rng);
  return pts;
}

PLEstimate estimate_pl(const ObjectiveFunction& fn, const Box& box, Eigen::Index n, std::uint64_t seed) {
  require_gradient(fn);
  require_box(fn, box);
  const Matrix pts = sample_box(box, n, seed);
  PLEstimate est;
  est.mu_hat = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < pts.cols(); ++k) {
    const Vector x = pts.col(k);
    const double gap = fn.gap(x);
    if (!(gap > kNearMinimum)) continue;
    const double ratio = fn.grad(x).squaredNorm() / (2.0 * gap);
    ++est.samples_used;
    if (ratio < est.mu_hat) {
      est.mu_hat = ratio;
      est.witness = x;
    }
  }
  if (est.samples_used == 0) {
    throw Error(ErrorCode::kEmptyEstimate, "every sample of '" + fn.id + "' sits at the minimum value");
  }
  return est;
}

ConditionReport check_condition_at(const ObjectiveFunction& fn, ConditionKind kind, double parameter,
                                   const Matrix& points, const VectorField& projection) {
  if (!(parameter > 0.0)) throw Error(ErrorCode::kInvalidConstants, "condition parameter must be positive");
  if (points.rows() != fn.dim) throw Error(ErrorCode::kInvalidDimension, "sample points do not match objective");
  const bool needs_projection = kind == ConditionKind::kQG || kind == ConditionKind::kEB || kind == ConditionKind::kQSC;
  const VectorField& proj = projection ? projection : fn.project_to_minimizers;
  if (needs_projection && !proj) {
    throw Error(ErrorCode::kMissingOracle,
                std::string(to_string(kind)) + " needs a distance oracle for '" + fn.id + "'");
  }
  if ((kind == ConditionKind::kPL || kind == ConditionKind::kEB || kind == ConditionKind::kQSC)) require_gradient(fn);

  ConditionReport report;
  report.kind = kind;
  report.parameter = parameter;
  report.sample_count = points.cols();
  report.single_projection = kind == ConditionKind::kQSC;
  report.worst_margin = std::numeric_limits<double>::infinity();

  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const Vector x = points.col(k);
    const double gap = fn.gap(x);
    double margin = 0.0;
    switch (kind) {
      case ConditionKind::kPL:
        margin = fn.grad(x).squaredNorm() / (2.0 * parameter) - gap;
        break;
      case ConditionKind::kNsPL: {
        const double g = gradient_norm(fn, x);
        margin = g * g / (2.0 * parameter) - gap;
        break;
      }
      case ConditionKind::kQG: {
        const double dist = (x - proj(x)).norm();
        margin = gap - 0.5 * parameter * dist * dist;
        break;
      }
      case ConditionKind::kEB: {
        const double dist = (x - proj(x)).norm();
        margin = fn.grad(x).norm() - parameter * dist;
        break;
      }
      case ConditionKind::kQSC: {
        const Vector xbar = proj(x);
        const Vector diff = xbar - x;
        margin = fn.eval(xbar) - (fn.eval(x) + fn.grad(x).dot(diff) + 0.5 * parameter * diff.squaredNorm());
        break;
      }
    }
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.witness = x;
      report.witness_value = gap;
    }
  }
  report.holds = report.worst_margin >= -1e-10 * (1.0 + std::abs(report.witness_value + fn.f_star));
  return report;
}

ConditionReport check_condition(const ObjectiveFunction& fn, ConditionKind kind, double parameter, const Box& box,
                                Eigen::Index n, std::uint64_t seed, const VectorField& projection) {
  require_box(fn, box);
  return check_condition_at(fn, kind, parameter, sample_box(box, n, seed), projection);
}

double convert_constants(ConditionKind from, ConditionKind to, double value, bool is_convex, std::optional<double> L) {
  using K = ConditionKind;
  if (!(value > 0.0)) throw Error(ErrorCode::kInvalidConstants, "constant must be positive");
  if (L && !(*L > 0.0)) throw Error(ErrorCode::kInvalidConstants, "L must be positive");
  const auto no_implication = [&](const char* why) {
    return Error(ErrorCode::kNoImplication, std::string(to_string(from)) + " -> " + std::string(to_string(to)) +
                                                ": " + why);
  };
  if (from == to) return value;
  if (from == K::kQSC && to == K::kPL) return value;
  if (from == K::kPL && to == K::kQG) return value;
  if (from == K::kQSC && to == K::kQG) return value;
  if (from == K::kEB && to == K::kPL) {
    if (!L) throw no_implication("needs an L-Lipschitz gradient");
    return value * value / *L;
  }
  if (from == K::kQG && to == K::kEB) {
    if (!is_convex) throw no_implication("needs convexity");
    return value / 2.0;
  }
  if (from == K::kQG && to == K::kPL) {
    if (!is_convex) throw no_implication("needs convexity");
    return value / 4.0;
  }
  if (from == K::kPL && to == K::kQSC) {
    if (!is_convex || !L) throw no_implication("needs convexity and an L-Lipschitz gradient");
    return value * value / *L;
  }
  throw no_implication("not among the licensed implications");
}

LipschitzEstimate estimate_lipschitz_grad(const ObjectiveFunction& fn, const Box& box, Eigen::Index n_pairs,
                                          std::uint64_t seed, std::optional<double> max_value) {
  require_gradient(fn);
  require_box(fn, box);
  if (n_pairs < 1) throw Error(ErrorCode::kInvalidConstants, "need at least one pair");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double width = (box.upper - box.lower).maxCoeff();

  auto admissible = [&](const Vector& x) {
    if (!max_value) return true;
    return fn.gap(x) <= *max_value;
  };
  auto inside = [&](const Vector& x) {
    return (x.array() >= box.lower.array()).all() && (x.array() <= box.upper.array()).all();
  };

  LipschitzEstimate est;
  auto consider = [&](const Vector& x, const Vector& y) {
    const double dx = (x - y).norm();
    if (!(dx > 0.0) || !admissible(x) || !admissible(y)) return;
    est.L_hat = std::max(est.L_hat, (fn.grad(x) - fn.grad(y)).norm() / dx);
    ++est.pairs_used;
  };

  const Eigen::Index n_global = std::max<Eigen::Index>(1, n_pairs / 2);
  const Eigen::Index n_local = std::max<Eigen::Index>(1, n_pairs - n_global);
  for (Eigen::Index k = 0; k < n_global; ++k) consider(uniform_point(box, rng), uniform_point(box, rng));

  for (Eigen::Index k = 0; k < n_local; ++k) {
    const Vector x = uniform_point(box, rng);
    Vector dir(fn.dim);
    for (Eigen::Index i = 0; i < fn.dim; ++i) dir(i) = normal(rng);
    dir.normalize();
    const double r = 1e-3 * width;
    const Vector y = x + r * dir;
    if (inside(y)) consider(x, y);
  }

  // Power iteration on the finite-difference Hessian action.
  const Eigen::Index n_power = std::max<Eigen::Index>(1, std::min<Eigen::Index>(n_pairs / 20, 200));
  for (Eigen::Index k = 0; k < n_power; ++k) {
    const Vector x = uniform_point(box, rng);
    if (!admissible(x)) continue;
    const double h = 1e-5 * (1.0 + x.norm());
    Vector dir(fn.dim);
    for (Eigen::Index i = 0; i < fn.dim; ++i) dir(i) = normal(rng);
    dir.normalize();
    for (int it = 0; it < 60; ++it) {
      const Vector hv = (fn.grad(x + h * dir) - fn.grad(x - h * dir)) / (2.0 * h);
      const double norm = hv.norm();
      if (!(norm > 0.0)) break;
      dir = hv / norm;
    }
    const Vector a = x + h * dir;
    const Vector b = x - h * dir;
    if (inside(a) && inside(b)) consider(a, b);
  }
  return est;
}

}  // namespace hbpl
