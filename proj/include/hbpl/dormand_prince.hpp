#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "hbpl/error.hpp"

namespace hbpl {

template <typename Scalar>
struct DormandPrinceOptions {
  Scalar abs_tol = Scalar(1e-13);
  Scalar rel_tol = Scalar(1e-10);
  Scalar safety = Scalar(0.9);
  // PI controller exponents, already divided by the order (5).
  Scalar error_exponent = Scalar(0.7) / Scalar(5);
  Scalar history_exponent = Scalar(0.4) / Scalar(5);
  Scalar min_factor = Scalar(0.2);
  Scalar max_factor = Scalar(10);
  Scalar initial_step = Scalar(0);  // 0 selects min(1e-4, span / samples)
  long max_steps = 10'000'000;
};

struct DormandPrinceStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

namespace dopri {

// Butcher tableau of the 5(4) pair, embedded error weights (b − b̂) and the
// coefficients of the fourth-order continuous extension.
template <typename S> inline constexpr S c2 = S(1) / S(5);
template <typename S> inline constexpr S c3 = S(3) / S(10);
template <typename S> inline constexpr S c4 = S(4) / S(5);
template <typename S> inline constexpr S c5 = S(8) / S(9);

template <typename S> inline constexpr S a21 = S(1) / S(5);
template <typename S> inline constexpr S a31 = S(3) / S(40);
template <typename S> inline constexpr S a32 = S(9) / S(40);
template <typename S> inline constexpr S a41 = S(44) / S(45);
template <typename S> inline constexpr S a42 = S(-56) / S(15);
template <typename S> inline constexpr S a43 = S(32) / S(9);
template <typename S> inline constexpr S a51 = S(19372) / S(6561);
template <typename S> inline constexpr S a52 = S(-25360) / S(2187);
template <typename S> inline constexpr S a53 = S(64448) / S(6561);
template <typename S> inline constexpr S a54 = S(-212) / S(729);
template <typename S> inline constexpr S a61 = S(9017) / S(3168);
template <typename S> inline constexpr S a62 = S(-355) / S(33);
template <typename S> inline constexpr S a63 = S(46732) / S(5247);
template <typename S> inline constexpr S a64 = S(49) / S(176);
template <typename S> inline constexpr S a65 = S(-5103) / S(18656);
template <typename S> inline constexpr S a71 = S(35) / S(384);
template <typename S> inline constexpr S a73 = S(500) / S(1113);
template <typename S> inline constexpr S a74 = S(125) / S(192);
template <typename S> inline constexpr S a75 = S(-2187) / S(6784);
template <typename S> inline constexpr S a76 = S(11) / S(84);

template <typename S> inline constexpr S e1 = S(71) / S(57600);
template <typename S> inline constexpr S e3 = S(-71) / S(16695);
template <typename S> inline constexpr S e4 = S(71) / S(1920);
template <typename S> inline constexpr S e5 = S(-17253) / S(339200);
template <typename S> inline constexpr S e6 = S(22) / S(525);
template <typename S> inline constexpr S e7 = S(-1) / S(40);

template <typename S> inline constexpr S d1 = S(-12715105075.0L) / S(11282082432.0L);
template <typename S> inline constexpr S d3 = S(87487479700.0L) / S(32700410799.0L);
template <typename S> inline constexpr S d4 = S(-10690763975.0L) / S(1880347072.0L);
template <typename S> inline constexpr S d5 = S(701980252875.0L) / S(199316789632.0L);
template <typename S> inline constexpr S d6 = S(-1453857185.0L) / S(822651844.0L);
template <typename S> inline constexpr S d7 = S(69997945.0L) / S(29380423.0L);

}  // namespace dopri

/// Integrates y' = rhs(t, y) with the Dormand–Prince 5(4) pair and a PI step
/// controller, reporting the solution at every time of `grid` through the
/// continuous extension. `grid` must be nondecreasing; grid[0] is the initial
/// time. `observer(i, y)` is called once per grid index, in order.
///
/// rhs has signature void(Scalar t, const State& y, State& dydt).
template <typename Scalar, typename Rhs, typename Observer>
DormandPrinceStats integrate_dense(Rhs&& rhs, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y0,
                                   std::span<const Scalar> grid, const DormandPrinceOptions<Scalar>& opts,
                                   Observer&& observer) {
  using State = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using std::abs;
  using std::isfinite;
  using std::max;
  using std::min;
  using std::pow;
  namespace c = dopri;

  DormandPrinceStats stats;
  const std::size_t n = grid.size();
  if (n == 0) return stats;

  Scalar t = grid.front();
  const Scalar t_end = grid.back();
  State y = y0;
  std::size_t next = 0;
  while (next < n && grid[next] <= t) observer(next++, y);
  if (next == n) return stats;

  const Eigen::Index dim = y.size();
  State k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), stage(dim), y1(dim), err_vec(dim);
  rhs(t, y, k1);
  ++stats.rhs_evals;
  if (!k1.allFinite()) throw Error(ErrorCode::kNumericalBlowup, "non-finite derivative at start", double(t));

  Scalar h = opts.initial_step > Scalar(0) ? opts.initial_step
                                           : min(Scalar(1e-4), (t_end - t) / Scalar(n));
  Scalar err_prev = Scalar(1e-4);
  bool last_rejected = false;

  while (next < n) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      throw Error(ErrorCode::kIntegrationBudgetExceeded,
                  "step cap reached at t = " + std::to_string(double(t)));
    }
    bool final_step = false;
    if (t + h >= t_end || (t_end - t) <= h * Scalar(1 + 1e-10)) {
      h = t_end - t;
      final_step = true;
    }

    stage = y + h * c::a21<Scalar> * k1;
    rhs(t + c::c2<Scalar> * h, stage, k2);
    stage = y + h * (c::a31<Scalar> * k1 + c::a32<Scalar> * k2);
    rhs(t + c::c3<Scalar> * h, stage, k3);
    stage = y + h * (c::a41<Scalar> * k1 + c::a42<Scalar> * k2 + c::a43<Scalar> * k3);
    rhs(t + c::c4<Scalar> * h, stage, k4);
    stage = y + h * (c::a51<Scalar> * k1 + c::a52<Scalar> * k2 + c::a53<Scalar> * k3 + c::a54<Scalar> * k4);
    rhs(t + c::c5<Scalar> * h, stage, k5);
    stage = y + h * (c::a61<Scalar> * k1 + c::a62<Scalar> * k2 + c::a63<Scalar> * k3 + c::a64<Scalar> * k4 +
                     c::a65<Scalar> * k5);
    rhs(t + h, stage, k6);
    y1 = y + h * (c::a71<Scalar> * k1 + c::a73<Scalar> * k3 + c::a74<Scalar> * k4 + c::a75<Scalar> * k5 +
                  c::a76<Scalar> * k6);
    rhs(t + h, y1, k7);
    stats.rhs_evals += 6;

    err_vec = h * (c::e1<Scalar> * k1 + c::e3<Scalar> * k3 + c::e4<Scalar> * k4 + c::e5<Scalar> * k5 +
                   c::e6<Scalar> * k6 + c::e7<Scalar> * k7);
    Scalar err = Scalar(0);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const Scalar scale = opts.abs_tol + opts.rel_tol * max(abs(y(i)), abs(y1(i)));
      err = max(err, abs(err_vec(i)) / scale);
    }

    if (!isfinite(err) || !y1.allFinite() || !k7.allFinite()) {
      ++stats.rejected;
      h *= opts.min_factor;
      last_rejected = true;
      if (h <= abs(t) * Scalar(1e-15) || h <= Scalar(1e-300)) {
        throw Error(ErrorCode::kNumericalBlowup, "non-finite state; step size underflow", double(t));
      }
      continue;
    }

    if (err <= Scalar(1)) {
      const Scalar t_new = final_step ? t_end : t + h;
      // Continuous extension, evaluated only if a grid point falls inside the step.
      if (next < n && grid[next] <= t_new) {
        const State r2 = y1 - y;
        const State r3 = h * k1 - r2;
        const State r4 = r2 - h * k7 - r3;
        const State r5 = h * (c::d1<Scalar> * k1 + c::d3<Scalar> * k3 + c::d4<Scalar> * k4 +
                              c::d5<Scalar> * k5 + c::d6<Scalar> * k6 + c::d7<Scalar> * k7);
        while (next < n && grid[next] <= t_new) {
          if (grid[next] == t_new) {
            observer(next++, y1);
            continue;
          }
          const Scalar theta = (grid[next] - t) / h;
          const Scalar theta1 = Scalar(1) - theta;
          const State dense = y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
          observer(next++, dense);
        }
      }

      Scalar fac = err == Scalar(0)
                       ? opts.max_factor
                       : opts.safety * pow(err, -opts.error_exponent) * pow(err_prev, opts.history_exponent);
      fac = min(opts.max_factor, max(opts.min_factor, fac));
      if (last_rejected) fac = min(fac, Scalar(1));
      err_prev = max(err, Scalar(1e-4));
      last_rejected = false;

      t = t_new;
      y.swap(y1);
      k1.swap(k7);
      ++stats.accepted;
      h *= fac;
    } else {
      ++stats.rejected;
      last_rejected = true;
      h *= max(opts.min_factor, opts.safety * pow(err, -opts.error_exponent));
    }
  }
  return stats;
}

}  // namespace hbpl
