#include "kirchhoff/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;

bool all_finite(const Eigen::VectorXcd& v) { return v.allFinite(); }

}  // namespace

OdeStats DormandPrince::integrate(const Rhs& rhs, double t0, State& y,
                                  std::span<const double> outputs,
                                  const Observer& observe) const {
  OdeStats stats;
  if (outputs.empty()) return stats;
  const double t_end = outputs.back();
  const double horizon = std::max(t_end - t0, 1e-300);
  const double h_min = options_.min_step_fraction * horizon;
  const Eigen::Index n = y.size();

  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_stage(n), y_new(n), err(n);

  auto error_norm = [&](const State& y0, const State& y1, const State& e) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          options_.atol + options_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      worst = std::max(worst, std::abs(e[i]) / scale);
    }
    return worst;
  };

  double t = t0;
  rhs(t, y, k1);
  ++stats.rhs_evaluations;

  double h = options_.initial_step;
  if (h <= 0.0) {
    // Hairer–Nørsett–Wanner starting step heuristic.
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = options_.atol + options_.rtol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * horizon : 0.01 * d0 / d1;
    h0 = std::min(h0, horizon);
    y_stage = y + h0 * k1;
    rhs(t + h0, y_stage, k2);
    ++stats.rhs_evaluations;
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = options_.atol + options_.rtol * std::abs(y[i]);
      d2 = std::max(d2, std::abs(k2[i] - k1[i]) / sc);
    }
    d2 /= h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6 * horizon, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min(100.0 * h0, h1);
  }

  double err_prev = 1e-4;
  std::size_t next_out = 0;
  while (next_out < outputs.size() && outputs[next_out] <= t) {
    observe(next_out, t, y);
    ++next_out;
  }

  while (next_out < outputs.size()) {
    if (stats.accepted + stats.rejected >= options_.max_steps) {
      throw IntegratorFailureError("Dormand-Prince: step budget exhausted at t = " +
                                   std::to_string(t));
    }
    const double target = outputs[next_out];
    bool lands = false;
    double step = h;
    if (t + step >= target - 1e-14 * horizon) {
      step = target - t;
      lands = true;
    }
    if (step < h_min && !lands) {
      throw StiffnessError("Dormand-Prince: step size " + std::to_string(step) +
                           " underflowed at t = " + std::to_string(t));
    }

    y_stage = y + step * a21 * k1;
    rhs(t + c2 * step, y_stage, k2);
    y_stage = y + step * (a31 * k1 + a32 * k2);
    rhs(t + c3 * step, y_stage, k3);
    y_stage = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * step, y_stage, k4);
    y_stage = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * step, y_stage, k5);
    y_stage = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + step, y_stage, k6);
    y_new = y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = lands ? target : t + step;
    rhs(t_new, y_new, k7);
    stats.rhs_evaluations += 6;

    err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(y, y_new, err);
    if (!std::isfinite(en) || !all_finite(y_new)) {
      if (step <= h_min) {
        throw IntegratorFailureError("Dormand-Prince: non-finite state at t = " +
                                     std::to_string(t));
      }
      h = 0.25 * step;
      ++stats.rejected;
      continue;
    }

    if (en <= 1.0) {
      ++stats.accepted;
      t = t_new;
      y.swap(y_new);
      k1.swap(k7);
      const double fac =
          std::clamp(kSafety * std::pow(std::max(en, 1e-16), -kExpo) * std::pow(err_prev, kBeta),
                     kFacMin, kFacMax);
      err_prev = std::max(en, 1e-4);
      // A step shortened to land on an output does not shrink the next one.
      h = lands ? std::max(h, step * fac) : step * fac;
      while (next_out < outputs.size() && outputs[next_out] <= t + 1e-14 * horizon) {
        observe(next_out, t, y);
        ++next_out;
      }
    } else {
      ++stats.rejected;
      const double fac = std::max(kFacMin, kSafety * std::pow(en, -kExpo));
      h = step * std::min(1.0, fac);
      if (h < h_min) {
        throw StiffnessError("Dormand-Prince: step size " + std::to_string(h) +
                             " underflowed at t = " + std::to_string(t));
      }
    }
  }
  return stats;
}

}  // namespace kirchhoff
