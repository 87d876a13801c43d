#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace kirchhoff {

struct OdeOptions {
  double rtol = 1e-10;
  /// Absolute floor of the per-component error scale.
  double atol = 1e-10;
  /// First trial step; 0 selects one automatically.
  double initial_step = 0.0;
  /// Steps shorter than this fraction of the horizon raise StiffnessError.
  double min_step_fraction = 1e-14;
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Adaptive embedded Dormand–Prince 5(4) integrator with PI step control.
///
/// The local error estimate satisfies, per accepted step and component i,
/// |err_i| <= atol + rtol * max(|y_i(t)|, |y_i(t + h)|).
class DormandPrince {
 public:
  using State = Eigen::VectorXcd;
  using Rhs = std::function<void(double t, const State& y, State& dydt)>;
  using Observer = std::function<void(std::size_t index, double t, const State& y)>;

  explicit DormandPrince(OdeOptions options = {}) : options_(options) {}

  /// Advances y from t0 through every time in `outputs` (ascending, all >= t0),
  /// landing exactly on each and invoking `observe` there. y holds the final state.
  OdeStats integrate(const Rhs& rhs, double t0, State& y, std::span<const double> outputs,
                     const Observer& observe) const;

  const OdeOptions& options() const { return options_; }

 private:
  OdeOptions options_;
};

}  // namespace kirchhoff
