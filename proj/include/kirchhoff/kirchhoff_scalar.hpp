#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/spectral_field.hpp"

namespace kirchhoff {

/// Which nonlocal functional drives the propagation speed 1 + s(t).
enum class NonlocalKind {
  /// s = ||grad u||^2 (the Kirchhoff equation).
  gradient,
  /// s = ||u||^2 (the zero-order variant).
  zero_order,
};

const char* to_string(NonlocalKind kind);

/// gradient: int |xi|^2 |u_hat|^2 d xi; zero_order: int |u_hat|^2 d xi.
double nonlocal_coefficient(const SpectralField& u_hat, NonlocalKind kind);

/// Snapshot (u_hat, d_t u_hat) at time t with cached s and conserved functional.
struct ScalarState {
  double t = 0.0;
  SpectralField u_hat;
  SpectralField v_hat;
  NonlocalKind kind = NonlocalKind::gradient;
  double s = 0.0;
  /// E for the gradient kind, F = ||v||^2 + ||grad u||^2 for the zero-order kind.
  double energy = 0.0;

  static ScalarState make(double t, SpectralField u_hat, SpectralField v_hat, NonlocalKind kind);
};

double nonlocal_coefficient(const ScalarState& state);

/// E = ||d_t u||^2 + ||grad u||^2 + ||grad u||^4 / 2 (gradient kind only; the
/// zero-order kind raises UnsupportedOperationError).
double energy(const ScalarState& state);

/// F = ||d_t u||^2 + ||grad u||^2, which obeys F' = -s (d/dt)||grad u||^2 for the
/// zero-order kind.
double gradient_velocity_functional(const ScalarState& state);

struct Trajectory {
  NonlocalKind kind = NonlocalKind::gradient;
  std::vector<double> times;
  std::vector<double> s;
  /// s'(t) at each checkpoint, for cubic-Hermite reconstruction of s.
  std::vector<double> s_prime;
  /// E (gradient kind) or F (zero-order kind).
  std::vector<double> energy;
  std::vector<double> h1_norm;
  std::vector<double> l2_velocity;
  /// d/dt ||grad u||^2 at each checkpoint.
  std::vector<double> grad_sq_prime;
  /// Present when snapshots were requested.
  std::vector<ScalarState> snapshots;

  std::size_t size() const { return times.size(); }
  /// Checks increasing times and finite values; throws InvalidArgumentError.
  void validate() const;
  /// Columns t,s,energy,h1_norm,l2_velocity_norm with 17 significant digits.
  std::string to_csv() const;
  double max_relative_energy_drift() const;
};

struct ScalarSolveOptions {
  double tol = 1e-10;
  /// Checkpoints at t_i = T i / checkpoint_intervals.
  std::size_t checkpoint_intervals = 100;
  bool keep_snapshots = false;
  /// When set, the speed uses this constant instead of the live s (linear problem).
  std::optional<double> frozen_coefficient;
  /// Raise IntegratorFailureError when the relative energy drift exceeds 1e3 tol.
  bool check_energy = true;
};

/// Integrates u_hat'' = -(1 + s(t)) |xi|^2 u_hat for all modes at once, recomputing s
/// from the full mode vector in every right-hand side evaluation.
Trajectory solve_scalar(const SpectralField& f0, const SpectralField& f1, NonlocalKind kind,
                        double horizon, const ScalarSolveOptions& options = {});

/// Same, starting from an arbitrary state at its time (the returned times are
/// offsets from the state's time).
Trajectory solve_scalar(const ScalarState& start, double horizon,
                        const ScalarSolveOptions& options = {});

}  // namespace kirchhoff
