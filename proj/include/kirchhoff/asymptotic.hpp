#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "kirchhoff/kirchhoff_scalar.hpp"
#include "kirchhoff/spectral_field.hpp"
#include "kirchhoff/symbols.hpp"

namespace kirchhoff {

/// s(t) on [0, T] from checkpoint values and slopes, cubic Hermite in between.
class CoefficientPath {
 public:
  /// times start at 0 and increase strictly; s >= 0 at every checkpoint.
  CoefficientPath(std::vector<double> times, std::vector<double> s, std::vector<double> s_prime);

  /// s == s0 on [0, horizon] with `intervals` equal checkpoint intervals.
  static CoefficientPath frozen(double s0, double horizon, std::size_t intervals);
  /// s = s0 + slope t.
  static CoefficientPath linear(double s0, double slope, double horizon, std::size_t intervals);
  static CoefficientPath from_trajectory(const Trajectory& traj);

  double horizon() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& s_values() const { return s_; }
  const std::vector<double>& s_primes() const { return sp_; }

  double s(double t) const;
  double s_prime(double t) const;

  /// Exact int_0^T |s'(t)| dt of the interpolant (s' is quadratic per interval).
  double total_variation() const;
  /// Subintervals of [0, T] on which the interpolant's s' keeps one sign.
  std::vector<std::pair<double, double>> monotone_pieces() const;

  bool is_frozen() const;
  /// max over this path's checkpoints of |s(t) - other.s(t)|.
  double sup_difference(const CoefficientPath& other) const;

 private:
  std::size_t interval(double t) const;

  std::vector<double> times_;
  std::vector<double> s_;
  std::vector<double> sp_;
};

/// psi_k(t) = int_0^t phi_k(s(r), omega) dr for each root (ascending), by adaptive
/// Gauss–Kronrod panels aligned to the path checkpoints. The phase of mode (omega, rho)
/// is rho psi_k.
Eigen::VectorXd phase_integrals(const CoefficientPath& path, const SymbolMatrix& a,
                                const Direction& omega, double t, double tol = 1e-12);

/// C(t, xi) = Phi^{-1} (D_t N) N^{-1} Phi with D_t N = -i d_s N s'(t).
Eigen::MatrixXcd perturbation_matrix(const CoefficientPath& path, const SymbolMatrix& a, double t,
                                     const Direction& omega, double rho);

/// d_s N by central difference in s (one-sided when s - h < 0), h = a.fd_step().
Eigen::MatrixXcd diagonalizer_ds(const SymbolMatrix& a, double s, const Direction& omega);

struct LinearSolveOptions {
  double tol = 1e-10;
  /// Radial nodes integrated together in one ODE system.
  std::size_t radial_block = 16;
  bool keep_amplitudes = false;
};

/// Amplitude matrices (columns a^j) and phase integrals at the requested times.
struct AmplitudeSet {
  std::shared_ptr<const Grid> grid;
  std::size_t order = 0;
  std::vector<double> times;
  /// psi[time][angular] holds the m phase integrals per direction (times rho gives the phase).
  std::vector<std::vector<Eigen::VectorXd>> psi;
  /// amplitudes[time][mode] is the m x m matrix whose j-th column is a^j.
  std::vector<std::vector<Eigen::MatrixXcd>> amplitudes;

  double phase(std::size_t time_index, std::size_t mode, std::size_t k) const;
};

struct AsymptoticSolution {
  std::vector<SpectralField> snapshots;
  AmplitudeSet amplitudes;
};

/// U(t, xi) = sum_j N(t)^{-1} Phi(t) a^j(t) f_j with d_t a^j = Phi^{-1} (d_t N) N^{-1} Phi a^j,
/// a^j(0) = j-th column of N(0).
AsymptoticSolution solve_asymptotic(const CoefficientPath& path, const SymbolMatrix& a,
                                    const SpectralField& u0, const std::vector<double>& times,
                                    const LinearSolveOptions& options = {});

/// Reference integration of D_t U = rho A(s(t), omega) U mode by mode.
std::vector<SpectralField> direct_mode_solve(const CoefficientPath& path, const SymbolMatrix& a,
                                             const SpectralField& u0,
                                             const std::vector<double>& times,
                                             const LinearSolveOptions& options = {});

/// Grid L2 norm of a - b over all components.
double l2_distance(const SpectralField& a, const SpectralField& b);

}  // namespace kirchhoff
