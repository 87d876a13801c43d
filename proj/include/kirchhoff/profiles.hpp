#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kirchhoff/grid.hpp"
#include "kirchhoff/spectral_field.hpp"

namespace kirchhoff {

enum class ProfileKind {
  zero,
  /// rho^p exp(-alpha rho^2)
  gaussian,
  /// e * exp(-1 / (1 - x^2)) with x the affine image of [lo, hi] onto [-1, 1]; zero outside.
  bump,
  /// (1 + rho^2)^{-N}
  rational,
};

/// Analytic spectral profile f(rho omega) = amplitude (1 + anisotropy omega_1) g(rho).
struct Profile {
  ProfileKind kind = ProfileKind::zero;
  Complex amplitude{1.0, 0.0};
  double alpha = 0.5;
  int power = 0;
  double lo = 1.0;
  double hi = 3.0;
  int order = 3;
  double anisotropy = 0.0;

  static Profile zero() { return {}; }
  static Profile gaussian(double alpha, int power = 0, Complex amplitude = 1.0);
  static Profile bump(double lo, double hi, Complex amplitude = 1.0);
  static Profile rational(int order, Complex amplitude = 1.0);

  /// k-th radial derivative of the real radial factor g, k in {0, 1, 2}.
  double radial(double rho, int k = 0) const;
  double angular_factor(const Direction& omega) const { return 1.0 + anisotropy * omega[0]; }

  Complex operator()(const Direction& omega, double rho) const {
    return amplitude * angular_factor(omega) * radial(rho);
  }
  Complex derivative(const Direction& omega, double rho, int k) const {
    return amplitude * angular_factor(omega) * radial(rho, k);
  }

  /// log |g(rho)|, finite wherever g is nonzero (used to probe asymptotic growth
  /// without overflow); -infinity where g vanishes.
  double log_abs_radial(double rho) const;

  bool is_zero() const { return kind == ProfileKind::zero || amplitude == Complex{}; }
  bool compact_support() const { return kind == ProfileKind::bump || is_zero(); }
  std::string describe() const;
};

/// Initial data U_0 = (f_0, ..., f_{m-1}) as a list of analytic profiles.
struct InitialData {
  std::vector<Profile> components;

  std::size_t size() const { return components.size(); }
  SpectralField sample(std::shared_ptr<const Grid> grid) const;
  InitialData scaled(double lambda) const;
};

/// Smallest radius R such that int_{rho > R} (1 + rho^2) rho^{n-1} sum_j |g_j|^2 d rho is
/// at most `tail_tol` times the full integral. Returns `fallback` for all-zero data.
double suggest_rho_max(const InitialData& data, int n, double tail_tol = 1e-12,
                       double fallback = 10.0);

}  // namespace kirchhoff
