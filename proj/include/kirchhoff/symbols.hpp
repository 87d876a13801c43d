#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kirchhoff/grid.hpp"

namespace kirchhoff {

/// Degree-0 profile A(s, omega) of a first-order m x m symbol; the full symbol is
/// A(s, xi) = |xi| A(s, xi / |xi|), so callers evaluate on the sphere and scale by |xi|.
class SymbolMatrix {
 public:
  using Eval = std::function<Eigen::MatrixXcd(double s, const Direction& omega)>;

  SymbolMatrix(std::string name, std::size_t order, Eval eval, double s_max,
               double lipschitz_bound);

  const std::string& name() const { return name_; }
  std::size_t order() const { return m_; }
  double s_max() const { return s_max_; }
  double lipschitz_bound() const { return lipschitz_; }

  /// Evaluates A(s, omega); throws InvalidArgumentError on non-finite entries.
  Eigen::MatrixXcd operator()(double s, const Direction& omega) const;

  /// d/ds A(s, omega) by central difference with step 1e-4 s_max (one-sided
  /// second-order stencil when s - h < 0).
  Eigen::MatrixXcd ds(double s, const Direction& omega) const;

  /// Finite-difference step used by ds() and by derivatives of the diagonalizer.
  double fd_step() const { return 1e-4 * s_max_; }

 private:
  std::string name_;
  std::size_t m_;
  Eval eval_;
  double s_max_;
  double lipschitz_;
};

/// Left-eigenvector diagonalizer N with N A = D N, D = diag(roots).
///
/// Rows have unit Euclidean norm and their leading entry (the first with modulus
/// above 1e-8) is real and positive.
struct Diagonalization {
  Eigen::VectorXd roots;
  Eigen::MatrixXcd n;
  Eigen::MatrixXcd n_inv;
  double det_abs = 0.0;
};

/// Gap tolerance relative to the spectral radius.
inline constexpr double kGapTolerance = 1e-6;
/// Admissible imaginary part of a root relative to the spectral radius.
inline constexpr double kImagTolerance = 1e-9;

/// Sorted real eigenvalues of A(s, omega). Throws NotHyperbolicError for non-real
/// roots and NearDegeneracyError when two roots are closer than kGapTolerance * rho(A).
Eigen::VectorXd characteristic_roots(const SymbolMatrix& a, double s, const Direction& omega);

/// Minimum pairwise root distance over the sample product; +infinity for 1 x 1 symbols.
double hyperbolicity_gap(const SymbolMatrix& a, const std::vector<double>& s_samples,
                         const std::vector<Direction>& omega_samples);

inline constexpr double kNoPairGap = std::numeric_limits<double>::infinity();

Diagonalization diagonalizer(const SymbolMatrix& a, double s, const Direction& omega);

/// Direction profile h(s, omega) (degree-0 restriction of a homogeneous coefficient).
using DirectionProfile = std::function<double(double s, const Direction& omega)>;

/// Companion reduction of D_t^m u + sum_j H_j(s, omega) |xi|^j D_t^{m-j} u = 0:
/// superdiagonal ones and last row (-H_m, ..., -H_1). `h` lists H_1, ..., H_m.
SymbolMatrix companion_symbol(std::vector<DirectionProfile> h, double s_max,
                              double lipschitz_bound, std::string name = "companion");

/// Scalar Kirchhoff equation: companion with H_1 = 0, H_2 = -(1 + s).
SymbolMatrix scalar_kirchhoff_symbol(double s_max = 1.0);

struct AssumptionReport {
  /// inf over samples of (a1 - a2)^2 + 4 P1 P2.
  double discriminant_inf = 0.0;
  /// inf over samples of a1^2 a2^2 - P1 P2.
  double product_inf = 0.0;
  std::size_t sphere_samples = 0;
  std::size_t s_samples = 0;
  bool passed = false;
};

struct CoupledSymbol {
  SymbolMatrix symbol;
  AssumptionReport report;
};

/// Completely coupled pair of Kirchhoff equations on V = (|xi|u, u', |xi|v, v'):
/// rows (0, -i, 0, 0), (i c1^2, 0, i P1, 0), (0, 0, 0, -i), (i P2, 0, i c2^2, 0)
/// with c_k^2 = a_k (1 + s). P_k are the degree-2 profiles P_k(xi) / |xi|^2.
/// Throws AssumptionViolationError when a sampled infimum is <= 0 and NotHyperbolicError when
/// a1 a2 (1 + s)^2 <= P1 P2 at a sample.
CoupledSymbol coupled_symbol(double a1, double a2, DirectionProfile p1, DirectionProfile p2,
                             int dimension, double s_max = 1.0, int sphere_samples = 256,
                             int s_samples = 64);

/// Closed-form roots of the coupled symbol, ascending:
/// +-(1/sqrt 2) sqrt(c1^2 + c2^2 +- sqrt((c1^2 - c2^2)^2 + 4 P1 P2)).
Eigen::VectorXd coupled_closed_form_roots(double a1, double a2, double s, double p1p2);

}  // namespace kirchhoff
