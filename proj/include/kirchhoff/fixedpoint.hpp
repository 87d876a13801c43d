#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "kirchhoff/asymptotic.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/kirchhoff_scalar.hpp"
#include "kirchhoff/spectral_field.hpp"
#include "kirchhoff/symbols.hpp"

namespace kirchhoff {

/// Sup-norm bound Lambda and total-variation bound K of a time-dependent symbol class.
struct SymbolClassParams {
  double lambda = 0.0;
  double k = 0.0;
};

/// Lambda_est = sup over checkpoints and sphere samples of |A(s(t), omega)|_inf;
/// K_est = int_0^T sup_omega |d_s A(s(t), omega)|_inf |s'(t)| dt.
/// sphere_count = 0 selects default_sphere_sample_count(dimension).
SymbolClassParams class_estimates(const CoefficientPath& path, const SymbolMatrix& a, int dimension,
                                  int sphere_count = 0);

/// 2 sup_omega |A(s0, omega)|_inf.
double default_lambda_budget(const SymbolMatrix& a, double s0, int dimension, int sphere_count = 0);

struct IterationReport {
  /// Number of Theta applications.
  std::size_t iterations = 0;
  /// sup_t |s^(k+1)(t) - s^(k)(t)| for k = 0 .. iterations - 1.
  std::vector<double> sup_diffs;
  /// Estimates of the path produced by each application.
  std::vector<double> lambda_est;
  std::vector<double> k_est;
  /// sup_diffs[k] / sup_diffs[k - 1] (empty entry for k = 0 is omitted).
  std::vector<double> contraction_ratios;
  SymbolClassParams budget;
  bool within_budget = true;
  bool converged = false;
  double tol = 0.0;

  /// Throws InvalidArgumentError when the ratios disagree with the stored differences.
  void validate() const;
  nlohmann::json to_json() const;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, IterationReport report)
      : Error(what), report_(std::move(report)) {}
  const IterationReport& report() const { return report_; }

 private:
  IterationReport report_;
};

struct ThetaOutput {
  CoefficientPath path;
  /// |U(t)|^2 at each checkpoint.
  std::vector<double> l2_sq;
  std::vector<SpectralField> snapshots;
};

/// Solves D_t U = A(s_path(t), D) U and returns s_new = <S U, U> with
/// s_new' = 2 Re <S U', U> on the same checkpoints.
ThetaOutput theta_evaluate(const CoefficientPath& path, const SymbolMatrix& a, const HermitianForm& s,
                           const SpectralField& u0, const LinearSolveOptions& options = {});

CoefficientPath theta_map(const CoefficientPath& path, const SymbolMatrix& a, const HermitianForm& s,
                          const SpectralField& u0, const LinearSolveOptions& options = {});

struct FixedPointOptions {
  double tol = 1e-10;
  std::size_t max_iter = 30;
  std::size_t checkpoint_intervals = 200;
  LinearSolveOptions linear{1e-12};
  /// Smallness constant K_0 of the class budget.
  double k0 = 0.1;
  /// Lambda budget; 0 selects default_lambda_budget at s(0).
  double lambda = 0.0;
  int sphere_samples = 0;
};

struct NonlinearResult {
  /// energy column: |U|^2 + s^2 / 2; h1_norm: sqrt(s); l2_velocity: sqrt(|U|^2 - s).
  Trajectory trajectory;
  IterationReport report;
  CoefficientPath path;
};

/// Picard iteration s^(0) = s(0), s^(k+1) = Theta(s^(k)) until the sup difference
/// drops below options.tol. Throws ConvergenceError after max_iter applications.
NonlinearResult solve_nonlinear(const SymbolMatrix& a, const HermitianForm& s,
                                const SpectralField& u0, double horizon,
                                const FixedPointOptions& options = {});

/// Terms of s'(t) = 2 (I + J) evaluated from the asymptotic representation.
struct SPrimeTerms {
  double t = 0.0;
  double i = 0.0;
  /// J = j_diagonalizer + j_amplitude (the d_t N^{-1} and d_t a^j parts).
  double j = 0.0;
  double j_diagonalizer = 0.0;
  double j_amplitude = 0.0;
  /// s'(t) read from the path.
  double s_prime = 0.0;
  double residual = 0.0;
};

std::vector<SPrimeTerms> sprime_decomposition(const CoefficientPath& path, const SymbolMatrix& a,
                                              const HermitianForm& s, const SpectralField& u0,
                                              const std::vector<double>& times,
                                              const LinearSolveOptions& options = {});

SPrimeTerms sprime_decomposition(const CoefficientPath& path, const SymbolMatrix& a,
                                 const HermitianForm& s, const SpectralField& u0, double t,
                                 const LinearSolveOptions& options = {});

}  // namespace kirchhoff
