#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/profiles.hpp"

namespace kirchhoff {

/// Infinite-norm sentinel.
inline constexpr double kInfiniteNorm = std::numeric_limits<double>::infinity();

enum class OscillatoryVariant {
  /// Three terms rho^3 |f0|^2, rho^2 f0 conj(f1), rho |f1|^2 against d xi.
  Y,
  /// Weight rho^n per direction, summed over all (j, k).
  curlyY,
  /// Weight rho^{n-j-k} per direction, j, k in {0, 1}.
  Ytilde,
  /// sup_tau <tau>^kappa |int e^{i tau |xi|} f_j conj(f_k) |xi|^{3-j-k} d xi|.
  yamazaki,
};

std::string to_string(OscillatoryVariant v);

struct OscillatoryControls {
  double tau_max = 128.0;
  /// Radial nodes per wavelength 2 pi / tau_max of e^{i tau rho}.
  double nodes_per_wavelength = 8.0;
  /// Radial cut where the integrand drops below this fraction of its maximum.
  double cut_rel = 1e-10;
  /// tau panels are at most pi / (4 rho_cut) / tau_refine wide.
  int tau_refine = 1;
  double kappa = 2.0;
  /// Angular nodes for the sphere integral (n >= 2); 0 selects 64.
  int sphere_nodes = 0;
};

/// One computed functional. `value` is kInfiniteNorm when divergence was detected.
struct NormValue {
  std::string name;
  double value = 0.0;
  bool finite = true;
  /// Contribution of the truncated range alone (oscillatory norms).
  double truncated = 0.0;
  /// Estimated contribution beyond the truncated range.
  double tail = 0.0;
  std::size_t rho_nodes = 0;
  double rho_cut = 0.0;
  double tau_max = 0.0;
  std::size_t tau_nodes = 0;
  bool finite_differences = false;
  std::string evidence;

  nlohmann::json to_json() const;
};

/// int_0^infty e^{i tau rho} f_j(rho omega) conj(f_k(rho omega)) rho^power d rho at each tau.
std::vector<std::complex<double>> oscillatory_kernel(const InitialData& data, std::size_t j,
                                                     std::size_t k, int power,
                                                     const Direction& omega,
                                                     const std::vector<double>& tau,
                                                     const OscillatoryControls& controls = {});

NormValue oscillatory_class_norm(const InitialData& data, int n, OscillatoryVariant variant,
                                 const OscillatoryControls& controls = {});

struct ManfrinOptions {
  /// Central differences of step fd_step instead of the analytic derivatives.
  bool finite_differences = false;
  double fd_step = 1e-3;
  /// 0 selects default_sphere_sample_count(n).
  int sphere_samples = 0;
  /// Radial panel subdivision factor.
  int refine = 1;
};

/// sum_{k <= 2} sum_j sup_omega int_0^infty |d_rho^k f_j(rho omega)|^2 (1 + rho^{max(n, 2)}) d rho.
NormValue norm_manfrin(const InitialData& data, int n, const ManfrinOptions& options = {});

enum class WeightKind { analytic, gevrey, nishihara };

struct WeightSpec {
  WeightKind kind = WeightKind::analytic;
  /// Gevrey order s > 1.
  double s = 2.0;

  double phi(double rho) const;
  std::string name() const;
};

struct WeightedOptions {
  /// Radial panel subdivision factor.
  int refine = 1;
  /// Integration end is rho_scale times the detected cut.
  double rho_scale = 1.0;
};

/// int (|xi|^2 |f0|^2 + |f1|^2) e^{eta phi(|xi|)} d xi.
NormValue weighted_class_norm(const Profile& f0, const Profile& f1, int n, WeightSpec weight,
                              double eta, const WeightedOptions& options = {});

/// A requested functional; the name follows the report naming
/// (Y, curlyY, Ytilde, yamazaki_k<kappa>, manfrin, analytic_eta<eta>, ...).
struct NormSelection {
  enum class Family { oscillatory, manfrin, weighted } family = Family::oscillatory;
  OscillatoryVariant variant = OscillatoryVariant::curlyY;
  double kappa = 2.0;
  WeightSpec weight;
  double eta = 1.0;

  std::string name() const;
  /// Parses a report name back into a selection; throws InvalidArgumentError.
  static NormSelection parse(const std::string& name);
};

/// Default selection used by the inclusion sweep for dimension n.
std::vector<NormSelection> default_norm_selection(int n);

struct ClassReport {
  int dimension = 1;
  double threshold = 1.0;
  std::vector<NormValue> norms;
  /// Per norm: value <= threshold.
  std::vector<bool> small;

  nlohmann::json to_json() const;
};

struct ClassControls {
  OscillatoryControls oscillatory;
  ManfrinOptions manfrin;
  WeightedOptions weighted;
};

/// Doubles tau_max, the tau node density, the radial panel counts and the weighted-norm
/// integration range.
ClassControls refined(const ClassControls& controls);

NormValue evaluate_norm(const InitialData& data, int n, const NormSelection& sel,
                        const ClassControls& controls = {});

ClassReport class_report(const InitialData& data, int n, const std::vector<NormSelection>& norms,
                         double threshold, const ClassControls& controls = {});

struct CatalogMember {
  std::string family;
  double parameter = 0.0;
  InitialData data;
};

/// Twelve members: four Gaussians, an anisotropic Gaussian, rho^2-Gaussian, two bumps and
/// rational decay (1 + rho^2)^{-N} for N = 3..6, each as (f0, f1).
std::vector<CatalogMember> profile_catalog();

/// Finiteness implication: finite `stronger` must come with finite `weaker`.
struct Implication {
  std::string stronger;
  std::string weaker;
};

std::vector<Implication> default_implications(int n);

struct InclusionReport {
  int dimension = 1;
  std::vector<std::string> norm_names;
  std::vector<CatalogMember> members;
  /// values[member][norm]
  std::vector<std::vector<NormValue>> values;
  std::vector<std::string> violations;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

InclusionReport inclusion_report(const std::vector<CatalogMember>& members, int n,
                                 const ClassControls& controls = {});

}  // namespace kirchhoff
