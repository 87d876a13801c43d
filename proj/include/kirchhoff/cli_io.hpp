#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/grid.hpp"
#include "kirchhoff/profiles.hpp"

namespace kirchhoff {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Every violation found while parsing, each prefixed by its key path (e.g. "/grid/radial").
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class FileNotFoundError : public Error {
 public:
  using Error::Error;
};

/// H_j(s, omega) = c0 + c1 s + c2 omega_1^2 for the companion equation selector.
struct CompanionTerm {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct ScenarioConfig {
  int dimension = 1;
  /// scalar_kirchhoff | spagnolo | coupled_example22 | companion
  std::string equation = "scalar_kirchhoff";
  /// H_1 .. H_m for `companion`.
  std::vector<CompanionTerm> companion;
  double a1 = 1.0;
  double a2 = 2.0;
  double p1 = 0.1;
  double p2 = 0.1;
  double s_max = 1.0;
  /// Diagonal of the Hermitian form S; empty selects the equation default.
  std::vector<double> form;

  /// Scalar equations: (u0, u1). Systems: the m components of U0.
  std::vector<Profile> data;
  double epsilon = 1.0;

  GridSpec grid;
  double horizon = 1.0;
  /// direct | asymptotic | fixedpoint | none
  std::string solver = "direct";
  std::size_t checkpoints = 100;
  double tol = 1e-10;
  double fixed_point_tol = 1e-10;
  double linear_tol = 1e-12;
  std::size_t max_iter = 30;
  double k0 = 0.1;
  double lambda = 0.0;
  /// Also run the direct scalar solver and record the sup difference of s.
  bool cross_validate = false;

  std::vector<std::string> class_norms;
  double class_threshold = 1.0;
  double tau_max = 128.0;
  /// Inclusion sweep over the profile catalog.
  bool class_sweep = false;

  /// Amplitude sweep for the fixed-point solver.
  std::vector<double> sweep_epsilons;
  std::size_t sweep_random = 0;
  double sweep_min = 0.01;
  double sweep_max = 0.2;
  std::uint64_t seed = 0;

  std::string output_dir = ".";
  std::string prefix = "scenario";

  bool is_scalar() const { return equation == "scalar_kirchhoff" || equation == "spagnolo"; }
  /// Normalized echo with every default filled in.
  nlohmann::json to_json() const;
};

/// Parses and validates the JSON scenario format; throws ConfigError listing every violation.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

struct RunResult {
  /// 0 ok, 2 runtime error (error JSON written).
  int exit_code = 0;
  std::vector<std::string> artifacts;
  nlohmann::json manifest;
};

RunResult run_scenario(const ScenarioConfig& config);

/// Gnuplot columns for a trajectory CSV, sweep JSON, iteration JSON or inclusion CSV.
/// Writes `out_path` (default: artifact with extension .dat) and returns its path.
std::string emit_plotdata(const std::string& artifact, const std::string& out_path = "");

}  // namespace kirchhoff
