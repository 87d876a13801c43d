#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace kirchhoff {

/// Unit vector on S^{n-1}; components beyond the grid dimension are zero.
using Direction = std::array<double, 3>;

enum class RadialRule {
  gauss_legendre,
  /// Open (midpoint-node) trapezoid rule: nodes (i - 1/2) h, so every node lies
  /// strictly inside (0, rho_max].
  trapezoid,
};

struct GridSpec {
  int dimension = 1;
  /// n = 1: ignored (S^0 has two points). n = 2: points on the circle.
  /// n = 3: azimuthal points.
  int angular = 2;
  /// n = 3 only: Gauss–Legendre nodes in cos(theta); 0 selects angular / 2.
  int polar = 0;
  int radial = 64;
  double rho_max = 10.0;
  RadialRule rule = RadialRule::gauss_legendre;
};

/// Radial–angular product quadrature of frequency space R^n, n in {1, 2, 3}.
///
/// Mode index is `a * radial_count() + r` for angular node a and radial node r.
class Grid {
 public:
  static Grid build(const GridSpec& spec);

  /// Arbitrary nodes, validated against the grid invariants (the angular weight sum
  /// is not checked, so test grids with concentrated nodes are allowed).
  static Grid custom(int dimension, std::vector<Direction> directions,
                     std::vector<double> angular_weights, std::vector<double> radial_nodes,
                     std::vector<double> radial_weights, double rho_max);

  int dimension() const { return n_; }
  std::size_t angular_count() const { return directions_.size(); }
  std::size_t radial_count() const { return radial_nodes_.size(); }
  std::size_t mode_count() const { return angular_count() * radial_count(); }

  const std::vector<Direction>& directions() const { return directions_; }
  const std::vector<double>& angular_weights() const { return angular_weights_; }
  const std::vector<double>& radial_nodes() const { return radial_nodes_; }
  const std::vector<double>& radial_weights() const { return radial_weights_; }
  double rho_max() const { return rho_max_; }
  RadialRule rule() const { return rule_; }
  /// Highest polynomial degree in rho integrated exactly by the radial rule.
  int radial_degree() const { return radial_degree_; }

  /// Quadrature weight of the volume element rho^{n-1} d rho d sigma at a mode.
  double volume_weight(std::size_t a, std::size_t r) const {
    return volume_weights_[a * radial_count() + r];
  }
  const std::vector<double>& volume_weights() const { return volume_weights_; }

  bool operator==(const Grid& other) const;

 private:
  Grid() = default;
  void finalize();

  int n_ = 1;
  std::vector<Direction> directions_;
  std::vector<double> angular_weights_;
  std::vector<double> radial_nodes_;
  std::vector<double> radial_weights_;
  std::vector<double> volume_weights_;
  double rho_max_ = 0.0;
  RadialRule rule_ = RadialRule::gauss_legendre;
  int radial_degree_ = 0;
};

inline Grid build_grid(int n, int n_angular, int n_radial, double rho_max,
                       RadialRule rule = RadialRule::gauss_legendre) {
  return Grid::build(GridSpec{n, n_angular, 0, n_radial, rho_max, rule});
}

/// Surface measure |S^{n-1}|.
double sphere_measure(int n);

/// Deterministic sample set on S^{n-1} used for sup-norms over directions:
/// n = 1 gives {-1, +1}; n = 2 uniform points; n = 3 a Fibonacci lattice.
std::vector<Direction> sphere_samples(int n, int count);

/// Default sample count for sup-norms over directions (64 for n <= 2, 256 for n = 3).
int default_sphere_sample_count(int n);

}  // namespace kirchhoff
