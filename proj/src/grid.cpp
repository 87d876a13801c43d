#include "kirchhoff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgumentError("grid: " + message);
}

}  // namespace

double sphere_measure(int n) {
  switch (n) {
    case 1:
      return 2.0;
    case 2:
      return kTwoPi;
    case 3:
      return 4.0 * std::numbers::pi;
    default:
      throw UnsupportedDimensionError("unsupported dimension n = " + std::to_string(n) +
                                      " (supported: 1, 2, 3)");
  }
}

Grid Grid::build(const GridSpec& spec) {
  if (spec.dimension < 1 || spec.dimension > 3) {
    throw UnsupportedDimensionError("unsupported dimension n = " +
                                    std::to_string(spec.dimension) + " (supported: 1, 2, 3)");
  }
  require(spec.radial >= 1, "radial node count must be >= 1");
  require(spec.rho_max > 0.0 && std::isfinite(spec.rho_max), "rho_max must be positive");

  Grid g;
  g.n_ = spec.dimension;
  g.rho_max_ = spec.rho_max;
  g.rule_ = spec.rule;

  switch (spec.dimension) {
    case 1:
      g.directions_ = {Direction{-1.0, 0.0, 0.0}, Direction{1.0, 0.0, 0.0}};
      g.angular_weights_ = {1.0, 1.0};
      break;
    case 2: {
      require(spec.angular >= 1, "angular node count must be >= 1");
      const double w = kTwoPi / spec.angular;
      for (int k = 0; k < spec.angular; ++k) {
        const double theta = w * k;
        g.directions_.push_back(Direction{std::cos(theta), std::sin(theta), 0.0});
        g.angular_weights_.push_back(w);
      }
      break;
    }
    case 3: {
      require(spec.angular >= 1, "azimuthal node count must be >= 1");
      const int polar = spec.polar > 0 ? spec.polar : std::max(1, spec.angular / 2);
      const QuadratureRule cos_theta = gauss_legendre(polar);
      const double w_phi = kTwoPi / spec.angular;
      for (int i = 0; i < polar; ++i) {
        const double z = cos_theta.nodes[i];
        const double r_xy = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int k = 0; k < spec.angular; ++k) {
          const double phi = w_phi * k;
          g.directions_.push_back(Direction{r_xy * std::cos(phi), r_xy * std::sin(phi), z});
          g.angular_weights_.push_back(cos_theta.weights[i] * w_phi);
        }
      }
      break;
    }
  }

  switch (spec.rule) {
    case RadialRule::gauss_legendre: {
      const QuadratureRule radial = gauss_legendre(spec.radial, 0.0, spec.rho_max);
      g.radial_nodes_ = radial.nodes;
      g.radial_weights_ = radial.weights;
      g.radial_degree_ = 2 * spec.radial - 1;
      break;
    }
    case RadialRule::trapezoid: {
      const double h = spec.rho_max / spec.radial;
      for (int i = 0; i < spec.radial; ++i) {
        g.radial_nodes_.push_back((i + 0.5) * h);
        g.radial_weights_.push_back(h);
      }
      g.radial_degree_ = 1;
      break;
    }
  }
  g.finalize();
  return g;
}

Grid Grid::custom(int dimension, std::vector<Direction> directions,
                  std::vector<double> angular_weights, std::vector<double> radial_nodes,
                  std::vector<double> radial_weights, double rho_max) {
  if (dimension < 1 || dimension > 3) {
    throw UnsupportedDimensionError("unsupported dimension n = " + std::to_string(dimension));
  }
  require(!directions.empty() && directions.size() == angular_weights.size(),
          "angular nodes and weights must be nonempty and of equal length");
  require(!radial_nodes.empty() && radial_nodes.size() == radial_weights.size(),
          "radial nodes and weights must be nonempty and of equal length");
  require(rho_max > 0.0, "rho_max must be positive");
  for (const Direction& d : directions) {
    double norm2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (i >= dimension) require(d[i] == 0.0, "direction has components beyond n");
      norm2 += d[i] * d[i];
    }
    require(std::abs(norm2 - 1.0) < 1e-12, "directions must be unit vectors");
  }
  for (double w : angular_weights) require(w > 0.0, "angular weights must be positive");
  for (std::size_t i = 0; i < radial_nodes.size(); ++i) {
    require(radial_nodes[i] > 0.0 && radial_nodes[i] <= rho_max,
            "radial nodes must lie in (0, rho_max]");
    require(radial_weights[i] > 0.0, "radial weights must be positive");
    if (i > 0) require(radial_nodes[i] > radial_nodes[i - 1], "radial nodes must increase");
  }
  Grid g;
  g.n_ = dimension;
  g.directions_ = std::move(directions);
  g.angular_weights_ = std::move(angular_weights);
  g.radial_nodes_ = std::move(radial_nodes);
  g.radial_weights_ = std::move(radial_weights);
  g.rho_max_ = rho_max;
  g.rule_ = RadialRule::gauss_legendre;
  g.radial_degree_ = 0;
  g.finalize();
  return g;
}

void Grid::finalize() {
  volume_weights_.resize(mode_count());
  for (std::size_t a = 0; a < angular_count(); ++a) {
    for (std::size_t r = 0; r < radial_count(); ++r) {
      const double rho = radial_nodes_[r];
      volume_weights_[a * radial_count() + r] =
          angular_weights_[a] * radial_weights_[r] * std::pow(rho, n_ - 1);
    }
  }
}

bool Grid::operator==(const Grid& other) const {
  return n_ == other.n_ && rho_max_ == other.rho_max_ && directions_ == other.directions_ &&
         angular_weights_ == other.angular_weights_ && radial_nodes_ == other.radial_nodes_ &&
         radial_weights_ == other.radial_weights_;
}

std::vector<Direction> sphere_samples(int n, int count) {
  std::vector<Direction> out;
  switch (n) {
    case 1:
      out = {Direction{-1.0, 0.0, 0.0}, Direction{1.0, 0.0, 0.0}};
      break;
    case 2:
      for (int k = 0; k < count; ++k) {
        const double theta = kTwoPi * k / count;
        out.push_back(Direction{std::cos(theta), std::sin(theta), 0.0});
      }
      break;
    case 3: {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int k = 0; k < count; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        out.push_back(Direction{r * std::cos(phi), r * std::sin(phi), z});
      }
      break;
    }
    default:
      throw UnsupportedDimensionError("unsupported dimension n = " + std::to_string(n));
  }
  return out;
}

int default_sphere_sample_count(int n) { return n <= 2 ? 64 : 256; }

}  // namespace kirchhoff
