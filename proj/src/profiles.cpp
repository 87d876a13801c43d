#include "kirchhoff/profiles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

namespace {

/// c * rho^e with the convention that a zero coefficient contributes nothing,
/// even when e is negative.
double monomial(double c, double rho, int e) { return c == 0.0 ? 0.0 : c * std::pow(rho, e); }

}  // namespace

Profile Profile::gaussian(double alpha, int power, Complex amplitude) {
  if (!(alpha > 0.0)) throw InvalidArgumentError("gaussian profile: alpha must be positive");
  if (power < 0) throw InvalidArgumentError("gaussian profile: power must be >= 0");
  Profile p;
  p.kind = ProfileKind::gaussian;
  p.alpha = alpha;
  p.power = power;
  p.amplitude = amplitude;
  return p;
}

Profile Profile::bump(double lo, double hi, Complex amplitude) {
  if (!(lo >= 0.0 && hi > lo)) throw InvalidArgumentError("bump profile: need 0 <= lo < hi");
  Profile p;
  p.kind = ProfileKind::bump;
  p.lo = lo;
  p.hi = hi;
  p.amplitude = amplitude;
  return p;
}

Profile Profile::rational(int order, Complex amplitude) {
  if (order < 1) throw InvalidArgumentError("rational profile: order must be >= 1");
  Profile p;
  p.kind = ProfileKind::rational;
  p.order = order;
  p.amplitude = amplitude;
  return p;
}

double Profile::radial(double rho, int k) const {
  switch (kind) {
    case ProfileKind::zero:
      return 0.0;
    case ProfileKind::gaussian: {
      const double e = std::exp(-alpha * rho * rho);
      const double p = power;
      switch (k) {
        case 0:
          return monomial(1.0, rho, power) * e;
        case 1:
          return (monomial(p, rho, power - 1) - monomial(2.0 * alpha, rho, power + 1)) * e;
        case 2:
          return (monomial(p * (p - 1.0), rho, power - 2) -
                  monomial(2.0 * alpha * (2.0 * p + 1.0), rho, power) +
                  monomial(4.0 * alpha * alpha, rho, power + 2)) *
                 e;
        default:
          break;
      }
      break;
    }
    case ProfileKind::bump: {
      if (rho <= lo || rho >= hi) return 0.0;
      const double kappa = 2.0 / (hi - lo);
      const double x = kappa * rho - (hi + lo) / (hi - lo);
      const double q = 1.0 - x * x;
      const double h = std::exp(1.0 - 1.0 / q);
      const double u = -2.0 * x / (q * q);
      switch (k) {
        case 0:
          return h;
        case 1:
          return kappa * h * u;
        case 2: {
          const double du = -2.0 / (q * q) - 8.0 * x * x / (q * q * q);
          return kappa * kappa * h * (u * u + du);
        }
        default:
          break;
      }
      break;
    }
    case ProfileKind::rational: {
      const double base = 1.0 + rho * rho;
      const double n = order;
      switch (k) {
        case 0:
          return std::pow(base, -n);
        case 1:
          return -2.0 * n * rho * std::pow(base, -n - 1.0);
        case 2:
          return -2.0 * n * std::pow(base, -n - 1.0) +
                 4.0 * n * (n + 1.0) * rho * rho * std::pow(base, -n - 2.0);
        default:
          break;
      }
      break;
    }
  }
  throw InvalidArgumentError("profile: derivative order must be 0, 1 or 2");
}

double Profile::log_abs_radial(double rho) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  switch (kind) {
    case ProfileKind::zero:
      return kNegInf;
    case ProfileKind::gaussian:
      return (power == 0 ? 0.0 : power * std::log(rho)) - alpha * rho * rho;
    case ProfileKind::bump: {
      if (rho <= lo || rho >= hi) return kNegInf;
      const double x = (2.0 * rho - hi - lo) / (hi - lo);
      return 1.0 - 1.0 / (1.0 - x * x);
    }
    case ProfileKind::rational:
      return -order * std::log1p(rho * rho);
  }
  return kNegInf;
}

std::string Profile::describe() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind) {
    case ProfileKind::zero:
      os << "zero";
      break;
    case ProfileKind::gaussian:
      os << "gaussian(alpha=" << alpha << ",power=" << power << ")";
      break;
    case ProfileKind::bump:
      os << "bump(lo=" << lo << ",hi=" << hi << ")";
      break;
    case ProfileKind::rational:
      os << "rational(order=" << order << ")";
      break;
  }
  if (kind != ProfileKind::zero) {
    os << "*(" << amplitude.real();
    if (amplitude.imag() != 0.0) os << (amplitude.imag() < 0 ? "" : "+") << amplitude.imag() << "i";
    os << ")";
    if (anisotropy != 0.0) os << "*(1+" << anisotropy << "*omega_1)";
  }
  return os.str();
}

SpectralField InitialData::sample(std::shared_ptr<const Grid> grid) const {
  if (components.empty()) throw InvalidArgumentError("InitialData: no components");
  return SpectralField::sample(std::move(grid), components.size(),
                               [this](std::size_t c, const Direction& w, double rho) {
                                 return components[c](w, rho);
                               });
}

InitialData InitialData::scaled(double lambda) const {
  InitialData out = *this;
  for (Profile& p : out.components) p.amplitude *= lambda;
  return out;
}

double suggest_rho_max(const InitialData& data, int n, double tail_tol, double fallback) {
  // Geometric panels from 1e-3 to 1e6 with a 16-point rule on each.
  constexpr int kPanels = 360;
  constexpr int kOrder = 16;
  const double lo = std::log(1e-3);
  const double hi = std::log(1e6);
  const QuadratureRule base = gauss_legendre(kOrder);
  std::vector<double> edges(kPanels + 1);
  std::vector<double> panel_mass(kPanels, 0.0);
  for (int p = 0; p <= kPanels; ++p) edges[p] = std::exp(lo + (hi - lo) * p / kPanels);
  for (int p = 0; p < kPanels; ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    double acc = 0.0;
    for (int i = 0; i < kOrder; ++i) {
      const double rho = 0.5 * (a + b) + 0.5 * (b - a) * base.nodes[i];
      double g2 = 0.0;
      for (const Profile& prof : data.components) {
        if (prof.is_zero()) continue;
        const double scale = std::abs(prof.amplitude) * (1.0 + std::abs(prof.anisotropy));
        g2 += scale * scale * std::exp(2.0 * prof.log_abs_radial(rho));
      }
      acc += 0.5 * (b - a) * base.weights[i] * g2 * (1.0 + rho * rho) * std::pow(rho, n - 1);
    }
    panel_mass[p] = acc;
  }
  double total = 0.0;
  for (double m : panel_mass) total += m;
  if (!(total > 0.0)) return fallback;
  double tail = 0.0;
  for (int p = kPanels - 1; p >= 0; --p) {
    if (tail + panel_mass[p] > tail_tol * total) return edges[p + 1];
    tail += panel_mass[p];
  }
  return edges[1];
}

}  // namespace kirchhoff
