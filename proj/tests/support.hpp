#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "kirchhoff/grid.hpp"
#include "kirchhoff/profiles.hpp"
#include "kirchhoff/spectral_field.hpp"

namespace testing {

using namespace kirchhoff;

inline std::shared_ptr<const Grid> make_grid(int n, int angular, int radial, double rho_max,
                                             RadialRule rule = RadialRule::gauss_legendre) {
  return std::make_shared<const Grid>(build_grid(n, angular, radial, rho_max, rule));
}

/// (rho f0, -i f1) for the scalar companion from radial profiles f0, f1.
inline SpectralField companion_data(const std::shared_ptr<const Grid>& g, const Profile& f0,
                                    const Profile& f1) {
  return SpectralField::sample(g, 2, [&](std::size_t c, const Direction& w, double rho) {
    return c == 0 ? rho * f0(w, rho) : Complex(0.0, -1.0) * f1(w, rho);
  });
}

inline SpectralField scalar_data(const std::shared_ptr<const Grid>& g, const Profile& f) {
  return SpectralField::sample(g, 1, [&](std::size_t, const Direction& w, double rho) {
    return f(w, rho);
  });
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
