#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/symbols.hpp"

using namespace kirchhoff;
using Complex = std::complex<double>;

namespace {

Direction unit(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

double residual(const SymbolMatrix& a, double s, const Direction& w, const Diagonalization& d) {
  const Eigen::MatrixXcd lhs = d.n * a(s, w);
  const Eigen::MatrixXcd rhs = d.roots.cast<Complex>().asDiagonal() * d.n;
  return (lhs - rhs).norm();
}

/// Roots of the coupled symbol from its 2x2 block reduction lambda^2 in eig([[c1^2, P1], [P2, c2^2]]).
std::array<double, 4> block_roots(double c1sq, double c2sq, double p1p2) {
  const double tr = c1sq + c2sq;
  const double det = c1sq * c2sq - p1p2;
  const double q = -0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
  const double big = -q;
  const double small = det / big;
  return {-std::sqrt(big), -std::sqrt(small), std::sqrt(small), std::sqrt(big)};
}

}  // namespace

TEST_CASE("scalar Kirchhoff symbol") {
  const SymbolMatrix a = scalar_kirchhoff_symbol(2.0);
  CHECK(a.order() == 2);
  CHECK(a.s_max() == 2.0);
  const Direction w = unit(0.3);
  const Eigen::MatrixXcd m = a(0.5, w);
  CHECK(std::abs(m(0, 1) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(m(1, 0) - Complex(1.5)) < 1e-15);
  const Eigen::VectorXd r = characteristic_roots(a, 0.5, w);
  CHECK(std::abs(r(0) + std::sqrt(1.5)) < 1e-14);
  CHECK(std::abs(r(1) - std::sqrt(1.5)) < 1e-14);
  const Eigen::MatrixXcd ds = a.ds(0.5, w);
  CHECK(std::abs(ds(1, 0) - Complex(1.0)) < 1e-10);
  CHECK(ds.cwiseAbs().sum() - 1.0 < 1e-10);
  // One-sided stencil at the boundary.
  CHECK(std::abs(a.ds(0.0, w)(1, 0) - Complex(1.0)) < 1e-10);
}

TEST_CASE("diagonalizer invariants on random samples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> us(0.0, 1.0), ua(0.0, 2.0 * std::numbers::pi);
  const SymbolMatrix scalar = scalar_kirchhoff_symbol();
  const CoupledSymbol coupled = coupled_symbol(
      1.0, 4.0, [](double, const Direction& w) { return 0.5 + 0.3 * w[0] * w[0]; },
      [](double s, const Direction&) { return 0.4 + 0.1 * s; }, 2, 1.0);
  for (const SymbolMatrix* a : {&scalar, &coupled.symbol}) {
    for (int i = 0; i < 500; ++i) {
      const double s = us(rng);
      const Direction w = unit(ua(rng));
      const Diagonalization d = diagonalizer(*a, s, w);
      const double norm_a = a->operator()(s, w).norm();
      CHECK(residual(*a, s, w, d) < 1e-10 * norm_a);
      CHECK(d.det_abs > 1e-3);
      CHECK((d.n * d.n_inv - Eigen::MatrixXcd::Identity(a->order(), a->order())).norm() < 1e-12);
      for (Eigen::Index k = 0; k < d.n.rows(); ++k) {
        CHECK(std::abs(d.n.row(k).norm() - 1.0) < 1e-13);
        Eigen::Index lead = 0;
        while (std::abs(d.n(k, lead)) <= 1e-8) ++lead;
        CHECK(std::abs(d.n(k, lead).imag()) < 1e-14);
        CHECK(d.n(k, lead).real() > 0.0);
      }
      for (Eigen::Index k = 1; k < d.roots.size(); ++k) CHECK(d.roots(k) > d.roots(k - 1));
    }
  }
}

TEST_CASE("coupled example at the reference point") {
  const auto one = [](double, const Direction&) { return 1.0; };
  const CoupledSymbol c = coupled_symbol(1.0, 4.0, one, one, 1);
  CHECK(c.report.passed);
  CHECK(c.report.discriminant_inf == doctest::Approx(13.0));
  CHECK(c.report.product_inf == doctest::Approx(15.0));
  const Eigen::VectorXd r = characteristic_roots(c.symbol, 0.0, {1.0, 0.0, 0.0});
  const double outer = std::sqrt(0.5 * (5.0 + std::sqrt(13.0)));
  const double inner = std::sqrt(0.5 * (5.0 - std::sqrt(13.0)));
  CHECK(std::abs(r(0) + 2.0743) < 1e-4);
  CHECK(std::abs(r(1) + 0.8350) < 1e-4);
  CHECK(std::abs(r(0) + outer) < 1e-12);
  CHECK(std::abs(r(1) + inner) < 1e-12);
  CHECK(std::abs(r(2) - inner) < 1e-12);
  CHECK(std::abs(r(3) - outer) < 1e-12);
}

TEST_CASE("coupled roots match the block reduction on random parameters") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.3, 3.0), us(0.0, 1.0), uw(0.0, 2.0 * std::numbers::pi);
  int tested = 0;
  while (tested < 200) {
    const double a1 = ua(rng), a2 = ua(rng), s = us(rng);
    const double p1 = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const double p2 = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const double c1 = a1 * (1.0 + s), c2 = a2 * (1.0 + s);
    if ((c1 - c2) * (c1 - c2) + 4.0 * p1 * p2 < 0.05 || c1 * c2 - p1 * p2 < 0.05 ||
        a1 * a1 * a2 * a2 - p1 * p2 < 0.05 || (a1 - a2) * (a1 - a2) + 4.0 * p1 * p2 < 0.05 ||
        a1 * a2 - p1 * p2 < 0.05)
      continue;
    const CoupledSymbol cs = coupled_symbol(
        a1, a2, [p1](double, const Direction&) { return p1; },
        [p2](double, const Direction&) { return p2; }, 2, 1.0, 16, 4);
    const Eigen::VectorXd r = characteristic_roots(cs.symbol, s, unit(uw(rng)));
    const auto ref = block_roots(c1, c2, p1 * p2);
    const Eigen::VectorXd closed = coupled_closed_form_roots(a1, a2, s, p1 * p2);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(r(k) - ref[k]) < 1e-10 * std::max(1.0, std::abs(ref[k])));
      CHECK(std::abs(closed(k) - ref[k]) < 1e-10 * std::max(1.0, std::abs(ref[k])));
    }
    ++tested;
  }
}

TEST_CASE("decoupled example has the wave speeds as roots") {
  const auto zero = [](double, const Direction&) { return 0.0; };
  const CoupledSymbol c = coupled_symbol(1.0, 4.0, zero, zero, 3);
  for (double s : {0.0, 0.37, 1.0}) {
    const Eigen::VectorXd r = characteristic_roots(c.symbol, s, {0.0, 0.6, 0.8});
    CHECK(std::abs(r(0) + 2.0 * std::sqrt(1.0 + s)) < 1e-12);
    CHECK(std::abs(r(1) + std::sqrt(1.0 + s)) < 1e-12);
    CHECK(std::abs(r(2) - std::sqrt(1.0 + s)) < 1e-12);
    CHECK(std::abs(r(3) - 2.0 * std::sqrt(1.0 + s)) < 1e-12);
  }
  const double gap = hyperbolicity_gap(c.symbol, {0.0, 1.0}, sphere_samples(3, 8));
  CHECK(gap == doctest::Approx(1.0));
}

TEST_CASE("companion symbol layout and gap") {
  // Third-order equation with roots -1 - s, 0, 1 + s (times |xi|).
  std::vector<DirectionProfile> h{[](double, const Direction&) { return 0.0; },
                                  [](double s, const Direction&) { return -(1.0 + s) * (1.0 + s); },
                                  [](double, const Direction&) { return 0.0; }};
  const SymbolMatrix a = companion_symbol(h, 1.0, 4.0, "cubic");
  CHECK(a.name() == "cubic");
  const Eigen::MatrixXcd m = a(0.5, unit(0.0));
  CHECK(std::abs(m(0, 1) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(m(1, 2) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(m(2, 1) - Complex(2.25)) < 1e-15);
  const Eigen::VectorXd r = characteristic_roots(a, 0.5, unit(0.0));
  CHECK(std::abs(r(0) + 1.5) < 1e-13);
  CHECK(std::abs(r(1)) < 1e-13);
  CHECK(std::abs(r(2) - 1.5) < 1e-13);
  CHECK(hyperbolicity_gap(a, {0.0, 0.5, 1.0}, sphere_samples(1, 2)) == doctest::Approx(1.0));
  CHECK(hyperbolicity_gap(companion_symbol({[](double, const Direction&) { return 1.0; }}, 1.0, 0.0),
                          {0.0}, sphere_samples(1, 2)) == kNoPairGap);
}

TEST_CASE("hyperbolicity failures are reported") {
  const auto c = [](double v) { return [v](double, const Direction&) { return v; }; };
  const SymbolMatrix elliptic = companion_symbol({c(0.0), c(1.0)}, 1.0, 0.0);
  CHECK_THROWS_AS(characteristic_roots(elliptic, 0.0, unit(0.0)), NotHyperbolicError);
  const SymbolMatrix degenerate = companion_symbol({c(0.0), c(0.0)}, 1.0, 0.0);
  CHECK_THROWS_AS(characteristic_roots(degenerate, 0.0, unit(0.0)), NearDegeneracyError);
  CHECK_THROWS_AS(coupled_symbol(1.0, 2.0, c(3.0), c(3.0), 1), AssumptionViolationError);
  CHECK_THROWS_AS(coupled_symbol(1.0, 1.0, c(0.0), c(0.0), 1), InvalidArgumentError);
  // Passes both sampled assumptions but has complex inner roots at s = 0.
  CHECK_THROWS_AS(coupled_symbol(2.0, 3.0, c(3.0), c(3.0), 1, 1.0), NotHyperbolicError);
  const SymbolMatrix bad("nan", 1, [](double, const Direction&) {
    return Eigen::MatrixXcd::Constant(1, 1, Complex(std::nan(""), 0.0));
  }, 1.0, 0.0);
  CHECK_THROWS_AS(bad(0.0, unit(0.0)), InvalidArgumentError);
}
