#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "kirchhoff/asymptotic.hpp"
#include "kirchhoff/errors.hpp"
#include "support.hpp"

using namespace kirchhoff;
using testing::companion_data;
using testing::make_grid;

namespace {

CoefficientPath sine_path(double base, double amp, double horizon, std::size_t intervals) {
  std::vector<double> t(intervals + 1), s(intervals + 1), sp(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
    s[i] = base + amp * std::sin(t[i]);
    sp[i] = amp * std::cos(t[i]);
  }
  return CoefficientPath(t, s, sp);
}

double inf_norm(const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

TEST_CASE("coefficient path interpolates linear data exactly") {
  const auto p = CoefficientPath::linear(0.2, 0.05, 4.0, 7);
  for (double t : {0.0, 0.31, 1.7, 3.999, 4.0}) {
    CHECK(p.s(t) == doctest::Approx(0.2 + 0.05 * t).epsilon(1e-14));
    CHECK(p.s_prime(t) == doctest::Approx(0.05).epsilon(1e-13));
  }
  CHECK(p.total_variation() == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(CoefficientPath::frozen(0.3, 1.0, 4).is_frozen());
  CHECK_FALSE(p.is_frozen());
}

TEST_CASE("total variation of an oscillating path") {
  // int_0^10 |0.05 cos t| dt = 0.05 * (sum of |sin| increments)
  const double exact = 0.05 * (6.0 + std::sin(10.0 - 3.0 * M_PI));
  const auto p = sine_path(0.1, 0.05, 10.0, 400);
  CHECK(p.total_variation() == doctest::Approx(exact).epsilon(1e-7));
  double pieces = 0.0;
  for (auto [a, b] : p.monotone_pieces()) pieces += std::abs(p.s(b) - p.s(a));
  CHECK(pieces == doctest::Approx(p.total_variation()).epsilon(1e-12));
}

TEST_CASE("coefficient path rejects malformed input") {
  CHECK_THROWS_AS(CoefficientPath({0.0}, {0.0}, {0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(CoefficientPath({0.0, 1.0}, {0.0, -1e-3}, {0.0, 0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(CoefficientPath({0.0, 1.0, 1.0}, {0, 0, 0}, {0, 0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(CoefficientPath({0.1, 1.0}, {0, 0}, {0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(CoefficientPath::linear(0.0, 1.0, -1.0, 4), InvalidArgumentError);
}

TEST_CASE("phase integrals of the scalar companion") {
  const auto a = scalar_kirchhoff_symbol();
  const Direction w{1, 0, 0};
  SUBCASE("frozen") {
    const auto psi = phase_integrals(CoefficientPath::frozen(0.44, 3.0, 6), a, w, 2.5);
    CHECK(psi[1] == doctest::Approx(1.2 * 2.5).epsilon(1e-13));
    CHECK(psi[0] == doctest::Approx(-psi[1]).epsilon(1e-15));
  }
  SUBCASE("ramp") {
    const double sigma = 0.3, t = 1.7;
    const double exact = 2.0 / (3.0 * sigma) * (std::pow(1 + sigma * t, 1.5) - 1.0);
    const auto psi = phase_integrals(CoefficientPath::linear(0.0, sigma, 2.0, 5), a, w, t);
    CHECK(psi[1] == doctest::Approx(exact).epsilon(1e-12));
    CHECK(psi[0] == doctest::Approx(-exact).epsilon(1e-12));
  }
}

TEST_CASE("perturbation matrix") {
  const auto a = scalar_kirchhoff_symbol();
  const Direction w{-1, 0, 0};
  SUBCASE("frozen path gives zero") {
    const auto c = perturbation_matrix(CoefficientPath::frozen(0.5, 1.0, 3), a, 0.4, w, 3.0);
    CHECK(c.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("hand-differentiated 2x2 diagonalizer along s = sigma t") {
    const double sigma = 0.01;
    const auto path = CoefficientPath::linear(0.0, sigma, 1.0, 10);
    for (double t : {0.0, 0.25, 0.6, 1.0}) {
      const auto c = perturbation_matrix(path, a, t, w, 2.0);
      const double off = sigma / (4.0 * (1.0 + sigma * t));
      const double diag = sigma * sigma * t / (4.0 * (1.0 + sigma * t) * (2.0 + sigma * t));
      CHECK(std::abs(c(0, 1)) == doctest::Approx(off).epsilon(1e-6));
      CHECK(std::abs(c(1, 0)) == doctest::Approx(off).epsilon(1e-6));
      CHECK(std::abs(std::abs(c(0, 0)) - diag) <= 1e-4 * diag + 1e-10);
      CHECK(inf_norm(c) == doctest::Approx(off).epsilon(0.02));
    }
  }
  SUBCASE("integral of |C| is stable under checkpoint refinement") {
    auto integral = [&](const CoefficientPath& p) {
      const auto fine = sine_path(0.1, 0.05, 5.0, 100);
      double sum = 0.0;
      const auto& ts = fine.times();
      const double g[2] = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double mid = 0.5 * (ts[i] + ts[i + 1]), half = 0.5 * (ts[i + 1] - ts[i]);
        for (double x : g) sum += half * inf_norm(perturbation_matrix(p, a, mid + half * x, w, 1.5));
      }
      return sum;
    };
    const double coarse = integral(sine_path(0.1, 0.05, 5.0, 200));
    const double fine = integral(sine_path(0.1, 0.05, 5.0, 400));
    CHECK(std::abs(coarse - fine) < 1e-6 * fine);
  }
  SUBCASE("degenerate roots propagate") {
    std::vector<DirectionProfile> h{[](double, const Direction&) { return 0.0; },
                                    [](double s, const Direction&) { return -s; }};
    const auto deg = companion_symbol(h, 1.0, 1.0);
    CHECK_THROWS_AS(perturbation_matrix(CoefficientPath::linear(0.0, 0.1, 1.0, 2), deg, 0.0, w, 1.0),
                    NearDegeneracyError);
  }
}

TEST_CASE("frozen wave: both solvers reproduce d'Alembert modes") {
  const auto g = make_grid(1, 2, 48, 8.0);
  const Profile f0 = Profile::gaussian(0.5);
  const auto u0 = companion_data(g, f0, Profile::zero());
  const auto a = scalar_kirchhoff_symbol();
  const auto path = CoefficientPath::frozen(0.0, 3.0, 6);
  const std::vector<double> times{0.0, 0.7, 1.9, 3.0};
  LinearSolveOptions opt;
  opt.tol = 1e-12;
  const auto asym = solve_asymptotic(path, a, u0, times, opt).snapshots;
  const auto direct = direct_mode_solve(path, a, u0, times, opt);
  double err_a = 0.0, err_d = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t a_i = 0; a_i < g->angular_count(); ++a_i) {
      for (std::size_t r = 0; r < g->radial_count(); ++r) {
        const double rho = g->radial_nodes()[r];
        const Complex want = rho * std::cos(rho * times[k]) * f0({1, 0, 0}, rho);
        err_a = std::max(err_a, std::abs(asym[k](0, a_i, r) - want));
        err_d = std::max(err_d, std::abs(direct[k](0, a_i, r) - want));
      }
    }
  }
  CHECK(err_a < 1e-9);
  CHECK(err_d < 1e-9);
  CHECK(l2_distance(asym[0], u0) < 1e-14 * std::sqrt(sobolev_norm_sq(u0, 0.0)));
}

TEST_CASE("asymptotic representation matches direct integration on a slow ramp") {
  const auto g = make_grid(2, 8, 40, 7.0);
  Profile f0 = Profile::gaussian(0.5);
  f0.anisotropy = 0.3;
  const auto u0 = companion_data(g, f0, Profile::gaussian(0.5, 1, 0.4));
  const auto a = scalar_kirchhoff_symbol();
  const auto path = CoefficientPath::linear(0.05, 0.02, 4.0, 40);
  std::vector<double> times;
  for (int k = 0; k <= 8; ++k) times.push_back(0.5 * k);
  LinearSolveOptions opt;
  opt.keep_amplitudes = true;
  const auto asym = solve_asymptotic(path, a, u0, times, opt);
  const auto direct = direct_mode_solve(path, a, u0, times, opt);
  const double norm0 = std::sqrt(sobolev_norm_sq(u0, 0.0));
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(l2_distance(asym.snapshots[k], direct[k]) < 1e-6 * norm0);
  }

  // Initial amplitudes are the columns of N(0); phases pair up as +-psi.
  const auto d0 = diagonalizer(a, 0.05, g->directions()[0]);
  CHECK((asym.amplitudes.amplitudes[0][0] - d0.n).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (const auto& psi : asym.amplitudes.psi[k]) CHECK(std::abs(psi[0] + psi[1]) < 1e-12);
  }

  // Gronwall: |a^j(t)| <= |a^j(0)| exp(int_0^t |C|), with |C| <= sup|d_s N N^{-1}| |s'|.
  double bound = 0.0;
  for (double s = 0.05; s <= 0.13 + 1e-12; s += 0.01) {
    const auto d = diagonalizer(a, s, g->directions()[0]);
    bound = std::max(bound, (diagonalizer_ds(a, s, g->directions()[0]) * d.n_inv).operatorNorm());
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double growth = std::exp(bound * 0.02 * times[k]) * (1 + 1e-9);
    for (std::size_t mode = 0; mode < g->mode_count(); mode += 7) {
      const auto& am = asym.amplitudes.amplitudes[k][mode];
      const auto& a0 = asym.amplitudes.amplitudes[0][mode];
      for (int j = 0; j < 2; ++j) CHECK(am.col(j).norm() <= a0.col(j).norm() * growth);
    }
  }
}

TEST_CASE("direct mode solve") {
  const auto g = make_grid(3, 6, 12, 5.0);
  SUBCASE("zero data stays zero") {
    const auto a = scalar_kirchhoff_symbol();
    const SpectralField zero(g, 2);
    const auto out = direct_mode_solve(CoefficientPath::linear(0, 0.1, 1.0, 4), a, zero, {0.5, 1.0});
    for (const auto& f : out) CHECK(sobolev_norm_sq(f, 0.0) == 0.0);
  }
  SUBCASE("frozen coupled symbol matches the eigendecomposition exponential") {
    const auto sym = coupled_symbol(1.0, 2.0, [](double, const Direction& w) { return 0.3 + 0.1 * w[2]; },
                                    [](double, const Direction&) { return 0.4; }, 3)
                         .symbol;
    const auto u0 = SpectralField::sample(g, 4, [](std::size_t c, const Direction& w, double rho) {
      return Complex(1.0 + c, 0.5 * w[0]) * std::exp(-rho * rho / 2);
    });
    const double s0 = 0.2, t = 1.3;
    LinearSolveOptions opt;
    opt.tol = 1e-12;
    const auto out = direct_mode_solve(CoefficientPath::frozen(s0, t, 2), sym, u0, {t}, opt)[0];
    double err = 0.0, scale = 0.0;
    for (std::size_t mode = 0; mode < g->mode_count(); ++mode) {
      const double rho = g->radial_nodes()[mode % g->radial_count()];
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sym(s0, g->directions()[mode / g->radial_count()]));
      Eigen::VectorXcd ph = (Complex(0, 1) * rho * t * es.eigenvalues()).array().exp();
      const Eigen::VectorXcd want =
          es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().inverse() * u0.mode_vector(mode);
      err = std::max(err, (out.mode_vector(mode) - want).cwiseAbs().maxCoeff());
      scale = std::max(scale, want.cwiseAbs().maxCoeff());
    }
    CHECK(err < 1e-9 * scale);
  }
  SUBCASE("symmetrizer norm is conserved for frozen coefficients") {
    const auto a = scalar_kirchhoff_symbol();
    const auto u0 = companion_data(g, Profile::gaussian(0.5), Profile::gaussian(1.0));
    const double tol = 1e-10;
    LinearSolveOptions opt;
    opt.tol = tol;
    const auto out = direct_mode_solve(CoefficientPath::frozen(0.3, 2.0, 2), a, u0, {0.0, 1.0, 2.0}, opt);
    // Drift of every mode measured against the largest mode amplitude.
    std::vector<double> e0(g->mode_count());
    double top = 0.0;
    for (std::size_t mode = 0; mode < g->mode_count(); ++mode) {
      const auto n = diagonalizer(a, 0.3, g->directions()[mode / g->radial_count()]).n;
      e0[mode] = (n * out[0].mode_vector(mode)).norm();
      top = std::max(top, e0[mode]);
    }
    double drift = 0.0;
    for (std::size_t mode = 0; mode < g->mode_count(); ++mode) {
      const auto n = diagonalizer(a, 0.3, g->directions()[mode / g->radial_count()]).n;
      for (int k = 1; k < 3; ++k) drift = std::max(drift, std::abs((n * out[k].mode_vector(mode)).norm() - e0[mode]));
    }
    CHECK(drift <= 10 * tol * top);
  }
  SUBCASE("integrator failure names the mode block") {
    const auto a = scalar_kirchhoff_symbol();
    const auto u0 = companion_data(g, Profile::gaussian(0.5), Profile::zero());
    LinearSolveOptions opt;
    opt.tol = 1e-300;
    try {
      direct_mode_solve(CoefficientPath::frozen(0.0, 1.0, 2), a, u0, {1.0}, opt);
      FAIL("expected a failure");
    } catch (const StiffnessError& e) {
      CHECK(std::string(e.what()).find("direction") != std::string::npos);
    }
  }
  SUBCASE("component count must match the symbol") {
    const auto a = scalar_kirchhoff_symbol();
    CHECK_THROWS_AS(direct_mode_solve(CoefficientPath::frozen(0, 1, 2), a, SpectralField(g, 3), {1.0}),
                    DimensionError);
  }
}
