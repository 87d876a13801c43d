// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kirchhoff/asymptotic.hpp"
#include "kirchhoff/data_classes.hpp"
#include "kirchhoff/fixedpoint.hpp"
#include "kirchhoff/kirchhoff_scalar.hpp"
#include "kirchhoff/parallel.hpp"
#include "kirchhoff/symbols.hpp"

using namespace kirchhoff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::shared_ptr<const Grid> grid_for(int n, int radial = 64) {
  return std::make_shared<const Grid>(build_grid(n, n == 1 ? 2 : 16, radial, 8.0));
}

SpectralField scalar_field(const std::shared_ptr<const Grid>& g, const Profile& p) {
  return InitialData{{p}}.sample(g);
}

/// Gaussian data u0 = eps e^{-rho^2/2}, u1 = (eps/2) rho e^{-rho^2/2}.
struct ScalarCase {
  std::shared_ptr<const Grid> grid;
  Profile f0, f1;
  SpectralField u, v;

  ScalarCase(int n, double eps, int radial = 64)
      : grid(grid_for(n, radial)),
        f0(Profile::gaussian(0.5, 0, eps)),
        f1(Profile::gaussian(0.5, 1, 0.5 * eps)),
        u(scalar_field(grid, f0)),
        v(scalar_field(grid, f1)) {}

  SpectralField companion() const {
    return SpectralField::sample(grid, 2, [&](std::size_t c, const Direction& w, double rho) {
      return c == 0 ? rho * f0(w, rho) : Complex(0.0, -1.0) * f1(w, rho);
    });
  }
};

const HermitianForm kScalarForm = HermitianForm::diagonal({1.0, 0.0});

Trajectory criterion1_run(int n, double eps, bool snapshots = false) {
  const ScalarCase sc(n, eps);
  ScalarSolveOptions o;
  o.tol = 1e-10;
  o.checkpoint_intervals = snapshots ? 1 : 200;
  o.keep_snapshots = snapshots;
  return solve_scalar(sc.u, sc.v, NonlocalKind::gradient, 10.0, o);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome energy_conservation() {
  Outcome out{true, ""};
  for (int n : {1, 2}) {
    for (double eps : {0.05, 0.2}) {
      const auto t0 = std::chrono::steady_clock::now();
      const double drift = criterion1_run(n, eps).max_relative_energy_drift();
      const double secs = seconds_since(t0);
      out.pass = out.pass && drift < 1e-8 && secs < 60.0;
      out.detail += "n=" + std::to_string(n) + " eps=" + fmt("%g", eps) + ": drift " +
                    fmt("%.2e", drift) + " in " + fmt("%.2fs", secs) + "; ";
    }
  }
  return out;
}

double relative_gap(const CoefficientPath& path, const SymbolMatrix& a, const SpectralField& u0) {
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(path.horizon() * k / 10.0);
  LinearSolveOptions o;
  o.tol = 1e-12;
  const auto asym = solve_asymptotic(path, a, u0, times, o).snapshots;
  const auto direct = direct_mode_solve(path, a, u0, times, o);
  double worst = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    worst = std::max(worst, l2_distance(asym[k], direct[k]) / std::sqrt(sobolev_norm_sq(direct[k], 0.0)));
  return worst;
}

Outcome representation_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScalarCase sc(2, 0.2, 40);
  const SpectralField u0 = sc.companion();
  const SymbolMatrix scalar = scalar_kirchhoff_symbol();
  const CoupledSymbol coupled = coupled_symbol(
      1.0, 4.0, [](double, const Direction& w) { return 0.5 + 0.3 * w[0] * w[0]; },
      [](double, const Direction&) { return 0.4; }, 2);
  const SpectralField v0 = SpectralField::sample(sc.grid, 4, [&](std::size_t c, const Direction& w, double rho) {
    const Profile& p = (c % 2 == 0) ? sc.f0 : sc.f1;
    return (c % 2 == 0 ? rho : 1.0) * p(w, rho) * (c < 2 ? 1.0 : 0.5);
  });
  FixedPointOptions fp;
  fp.tol = 1e-12;
  fp.checkpoint_intervals = 100;
  const CoefficientPath scalar_nl = solve_nonlinear(scalar, kScalarForm, u0, 5.0, fp).path;
  const CoefficientPath coupled_nl =
      solve_nonlinear(coupled.symbol, HermitianForm::diagonal({1.0, 0.0, 1.0, 0.0}), v0, 5.0, fp).path;

  struct Case {
    std::string name;
    double gap;
  };
  const std::vector<Case> cases{
      {"scalar frozen", relative_gap(CoefficientPath::frozen(0.1, 5.0, 10), scalar, u0)},
      {"scalar ramp", relative_gap(CoefficientPath::linear(0.05, 0.02, 5.0, 50), scalar, u0)},
      {"scalar nonlinear", relative_gap(scalar_nl, scalar, u0)},
      {"coupled ramp", relative_gap(CoefficientPath::linear(0.05, 0.02, 5.0, 50), coupled.symbol, v0)},
      {"coupled nonlinear", relative_gap(coupled_nl, coupled.symbol, v0)},
  };
  Outcome out{true, ""};
  for (const Case& c : cases) {
    out.pass = out.pass && c.gap < 1e-6;
    out.detail += c.name + " " + fmt("%.1e", c.gap) + "; ";
  }
  const double secs = seconds_since(t0);
  out.pass = out.pass && secs < 120.0;
  out.detail += fmt("%.1fs", secs);
  return out;
}

double inf_norm(const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Outcome diagonalizer_validity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<DirectionProfile> cubic{[](double, const Direction&) { return 0.0; },
                                      [](double s, const Direction& w) { return -(1.0 + s) * (1.5 + w[0] * w[0]); },
                                      [](double, const Direction&) { return 0.0; }};
  struct Entry {
    std::string name;
    SymbolMatrix a;
    int dimension;
  };
  const std::vector<Entry> catalog{
      {"scalar_kirchhoff", scalar_kirchhoff_symbol(), 3},
      {"companion3", companion_symbol(cubic, 1.0, 2.0, "companion3"), 3},
      {"coupled_example22",
       coupled_symbol(1.0, 4.0, [](double, const Direction& w) { return 0.5 + 0.3 * w[0] * w[0]; },
                      [](double s, const Direction& w) { return 0.4 + 0.1 * s * w[2]; }, 3)
           .symbol,
       3},
  };
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> us(0.0, 1.0);
  std::normal_distribution<double> gauss;
  Outcome out{true, ""};
  for (const Entry& e : catalog) {
    double worst = 0.0, min_det = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10000; ++i) {
      const double s = us(rng) * e.a.s_max();
      Direction w{gauss(rng), gauss(rng), gauss(rng)};
      const double len = std::hypot(w[0], w[1], w[2]);
      for (double& x : w) x /= len;
      const Eigen::MatrixXcd m = e.a(s, w);
      const Diagonalization d = diagonalizer(e.a, s, w);
      const Eigen::MatrixXcd r = d.n * m - d.roots.cast<Complex>().asDiagonal() * d.n;
      worst = std::max(worst, inf_norm(r) / inf_norm(m));
      min_det = std::min(min_det, d.det_abs);
    }
    out.pass = out.pass && worst < 1e-10 && min_det > 1e-3;
    out.detail += e.name + ": residual/|A| " + fmt("%.1e", worst) + ", min|det N| " + fmt("%.3f", min_det) + "; ";
  }
  const double secs = seconds_since(t0);
  out.pass = out.pass && secs < 10.0;
  out.detail += fmt("%.1fs", secs);
  return out;
}

Outcome coupled_roots() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(0.2, 3.0), up(-2.0, 2.0), us(0.0, 1.0), uang(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  int samples = 0;
  while (samples < 1000) {
    const double a1 = ua(rng), a2 = ua(rng), p1 = up(rng), p2 = up(rng), s = us(rng);
    const double pp = p1 * p2;
    if ((a1 - a2) * (a1 - a2) + 4.0 * pp < 0.05 || a1 * a1 * a2 * a2 - pp < 0.05 || a1 * a2 - pp < 0.05)
      continue;
    const CoupledSymbol cs = coupled_symbol(
        a1, a2, [p1](double, const Direction&) { return p1; }, [p2](double, const Direction&) { return p2; }, 2,
        1.0, 4, 2);
    const double ang = uang(rng);
    const Eigen::VectorXd r = characteristic_roots(cs.symbol, s, {std::cos(ang), std::sin(ang), 0.0});
    const double c1 = a1 * (1.0 + s), c2 = a2 * (1.0 + s);
    const double disc = std::sqrt((c1 - c2) * (c1 - c2) + 4.0 * pp);
    const double phi_plus = std::sqrt(c1 + c2 + disc) / std::sqrt(2.0);
    const double phi_minus = std::sqrt(c1 + c2 - disc) / std::sqrt(2.0);
    const double want[4] = {-phi_plus, -phi_minus, phi_minus, phi_plus};
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(r(k) - want[k]) / std::max(1.0, std::abs(want[k])));
    ++samples;
  }
  double decoupled = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a1 = ua(rng), a2 = a1 + 0.1 + ua(rng), s = us(rng);
    const auto zero = [](double, const Direction&) { return 0.0; };
    const CoupledSymbol cs = coupled_symbol(a1, a2, zero, zero, 1, 1.0, 2, 2);
    const Eigen::VectorXd r = characteristic_roots(cs.symbol, s, {1.0, 0.0, 0.0});
    const double want[4] = {-std::sqrt(a2 * (1 + s)), -std::sqrt(a1 * (1 + s)), std::sqrt(a1 * (1 + s)),
                            std::sqrt(a2 * (1 + s))};
    for (int k = 0; k < 4; ++k) decoupled = std::max(decoupled, std::abs(r(k) - want[k]));
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = worst < 1e-10 && decoupled < 1e-12 && secs < 10.0;
  out.detail = "1000 samples max rel err " + fmt("%.1e", worst) + ", decoupled " + fmt("%.1e", decoupled) + ", " +
               fmt("%.1fs", secs);
  return out;
}

struct CrossValidation {
  NonlinearResult fp;
  Trajectory direct;
  double seconds = 0.0;
};

const CrossValidation& criterion5_run() {
  static const CrossValidation cv = [] {
    const auto t0 = std::chrono::steady_clock::now();
    const ScalarCase sc(1, 0.05);
    FixedPointOptions o;
    o.tol = 1e-12;
    o.checkpoint_intervals = 400;
    o.linear.tol = 1e-13;
    CrossValidation r{solve_nonlinear(scalar_kirchhoff_symbol(), kScalarForm, sc.companion(), 10.0, o), {}, 0.0};
    ScalarSolveOptions so;
    so.tol = 1e-12;
    so.checkpoint_intervals = 400;
    r.direct = solve_scalar(sc.u, sc.v, NonlocalKind::gradient, 10.0, so);
    r.seconds = seconds_since(t0);
    return r;
  }();
  return cv;
}

Outcome nonlinear_cross_validation() {
  const CrossValidation& cv = criterion5_run();
  double sup = 0.0;
  for (std::size_t i = 0; i < cv.direct.size(); ++i)
    sup = std::max(sup, std::abs(cv.fp.path.s(cv.direct.times[i]) - cv.direct.s[i]));
  double ratio = 0.0;
  for (double q : cv.fp.report.contraction_ratios) ratio = std::max(ratio, q);
  Outcome out;
  out.pass = cv.fp.report.converged && sup < 1e-6 && cv.fp.report.iterations <= 12 && ratio < 0.9 &&
             cv.seconds < 300.0;
  out.detail = "sup|s_fp - s_direct| " + fmt("%.1e", sup) + ", iterations " +
               std::to_string(cv.fp.report.iterations) + ", max ratio " + fmt("%.2e", ratio) + ", " +
               fmt("%.1fs", cv.seconds);
  return out;
}

Outcome small_data_regularity() {
  const auto t0 = std::chrono::steady_clock::now();
  const SymbolMatrix a = scalar_kirchhoff_symbol();
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  std::vector<double> k_est;
  bool bounded = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (double e : eps) {
    const ScalarCase sc(1, e);
    FixedPointOptions o;
    o.tol = 1e-12;
    o.checkpoint_intervals = 200;
    const NonlinearResult r = solve_nonlinear(a, kScalarForm, sc.companion(), 10.0, o);
    k_est.push_back(class_estimates(r.path, a, 1).k);
    const double e0 = r.trajectory.energy.front();
    double sup_s = 0.0;
    for (double s : r.trajectory.s) sup_s = std::max(sup_s, s);
    bounded = bounded && sup_s <= e0;
    worst_margin = std::min(worst_margin, (e0 - sup_s) / e0);
  }
  // Least-squares slope of log K against log eps, plus each consecutive pair.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    mx += std::log(eps[i]) / eps.size();
    my += std::log(k_est[i]) / eps.size();
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    sxy += (std::log(eps[i]) - mx) * (std::log(k_est[i]) - my);
    sxx += (std::log(eps[i]) - mx) * (std::log(eps[i]) - mx);
  }
  const double slope = sxy / sxx;
  bool pairs = true;
  std::string pair_text;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    const double p = std::log(k_est[i] / k_est[i + 1]) / std::log(eps[i] / eps[i + 1]);
    pairs = pairs && std::abs(p - 2.0) <= 0.2;
    pair_text += (pair_text.empty() ? "" : " ") + fmt("%.3f", p);
  }
  Outcome out;
  out.pass = std::abs(slope - 2.0) <= 0.2 && pairs && bounded;
  out.detail = "K_est exponent " + fmt("%.3f", slope) + " (pairs " + pair_text + "), min (E0 - sup s)/E0 " +
               fmt("%.3f", worst_margin) + ", " + fmt("%.1fs", seconds_since(t0));
  return out;
}

Outcome sprime_identity() {
  const CrossValidation& cv = criterion5_run();
  LinearSolveOptions o;
  o.tol = 1e-13;
  const ScalarCase sc(1, 0.05);
  const auto terms =
      sprime_decomposition(cv.fp.path, scalar_kirchhoff_symbol(), kScalarForm, sc.companion(), cv.fp.path.times(), o);
  double worst = 0.0;
  bool pass = !terms.empty();
  for (const SPrimeTerms& t : terms) {
    const double scale = std::abs(t.i) + std::abs(t.j) + 1e-30;
    pass = pass && t.residual < 1e-6 * scale;
    worst = std::max(worst, t.residual / scale);
  }
  return {pass, std::to_string(terms.size()) + " checkpoints, max residual/(|I|+|J|) " + fmt("%.1e", worst)};
}

Outcome data_class_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 1;
  const ClassControls base;
  const auto catalog = profile_catalog();
  const auto norms = default_norm_selection(n);
  double homog = 0.0;
  bool homog_finite = true;
  const double lambda = 3.7;
  for (const CatalogMember& m : catalog) {
    for (const NormSelection& sel : norms) {
      const NormValue a = evaluate_norm(m.data, n, sel, base);
      const NormValue b = evaluate_norm(m.data.scaled(lambda), n, sel, base);
      if (a.finite != b.finite) homog_finite = false;
      if (a.finite && a.value > 0.0) homog = std::max(homog, std::abs(b.value / (lambda * lambda * a.value) - 1.0));
    }
  }
  const InclusionReport coarse = inclusion_report(catalog, n, base);
  const InclusionReport fine = inclusion_report(catalog, n, refined(base));
  double change = 0.0;
  bool finite_agree = true;
  for (std::size_t i = 0; i < coarse.values.size(); ++i)
    for (std::size_t j = 0; j < coarse.values[i].size(); ++j) {
      const NormValue& c = coarse.values[i][j];
      const NormValue& f = fine.values[i][j];
      if (c.finite != f.finite) finite_agree = false;
      if (c.finite && f.finite && f.value > 0.0) change = std::max(change, std::abs(c.value / f.value - 1.0));
    }
  const std::size_t violations = coarse.violations.size() + fine.violations.size();
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = homog < 1e-10 && homog_finite && change < 0.01 && finite_agree && violations == 0 && secs < 120.0;
  out.detail = "homogeneity " + fmt("%.1e", homog) + ", refinement change " + fmt("%.2f%%", 100.0 * change) +
               (finite_agree ? "" : " (finiteness mismatch)") + ", violations " + std::to_string(violations) + ", " +
               std::to_string(catalog.size()) + " members x " + std::to_string(norms.size()) + " norms, " +
               fmt("%.1fs", secs);
  return out;
}

Outcome time_reversal() {
  Outcome out{true, ""};
  for (int n : {1, 2}) {
    for (double eps : {0.05, 0.2}) {
      const ScalarCase sc(n, eps);
      ScalarSolveOptions o;
      o.tol = 1e-10;
      o.checkpoint_intervals = 1;
      o.keep_snapshots = true;
      const ScalarState end = solve_scalar(sc.u, sc.v, NonlocalKind::gradient, 10.0, o).snapshots.back();
      const ScalarState home =
          solve_scalar(end.u_hat, Complex(-1.0) * end.v_hat, NonlocalKind::gradient, 10.0, o).snapshots.back();
      const double err = std::sqrt(sobolev_norm_sq(home.u_hat - sc.u, 1.0) +
                                   sobolev_norm_sq(home.v_hat + sc.v, 0.0));
      const double size = std::sqrt(sobolev_norm_sq(sc.u, 1.0) + sobolev_norm_sq(sc.v, 0.0));
      out.pass = out.pass && err < 1e-8 * size;
      out.detail += "n=" + std::to_string(n) + " eps=" + fmt("%g", eps) + ": " + fmt("%.1e", err / size) + "; ";
    }
  }
  out.detail += "(relative H1 x L2)";
  return out;
}

Outcome determinism() {
  Outcome out{true, ""};
  for (int n : {1, 2}) {
    for (double eps : {0.05, 0.2}) {
      std::string reference;
      for (int threads : {1, 2, 8}) {
        parallel::set_thread_count(threads);
        const std::string csv = criterion1_run(n, eps).to_csv();
        if (reference.empty()) reference = csv;
        else if (csv != reference) {
          out.pass = false;
          out.detail += "n=" + std::to_string(n) + " eps=" + fmt("%g", eps) + " differs at " +
                        std::to_string(threads) + " threads; ";
        }
      }
    }
  }
  parallel::set_thread_count(0);
  if (out.pass) out.detail = "4 runs byte-identical across 1, 2, 8 threads";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"energy conservation", energy_conservation},
      {"representation equivalence", representation_equivalence},
      {"diagonalizer validity", diagonalizer_validity},
      {"coupled example roots", coupled_roots},
      {"nonlinear cross-validation", nonlinear_cross_validation},
      {"small-data regularity", small_data_regularity},
      {"s' identity", sprime_identity},
      {"data-class suite", data_class_suite},
      {"time reversal", time_reversal},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
