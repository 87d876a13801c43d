#include "kirchhoff/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kirchhoff/parallel.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

namespace {

using Cd = std::complex<double>;

double inf_norm(const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

std::vector<Direction> directions_for(int dimension, int sphere_count) {
  return sphere_samples(dimension, sphere_count > 0 ? sphere_count : default_sphere_sample_count(dimension));
}

void check_form(const SymbolMatrix& a, const HermitianForm& s, const SpectralField& u0,
                const char* who) {
  if (s.size() != a.order()) {
    throw DimensionError(std::string(who) + ": form size " + std::to_string(s.size()) +
                         " differs from symbol order " + std::to_string(a.order()));
  }
  if (u0.components() != a.order()) {
    throw DimensionError(std::string(who) + ": data components differ from symbol order");
  }
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

SymbolClassParams class_estimates(const CoefficientPath& path, const SymbolMatrix& a, int dimension,
                                  int sphere_count) {
  const std::vector<Direction> dirs = directions_for(dimension, sphere_count);
  const auto& times = path.times();

  std::vector<double> lam(times.size());
  parallel::for_each_index(times.size(), [&](std::size_t k) {
    double best = 0.0;
    for (const Direction& w : dirs) best = std::max(best, inf_norm(a(path.s_values()[k], w)));
    lam[k] = best;
  }, 4);

  SymbolClassParams out;
  out.lambda = *std::max_element(lam.begin(), lam.end());
  if (path.is_frozen()) return out;

  const auto pieces = path.monotone_pieces();
  const QuadratureRule gl = gauss_legendre(4);
  std::vector<double> terms(pieces.size());
  parallel::for_each_index(pieces.size(), [&](std::size_t p) {
    const auto [lo, hi] = pieces[p];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = mid + half * gl.nodes[q];
      const double sp = std::abs(path.s_prime(t));
      if (sp == 0.0) continue;
      const double s = path.s(t);
      double best = 0.0;
      for (const Direction& w : dirs) best = std::max(best, inf_norm(a.ds(s, w)));
      sum += gl.weights[q] * best * sp;
    }
    terms[p] = half * sum;
  }, 4);
  out.k = parallel::pairwise_sum(terms);
  return out;
}

double default_lambda_budget(const SymbolMatrix& a, double s0, int dimension, int sphere_count) {
  double best = 0.0;
  for (const Direction& w : directions_for(dimension, sphere_count)) best = std::max(best, inf_norm(a(s0, w)));
  return 2.0 * best;
}

void IterationReport::validate() const {
  if (sup_diffs.size() != iterations || lambda_est.size() != iterations || k_est.size() != iterations) {
    throw InvalidArgumentError("IterationReport: per-iterate columns differ in length");
  }
  if (contraction_ratios.size() != (iterations > 0 ? iterations - 1 : 0)) {
    throw InvalidArgumentError("IterationReport: wrong number of contraction ratios");
  }
  for (std::size_t k = 1; k < iterations; ++k) {
    const double want = ratio(sup_diffs[k], sup_diffs[k - 1]);
    if (std::abs(contraction_ratios[k - 1] - want) > 1e-12 * std::max(1.0, std::abs(want))) {
      throw InvalidArgumentError("IterationReport: contraction ratio inconsistent with differences");
    }
  }
}

nlohmann::json IterationReport::to_json() const {
  nlohmann::json j;
  j["iterates"] = iterations;
  j["sup_diffs"] = sup_diffs;
  j["lambda_est"] = lambda_est;
  j["k_est"] = k_est;
  j["contraction_ratios"] = contraction_ratios;
  j["converged"] = converged;
  j["tol"] = tol;
  j["budget"] = {{"lambda", budget.lambda}, {"k0", budget.k}};
  j["within_budget"] = within_budget;
  return j;
}

ThetaOutput theta_evaluate(const CoefficientPath& path, const SymbolMatrix& a, const HermitianForm& s,
                           const SpectralField& u0, const LinearSolveOptions& options) {
  check_form(a, s, u0, "theta_map");
  const std::vector<double>& times = path.times();
  std::vector<SpectralField> snaps = direct_mode_solve(path, a, u0, times, options);
  const Grid& g = u0.grid();
  const std::size_t nr = g.radial_count();
  const Eigen::MatrixXcd& sm = s.matrix();

  std::vector<double> sv(times.size()), spv(times.size()), l2(times.size());
  parallel::for_each_index(times.size(), [&](std::size_t k) {
    const double sk = path.s_values()[k];
    std::vector<double> q(g.mode_count()), qp(g.mode_count()), nn(g.mode_count());
    for (std::size_t ai = 0; ai < g.angular_count(); ++ai) {
      const Eigen::MatrixXcd sym = Cd(0.0, 1.0) * a(sk, g.directions()[ai]);
      for (std::size_t r = 0; r < nr; ++r) {
        const std::size_t mode = ai * nr + r;
        const double w = g.volume_weights()[mode];
        const Eigen::VectorXcd u = snaps[k].mode_vector(mode);
        const Eigen::VectorXcd su = sm * u;
        q[mode] = w * u.dot(su).real();
        qp[mode] = 2.0 * w * g.radial_nodes()[r] * su.dot(sym * u).real();
        nn[mode] = w * u.squaredNorm();
      }
    }
    sv[k] = parallel::pairwise_sum(q);
    spv[k] = parallel::pairwise_sum(qp);
    l2[k] = parallel::pairwise_sum(nn);
  }, 1);
  return ThetaOutput{CoefficientPath(times, std::move(sv), std::move(spv)), std::move(l2), std::move(snaps)};
}

CoefficientPath theta_map(const CoefficientPath& path, const SymbolMatrix& a, const HermitianForm& s,
                          const SpectralField& u0, const LinearSolveOptions& options) {
  return theta_evaluate(path, a, s, u0, options).path;
}

NonlinearResult solve_nonlinear(const SymbolMatrix& a, const HermitianForm& s,
                                const SpectralField& u0, double horizon,
                                const FixedPointOptions& options) {
  check_form(a, s, u0, "solve_nonlinear");
  if (!(horizon > 0.0)) throw InvalidArgumentError("solve_nonlinear: horizon must be positive");
  if (options.max_iter < 1) throw InvalidArgumentError("solve_nonlinear: max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw InvalidArgumentError("solve_nonlinear: tol must be positive");
  const int n = u0.grid().dimension();
  const double s0 = quadratic_form(s, u0);

  IterationReport report;
  report.tol = options.tol;
  report.budget.lambda = options.lambda > 0.0 ? options.lambda
                                               : default_lambda_budget(a, s0, n, options.sphere_samples);
  report.budget.k = options.k0;

  CoefficientPath path = CoefficientPath::frozen(s0, horizon, options.checkpoint_intervals);
  std::optional<ThetaOutput> last;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    ThetaOutput out = theta_evaluate(path, a, s, u0, options.linear);
    const double diff = out.path.sup_difference(path);
    const SymbolClassParams est = class_estimates(out.path, a, n, options.sphere_samples);
    if (!report.sup_diffs.empty()) report.contraction_ratios.push_back(ratio(diff, report.sup_diffs.back()));
    report.sup_diffs.push_back(diff);
    report.lambda_est.push_back(est.lambda);
    report.k_est.push_back(est.k);
    report.within_budget = report.within_budget && est.lambda <= report.budget.lambda && est.k <= report.budget.k;
    report.iterations = it + 1;
    path = out.path;
    last = std::move(out);
    if (diff < options.tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) {
    std::ostringstream os;
    os << "solve_nonlinear: no convergence after " << report.iterations
       << " iterations (last sup difference " << report.sup_diffs.back() << ", tol " << options.tol << ")";
    throw ConvergenceError(os.str(), report);
  }

  Trajectory traj;
  traj.kind = NonlocalKind::gradient;
  traj.times = path.times();
  traj.s = path.s_values();
  traj.s_prime = path.s_primes();
  traj.grad_sq_prime = path.s_primes();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double sk = traj.s[k], nk = last->l2_sq[k];
    traj.energy.push_back(nk + 0.5 * sk * sk);
    traj.h1_norm.push_back(std::sqrt(std::max(sk, 0.0)));
    traj.l2_velocity.push_back(std::sqrt(std::max(nk - sk, 0.0)));
  }
  traj.validate();
  return NonlinearResult{std::move(traj), std::move(report), std::move(path)};
}

std::vector<SPrimeTerms> sprime_decomposition(const CoefficientPath& path, const SymbolMatrix& a,
                                              const HermitianForm& s, const SpectralField& u0,
                                              const std::vector<double>& times,
                                              const LinearSolveOptions& options) {
  check_form(a, s, u0, "sprime_decomposition");
  LinearSolveOptions opt = options;
  opt.keep_amplitudes = true;
  const AsymptoticSolution asym = solve_asymptotic(path, a, u0, times, opt);
  const Grid& g = u0.grid();
  const std::size_t nr = g.radial_count();
  const auto m = static_cast<Eigen::Index>(a.order());
  const Eigen::MatrixXcd& sm = s.matrix();

  std::vector<SPrimeTerms> out(times.size());
  parallel::for_each_index(times.size(), [&](std::size_t k) {
    const double t = times[k];
    const double sv = path.s(t), sp = path.s_prime(t);
    std::vector<double> ti(g.mode_count()), tn(g.mode_count()), ta(g.mode_count());
    for (std::size_t ai = 0; ai < g.angular_count(); ++ai) {
      const Direction& w = g.directions()[ai];
      const Diagonalization d = diagonalizer(a, sv, w);
      const Eigen::MatrixXcd dn = sp == 0.0 ? Eigen::MatrixXcd::Zero(m, m)
                                            : Eigen::MatrixXcd(diagonalizer_ds(a, sv, w) * sp * d.n_inv);
      const Eigen::VectorXd& psi = asym.amplitudes.psi[k][ai];
      for (std::size_t r = 0; r < nr; ++r) {
        const std::size_t mode = ai * nr + r;
        const double rho = g.radial_nodes()[r];
        const double wt = g.volume_weights()[mode];
        Eigen::VectorXcd v = asym.amplitudes.amplitudes[k][mode] * u0.mode_vector(mode);
        for (Eigen::Index j = 0; j < m; ++j) v[j] *= std::polar(1.0, rho * psi[j]);
        const Eigen::VectorXcd u = d.n_inv * v;
        const Eigen::VectorXcd su = sm * u;
        const Eigen::VectorXcd du_phase = d.n_inv * (Cd(0.0, rho) * d.roots.cast<Cd>().cwiseProduct(v));
        const Eigen::VectorXcd mv = dn * v;
        const Eigen::VectorXcd du_diag = -(d.n_inv * mv);
        const Eigen::VectorXcd du_amp = d.n_inv * mv;
        ti[mode] = wt * su.dot(du_phase).real();
        tn[mode] = wt * su.dot(du_diag).real();
        ta[mode] = wt * su.dot(du_amp).real();
      }
    }
    SPrimeTerms& o = out[k];
    o.t = t;
    o.i = parallel::pairwise_sum(ti);
    o.j_diagonalizer = parallel::pairwise_sum(tn);
    o.j_amplitude = parallel::pairwise_sum(ta);
    o.j = o.j_diagonalizer + o.j_amplitude;
    o.s_prime = sp;
    o.residual = std::abs(sp - 2.0 * (o.i + o.j));
  }, 1);
  return out;
}

SPrimeTerms sprime_decomposition(const CoefficientPath& path, const SymbolMatrix& a,
                                 const HermitianForm& s, const SpectralField& u0, double t,
                                 const LinearSolveOptions& options) {
  return sprime_decomposition(path, a, s, u0, std::vector<double>{t}, options).front();
}

}  // namespace kirchhoff
