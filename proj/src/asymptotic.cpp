#include "kirchhoff/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/ode.hpp"
#include "kirchhoff/parallel.hpp"

namespace kirchhoff {

namespace {

using Cd = std::complex<double>;

struct Hermite {
  double s0, s1, d0, d1, h;

  double value(double x) const {
    const double x2 = x * x, x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * s0 + (x3 - 2 * x2 + x) * h * d0 + (-2 * x3 + 3 * x2) * s1 +
           (x3 - x2) * h * d1;
  }
  // h s'(x) = c2 x^2 + c1 x + c0
  std::array<double, 3> slope_coeffs() const {
    return {h * d0, -6 * s0 - 4 * h * d0 + 6 * s1 - 2 * h * d1, 6 * s0 + 3 * h * d0 - 6 * s1 + 3 * h * d1};
  }
  double slope(double x) const {
    const auto c = slope_coeffs();
    return (c[2] * x * x + c[1] * x + c[0]) / h;
  }
  // Roots of s' strictly inside (0, 1), ascending.
  std::vector<double> slope_roots() const {
    const auto c = slope_coeffs();
    std::vector<double> roots;
    const double scale = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
    if (scale == 0.0) return roots;
    if (std::abs(c[2]) <= 1e-14 * scale) {
      if (std::abs(c[1]) > 1e-14 * scale) roots.push_back(-c[0] / c[1]);
    } else {
      const double disc = c[1] * c[1] - 4 * c[2] * c[0];
      if (disc > 0.0) {
        const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
        roots.push_back(q / c[2]);
        if (q != 0.0) roots.push_back(c[0] / q);
      }
    }
    std::vector<double> inside;
    for (double r : roots) {
      if (r > 1e-12 && r < 1.0 - 1e-12) inside.push_back(r);
    }
    std::sort(inside.begin(), inside.end());
    return inside;
  }
};

void check_times(const CoefficientPath& path, const std::vector<double>& times, const char* who) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || times[i] > path.horizon() * (1.0 + 1e-12)) {
      throw InvalidArgumentError(std::string(who) + ": output time outside [0, T]");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw InvalidArgumentError(std::string(who) + ": output times must increase strictly");
    }
  }
}

struct Block {
  std::size_t a;
  std::size_t r0;
  std::size_t r1;
};

std::vector<Block> make_blocks(const Grid& g, std::size_t block) {
  block = std::max<std::size_t>(block, 1);
  std::vector<Block> out;
  for (std::size_t a = 0; a < g.angular_count(); ++a) {
    for (std::size_t r = 0; r < g.radial_count(); r += block) {
      out.push_back({a, r, std::min(r + block, g.radial_count())});
    }
  }
  return out;
}

template <class F>
void with_block_context(const Grid& g, const Block& b, F&& body) {
  auto context = [&] {
    const Direction& w = g.directions()[b.a];
    std::ostringstream os;
    os << " [direction (" << w[0] << ", " << w[1] << ", " << w[2] << "), rho in ["
       << g.radial_nodes()[b.r0] << ", " << g.radial_nodes()[b.r1 - 1] << "]]";
    return os.str();
  };
  try {
    body();
  } catch (const StiffnessError& e) {
    throw StiffnessError(e.what() + context());
  } catch (const IntegratorFailureError& e) {
    throw IntegratorFailureError(e.what() + context());
  }
}

void check_inputs(const SymbolMatrix& a, const SpectralField& u0, const char* who) {
  if (u0.components() != a.order()) {
    throw DimensionError(std::string(who) + ": data has " + std::to_string(u0.components()) +
                         " components, symbol order is " + std::to_string(a.order()));
  }
  u0.require_finite();
}

double data_scale(const SpectralField& u0) {
  double m = 0.0;
  for (const Cd& v : u0.values()) m = std::max(m, std::abs(v));
  return m > 0.0 ? m : 1.0;
}

}  // namespace

CoefficientPath::CoefficientPath(std::vector<double> times, std::vector<double> s,
                                 std::vector<double> s_prime)
    : times_(std::move(times)), s_(std::move(s)), sp_(std::move(s_prime)) {
  if (times_.size() < 2) throw InvalidArgumentError("CoefficientPath: need at least two checkpoints");
  if (s_.size() != times_.size() || sp_.size() != times_.size()) {
    throw InvalidArgumentError("CoefficientPath: column lengths differ");
  }
  if (times_.front() != 0.0) throw InvalidArgumentError("CoefficientPath: first checkpoint must be t = 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw InvalidArgumentError("CoefficientPath: checkpoint times must increase strictly");
    }
    if (!std::isfinite(s_[i]) || !std::isfinite(sp_[i])) {
      throw InvalidArgumentError("CoefficientPath: non-finite s or s'");
    }
    if (s_[i] < 0.0) throw InvalidArgumentError("CoefficientPath: s must be nonnegative");
  }
}

CoefficientPath CoefficientPath::frozen(double s0, double horizon, std::size_t intervals) {
  return linear(s0, 0.0, horizon, intervals);
}

CoefficientPath CoefficientPath::linear(double s0, double slope, double horizon,
                                        std::size_t intervals) {
  if (!(horizon > 0.0)) throw InvalidArgumentError("CoefficientPath: horizon must be positive");
  if (intervals < 1) throw InvalidArgumentError("CoefficientPath: need at least one interval");
  std::vector<double> t(intervals + 1), s(intervals + 1), sp(intervals + 1, slope);
  for (std::size_t i = 0; i <= intervals; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
    s[i] = s0 + slope * t[i];
  }
  return CoefficientPath(std::move(t), std::move(s), std::move(sp));
}

CoefficientPath CoefficientPath::from_trajectory(const Trajectory& traj) {
  return CoefficientPath(traj.times, traj.s, traj.s_prime);
}

std::size_t CoefficientPath::interval(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(i, times_.size() - 2);
}

double CoefficientPath::s(double t) const {
  const std::size_t i = interval(t);
  const double h = times_[i + 1] - times_[i];
  return Hermite{s_[i], s_[i + 1], sp_[i], sp_[i + 1], h}.value((t - times_[i]) / h);
}

double CoefficientPath::s_prime(double t) const {
  const std::size_t i = interval(t);
  const double h = times_[i + 1] - times_[i];
  return Hermite{s_[i], s_[i + 1], sp_[i], sp_[i + 1], h}.slope((t - times_[i]) / h);
}

std::vector<std::pair<double, double>> CoefficientPath::monotone_pieces() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    const double h = times_[i + 1] - times_[i];
    const Hermite p{s_[i], s_[i + 1], sp_[i], sp_[i + 1], h};
    double left = times_[i];
    for (double x : p.slope_roots()) {
      out.emplace_back(left, times_[i] + x * h);
      left = times_[i] + x * h;
    }
    out.emplace_back(left, times_[i + 1]);
  }
  return out;
}

double CoefficientPath::total_variation() const {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    const double h = times_[i + 1] - times_[i];
    const Hermite p{s_[i], s_[i + 1], sp_[i], sp_[i + 1], h};
    double v0 = s_[i];
    for (double x : p.slope_roots()) {
      const double v = p.value(x);
      tv += std::abs(v - v0);
      v0 = v;
    }
    tv += std::abs(s_[i + 1] - v0);
  }
  return tv;
}

bool CoefficientPath::is_frozen() const {
  for (std::size_t i = 0; i < s_.size(); ++i) {
    if (sp_[i] != 0.0 || s_[i] != s_[0]) return false;
  }
  return true;
}

double CoefficientPath::sup_difference(const CoefficientPath& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    d = std::max(d, std::abs(s_[i] - other.s(times_[i])));
  }
  return d;
}

Eigen::VectorXd phase_integrals(const CoefficientPath& path, const SymbolMatrix& a,
                                const Direction& omega, double t, double tol) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  // Positions of the Gauss nodes inside the Kronrod node list.
  static const std::vector<std::size_t> gauss_index = [] {
    std::vector<std::size_t> idx;
    for (double g : G::abscissa()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < GK::abscissa().size(); ++i) {
        if (std::abs(GK::abscissa()[i] - g) < std::abs(GK::abscissa()[best] - g)) best = i;
      }
      idx.push_back(best);
    }
    return idx;
  }();
  const auto& wg = G::weights();
  const auto m = static_cast<Eigen::Index>(a.order());

  std::function<Eigen::VectorXd(double, double, int)> panel = [&](double lo, double hi,
                                                                 int depth) -> Eigen::VectorXd {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    std::vector<Eigen::VectorXd> plus(x.size()), minus(x.size());
    Eigen::VectorXd k = Eigen::VectorXd::Zero(m), g = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < x.size(); ++i) {
      plus[i] = characteristic_roots(a, path.s(c + r * x[i]), omega);
      minus[i] = i == 0 ? plus[i] : characteristic_roots(a, path.s(c - r * x[i]), omega);
      k += wk[i] * (i == 0 ? plus[i] : Eigen::VectorXd(plus[i] + minus[i]));
    }
    for (std::size_t j = 0; j < gauss_index.size(); ++j) {
      const std::size_t i = gauss_index[j];
      g += wg[j] * (i == 0 ? plus[i] : Eigen::VectorXd(plus[i] + minus[i]));
    }
    k *= r;
    g *= r;
    if (depth >= 30 || (k - g).cwiseAbs().maxCoeff() <= tol * (hi - lo) / std::max(t, 1e-300)) return k;
    return Eigen::VectorXd(panel(lo, c, depth + 1) + panel(c, hi, depth + 1));
  };

  Eigen::VectorXd psi = Eigen::VectorXd::Zero(m);
  if (t <= 0.0) return psi;
  const auto& times = path.times();
  for (std::size_t i = 0; i + 1 < times.size() && times[i] < t; ++i) {
    const double lo = times[i], hi = std::min(times[i + 1], t);
    if (hi > lo) psi += panel(lo, hi, 0);
  }
  if (t > times.back()) psi += panel(times.back(), t, 0);
  return psi;
}

Eigen::MatrixXcd diagonalizer_ds(const SymbolMatrix& a, double s, const Direction& omega) {
  const double h = a.fd_step();
  if (s - h < 0.0) {
    return (-3.0 * diagonalizer(a, s, omega).n + 4.0 * diagonalizer(a, s + h, omega).n -
            diagonalizer(a, s + 2.0 * h, omega).n) /
           (2.0 * h);
  }
  return (diagonalizer(a, s + h, omega).n - diagonalizer(a, s - h, omega).n) / (2.0 * h);
}

Eigen::MatrixXcd perturbation_matrix(const CoefficientPath& path, const SymbolMatrix& a, double t,
                                     const Direction& omega, double rho) {
  if (!(t >= 0.0 && t <= path.horizon() * (1.0 + 1e-12))) {
    throw InvalidArgumentError("perturbation_matrix: t outside [0, T]");
  }
  const auto m = static_cast<Eigen::Index>(a.order());
  const double sp = path.s_prime(t);
  if (sp == 0.0) return Eigen::MatrixXcd::Zero(m, m);
  const double s = path.s(t);
  const Diagonalization d = diagonalizer(a, s, omega);
  const Eigen::MatrixXcd dtn_ninv = diagonalizer_ds(a, s, omega) * sp * d.n_inv;
  const Eigen::VectorXd psi = phase_integrals(path, a, omega, t);
  Eigen::MatrixXcd c(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      c(k, l) = Cd(0.0, -1.0) * dtn_ninv(k, l) * std::polar(1.0, rho * (psi[l] - psi[k]));
    }
  }
  return c;
}

double AmplitudeSet::phase(std::size_t time_index, std::size_t mode, std::size_t k) const {
  const std::size_t nr = grid->radial_count();
  return grid->radial_nodes()[mode % nr] * psi[time_index][mode / nr][static_cast<Eigen::Index>(k)];
}

AsymptoticSolution solve_asymptotic(const CoefficientPath& path, const SymbolMatrix& a,
                                    const SpectralField& u0, const std::vector<double>& times,
                                    const LinearSolveOptions& options) {
  check_inputs(a, u0, "solve_asymptotic");
  check_times(path, times, "solve_asymptotic");
  const Grid& g = u0.grid();
  const auto m = static_cast<Eigen::Index>(a.order());
  const std::size_t nr = g.radial_count();

  AsymptoticSolution out;
  out.snapshots.assign(times.size(), SpectralField(u0.grid_ptr(), a.order()));
  AmplitudeSet& amp = out.amplitudes;
  amp.grid = u0.grid_ptr();
  amp.order = a.order();
  amp.times = times;
  amp.psi.assign(times.size(), std::vector<Eigen::VectorXd>(g.angular_count()));
  if (options.keep_amplitudes) {
    amp.amplitudes.assign(times.size(), std::vector<Eigen::MatrixXcd>(g.mode_count()));
  }

  const std::vector<Block> blocks = make_blocks(g, options.radial_block);
  const bool frozen = path.is_frozen();

  parallel::for_each_index(blocks.size(), [&](std::size_t bi) {
    const Block& b = blocks[bi];
    with_block_context(g, b, [&] {
      const Direction& omega = g.directions()[b.a];
      const std::size_t count = b.r1 - b.r0;
      const Eigen::Index mm = m * m;
      Eigen::VectorXcd y(m + static_cast<Eigen::Index>(count) * mm);
      y.head(m).setZero();
      const Diagonalization d0 = diagonalizer(a, path.s(0.0), omega);
      for (std::size_t r = 0; r < count; ++r) {
        y.segment(m + static_cast<Eigen::Index>(r) * mm, mm) = d0.n.reshaped();
      }

      auto rhs = [&](double t, const Eigen::VectorXcd& state, Eigen::VectorXcd& dy) {
        const double s = path.s(t);
        dy.head(m) = characteristic_roots(a, s, omega).cast<Cd>();
        const double sp = frozen ? 0.0 : path.s_prime(t);
        if (sp == 0.0) {
          dy.tail(dy.size() - m).setZero();
          return;
        }
        const Eigen::MatrixXcd mt = diagonalizer_ds(a, s, omega) * sp * diagonalizer(a, s, omega).n_inv;
        Eigen::MatrixXcd k(m, m);
        Eigen::VectorXcd e(m);
        for (std::size_t r = 0; r < count; ++r) {
          const double rho = g.radial_nodes()[b.r0 + r];
          for (Eigen::Index j = 0; j < m; ++j) e[j] = std::polar(1.0, rho * state[j].real());
          for (Eigen::Index p = 0; p < m; ++p) {
            for (Eigen::Index q = 0; q < m; ++q) k(p, q) = mt(p, q) * e[q] / e[p];
          }
          const auto off = m + static_cast<Eigen::Index>(r) * mm;
          dy.segment(off, mm).reshaped(m, m) = k * state.segment(off, mm).reshaped(m, m);
        }
      };

      auto observe = [&](std::size_t idx, double t, const Eigen::VectorXcd& state) {
        const Eigen::VectorXd psi = state.head(m).real();
        if (b.r0 == 0) amp.psi[idx][b.a] = psi;
        const Eigen::MatrixXcd ninv = diagonalizer(a, path.s(t), omega).n_inv;
        for (std::size_t r = 0; r < count; ++r) {
          const std::size_t mode = b.a * nr + b.r0 + r;
          const double rho = g.radial_nodes()[b.r0 + r];
          const auto off = m + static_cast<Eigen::Index>(r) * mm;
          const Eigen::MatrixXcd amps = state.segment(off, mm).reshaped(m, m);
          Eigen::VectorXcd phased = amps * u0.mode_vector(mode);
          for (Eigen::Index j = 0; j < m; ++j) phased[j] *= std::polar(1.0, rho * psi[j]);
          out.snapshots[idx].set_mode_vector(mode, ninv * phased);
          if (options.keep_amplitudes) amp.amplitudes[idx][mode] = amps;
        }
      };

      OdeOptions ode;
      ode.rtol = options.tol;
      ode.atol = options.tol;
      DormandPrince(ode).integrate(rhs, 0.0, y, times, observe);
    });
  }, 1);
  return out;
}

std::vector<SpectralField> direct_mode_solve(const CoefficientPath& path, const SymbolMatrix& a,
                                             const SpectralField& u0,
                                             const std::vector<double>& times,
                                             const LinearSolveOptions& options) {
  check_inputs(a, u0, "direct_mode_solve");
  check_times(path, times, "direct_mode_solve");
  const Grid& g = u0.grid();
  const auto m = static_cast<Eigen::Index>(a.order());
  const std::size_t nr = g.radial_count();
  std::vector<SpectralField> out(times.size(), SpectralField(u0.grid_ptr(), a.order()));
  const std::vector<Block> blocks = make_blocks(g, options.radial_block);
  const double scale = data_scale(u0);

  parallel::for_each_index(blocks.size(), [&](std::size_t bi) {
    const Block& b = blocks[bi];
    with_block_context(g, b, [&] {
      const Direction& omega = g.directions()[b.a];
      const std::size_t count = b.r1 - b.r0;
      Eigen::VectorXcd y(static_cast<Eigen::Index>(count) * m);
      for (std::size_t r = 0; r < count; ++r) {
        y.segment(static_cast<Eigen::Index>(r) * m, m) = u0.mode_vector(b.a * nr + b.r0 + r);
      }
      auto rhs = [&](double t, const Eigen::VectorXcd& state, Eigen::VectorXcd& dy) {
        const Eigen::MatrixXcd sym = Cd(0.0, 1.0) * a(path.s(t), omega);
        for (std::size_t r = 0; r < count; ++r) {
          const auto off = static_cast<Eigen::Index>(r) * m;
          dy.segment(off, m) = g.radial_nodes()[b.r0 + r] * (sym * state.segment(off, m));
        }
      };
      auto observe = [&](std::size_t idx, double, const Eigen::VectorXcd& state) {
        for (std::size_t r = 0; r < count; ++r) {
          out[idx].set_mode_vector(b.a * nr + b.r0 + r,
                                   state.segment(static_cast<Eigen::Index>(r) * m, m));
        }
      };
      OdeOptions ode;
      ode.rtol = options.tol;
      ode.atol = options.tol * scale;
      DormandPrince(ode).integrate(rhs, 0.0, y, times, observe);
    });
  }, 1);
  return out;
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
  if (!a.same_layout(b)) throw DimensionError("l2_distance: layouts differ");
  return std::sqrt(sobolev_norm_sq(a - b, 0.0));
}

}  // namespace kirchhoff
