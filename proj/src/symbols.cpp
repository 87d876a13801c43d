#include "kirchhoff/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

using Cd = std::complex<double>;

std::string where(double s, const Direction& w) {
  std::ostringstream os;
  os.precision(6);
  os << " at s = " << s << ", omega = (" << w[0] << ", " << w[1] << ", " << w[2] << ")";
  return os.str();
}

struct SortedEigen {
  Eigen::VectorXd roots;
  Eigen::MatrixXcd right;  // columns ordered to match roots
};

SortedEigen sorted_real_eigen(const SymbolMatrix& a, double s, const Direction& omega,
                              bool want_vectors) {
  const Eigen::MatrixXcd mat = a(s, omega);
  const auto m = mat.rows();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(mat, want_vectors);
  if (solver.info() != Eigen::Success) {
    throw NotHyperbolicError("eigenvalue solver failed" + where(s, omega));
  }
  const Eigen::VectorXcd& lambda = solver.eigenvalues();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) radius = std::max(radius, std::abs(lambda[i]));
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(lambda[i].imag()) > kImagTolerance * std::max(radius, 1e-300)) {
      std::ostringstream os;
      os << "characteristic root " << lambda[i] << " is not real" << where(s, omega);
      throw NotHyperbolicError(os.str());
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return lambda[i].real() < lambda[j].real(); });
  SortedEigen out;
  out.roots.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) out.roots[k] = lambda[order[static_cast<std::size_t>(k)]].real();
  for (Eigen::Index k = 1; k < m; ++k) {
    if (out.roots[k] - out.roots[k - 1] < kGapTolerance * radius || radius == 0.0) {
      std::ostringstream os;
      os << "roots " << out.roots[k - 1] << " and " << out.roots[k] << " are near-degenerate"
         << where(s, omega);
      throw NearDegeneracyError(os.str());
    }
  }
  if (want_vectors) {
    out.right.resize(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      out.right.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

}  // namespace

SymbolMatrix::SymbolMatrix(std::string name, std::size_t order, Eval eval, double s_max,
                           double lipschitz_bound)
    : name_(std::move(name)), m_(order), eval_(std::move(eval)), s_max_(s_max),
      lipschitz_(lipschitz_bound) {
  if (m_ == 0) throw InvalidArgumentError("SymbolMatrix: order must be >= 1");
  if (!(s_max_ > 0.0)) throw InvalidArgumentError("SymbolMatrix: s_max must be positive");
  if (!eval_) throw InvalidArgumentError("SymbolMatrix: empty evaluator");
}

Eigen::MatrixXcd SymbolMatrix::operator()(double s, const Direction& omega) const {
  Eigen::MatrixXcd a = eval_(s, omega);
  if (a.rows() != static_cast<Eigen::Index>(m_) || a.cols() != static_cast<Eigen::Index>(m_)) {
    throw DimensionError("symbol '" + name_ + "' returned a matrix of the wrong size");
  }
  if (!a.allFinite()) {
    throw InvalidArgumentError("symbol '" + name_ + "' is not finite" + where(s, omega));
  }
  return a;
}

Eigen::MatrixXcd SymbolMatrix::ds(double s, const Direction& omega) const {
  const double h = fd_step();
  if (s - h < 0.0) {
    return (-3.0 * (*this)(s, omega) + 4.0 * (*this)(s + h, omega) - (*this)(s + 2.0 * h, omega)) /
           (2.0 * h);
  }
  return ((*this)(s + h, omega) - (*this)(s - h, omega)) / (2.0 * h);
}

Eigen::VectorXd characteristic_roots(const SymbolMatrix& a, double s, const Direction& omega) {
  return sorted_real_eigen(a, s, omega, false).roots;
}

double hyperbolicity_gap(const SymbolMatrix& a, const std::vector<double>& s_samples,
                         const std::vector<Direction>& omega_samples) {
  if (s_samples.empty() || omega_samples.empty()) {
    throw InvalidArgumentError("hyperbolicity_gap: empty sample set");
  }
  if (a.order() == 1) return kNoPairGap;
  double gap = kNoPairGap;
  for (double s : s_samples) {
    for (const Direction& w : omega_samples) {
      const Eigen::VectorXd r = characteristic_roots(a, s, w);
      for (Eigen::Index k = 1; k < r.size(); ++k) gap = std::min(gap, r[k] - r[k - 1]);
    }
  }
  return gap;
}

Diagonalization diagonalizer(const SymbolMatrix& a, double s, const Direction& omega) {
  SortedEigen eig = sorted_real_eigen(a, s, omega, true);
  const auto m = eig.roots.size();
  Diagonalization d;
  d.roots = eig.roots;
  d.n = eig.right.partialPivLu().inverse();
  for (Eigen::Index k = 0; k < m; ++k) {
    const double norm = d.n.row(k).norm();
    d.n.row(k) /= norm;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Cd lead = d.n(k, j);
      if (std::abs(lead) > 1e-8) {
        d.n.row(k) *= std::conj(lead) / std::abs(lead);
        d.n(k, j) = Cd(std::abs(d.n(k, j)), 0.0);
        break;
      }
    }
  }
  auto lu = d.n.partialPivLu();
  d.n_inv = lu.inverse();
  d.det_abs = std::abs(lu.determinant());
  return d;
}

SymbolMatrix companion_symbol(std::vector<DirectionProfile> h, double s_max,
                              double lipschitz_bound, std::string name) {
  const std::size_t m = h.size();
  if (m == 0) throw InvalidArgumentError("companion_symbol: need at least one coefficient");
  auto eval = [h = std::move(h)](double s, const Direction& omega) {
    const auto m = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) a(i, i + 1) = 1.0;
    // Last row: (-H_m, -H_{m-1}, ..., -H_1).
    for (Eigen::Index j = 0; j < m; ++j) a(m - 1, j) = -h[static_cast<std::size_t>(m - 1 - j)](s, omega);
    return a;
  };
  return SymbolMatrix(std::move(name), m, std::move(eval), s_max, lipschitz_bound);
}

SymbolMatrix scalar_kirchhoff_symbol(double s_max) {
  std::vector<DirectionProfile> h{
      [](double, const Direction&) { return 0.0; },
      [](double s, const Direction&) { return -(1.0 + s); },
  };
  return companion_symbol(std::move(h), s_max, 1.0, "scalar_kirchhoff");
}

CoupledSymbol coupled_symbol(double a1, double a2, DirectionProfile p1, DirectionProfile p2,
                             int dimension, double s_max, int sphere_count, int s_count) {
  if (!(a1 > 0.0 && a2 > 0.0)) throw InvalidArgumentError("coupled_symbol: a1, a2 must be positive");
  if (a1 == a2) throw InvalidArgumentError("coupled_symbol: a1 must differ from a2");
  if (s_count < 1) throw InvalidArgumentError("coupled_symbol: need at least one s sample");

  AssumptionReport report;
  report.discriminant_inf = std::numeric_limits<double>::infinity();
  report.product_inf = std::numeric_limits<double>::infinity();
  const std::vector<Direction> dirs = sphere_samples(dimension, sphere_count);
  report.sphere_samples = dirs.size();
  report.s_samples = static_cast<std::size_t>(s_count);
  for (int i = 0; i < s_count; ++i) {
    const double s = s_count == 1 ? 0.0 : s_max * i / (s_count - 1);
    for (const Direction& w : dirs) {
      const double prod = p1(s, w) * p2(s, w);
      report.discriminant_inf = std::min(report.discriminant_inf, (a1 - a2) * (a1 - a2) + 4.0 * prod);
      report.product_inf = std::min(report.product_inf, a1 * a1 * a2 * a2 - prod);
    }
  }
  report.passed = report.discriminant_inf > 0.0 && report.product_inf > 0.0;
  if (!report.passed) {
    std::ostringstream os;
    os << "coupled_symbol: assumption violated (inf (a1-a2)^2+4P1P2 = " << report.discriminant_inf
       << ", inf a1^2 a2^2 - P1P2 = " << report.product_inf << ")";
    throw AssumptionViolationError(os.str());
  }
  // Real inner roots need c1^2 c2^2 > P1 P2, i.e. a1 a2 (1 + s)^2 > P1 P2.
  for (int i = 0; i < s_count; ++i) {
    const double s = s_count == 1 ? 0.0 : s_max * i / (s_count - 1);
    for (const Direction& w : dirs) {
      const double prod = p1(s, w) * p2(s, w);
      if (!(a1 * a2 * (1.0 + s) * (1.0 + s) > prod)) {
        std::ostringstream os;
        os << "coupled_symbol: a1 a2 (1+s)^2 - P1P2 = " << a1 * a2 * (1.0 + s) * (1.0 + s) - prod
           << " <= 0 at s = " << s << " (complex characteristic roots)";
        throw NotHyperbolicError(os.str());
      }
    }
  }

  auto eval = [a1, a2, p1 = std::move(p1), p2 = std::move(p2)](double s, const Direction& w) {
    const Cd i(0.0, 1.0);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    a(0, 1) = -i;
    a(1, 0) = i * a1 * (1.0 + s);
    a(1, 2) = i * p1(s, w);
    a(2, 3) = -i;
    a(3, 0) = i * p2(s, w);
    a(3, 2) = i * a2 * (1.0 + s);
    return a;
  };
  return CoupledSymbol{SymbolMatrix("coupled_example22", 4, std::move(eval), s_max, std::max(a1, a2)),
                       report};
}

Eigen::VectorXd coupled_closed_form_roots(double a1, double a2, double s, double p1p2) {
  const double c1 = a1 * (1.0 + s);
  const double c2 = a2 * (1.0 + s);
  const double disc = std::sqrt((c1 - c2) * (c1 - c2) + 4.0 * p1p2);
  const double outer = std::sqrt(0.5 * (c1 + c2 + disc));
  const double inner = std::sqrt(0.5 * (c1 + c2 - disc));
  Eigen::VectorXd r(4);
  r << -outer, -inner, inner, outer;
  return r;
}

}  // namespace kirchhoff
