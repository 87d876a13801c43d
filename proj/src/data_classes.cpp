#include "kirchhoff/data_classes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/grid.hpp"
#include "kirchhoff/parallel.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kRadialOrder = 16;
constexpr int kTauOrder = 4;
// Panels of tau nodes evaluated by one task of the phasor recurrence.
constexpr std::size_t kTauChunk = 32;
constexpr double kMaxOscillatoryCut = 200.0;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double japanese(double tau) { return std::sqrt(1.0 + tau * tau); }

double log_pair(const Profile& a, const Profile& b, int power, double rho) {
  const double la = a.log_abs_radial(rho);
  const double lb = b.log_abs_radial(rho);
  if (la == kNegInf || lb == kNegInf) return kNegInf;
  return la + lb + power * std::log(rho);
}

struct Scan {
  bool zero = true;
  double log_max = kNegInf;
  double rho_cut = 0.0;
  /// d log f / d log rho near 0 and at the scan end (NaN where f vanishes).
  double origin_slope = std::numeric_limits<double>::quiet_NaN();
  double far_slope = std::numeric_limits<double>::quiet_NaN();
  bool hit_end = false;
};

double log_slope(const std::function<double(double)>& log_f, double a, double b) {
  const double la = log_f(a);
  const double lb = log_f(b);
  if (!std::isfinite(la) || !std::isfinite(lb)) return std::numeric_limits<double>::quiet_NaN();
  return (lb - la) / std::log(b / a);
}

// Geometric scan of log f on [1e-6, hi]; the cut is the first scan point beyond the last
// one where log f >= log_max + rel_log.
Scan scan_log(const std::function<double(double)>& log_f, double rel_log, double hi) {
  constexpr double kLo = 1e-6;
  constexpr double kRatio = 1.02;
  const std::size_t count =
      static_cast<std::size_t>(std::ceil(std::log(hi / kLo) / std::log(kRatio))) + 1;
  std::vector<double> rho(count);
  std::vector<double> values(count);
  Scan out;
  for (std::size_t i = 0; i < count; ++i) {
    rho[i] = std::min(hi, kLo * std::pow(kRatio, static_cast<double>(i)));
    values[i] = log_f(rho[i]);
    if (values[i] > out.log_max) out.log_max = values[i];
  }
  out.origin_slope = log_slope(log_f, 1e-8, 1e-7);
  out.far_slope = log_slope(log_f, hi / 2.0, hi);
  if (out.log_max == kNegInf) return out;
  out.zero = false;
  std::size_t last = 0;
  for (std::size_t i = 0; i < count; ++i)
    if (values[i] >= out.log_max + rel_log) last = i;
  out.hit_end = last + 1 >= count;
  out.rho_cut = out.hit_end ? hi : rho[last + 1];
  return out;
}

// Panels graded geometrically towards 0, uniform up to 8, then geometric to rho_end.
std::vector<double> radial_edges(double rho_end) {
  std::vector<double> edges{0.0};
  for (double e = 1e-8; e < std::min(0.25, rho_end); e *= 2.0) edges.push_back(e);
  double e = 0.25;
  while (e < std::min(8.0, rho_end)) {
    edges.push_back(e);
    e += 0.25;
  }
  e = std::max(e, 8.0);
  while (e < rho_end) {
    if (e > edges.back()) edges.push_back(e);
    e *= 1.15;
  }
  if (rho_end > edges.back()) edges.push_back(rho_end);
  return edges;
}

double radial_integral(const std::function<double(double)>& f, double rho_end, int refine) {
  const QuadratureRule base = gauss_legendre(kRadialOrder);
  const std::vector<double> edges = radial_edges(rho_end);
  std::vector<double> parts;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double width = (edges[p + 1] - edges[p]) / refine;
    for (int r = 0; r < refine; ++r) {
      const double a = edges[p] + r * width;
      double acc = 0.0;
      for (int i = 0; i < kRadialOrder; ++i) {
        const double rho = a + 0.5 * width * (1.0 + base.nodes[i]);
        acc += 0.5 * width * base.weights[i] * f(rho);
      }
      parts.push_back(acc);
    }
  }
  return parallel::pairwise_sum(parts);
}

// Nodes and weighted integrand values of h(rho) = g_a g_b rho^p on [0, rho_cut].
struct RadialSamples {
  std::vector<double> rho;
  std::vector<double> hw;
};

RadialSamples radial_samples(const Profile& a, const Profile& b, int power, double rho_cut,
                             double tau_max, double per_wavelength) {
  const double wanted = per_wavelength * tau_max * rho_cut / (2.0 * std::numbers::pi);
  const int panels = std::max(4, static_cast<int>(std::ceil(wanted / kRadialOrder)));
  const QuadratureRule rule = composite_gauss_legendre(panels, kRadialOrder, 0.0, rho_cut);
  RadialSamples out;
  out.rho = rule.nodes;
  out.hw.resize(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rho = rule.nodes[i];
    out.hw[i] = a.radial(rho) * b.radial(rho) * std::pow(rho, power) * rule.weights[i];
  }
  return out;
}

struct TauGrid {
  double panel = 0.0;
  std::size_t panels = 0;
  std::vector<double> offsets;
  std::vector<double> weights;

  std::size_t size() const { return panels * offsets.size(); }
  double tau(std::size_t idx) const {
    return panel * static_cast<double>(idx / offsets.size()) + offsets[idx % offsets.size()];
  }
  double weight(std::size_t idx) const { return weights[idx % weights.size()]; }
};

TauGrid tau_grid(double tau_max, double rho_cut, int refine) {
  TauGrid g;
  const double width = std::min(std::numbers::pi / (4.0 * rho_cut) / refine, tau_max / 16.0);
  g.panels = static_cast<std::size_t>(std::ceil(tau_max / width));
  g.panel = tau_max / static_cast<double>(g.panels);
  const QuadratureRule rule = gauss_legendre(kTauOrder, 0.0, g.panel);
  g.offsets = rule.nodes;
  g.weights = rule.weights;
  return g;
}

// R(tau) = sum_i hw_i e^{i tau rho_i} on every node of the tau grid, advancing each
// e^{i tau rho_i} panel by panel.
std::vector<Complex> fourier_on_grid(const RadialSamples& s, const TauGrid& g) {
  const std::size_t order = g.offsets.size();
  const std::size_t count = s.rho.size();
  std::vector<std::vector<double>> off_re(order, std::vector<double>(count));
  std::vector<std::vector<double>> off_im(order, std::vector<double>(count));
  std::vector<double> step_re(count);
  std::vector<double> step_im(count);
  for (std::size_t i = 0; i < count; ++i) {
    step_re[i] = std::cos(g.panel * s.rho[i]);
    step_im[i] = std::sin(g.panel * s.rho[i]);
    for (std::size_t q = 0; q < order; ++q) {
      off_re[q][i] = std::cos(g.offsets[q] * s.rho[i]);
      off_im[q][i] = std::sin(g.offsets[q] * s.rho[i]);
    }
  }
  std::vector<Complex> out(g.size());
  const std::size_t chunks = (g.panels + kTauChunk - 1) / kTauChunk;
  parallel::for_each_index(
      chunks,
      [&](std::size_t c) {
        const std::size_t p0 = c * kTauChunk;
        const std::size_t p1 = std::min(g.panels, p0 + kTauChunk);
        std::vector<double> vr(count);
        std::vector<double> vi(count);
        for (std::size_t i = 0; i < count; ++i) {
          const double phase = g.panel * static_cast<double>(p0) * s.rho[i];
          vr[i] = s.hw[i] * std::cos(phase);
          vi[i] = s.hw[i] * std::sin(phase);
        }
        for (std::size_t p = p0; p < p1; ++p) {
          for (std::size_t q = 0; q < order; ++q) {
            const double* ore = off_re[q].data();
            const double* oim = off_im[q].data();
            double re = 0.0;
            double im = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
              re += vr[i] * ore[i] - vi[i] * oim[i];
              im += vr[i] * oim[i] + vi[i] * ore[i];
            }
            out[p * order + q] = Complex{re, im};
          }
          for (std::size_t i = 0; i < count; ++i) {
            const double r = vr[i] * step_re[i] - vi[i] * step_im[i];
            vi[i] = vr[i] * step_im[i] + vi[i] * step_re[i];
            vr[i] = r;
          }
        }
      },
      1);
  return out;
}

// Decay summary of |R(tau)| on [0, tau_max].
struct Decay {
  double integral = 0.0;
  double at_zero = 0.0;
  double max_abs = 0.0;
  /// Envelope order q with |R| ~ tau^{-q}; infinity when R fell below the noise floor.
  double order = std::numeric_limits<double>::infinity();
  /// Envelope value extrapolated to tau_max.
  double at_end = 0.0;
};

// `artefact` bounds |h(rho_cut)|, whose truncation term |h(rho_cut)| / tau sets the level
// below which the envelope says nothing about the decay order.
Decay analyse(const std::vector<Complex>& r, const TauGrid& g, double tau_max, double r0,
              double artefact) {
  Decay d;
  d.at_zero = std::abs(r0);
  std::vector<double> parts(r.size());
  double m1 = 0.0;
  double m2 = 0.0;
  d.max_abs = d.at_zero;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double a = std::abs(r[i]);
    const double tau = g.tau(i);
    parts[i] = g.weight(i) * a;
    d.max_abs = std::max(d.max_abs, a);
    if (tau >= 0.25 * tau_max && tau < 0.5 * tau_max) m1 = std::max(m1, a);
    if (tau >= 0.5 * tau_max) m2 = std::max(m2, a);
  }
  d.integral = parallel::pairwise_sum(parts);
  const double floor = std::max(1e-13 * d.max_abs, 20.0 * artefact / tau_max);
  if (m2 > floor && m1 > 0.0) {
    d.order = std::log(m1 / m2) / std::numbers::ln2;
    d.at_end = m2 * std::pow(2.0, -std::max(d.order, 0.0));
  }
  return d;
}

struct PairTerm {
  std::size_t j = 0;
  std::size_t k = 0;
  int power = 0;
  /// Angular integral: of |c_jk| per direction when true, else |int c_jk|.
  bool abs_inside = true;
};

std::vector<PairTerm> pair_terms(OscillatoryVariant v, std::size_t m, int n) {
  std::vector<PairTerm> out;
  const auto need_two = [&] {
    if (m != 2)
      throw DimensionError(to_string(v) + " needs two data components (f0, f1), got " +
                           std::to_string(m));
  };
  switch (v) {
    case OscillatoryVariant::curlyY:
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) out.push_back({j, k, n, true});
      break;
    case OscillatoryVariant::Ytilde:
      need_two();
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k)
          out.push_back({j, k, n - static_cast<int>(j + k), true});
      break;
    case OscillatoryVariant::Y:
      need_two();
      out = {{0, 0, n + 2, false}, {0, 1, n + 1, false}, {1, 1, n, false}};
      break;
    case OscillatoryVariant::yamazaki:
      need_two();
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k)
          out.push_back({j, k, n + 2 - static_cast<int>(j + k), false});
      break;
  }
  return out;
}

// Angular factor of f_j conj(f_k) integrated over S^{n-1}.
double angular_coefficient(const Profile& a, const Profile& b, int n, bool abs_inside,
                           int sphere_nodes) {
  const double amp = std::abs(a.amplitude) * std::abs(b.amplitude);
  const double exact = std::abs(sphere_measure(n) * (1.0 + a.anisotropy * b.anisotropy / n));
  if (!abs_inside || (std::abs(a.anisotropy) <= 1.0 && std::abs(b.anisotropy) <= 1.0))
    return amp * exact;
  const int nodes = sphere_nodes > 0 ? sphere_nodes : 64;
  const Grid grid = build_grid(n, nodes, 1, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.angular_count(); ++i)
    acc += grid.angular_weights()[i] *
           std::abs(a.angular_factor(grid.directions()[i]) * b.angular_factor(grid.directions()[i]));
  return amp * acc;
}

struct PairResult {
  bool divergent = false;
  std::string evidence;
  Decay decay;
  double sup_weighted = 0.0;
  std::size_t rho_nodes = 0;
  double rho_cut = 0.0;
  std::size_t tau_nodes = 0;
};

PairResult evaluate_pair(const Profile& a, const Profile& b, int power,
                         const OscillatoryControls& c, int tau_refine, bool yamazaki) {
  PairResult out;
  const auto log_h = [&](double rho) { return log_pair(a, b, power, rho); };
  const Scan scan = scan_log(log_h, std::log(c.cut_rel), 1e6);
  if (scan.zero) return out;
  if (std::isfinite(scan.origin_slope) && scan.origin_slope <= -0.95) {
    out.divergent = true;
    out.evidence = "integrand ~ rho^" + fmt(std::round(scan.origin_slope)) +
                   " is not integrable at rho = 0";
    return out;
  }
  if (scan.hit_end && std::isfinite(scan.far_slope) && scan.far_slope >= -1.05) {
    out.divergent = true;
    out.evidence = "integrand ~ rho^" + fmt(scan.far_slope) + " is not integrable at infinity";
    return out;
  }
  out.rho_cut = std::min(scan.rho_cut, kMaxOscillatoryCut);
  if (scan.rho_cut > kMaxOscillatoryCut) out.evidence = "radial cut capped at " + fmt(kMaxOscillatoryCut);
  const RadialSamples samples =
      radial_samples(a, b, power, out.rho_cut, c.tau_max, c.nodes_per_wavelength);
  const TauGrid grid = tau_grid(c.tau_max, out.rho_cut, tau_refine);
  const std::vector<Complex> r = fourier_on_grid(samples, grid);
  const double r0 = parallel::pairwise_sum(samples.hw);
  const double artefact =
      std::abs(a.radial(out.rho_cut) * b.radial(out.rho_cut) * std::pow(out.rho_cut, power));
  out.decay = analyse(r, grid, c.tau_max, r0, artefact);
  out.rho_nodes = samples.rho.size();
  out.tau_nodes = grid.size();
  if (yamazaki) {
    double sup = out.decay.at_zero;
    for (std::size_t i = 0; i < r.size(); ++i)
      sup = std::max(sup, std::pow(japanese(grid.tau(i)), c.kappa) * std::abs(r[i]));
    out.sup_weighted = sup;
  }
  return out;
}

}  // namespace

std::string to_string(OscillatoryVariant v) {
  switch (v) {
    case OscillatoryVariant::Y:
      return "Y";
    case OscillatoryVariant::curlyY:
      return "curlyY";
    case OscillatoryVariant::Ytilde:
      return "Ytilde";
    case OscillatoryVariant::yamazaki:
      return "yamazaki";
  }
  return "?";
}

nlohmann::json NormValue::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  if (finite)
    j["value"] = value;
  else
    j["value"] = "inf";
  j["finite"] = finite;
  j["truncated"] = truncated;
  j["tail"] = tail;
  j["rho_nodes"] = rho_nodes;
  j["rho_cut"] = rho_cut;
  j["tau_max"] = tau_max;
  j["tau_nodes"] = tau_nodes;
  j["finite_differences"] = finite_differences;
  j["evidence"] = evidence;
  return j;
}

std::vector<Complex> oscillatory_kernel(const InitialData& data, std::size_t j, std::size_t k,
                                        int power, const Direction& omega,
                                        const std::vector<double>& tau,
                                        const OscillatoryControls& controls) {
  if (j >= data.size() || k >= data.size())
    throw DimensionError("oscillatory_kernel: component index out of range");
  std::vector<Complex> out(tau.size(), Complex{});
  const Profile& a = data.components[j];
  const Profile& b = data.components[k];
  if (a.is_zero() || b.is_zero()) return out;
  const Scan scan = scan_log([&](double rho) { return log_pair(a, b, power, rho); },
                             std::log(controls.cut_rel), 1e6);
  if (scan.zero) return out;
  double tau_top = 1.0;
  for (double t : tau) tau_top = std::max(tau_top, std::abs(t));
  const double cut = std::min(scan.rho_cut, kMaxOscillatoryCut);
  const RadialSamples s =
      radial_samples(a, b, power, cut, tau_top, controls.nodes_per_wavelength);
  const Complex coef =
      a.amplitude * std::conj(b.amplitude) * a.angular_factor(omega) * b.angular_factor(omega);
  parallel::for_each_index(
      tau.size(),
      [&](std::size_t t) {
        Complex acc{};
        for (std::size_t i = 0; i < s.rho.size(); ++i)
          acc += s.hw[i] * std::polar(1.0, tau[t] * s.rho[i]);
        out[t] = coef * acc;
      },
      4);
  return out;
}

NormValue oscillatory_class_norm(const InitialData& data, int n, OscillatoryVariant variant,
                                 const OscillatoryControls& controls) {
  if (!(controls.tau_max > 0.0)) throw InvalidArgumentError("tau_max must be positive");
  if (controls.tau_refine < 1) throw InvalidArgumentError("tau_refine must be >= 1");
  if (variant == OscillatoryVariant::yamazaki && !(controls.kappa > 1.0))
    throw InvalidArgumentError("yamazaki: kappa must exceed 1");
  sphere_measure(n);
  const bool yamazaki = variant == OscillatoryVariant::yamazaki;
  NormValue out;
  out.name = yamazaki ? "yamazaki_k" + fmt(controls.kappa) : to_string(variant);
  out.tau_max = controls.tau_max;
  const std::vector<PairTerm> terms = pair_terms(variant, data.size(), n);

  int refine = controls.tau_refine;
  for (int attempt = 0;; ++attempt) {
    std::map<std::tuple<std::size_t, std::size_t, int>, PairResult> cache;
    double truncated = 0.0;
    double tail = 0.0;
    double worst_order = std::numeric_limits<double>::infinity();
    std::string divergence;
    for (const PairTerm& t : terms) {
      const Profile& a = data.components[t.j];
      const Profile& b = data.components[t.k];
      if (a.is_zero() || b.is_zero()) continue;
      const double ang = angular_coefficient(a, b, n, t.abs_inside, controls.sphere_nodes);
      if (ang == 0.0) continue;
      const auto key = std::make_tuple(std::min(t.j, t.k), std::max(t.j, t.k), t.power);
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(key, evaluate_pair(a, b, t.power, controls, refine, yamazaki)).first;
      const PairResult& pr = it->second;
      const std::string label = "(" + std::to_string(t.j) + "," + std::to_string(t.k) + ")";
      if (pr.divergent) {
        divergence = "term " + label + ": " + pr.evidence;
        break;
      }
      out.rho_nodes = std::max(out.rho_nodes, pr.rho_nodes);
      out.rho_cut = std::max(out.rho_cut, pr.rho_cut);
      out.tau_nodes = std::max(out.tau_nodes, pr.tau_nodes);
      if (pr.rho_nodes == 0) continue;
      const double q = pr.decay.order;
      worst_order = std::min(worst_order, q);
      if (yamazaki) {
        if (std::isfinite(q) && q < controls.kappa - 0.05) {
          divergence = "term " + label + ": |inner integral| decays like tau^-" + fmt(q) +
                       ", slower than <tau>^-" + fmt(controls.kappa);
          break;
        }
        truncated += ang * pr.sup_weighted;
        if (std::isfinite(q))
          tail = std::max(tail, ang * std::pow(japanese(controls.tau_max), controls.kappa) *
                                    pr.decay.at_end);
      } else {
        if (std::isfinite(q) && q <= 1.05) {
          divergence = "term " + label + ": |inner integral| decays like tau^-" + fmt(q) +
                       ", not integrable in tau";
          break;
        }
        truncated += 2.0 * ang * pr.decay.integral;
        if (std::isfinite(q)) tail += 2.0 * ang * pr.decay.at_end * controls.tau_max / (q - 1.0);
      }
    }
    if (!divergence.empty()) {
      out.value = kInfiniteNorm;
      out.finite = false;
      out.truncated = kInfiniteNorm;
      out.tail = kInfiniteNorm;
      out.evidence = divergence;
      return out;
    }
    const double previous = out.value;
    out.truncated = truncated;
    out.tail = tail;
    out.value = yamazaki ? truncated : truncated + tail;
    out.evidence = std::isfinite(worst_order)
                       ? "slowest tau decay order " + fmt(worst_order) + ", tail " + sci(tail)
                       : "inner integrals decay below the noise floor within tau_max";
    if (!yamazaki) break;
    if (attempt > 0 && std::abs(out.value - previous) <= 0.01 * out.value) {
      out.evidence += ", sup stable under tau refinement " + std::to_string(refine);
      break;
    }
    if (out.value == 0.0 || refine >= 32) break;
    refine *= 2;
  }
  return out;
}

NormValue norm_manfrin(const InitialData& data, int n, const ManfrinOptions& options) {
  sphere_measure(n);
  if (options.refine < 1) throw InvalidArgumentError("manfrin: refine must be >= 1");
  if (options.finite_differences && !(options.fd_step > 0.0))
    throw InvalidArgumentError("manfrin: fd_step must be positive");
  NormValue out;
  out.name = "manfrin";
  out.finite_differences = options.finite_differences;
  const int q = std::max(n, 2);
  const int count = options.sphere_samples > 0 ? options.sphere_samples
                                               : default_sphere_sample_count(n);
  const std::vector<Direction> dirs = sphere_samples(n, count);
  const double h = options.fd_step;
  std::vector<double> parts;
  for (const Profile& p : data.components) {
    if (p.is_zero()) continue;
    double ang = 0.0;
    for (const Direction& w : dirs) ang = std::max(ang, std::norm(p.amplitude * p.angular_factor(w)));
    const Scan decay = scan_log(
        [&](double rho) { return 2.0 * p.log_abs_radial(rho) + q * std::log(rho); }, -64.0, 1e8);
    if (decay.zero) continue;
    if (decay.hit_end && std::isfinite(decay.far_slope) && decay.far_slope >= -1.05) {
      out.value = kInfiniteNorm;
      out.finite = false;
      out.evidence = "integrand ~ rho^" + fmt(decay.far_slope) + " is not integrable at infinity";
      return out;
    }
    const Scan cut = scan_log(
        [&](double rho) { return 2.0 * p.log_abs_radial(rho) + (q + 4) * std::log1p(rho); },
        -64.0, 1e8);
    const double rho_end = cut.rho_cut;
    out.rho_cut = std::max(out.rho_cut, rho_end);
    out.rho_nodes = std::max(out.rho_nodes, (radial_edges(rho_end).size() - 1) *
                                                static_cast<std::size_t>(options.refine) *
                                                kRadialOrder);
    const auto deriv = [&](double rho, int k) {
      if (!options.finite_differences || k == 0) return p.radial(rho, k);
      const double c = std::max(rho, h);
      const double gm = p.radial(c - h);
      const double g0 = p.radial(c);
      const double gp = p.radial(c + h);
      if (k == 1) return (gp - gm) / (2.0 * h);
      return (gp - 2.0 * g0 + gm) / (h * h);
    };
    for (int k = 0; k <= 2; ++k) {
      const double integral = radial_integral(
          [&](double rho) {
            const double d = deriv(rho, k);
            return d * d * (1.0 + std::pow(rho, q));
          },
          rho_end, options.refine);
      parts.push_back(ang * integral);
    }
  }
  out.value = parallel::pairwise_sum(parts);
  out.truncated = out.value;
  out.evidence = options.finite_differences ? "derivatives by central differences, h = " + fmt(h)
                                            : "analytic profile derivatives";
  return out;
}

double WeightSpec::phi(double rho) const {
  switch (kind) {
    case WeightKind::analytic:
      return rho;
    case WeightKind::gevrey:
      return std::pow(rho, 1.0 / s);
    case WeightKind::nishihara:
      return rho / std::log(std::numbers::e + rho);
  }
  return rho;
}

std::string WeightSpec::name() const {
  switch (kind) {
    case WeightKind::analytic:
      return "analytic";
    case WeightKind::gevrey:
      return "gevrey_s" + fmt(s);
    case WeightKind::nishihara:
      return "nishihara";
  }
  return "?";
}

NormValue weighted_class_norm(const Profile& f0, const Profile& f1, int n, WeightSpec weight,
                              double eta, const WeightedOptions& options) {
  sphere_measure(n);
  if (!(eta > 0.0)) throw InvalidArgumentError("weighted norm: eta must be positive");
  if (weight.kind == WeightKind::gevrey && !(weight.s > 1.0))
    throw InvalidArgumentError("weighted norm: Gevrey order s must exceed 1");
  if (options.refine < 1 || !(options.rho_scale >= 1.0))
    throw InvalidArgumentError("weighted norm: refine >= 1 and rho_scale >= 1 required");
  NormValue out;
  out.name = weight.name() + "_eta" + fmt(eta);
  const double sphere = sphere_measure(n);
  const auto coef = [&](const Profile& p) {
    return p.is_zero() ? 0.0
                       : std::norm(p.amplitude) * sphere *
                             (1.0 + p.anisotropy * p.anisotropy / n);
  };
  const double c0 = coef(f0);
  const double c1 = coef(f1);
  if (c0 == 0.0 && c1 == 0.0) return out;
  const auto log_data = [&](double rho) {
    const double l0 = c0 > 0.0 ? std::log(c0) + 2.0 * std::log(rho) + 2.0 * f0.log_abs_radial(rho)
                               : kNegInf;
    const double l1 = c1 > 0.0 ? std::log(c1) + 2.0 * f1.log_abs_radial(rho) : kNegInf;
    const double hi = std::max(l0, l1);
    if (hi == kNegInf) return kNegInf;
    return hi + std::log(std::exp(l0 - hi) + std::exp(l1 - hi)) + (n - 1) * std::log(rho);
  };
  const auto log_f = [&](double rho) {
    const double l = log_data(rho);
    return l == kNegInf ? l : l + eta * weight.phi(rho);
  };
  constexpr double kFar = 1e30;
  const Scan scan = scan_log(log_f, -50.0, kFar);
  if (scan.hit_end || (std::isfinite(scan.far_slope) && scan.far_slope >= -1.05)) {
    out.value = kInfiniteNorm;
    out.finite = false;
    out.evidence = "weight e^{eta phi} outgrows the data: log-integrand slope " +
                   sci(scan.far_slope) + " at rho = " + sci(kFar);
    return out;
  }
  if (scan.log_max > 700.0) {
    out.value = kInfiniteNorm;
    out.finite = false;
    out.evidence = "integrand exceeds double range (log max " + fmt(scan.log_max) + ")";
    return out;
  }
  const double rho_end = scan.rho_cut * options.rho_scale;
  const auto f = [&](double rho) {
    const double l = log_f(rho);
    return l == kNegInf ? 0.0 : std::exp(l);
  };
  const double value = radial_integral(f, rho_end, options.refine);
  const double doubled = radial_integral(f, 2.0 * rho_end, options.refine);
  out.rho_cut = rho_end;
  out.rho_nodes = (radial_edges(rho_end).size() - 1) * static_cast<std::size_t>(options.refine) *
                  kRadialOrder;
  if (!(std::abs(doubled - value) <= 0.01 * value)) {
    out.value = kInfiniteNorm;
    out.finite = false;
    out.evidence = "value grows under rho_max doubling: " + sci(value) + " -> " + sci(doubled);
    return out;
  }
  out.value = value;
  out.truncated = value;
  out.tail = std::abs(doubled - value);
  out.evidence = "rho_max doubling change " + sci(out.tail);
  return out;
}

std::string NormSelection::name() const {
  switch (family) {
    case Family::oscillatory:
      return variant == OscillatoryVariant::yamazaki ? "yamazaki_k" + fmt(kappa)
                                                     : to_string(variant);
    case Family::manfrin:
      return "manfrin";
    case Family::weighted:
      return weight.name() + "_eta" + fmt(eta);
  }
  return "?";
}

NormSelection NormSelection::parse(const std::string& name) {
  NormSelection sel;
  const auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
      throw InvalidArgumentError("unknown norm '" + name + "'");
    return v;
  };
  if (name == "Y" || name == "curlyY" || name == "Ytilde") {
    sel.variant = name == "Y"        ? OscillatoryVariant::Y
                  : name == "curlyY" ? OscillatoryVariant::curlyY
                                     : OscillatoryVariant::Ytilde;
    return sel;
  }
  if (name.rfind("yamazaki_k", 0) == 0) {
    sel.variant = OscillatoryVariant::yamazaki;
    sel.kappa = number(name.substr(10));
    if (!(sel.kappa > 1.0)) throw InvalidArgumentError("norm '" + name + "': kappa must exceed 1");
    return sel;
  }
  if (name == "manfrin") {
    sel.family = Family::manfrin;
    return sel;
  }
  const std::size_t eta_at = name.rfind("_eta");
  if (eta_at != std::string::npos) {
    sel.family = Family::weighted;
    sel.eta = number(name.substr(eta_at + 4));
    if (!(sel.eta > 0.0)) throw InvalidArgumentError("norm '" + name + "': eta must be positive");
    const std::string w = name.substr(0, eta_at);
    if (w == "analytic") {
      sel.weight.kind = WeightKind::analytic;
    } else if (w == "nishihara") {
      sel.weight.kind = WeightKind::nishihara;
    } else if (w.rfind("gevrey_s", 0) == 0) {
      sel.weight.kind = WeightKind::gevrey;
      sel.weight.s = number(w.substr(8));
      if (!(sel.weight.s > 1.0))
        throw InvalidArgumentError("norm '" + name + "': Gevrey order must exceed 1");
    } else {
      throw InvalidArgumentError("unknown norm '" + name + "'");
    }
    return sel;
  }
  throw InvalidArgumentError(
      "unknown norm '" + name +
      "' (allowed: Y, curlyY, Ytilde, yamazaki_k<kappa>, manfrin, analytic_eta<eta>, "
      "nishihara_eta<eta>, gevrey_s<s>_eta<eta>)");
}

std::vector<NormSelection> default_norm_selection(int n) {
  std::vector<std::string> names{"Y", "curlyY", "Ytilde"};
  std::vector<double> kappas{1.5, 2.0, static_cast<double>(n + 1)};
  std::sort(kappas.begin(), kappas.end());
  kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());
  for (double k : kappas) names.push_back("yamazaki_k" + fmt(k));
  for (const char* s : {"manfrin", "analytic_eta1", "nishihara_eta1", "gevrey_s2_eta1"})
    names.push_back(s);
  std::vector<NormSelection> out;
  for (const std::string& s : names) out.push_back(NormSelection::parse(s));
  return out;
}

ClassControls refined(const ClassControls& controls) {
  ClassControls out = controls;
  out.oscillatory.tau_max *= 2.0;
  out.oscillatory.tau_refine *= 2;
  out.manfrin.refine *= 2;
  out.weighted.refine *= 2;
  out.weighted.rho_scale *= 2.0;
  return out;
}

NormValue evaluate_norm(const InitialData& data, int n, const NormSelection& sel,
                        const ClassControls& controls) {
  switch (sel.family) {
    case NormSelection::Family::oscillatory: {
      OscillatoryControls c = controls.oscillatory;
      c.kappa = sel.kappa;
      return oscillatory_class_norm(data, n, sel.variant, c);
    }
    case NormSelection::Family::manfrin:
      return norm_manfrin(data, n, controls.manfrin);
    case NormSelection::Family::weighted: {
      if (data.size() != 2)
        throw DimensionError("weighted norms need two data components (f0, f1), got " +
                             std::to_string(data.size()));
      return weighted_class_norm(data.components[0], data.components[1], n, sel.weight, sel.eta,
                                 controls.weighted);
    }
  }
  throw InvalidArgumentError("unknown norm family");
}

ClassReport class_report(const InitialData& data, int n, const std::vector<NormSelection>& norms,
                         double threshold, const ClassControls& controls) {
  if (!(threshold > 0.0)) throw InvalidArgumentError("class threshold must be positive");
  ClassReport r;
  r.dimension = n;
  r.threshold = threshold;
  for (const NormSelection& sel : norms) {
    r.norms.push_back(evaluate_norm(data, n, sel, controls));
    r.small.push_back(r.norms.back().finite && r.norms.back().value <= threshold);
  }
  return r;
}

nlohmann::json ClassReport::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension;
  j["threshold"] = threshold;
  j["bracket"] = "<tau> = sqrt(1 + tau^2)";
  j["norms"] = nlohmann::json::array();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    nlohmann::json e = norms[i].to_json();
    e["small"] = small.at(i);
    j["norms"].push_back(e);
  }
  return j;
}

std::vector<CatalogMember> profile_catalog() {
  std::vector<CatalogMember> out;
  const auto add = [&](std::string family, double param, Profile f0, Profile f1) {
    out.push_back(CatalogMember{std::move(family), param, InitialData{{f0, f1}}});
  };
  for (double alpha : {0.5, 1.0, 2.0})
    add("gaussian", alpha, Profile::gaussian(alpha), Profile::zero());
  add("gaussian_velocity", 0.5, Profile::gaussian(0.5), Profile::gaussian(0.5, 1, 0.5));
  Profile aniso = Profile::gaussian(0.5);
  aniso.anisotropy = 0.5;
  add("gaussian_anisotropic", 0.5, aniso, Profile::zero());
  add("gaussian_rho2", 2.0, Profile::gaussian(0.5, 2), Profile::zero());
  add("bump", 0.0, Profile::bump(0.0, 2.0), Profile::zero());
  add("bump", 1.0, Profile::bump(1.0, 3.0), Profile::bump(1.0, 3.0, 0.5));
  for (int order = 3; order <= 6; ++order)
    add("rational", order, Profile::rational(order), Profile::zero());
  return out;
}

std::vector<Implication> default_implications(int n) {
  std::vector<Implication> out{{"analytic_eta1", "nishihara_eta1"},
                               {"nishihara_eta1", "gevrey_s2_eta1"},
                               {"manfrin", "curlyY"}};
  for (const NormSelection& s : default_norm_selection(n))
    if (s.family == NormSelection::Family::oscillatory &&
        s.variant == OscillatoryVariant::yamazaki)
      out.push_back({s.name(), "Y"});
  return out;
}

InclusionReport inclusion_report(const std::vector<CatalogMember>& members, int n,
                                 const ClassControls& controls) {
  InclusionReport r;
  r.dimension = n;
  r.members = members;
  const std::vector<NormSelection> sel = default_norm_selection(n);
  for (const NormSelection& s : sel) r.norm_names.push_back(s.name());
  for (const CatalogMember& m : members) {
    std::vector<NormValue> row;
    for (const NormSelection& s : sel) row.push_back(evaluate_norm(m.data, n, s, controls));
    r.values.push_back(std::move(row));
  }
  const auto column = [&](const std::string& name) {
    const auto it = std::find(r.norm_names.begin(), r.norm_names.end(), name);
    if (it == r.norm_names.end()) throw InvalidArgumentError("inclusion: no norm '" + name + "'");
    return static_cast<std::size_t>(it - r.norm_names.begin());
  };
  for (const Implication& imp : default_implications(n)) {
    const std::size_t s = column(imp.stronger);
    const std::size_t w = column(imp.weaker);
    for (std::size_t i = 0; i < members.size(); ++i)
      if (r.values[i][s].finite && !r.values[i][w].finite)
        r.violations.push_back(members[i].family + "(" + fmt(members[i].parameter) + "): " +
                               imp.stronger + " finite but " + imp.weaker + " infinite");
  }
  return r;
}

std::string InclusionReport::to_csv() const {
  std::ostringstream os;
  os << "family,parameter";
  for (const std::string& name : norm_names) os << ',' << name;
  os << '\n';
  char buf[40];
  for (std::size_t i = 0; i < members.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", members[i].parameter);
    os << members[i].family << ',' << buf;
    for (const NormValue& v : values[i]) {
      if (v.finite) {
        std::snprintf(buf, sizeof buf, "%.17g", v.value);
        os << ',' << buf;
      } else {
        os << ",inf";
      }
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json InclusionReport::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension;
  j["norms"] = norm_names;
  j["members"] = nlohmann::json::array();
  for (std::size_t i = 0; i < members.size(); ++i) {
    nlohmann::json m;
    m["family"] = members[i].family;
    m["parameter"] = members[i].parameter;
    m["values"] = nlohmann::json::array();
    for (const NormValue& v : values[i]) m["values"].push_back(v.to_json());
    j["members"].push_back(m);
  }
  j["violations"] = violations;
  return j;
}

}  // namespace kirchhoff
