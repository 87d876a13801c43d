#include "kirchhoff/kirchhoff_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/ode.hpp"
#include "kirchhoff/parallel.hpp"

namespace kirchhoff {

const char* to_string(NonlocalKind kind) {
  return kind == NonlocalKind::gradient ? "gradient" : "zero_order";
}

double nonlocal_coefficient(const SpectralField& u_hat, NonlocalKind kind) {
  return sobolev_norm_sq(u_hat, kind == NonlocalKind::gradient ? 1.0 : 0.0);
}

double nonlocal_coefficient(const ScalarState& state) {
  return nonlocal_coefficient(state.u_hat, state.kind);
}

namespace {

double grad_sq(const ScalarState& st) { return sobolev_norm_sq(st.u_hat, 1.0); }
double vel_sq(const ScalarState& st) { return sobolev_norm_sq(st.v_hat, 0.0); }

double conserved(const ScalarState& st) {
  const double q = grad_sq(st);
  const double base = vel_sq(st) + q;
  return st.kind == NonlocalKind::gradient ? base + 0.5 * q * q : base;
}

void require_scalar_pair(const SpectralField& u, const SpectralField& v) {
  if (u.components() != 1 || v.components() != 1) {
    throw DimensionError("scalar solver: u_hat and v_hat must have one component");
  }
  if (!u.same_layout(v)) throw DimensionError("scalar solver: u_hat and v_hat grids differ");
  u.require_finite();
  v.require_finite();
}

}  // namespace

ScalarState ScalarState::make(double t, SpectralField u_hat, SpectralField v_hat,
                              NonlocalKind kind) {
  require_scalar_pair(u_hat, v_hat);
  ScalarState st{t, std::move(u_hat), std::move(v_hat), kind, 0.0, 0.0};
  st.s = nonlocal_coefficient(st);
  st.energy = conserved(st);
  return st;
}

double energy(const ScalarState& state) {
  if (state.kind != NonlocalKind::gradient) {
    throw UnsupportedOperationError(
        "energy: no conserved energy for the zero-order kind; use the F' + s (||grad u||^2)' "
        "residual instead");
  }
  return conserved(state);
}

double gradient_velocity_functional(const ScalarState& state) {
  return vel_sq(state) + grad_sq(state);
}

void Trajectory::validate() const {
  const std::size_t n = times.size();
  if (s.size() != n || s_prime.size() != n || energy.size() != n || h1_norm.size() != n ||
      l2_velocity.size() != n || grad_sq_prime.size() != n) {
    throw InvalidArgumentError("Trajectory: column lengths differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw InvalidArgumentError("Trajectory: times must increase strictly");
    }
    for (double x : {times[i], s[i], s_prime[i], energy[i], h1_norm[i], l2_velocity[i]}) {
      if (!std::isfinite(x)) throw InvalidArgumentError("Trajectory: non-finite value");
    }
  }
}

std::string Trajectory::to_csv() const {
  std::string out = "t,s,energy,h1_norm,l2_velocity_norm\n";
  char line[256];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", times[i], s[i],
                  energy[i], h1_norm[i], l2_velocity[i]);
    out += line;
  }
  return out;
}

double Trajectory::max_relative_energy_drift() const {
  if (energy.empty() || energy.front() == 0.0) return 0.0;
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()) / energy.front());
  return worst;
}

Trajectory solve_scalar(const SpectralField& f0, const SpectralField& f1, NonlocalKind kind,
                        double horizon, const ScalarSolveOptions& options) {
  return solve_scalar(ScalarState::make(0.0, f0, f1, kind), horizon, options);
}

Trajectory solve_scalar(const ScalarState& start, double horizon,
                        const ScalarSolveOptions& options) {
  if (!(horizon > 0.0)) throw InvalidArgumentError("solve_scalar: horizon must be positive");
  if (!(options.tol >= 1e-12 && options.tol <= 1e-3)) {
    throw InvalidArgumentError("solve_scalar: tol must lie in [1e-12, 1e-3]");
  }
  if (options.checkpoint_intervals < 1) {
    throw InvalidArgumentError("solve_scalar: need at least one checkpoint interval");
  }
  const Grid& g = start.u_hat.grid();
  const std::size_t modes = g.mode_count();
  const std::size_t nr = g.radial_count();
  const NonlocalKind kind = start.kind;
  const double sigma = kind == NonlocalKind::gradient ? 1.0 : 0.0;

  std::vector<double> rho2(modes), s_weight(modes), grad_weight(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double rho = g.radial_nodes()[k % nr];
    rho2[k] = rho * rho;
    grad_weight[k] = g.volume_weights()[k] * rho2[k];
    s_weight[k] = sigma == 1.0 ? grad_weight[k] : g.volume_weights()[k];
  }

  Eigen::VectorXcd y(2 * static_cast<Eigen::Index>(modes));
  for (std::size_t k = 0; k < modes; ++k) {
    y[static_cast<Eigen::Index>(k)] = start.u_hat.at_mode(0, k);
    y[static_cast<Eigen::Index>(modes + k)] = start.v_hat.at_mode(0, k);
  }

  std::vector<double> terms(modes);
  auto live_s = [&](const Eigen::VectorXcd& state) {
    parallel::for_each_index(modes, [&](std::size_t k) {
      terms[k] = s_weight[k] * std::norm(state[static_cast<Eigen::Index>(k)]);
    }, 256);
    return parallel::pairwise_sum(terms);
  };

  const auto rhs = [&](double, const Eigen::VectorXcd& state, Eigen::VectorXcd& out) {
    const double s = options.frozen_coefficient ? *options.frozen_coefficient : live_s(state);
    const auto m = static_cast<Eigen::Index>(modes);
    parallel::for_each_index(modes, [&](std::size_t k) {
      const auto i = static_cast<Eigen::Index>(k);
      out[i] = state[m + i];
      out[m + i] = -(1.0 + s) * rho2[k] * state[i];
    }, 256);
  };

  double scale = y.cwiseAbs().maxCoeff();
  OdeOptions ode;
  ode.rtol = options.tol;
  ode.atol = options.tol * (scale > 0.0 ? scale : 1.0);
  DormandPrince integrator(ode);

  std::vector<double> outputs(options.checkpoint_intervals + 1);
  for (std::size_t i = 0; i <= options.checkpoint_intervals; ++i) {
    outputs[i] = horizon * static_cast<double>(i) / static_cast<double>(options.checkpoint_intervals);
  }

  Trajectory traj;
  traj.kind = kind;
  const double e0 = start.energy;
  std::vector<double> s_terms(modes), q_terms(modes), v_terms(modes);

  const auto observe = [&](std::size_t, double t, const Eigen::VectorXcd& state) {
    const auto m = static_cast<Eigen::Index>(modes);
    std::vector<double> sp_terms(modes), qp_terms(modes);
    parallel::for_each_index(modes, [&](std::size_t k) {
      const auto i = static_cast<Eigen::Index>(k);
      const std::complex<double> u = state[i];
      const std::complex<double> v = state[m + i];
      s_terms[k] = s_weight[k] * std::norm(u);
      q_terms[k] = grad_weight[k] * std::norm(u);
      v_terms[k] = g.volume_weights()[k] * std::norm(v);
      sp_terms[k] = 2.0 * s_weight[k] * (v * std::conj(u)).real();
      qp_terms[k] = 2.0 * grad_weight[k] * (v * std::conj(u)).real();
    }, 256);
    const double s = parallel::pairwise_sum(s_terms);
    const double q = parallel::pairwise_sum(q_terms);
    const double vv = parallel::pairwise_sum(v_terms);
    const double e = kind == NonlocalKind::gradient ? vv + q + 0.5 * q * q : vv + q;
    traj.times.push_back(t);
    traj.s.push_back(s);
    traj.s_prime.push_back(parallel::pairwise_sum(sp_terms));
    traj.energy.push_back(e);
    traj.h1_norm.push_back(std::sqrt(q));
    traj.l2_velocity.push_back(std::sqrt(vv));
    traj.grad_sq_prime.push_back(parallel::pairwise_sum(qp_terms));
    if (options.keep_snapshots) {
      SpectralField u(start.u_hat.grid_ptr(), 1), v(start.u_hat.grid_ptr(), 1);
      for (std::size_t k = 0; k < modes; ++k) {
        u.at_mode(0, k) = state[static_cast<Eigen::Index>(k)];
        v.at_mode(0, k) = state[m + static_cast<Eigen::Index>(k)];
      }
      traj.snapshots.push_back(ScalarState{start.t + t, std::move(u), std::move(v), kind, s, e});
    }
    if (options.check_energy && !options.frozen_coefficient && kind == NonlocalKind::gradient &&
        e0 > 0.0 && std::abs(e - e0) > 1e3 * options.tol * e0) {
      std::ostringstream os;
      os << "solve_scalar: relative energy drift " << std::abs(e - e0) / e0 << " at t = " << t
         << " exceeds 1e3 * tol";
      throw IntegratorFailureError(os.str());
    }
  };

  integrator.integrate(rhs, 0.0, y, outputs, observe);
  traj.validate();
  return traj;
}

}  // namespace kirchhoff
