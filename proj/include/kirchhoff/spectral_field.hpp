#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kirchhoff/grid.hpp"

namespace kirchhoff {

using Complex = std::complex<double>;
using Point = std::array<double, 3>;

/// m-component Fourier data sampled on a Grid, stored component-major:
/// index (c, a, r) -> c * modes + a * radial + r.
class SpectralField {
 public:
  using Sampler = std::function<Complex(std::size_t component, const Direction& omega, double rho)>;

  SpectralField(std::shared_ptr<const Grid> grid, std::size_t components);

  static SpectralField sample(std::shared_ptr<const Grid> grid, std::size_t components,
                              const Sampler& f);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  std::size_t components() const { return m_; }
  std::size_t mode_count() const { return grid_->mode_count(); }

  Complex& operator()(std::size_t c, std::size_t a, std::size_t r) {
    return values_[c * mode_count() + a * grid_->radial_count() + r];
  }
  Complex operator()(std::size_t c, std::size_t a, std::size_t r) const {
    return values_[c * mode_count() + a * grid_->radial_count() + r];
  }
  /// Value of component c at flat mode index.
  Complex& at_mode(std::size_t c, std::size_t mode) { return values_[c * mode_count() + mode]; }
  Complex at_mode(std::size_t c, std::size_t mode) const { return values_[c * mode_count() + mode]; }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  /// m-vector of all components at one mode.
  Eigen::VectorXcd mode_vector(std::size_t mode) const;
  void set_mode_vector(std::size_t mode, const Eigen::VectorXcd& v);

  bool is_finite() const;
  /// Throws InvalidArgumentError when an entry is NaN or infinite.
  void require_finite() const;

  bool same_layout(const SpectralField& other) const;

  SpectralField& operator*=(Complex lambda);
  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);

 private:
  std::shared_ptr<const Grid> grid_;
  std::size_t m_;
  std::vector<Complex> values_;
};

SpectralField operator*(Complex lambda, SpectralField f);
SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);

/// Hermitian m x m matrix defining s = <S U, U>.
class HermitianForm {
 public:
  explicit HermitianForm(Eigen::MatrixXcd s);
  static HermitianForm identity(std::size_t m);
  static HermitianForm diagonal(const std::vector<double>& d);

  const Eigen::MatrixXcd& matrix() const { return s_; }
  std::size_t size() const { return static_cast<std::size_t>(s_.rows()); }

 private:
  Eigen::MatrixXcd s_;
};

/// sum_c int |xi|^{2 sigma} |f_c(xi)|^2 d xi, by quadrature.
double sobolev_norm_sq(const SpectralField& field, double sigma);

/// sum_c int |xi|^{2 sigma} a_c conj(b_c) d xi.
Complex inner_product(const SpectralField& a, const SpectralField& b, double sigma);

/// <S U, U> = int U^* S U d xi; errors when the imaginary residual exceeds 1e-10 |value|.
double quadratic_form(const HermitianForm& s, const SpectralField& field);

/// u(x) = (2 pi)^{-n} int e^{i x.xi} u_hat(xi) d xi by direct quadrature.
/// Accuracy degrades once |x| rho_max outruns the radial resolution.
std::vector<Complex> evaluate_physical(const SpectralField& field, std::span<const Point> points,
                                       std::size_t component = 0);

}  // namespace kirchhoff
