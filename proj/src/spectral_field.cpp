#include "kirchhoff/spectral_field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/parallel.hpp"

namespace kirchhoff {

SpectralField::SpectralField(std::shared_ptr<const Grid> grid, std::size_t components)
    : grid_(std::move(grid)), m_(components) {
  if (!grid_) throw InvalidArgumentError("SpectralField: null grid");
  if (m_ == 0) throw InvalidArgumentError("SpectralField: component count must be >= 1");
  values_.assign(m_ * grid_->mode_count(), Complex{});
}

SpectralField SpectralField::sample(std::shared_ptr<const Grid> grid, std::size_t components,
                                    const Sampler& f) {
  SpectralField field(std::move(grid), components);
  const Grid& g = field.grid();
  for (std::size_t c = 0; c < components; ++c) {
    for (std::size_t a = 0; a < g.angular_count(); ++a) {
      for (std::size_t r = 0; r < g.radial_count(); ++r) {
        field(c, a, r) = f(c, g.directions()[a], g.radial_nodes()[r]);
      }
    }
  }
  field.require_finite();
  return field;
}

Eigen::VectorXcd SpectralField::mode_vector(std::size_t mode) const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(m_));
  for (std::size_t c = 0; c < m_; ++c) v[static_cast<Eigen::Index>(c)] = at_mode(c, mode);
  return v;
}

void SpectralField::set_mode_vector(std::size_t mode, const Eigen::VectorXcd& v) {
  for (std::size_t c = 0; c < m_; ++c) at_mode(c, mode) = v[static_cast<Eigen::Index>(c)];
}

bool SpectralField::is_finite() const {
  for (const Complex& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void SpectralField::require_finite() const {
  if (!is_finite()) throw InvalidArgumentError("SpectralField: non-finite entry");
}

bool SpectralField::same_layout(const SpectralField& other) const {
  return m_ == other.m_ && (grid_ == other.grid_ || *grid_ == *other.grid_);
}

SpectralField& SpectralField::operator*=(Complex lambda) {
  for (Complex& z : values_) z *= lambda;
  return *this;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!same_layout(other)) throw DimensionError("SpectralField: layout mismatch in +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!same_layout(other)) throw DimensionError("SpectralField: layout mismatch in -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SpectralField operator*(Complex lambda, SpectralField f) {
  f *= lambda;
  return f;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
  a += b;
  return a;
}

SpectralField operator-(SpectralField a, const SpectralField& b) {
  a -= b;
  return a;
}

HermitianForm::HermitianForm(Eigen::MatrixXcd s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols() || s_.rows() == 0) {
    throw DimensionError("HermitianForm: matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, s_.cwiseAbs().maxCoeff());
  const double asym = (s_ - s_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-14 * scale) {
    throw NonHermitianFormError("HermitianForm: S differs from S* by " + std::to_string(asym));
  }
}

HermitianForm HermitianForm::identity(std::size_t m) {
  const auto n = static_cast<Eigen::Index>(m);
  return HermitianForm(Eigen::MatrixXcd::Identity(n, n));
}

HermitianForm HermitianForm::diagonal(const std::vector<double>& d) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  }
  return HermitianForm(std::move(s));
}

namespace {

double weight_power(const Grid& g, std::size_t mode, double sigma) {
  const double rho = g.radial_nodes()[mode % g.radial_count()];
  const double w = g.volume_weights()[mode];
  return sigma == 0.0 ? w : w * std::pow(rho, 2.0 * sigma);
}

}  // namespace

double sobolev_norm_sq(const SpectralField& field, double sigma) {
  const Grid& g = field.grid();
  const std::size_t modes = g.mode_count();
  std::vector<double> terms(modes);
  parallel::for_each_index(modes, [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t c = 0; c < field.components(); ++c) acc += std::norm(field.at_mode(c, k));
    terms[k] = weight_power(g, k, sigma) * acc;
  });
  return parallel::pairwise_sum(terms);
}

Complex inner_product(const SpectralField& a, const SpectralField& b, double sigma) {
  if (!a.same_layout(b)) {
    throw DimensionError("inner_product: fields differ in grid or component count");
  }
  const Grid& g = a.grid();
  const std::size_t modes = g.mode_count();
  std::vector<Complex> terms(modes);
  parallel::for_each_index(modes, [&](std::size_t k) {
    Complex acc{};
    for (std::size_t c = 0; c < a.components(); ++c) acc += a.at_mode(c, k) * std::conj(b.at_mode(c, k));
    terms[k] = weight_power(g, k, sigma) * acc;
  });
  return parallel::pairwise_sum(terms);
}

double quadratic_form(const HermitianForm& s, const SpectralField& field) {
  if (s.size() != field.components()) {
    throw DimensionError("quadratic_form: S is " + std::to_string(s.size()) + "x" +
                         std::to_string(s.size()) + " but field has " +
                         std::to_string(field.components()) + " components");
  }
  const Grid& g = field.grid();
  const std::size_t modes = g.mode_count();
  std::vector<Complex> terms(modes);
  parallel::for_each_index(modes, [&](std::size_t k) {
    const Eigen::VectorXcd u = field.mode_vector(k);
    terms[k] = g.volume_weights()[k] * u.dot(s.matrix() * u);
  });
  const Complex value = parallel::pairwise_sum(terms);
  if (std::abs(value.imag()) > 1e-10 * std::abs(value)) {
    throw NonHermitianFormError("quadratic_form: imaginary residual " +
                                std::to_string(value.imag()) + " exceeds tolerance");
  }
  return value.real();
}

std::vector<Complex> evaluate_physical(const SpectralField& field, std::span<const Point> points,
                                       std::size_t component) {
  if (component >= field.components()) {
    throw DimensionError("evaluate_physical: component index out of range");
  }
  const Grid& g = field.grid();
  const double norm = std::pow(2.0 * std::numbers::pi, -g.dimension());
  const std::size_t modes = g.mode_count();
  std::vector<Complex> out(points.size());
  std::vector<Complex> terms(modes);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Point& x = points[p];
    parallel::for_each_index(modes, [&](std::size_t k) {
      const std::size_t a = k / g.radial_count();
      const double rho = g.radial_nodes()[k % g.radial_count()];
      const Direction& w = g.directions()[a];
      const double phase = rho * (x[0] * w[0] + x[1] * w[1] + x[2] * w[2]);
      terms[k] = g.volume_weights()[k] * std::polar(1.0, phase) * field.at_mode(component, k);
    });
    out[p] = norm * parallel::pairwise_sum(terms);
  }
  return out;
}

}  // namespace kirchhoff
