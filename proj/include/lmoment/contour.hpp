#pragma once

// Contour-integral plans and the approximate functional equation weight V.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmoment/special_functions.hpp"

namespace lmoment {

/// Spectral parameter t of the form f (Laplace eigenvalue 1/4 + t^2).
struct SpectralParameter {
  double t = 0.0;

  SpectralParameter() = default;
  explicit SpectralParameter(double value) : t(value) {
    if (!std::isfinite(value)) throw std::invalid_argument("SpectralParameter: t must be finite");
  }
};

/// Trapezoid rule on the vertical line Re u = sigma, |Im u| <= height.
struct ContourPlan {
  double sigma = 1.0;
  double height = 40.0;
  double step = 0.05;

  void validate() const {
    if (!std::isfinite(sigma) || !std::isfinite(height) || !std::isfinite(step))
      throw std::invalid_argument("ContourPlan: non-finite parameter");
    if (height <= 0.0 || step <= 0.0)
      throw std::invalid_argument("ContourPlan: height and step must be positive");
    if (height / step < 100.0)
      throw std::invalid_argument("ContourPlan: height/step must be at least 100");
  }
  std::size_t half_nodes() const { return static_cast<std::size_t>(std::floor(height / step + 1e-9)); }

  static ContourPlan afe_default() { return {1.0, 40.0, 0.05}; }
  static ContourPlan afe_gaussian_default() { return {1.0, 12.0, 0.05}; }
  static ContourPlan voronoi_default() { return {-0.5, 3000.0, 0.05}; }
};

/// Admissible factor G(u) in the weight: 1, or exp(u^2).
enum class AfeCutoff { unit, gaussian };

inline std::string to_string(AfeCutoff c) { return c == AfeCutoff::unit ? "unit" : "gaussian"; }

/// Gamma((1+2u+2it)/4) Gamma((1+2u-2it)/4) Gamma((1+2u)/4) divided by its
/// value at u = 0. The pi powers live in the argument of V instead.
inline cplx afe_gamma_ratio(cplx u, double t) {
  const cplx i{0.0, 1.0};
  const cplx num = log_gamma((1.0 + 2.0 * u + 2.0 * i * t) / 4.0) +
                   log_gamma((1.0 + 2.0 * u - 2.0 * i * t) / 4.0) +
                   log_gamma((1.0 + 2.0 * u) / 4.0);
  const cplx den = log_gamma(cplx{0.25, 0.5 * t}) + log_gamma(cplx{0.25, -0.5 * t}) +
                   log_gamma(cplx{0.25, 0.0});
  return std::exp(num - den);
}

/// V(y) = (1/2 pi i) int_(sigma) y^{-u} gamma-ratio(u) G(u) du / u, tabulated
/// as trapezoid nodes on the plan line. Conjugate symmetry of the integrand
/// (real t) is used in operator(); evaluate_full sums both halves.
class AfeWeight {
 public:
  explicit AfeWeight(SpectralParameter t, ContourPlan plan = ContourPlan::afe_default(),
                     AfeCutoff cutoff = AfeCutoff::unit)
      : t_(t), plan_(plan), cutoff_(cutoff) {
    plan_.validate();
    if (plan_.sigma <= 0.0) throw std::invalid_argument("AfeWeight: sigma must be positive");
    const std::size_t n = plan_.half_nodes();
    upper_.resize(n + 1);
    lower_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double tau = plan_.step * static_cast<double>(j);
      upper_[j] = node_weight(cplx{plan_.sigma, tau});
      lower_[j] = node_weight(cplx{plan_.sigma, -tau});
    }
  }

  /// Real weight V(y) for y > 0.
  double operator()(double y) const {
    if (!(y > 0.0)) throw std::domain_error("AfeWeight: y must be positive");
    const double log_y = std::log(y);
    const double scale = std::exp(-plan_.sigma * log_y) * plan_.step / (2.0 * std::numbers::pi);
    // sum_j w_j e^{-i tau_j log y}, j >= 1, then 2 Re + the j = 0 node
    const cplx rot = std::polar(1.0, -plan_.step * log_y);
    cplx phase = rot;
    double acc = 0.0;
    for (std::size_t j = 1; j < upper_.size(); ++j) {
      if (j % 64 == 0) phase = std::polar(1.0, -plan_.step * log_y * static_cast<double>(j));
      acc += (upper_[j] * phase).real();
      phase *= rot;
    }
    return scale * (upper_[0].real() + 2.0 * acc);
  }

  /// Both halves of the line summed independently; the imaginary part is the
  /// quadrature's departure from conjugate symmetry.
  cplx evaluate_full(double y) const {
    if (!(y > 0.0)) throw std::domain_error("AfeWeight: y must be positive");
    const double log_y = std::log(y);
    const double scale = std::exp(-plan_.sigma * log_y) * plan_.step / (2.0 * std::numbers::pi);
    cplx acc = upper_[0];
    for (std::size_t j = 1; j < upper_.size(); ++j) {
      const double tau = plan_.step * static_cast<double>(j);
      acc += upper_[j] * std::polar(1.0, -tau * log_y) + lower_[j] * std::polar(1.0, tau * log_y);
    }
    return scale * acc;
  }

  SpectralParameter spectral() const { return t_; }
  const ContourPlan& plan() const { return plan_; }
  AfeCutoff cutoff() const { return cutoff_; }

 private:
  cplx node_weight(cplx u) const {
    cplx g = afe_gamma_ratio(u, t_.t) / u;
    if (cutoff_ == AfeCutoff::gaussian) g *= std::exp(u * u);
    return g;
  }

  SpectralParameter t_;
  ContourPlan plan_;
  AfeCutoff cutoff_;
  std::vector<cplx> upper_;
  std::vector<cplx> lower_;
};

/// Single evaluation of V(y); throws if the imaginary residue exceeds 1e-8.
inline double afe_weight(double y, SpectralParameter t, const ContourPlan& plan = ContourPlan::afe_default(),
                         AfeCutoff cutoff = AfeCutoff::unit) {
  const cplx v = AfeWeight(t, plan, cutoff).evaluate_full(y);
  if (std::abs(v.imag()) > 1e-8) throw std::runtime_error("afe_weight: imaginary residue above 1e-8");
  return v.real();
}

}  // namespace lmoment
