#pragma once

// Complex log-gamma and Hurwitz zeta in double precision.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace lmoment {

using cplx = std::complex<double>;

namespace detail {

// B_{2k} / (2k (2k - 1)) for k = 1..8.
inline constexpr std::array<double, 8> kStirlingCoefficients = {
    1.0 / 12.0,      -1.0 / 360.0,      1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0, -691.0 / 360360.0,   1.0 / 156.0,  -3617.0 / 122400.0};

// B_{2k} / (2k)! for k = 1..6.
inline constexpr std::array<double, 6> kEulerMaclaurinCoefficients = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0};

inline bool near_nonpositive_integer(cplx z, double radius) {
  if (z.real() > radius) return false;
  const double nearest = std::round(z.real());
  if (nearest > 0.0) return false;
  return std::abs(z - cplx{nearest, 0.0}) < radius;
}

}  // namespace detail

/// Principal branch of log Gamma(z): analytic on C minus (-inf, 0], real on
/// the positive axis. Arguments with Re z < 0 or |z| < 15 are shifted upward
/// by the recurrence before the Stirling series is applied.
inline cplx log_gamma(cplx z) {
  if (detail::near_nonpositive_integer(z, 1e-14))
    throw std::domain_error("log_gamma: pole at non-positive integer");
  const bool lower = z.imag() < 0.0;
  if (lower) z = std::conj(z);

  cplx shift{0.0, 0.0};
  if (z.real() < 0.0 || std::abs(z) < 15.0) {
    // log Gamma(z + 1) = log Gamma(z) + log z holds with principal logs
    // throughout the slit plane, so the shift is a plain sum.
    const int n = static_cast<int>(std::ceil(15.0 - z.real()));
    for (int k = 0; k < n; ++k) shift += std::log(z + static_cast<double>(k));
    z += static_cast<double>(n);
  }

  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series{0.0, 0.0};
  cplx power = inv;
  for (double c : detail::kStirlingCoefficients) {
    series += c * power;
    power *= inv2;
  }
  const cplx result =
      (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
  return lower ? std::conj(result) : result;
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

namespace detail {

/// zeta(s, a) - 1/(s - 1), entire in s: Euler-Maclaurin with 50 direct terms
/// and corrections through B_12. At s = 1 it equals -digamma(a).
inline cplx hurwitz_zeta_regular(cplx s, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("hurwitz_zeta: a must be positive");
  constexpr int kDirect = 50;
  cplx sum{0.0, 0.0};
  for (int n = 0; n < kDirect; ++n) sum += std::exp(-s * std::log(n + a));
  const double x = kDirect + a;
  const double log_x = std::log(x);
  const cplx x_pow = std::exp(-s * log_x);  // x^{-s}
  // (x^{1-s} - 1)/(s - 1), with the removable singularity expanded
  const cplx w = (1.0 - s) * log_x;
  if (std::abs(w) < 1e-3)
    sum -= log_x * (1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0 + w * w * w * w / 120.0);
  else
    sum += (std::exp(w) - 1.0) / (s - 1.0);
  sum += 0.5 * x_pow;
  // term_k = B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * x^{-s-2k+1}
  cplx rising = s;
  cplx x_term = x_pow / x;
  for (std::size_t k = 0; k < kEulerMaclaurinCoefficients.size(); ++k) {
    sum += kEulerMaclaurinCoefficients[k] * rising * x_term;
    const double j = 2.0 * static_cast<double>(k) + 1.0;
    rising *= (s + j) * (s + j + 1.0);
    x_term /= x * x;
  }
  return sum;
}

}  // namespace detail

/// Hurwitz zeta zeta(s, a) = sum_{n >= 0} (n + a)^{-s} for a > 0, s != 1.
inline cplx hurwitz_zeta(cplx s, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("hurwitz_zeta: a must be positive");
  if (std::abs(s - cplx{1.0, 0.0}) < 1e-14) throw std::domain_error("hurwitz_zeta: pole at s = 1");
  return detail::hurwitz_zeta_regular(s, a) + 1.0 / (s - 1.0);
}

inline cplx riemann_zeta(cplx s) { return hurwitz_zeta(s, 1.0); }

}  // namespace lmoment
