#pragma once

// Bump test functions, Mellin transforms, and the Voronoi kernel/transform
// pair G±, Ψ± for a GL(2) form with spectral parameter t.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lmoment/contour.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/special_functions.hpp"

namespace lmoment {

/// Smooth bump supported on [lo, hi]: amplitude * exp(1 - 1/(1 - u^2)) with
/// u the affine image of x in (-1, 1). Default is [1, 2].
class BumpFunction {
 public:
  BumpFunction() : BumpFunction(1.0, 2.0) {}
  BumpFunction(double lo, double hi, double amplitude = 1.0) : lo_(lo), hi_(hi), amplitude_(amplitude) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
      throw std::invalid_argument("BumpFunction: support must be [lo, hi] with 0 < lo < hi");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("BumpFunction: amplitude must be finite");
  }

  double operator()(double x) const {
    const double u = (2.0 * x - (lo_ + hi_)) / (hi_ - lo_);
    if (!(std::abs(u) < 1.0)) return 0.0;
    return amplitude_ * std::exp(1.0 - 1.0 / (1.0 - u * u));
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double amplitude() const { return amplitude_; }

 private:
  double lo_, hi_, amplitude_;
};

namespace detail {

inline constexpr int kMellinParts = 8;

/// Taylor coefficients g_k = g^{(k)}(v) / k!, k = 0..kMellinParts, of
/// g(v) = psi(e^v), by truncated power-series arithmetic.
inline std::array<double, kMellinParts + 1> bump_log_jet(const BumpFunction& psi, double v) {
  constexpr int K = kMellinParts;
  using Jet = std::array<double, K + 1>;
  Jet out{};
  const double x = std::exp(v);
  const double width = psi.hi() - psi.lo();
  if (!(std::abs((2.0 * x - (psi.lo() + psi.hi())) / width) < 1.0)) return out;
  auto exp_jet = [](const Jet& a) {
    Jet b{};
    b[0] = std::exp(a[0]);
    for (int n = 1; n <= K; ++n) {
      double acc = 0.0;
      for (int k = 1; k <= n; ++k) acc += k * a[k] * b[n - k];
      b[n] = acc / n;
    }
    return b;
  };
  Jet unit{};
  unit[0] = v;
  unit[1] = 1.0;
  const Jet ex = exp_jet(unit);  // e^v
  Jet u{};
  for (int k = 0; k <= K; ++k) u[k] = 2.0 * ex[k] / width;
  u[0] -= (psi.lo() + psi.hi()) / width;
  Jet w{};  // 1 - u^2
  for (int n = 0; n <= K; ++n) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) acc += u[k] * u[n - k];
    w[n] = -acc;
  }
  w[0] += 1.0;
  Jet r{};  // 1 / w
  for (int n = 0; n <= K; ++n) {
    double acc = n == 0 ? 1.0 : 0.0;
    for (int k = 1; k <= n; ++k) acc -= w[k] * r[n - k];
    r[n] = acc / w[0];
  }
  Jet a{};
  for (int k = 0; k <= K; ++k) a[k] = -r[k];
  a[0] += 1.0;
  const Jet g = exp_jet(a);
  for (int k = 0; k <= K; ++k) out[k] = psi.amplitude() * g[k];
  return out;
}

/// int psi(e^v) w(v) dv over log-support by trapezoid, doubling the point
/// count until two successive refinements agree to `tol`. The integrand
/// vanishes to all orders at both ends, so convergence is super-algebraic.
template <class W>
cplx log_trapezoid(const BumpFunction& psi, W&& weight, double frequency_hint, double tol = 1e-14) {
  const double a = std::log(psi.lo());
  const double b = std::log(psi.hi());
  const double len = b - a;
  std::size_t n = 64 + 2 * static_cast<std::size_t>(std::ceil(frequency_hint * len / (2.0 * std::numbers::pi)));
  auto rule = [&](std::size_t m) {
    CompensatedSum<cplx> acc;
    const double dv = len / static_cast<double>(m);
    for (std::size_t k = 1; k < m; ++k) {
      const double v = a + dv * static_cast<double>(k);
      acc.add(psi(std::exp(v)) * weight(v));
    }
    return acc.value() * dv;
  };
  cplx prev = rule(n);
  int agreements = 0;
  for (int round = 0; round < 16; ++round) {
    n *= 2;
    const cplx next = rule(n);
    if (std::abs(next - prev) <= tol * std::max(1.0, std::abs(next))) {
      if (++agreements == 2) return next;
    } else {
      agreements = 0;
    }
    prev = next;
  }
  return prev;
}

}  // namespace detail

/// psi~(s) = int_0^inf psi(x) x^{s-1} dx.
inline cplx mellin(const BumpFunction& psi, cplx s) {
  return detail::log_trapezoid(psi, [s](double v) { return std::exp(s * v); }, std::abs(s.imag()));
}

/// int_0^inf psi(x) x^{s-1} log x dx, the s-derivative of the Mellin transform.
inline cplx mellin_log_moment(const BumpFunction& psi, cplx s) {
  return detail::log_trapezoid(psi, [s](double v) { return v * std::exp(s * v); }, std::abs(s.imag()));
}

inline double integrate(const BumpFunction& psi) { return mellin(psi, 1.0).real(); }

/// The two Gamma-ratio terms of 2 pi G±(s), each already divided by 2 pi:
/// G±(s) = even ± odd.
struct VoronoiKernelParts {
  cplx even;
  cplx odd;
};

inline VoronoiKernelParts voronoi_kernel_parts(cplx s, SpectralParameter t) {
  const cplx it{0.0, t.t};
  const std::array<cplx, 8> args = {(1.0 + s + it) / 2.0, (1.0 + s - it) / 2.0, (-s + it) / 2.0,
                                    (-s - it) / 2.0,      (2.0 + s + it) / 2.0, (2.0 + s - it) / 2.0,
                                    (1.0 - s + it) / 2.0, (1.0 - s - it) / 2.0};
  for (const cplx& z : args)
    if (detail::near_nonpositive_integer(z, 1e-8))
      throw std::domain_error("voronoi_kernel: Gamma argument within 1e-8 of a pole");
  const double two_pi = 2.0 * std::numbers::pi;
  // paired sums are unchanged when conj(s) swaps the ±it arguments, so the
  // kernel is exactly Schwarz symmetric even where even + odd cancels
  const cplx even =
      std::exp((log_gamma(args[0]) + log_gamma(args[1])) - (log_gamma(args[2]) + log_gamma(args[3]))) / two_pi;
  const cplx odd =
      std::exp((log_gamma(args[4]) + log_gamma(args[5])) - (log_gamma(args[6]) + log_gamma(args[7]))) / two_pi;
  return {even, odd};
}

/// G±(s); sign must be +1 or -1.
inline cplx voronoi_kernel(cplx s, SpectralParameter t, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("voronoi_kernel: sign must be +1 or -1");
  const auto parts = voronoi_kernel_parts(s, t);
  return sign > 0 ? parts.even + parts.odd : parts.even - parts.odd;
}

/// Trapezoid discretization of
///   Psi±(x) = (1/2 pi i) int_(sigma) (pi^2 x)^{-s} G±(s) psi~(-s) ds
/// with the kernel and Mellin factors precomputed on every node of the plan.
class VoronoiContour {
 public:
  VoronoiContour(const BumpFunction& psi, SpectralParameter t, ContourPlan plan = ContourPlan::voronoi_default(),
                 unsigned threads = 1)
      : psi_(psi), t_(t), plan_(plan) {
    plan_.validate();
    if (plan_.sigma <= -1.0) throw std::invalid_argument("VoronoiContour: sigma must exceed -1");
    half_ = plan_.half_nodes();
    const std::vector<cplx> mel = mellin_line();
    const std::size_t count = 2 * half_ + 1;
    const double h = plan_.step;
    struct Pair {
      cplx plus, minus;
    };
    auto nodes = parallel_map(count, threads, [&](std::size_t idx) {
      const long j = static_cast<long>(idx) - static_cast<long>(half_);
      const cplx s{plan_.sigma, h * static_cast<double>(j)};
      const auto parts = voronoi_kernel_parts(s, t_);
      const cplx m = j >= 0 ? mel[static_cast<std::size_t>(j)] : std::conj(mel[static_cast<std::size_t>(-j)]);
      const double w = (static_cast<std::size_t>(std::labs(j)) == half_ ? 0.5 : 1.0) * h;
      return Pair{w * (parts.even + parts.odd) * m, w * (parts.even - parts.odd) * m};
    });
    plus_.resize(count);
    minus_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      plus_[i] = nodes[i].plus;
      minus_[i] = nodes[i].minus;
    }
  }

  /// Direct quadrature sum at a single x.
  cplx transform(double x, int sign) const {
    if (!(x > 0.0)) throw std::domain_error("voronoi_transform: x must be positive");
    if (sign != 1 && sign != -1) throw std::invalid_argument("voronoi_transform: sign must be +1 or -1");
    const std::vector<cplx>& c = sign > 0 ? plus_ : minus_;
    const double L = std::log(std::numbers::pi * std::numbers::pi * x);
    const double h = plan_.step;
    // sum_j c_j e^{-i tau_j L}, tau_j = j h, j = -J..J
    CompensatedSum<cplx> acc;
    acc.add(c[half_]);
    const cplx rot = std::polar(1.0, -h * L);
    cplx phase = rot;
    for (std::size_t j = 1; j <= half_; ++j) {
      if (j % 64 == 0) phase = std::polar(1.0, -h * L * static_cast<double>(j));
      acc.add(c[half_ + j] * phase + c[half_ - j] * std::conj(phase));
      phase *= rot;
    }
    return std::exp(-plan_.sigma * L) * acc.value() / (2.0 * std::numbers::pi);
  }

  const BumpFunction& psi() const { return psi_; }
  SpectralParameter spectral() const { return t_; }
  const ContourPlan& plan() const { return plan_; }
  std::size_t half_nodes() const { return half_; }
  /// Node coefficients h G±(s_j) psi~(-s_j), index j + J.
  const std::vector<cplx>& coefficients(int sign) const { return sign > 0 ? plus_ : minus_; }

 private:
  // psi~(-sigma - i tau_j) for j = 0..J by a fixed trapezoid in v = log x.
  // The point count puts the first alias frequency at 4 (H + 6000). For
  // |s| >= 200 the integral is taken after integrating by parts K times,
  //   int g e^{-sv} dv = s^{-K} int g^{(K)} e^{-sv} dv,
  // which divides the rounding floor by |s|^K where psi~ itself is tiny.
  // Without it the line at sigma > 1 loses everything to cancellation.
  std::vector<cplx> mellin_line() const {
    constexpr int K = detail::kMellinParts;
    constexpr double kPartsFrom = 200.0;
    constexpr double kAliasFactor = 4.0;
    const double a = std::log(psi_.lo());
    const double len = std::log(psi_.hi()) - a;
    const auto m = static_cast<std::size_t>(
        std::max(256.0, std::ceil(kAliasFactor * (plan_.height + 6000.0) * len / (2.0 * std::numbers::pi))));
    const double dv = len / static_cast<double>(m);
    double k_factorial = 1.0;
    for (int k = 2; k <= K; ++k) k_factorial *= k;
    std::vector<double> v(m - 1);
    std::vector<cplx> weight(m - 1), weight_k(m - 1), rot(m - 1), phase(m - 1);
    const double h = plan_.step;
    for (std::size_t k = 1; k < m; ++k) {
      v[k - 1] = a + dv * static_cast<double>(k);
      const auto jet = detail::bump_log_jet(psi_, v[k - 1]);
      const double damp = std::exp(-plan_.sigma * v[k - 1]) * dv;
      weight[k - 1] = jet[0] * damp;
      weight_k[k - 1] = jet[K] * k_factorial * damp;
      rot[k - 1] = std::polar(1.0, -h * v[k - 1]);
      phase[k - 1] = 1.0;
    }
    std::vector<cplx> out(half_ + 1);
    for (std::size_t j = 0; j <= half_; ++j) {
      if (j % 256 == 0)
        for (std::size_t k = 0; k + 1 < m; ++k) phase[k] = std::polar(1.0, -h * static_cast<double>(j) * v[k]);
      const cplx s{plan_.sigma, h * static_cast<double>(j)};
      const bool parts = std::abs(s) >= kPartsFrom;
      const std::vector<cplx>& w = parts ? weight_k : weight;
      cplx acc{0.0, 0.0};
      for (std::size_t k = 0; k + 1 < m; ++k) {
        acc += w[k] * phase[k];
        phase[k] *= rot[k];
      }
      out[j] = parts ? acc / std::pow(s, K) : acc;
    }
    return out;
  }

  BumpFunction psi_;
  SpectralParameter t_;
  ContourPlan plan_;
  std::size_t half_ = 0;
  std::vector<cplx> plus_;
  std::vector<cplx> minus_;
};

/// Psi±(x) by direct quadrature. Builds the node table on every call; reuse a
/// VoronoiContour when evaluating at more than a few points.
inline cplx voronoi_transform(double x, const BumpFunction& psi, SpectralParameter t, int sign,
                              const ContourPlan& plan = ContourPlan::voronoi_default()) {
  if (!(x > 0.0)) throw std::domain_error("voronoi_transform: x must be positive");
  return VoronoiContour(psi, t, plan).transform(x, sign);
}

/// Batch evaluation of Psi± on a log grid. The trapezoid sum is periodic in
/// L = log(pi^2 x) with period 2 pi / h; one FFT gives it on a fine grid of
/// that period and a 16-point Lagrange stencil interpolates between nodes.
class VoronoiTable {
 public:
  explicit VoronoiTable(const VoronoiContour& contour)
      : sigma_(contour.plan().sigma), period_(2.0 * std::numbers::pi / contour.plan().step) {
    const std::size_t count = 2 * contour.half_nodes() + 1;
    size_ = 1;
    while (size_ < 16 * count) size_ <<= 1;
    plus_ = transform_nodes(contour, +1);
    minus_ = transform_nodes(contour, -1);
  }

  cplx operator()(double x, int sign) const {
    if (!(x > 0.0)) throw std::domain_error("VoronoiTable: x must be positive");
    const double L = std::log(std::numbers::pi * std::numbers::pi * x);
    return std::exp(-sigma_ * L) * interpolate(sign > 0 ? plus_ : minus_, L) / (2.0 * std::numbers::pi);
  }

  /// Truncation point for a dual sum whose terms are about weight |Psi(x)| / x.
  /// Scans the grid upward from x_from and returns the last x where that
  /// size reaches `threshold`, once a full decade beyond it stays below.
  /// The decade rule keeps the discretization floor of a coarse plan, which
  /// grows with x, from pushing the cut to x_limit.
  double tail_horizon(double threshold, double x_from, double x_limit, double weight = 1.0) const {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double dL = period_ / static_cast<double>(size_);
    const auto k_begin = static_cast<long>(std::floor(std::log(pi2 * x_from) / dL));
    const auto k_end = static_cast<long>(std::ceil(std::log(pi2 * x_limit) / dL));
    const auto decade = static_cast<long>(std::ceil(std::log(10.0) / dL));
    double last = x_from;
    long last_k = k_begin;
    for (long k = k_begin; k <= k_end; ++k) {
      const double L = dL * static_cast<double>(k);
      const std::size_t idx = wrap(k);
      const double x = std::exp(L) / pi2;
      const double size = std::exp(-sigma_ * L) / (2.0 * std::numbers::pi) * weight / x *
                          std::max(std::abs(plus_[idx]), std::abs(minus_[idx]));
      if (size >= threshold) {
        last = std::max(x_from, x);
        last_k = k;
      } else if (k - last_k > decade) {
        break;
      }
    }
    return last;
  }

  std::size_t grid_size() const { return size_; }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  std::size_t wrap(long k) const {
    const long m = static_cast<long>(size_);
    long r = k % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
  }

  std::vector<cplx> transform_nodes(const VoronoiContour& contour, int sign) const {
    const auto& c = contour.coefficients(sign);
    const long half = static_cast<long>(contour.half_nodes());
    std::vector<cplx> data(size_, cplx{0.0, 0.0});
    for (long j = -half; j <= half; ++j) data[wrap(j)] = c[static_cast<std::size_t>(j + half)];
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan p;
    {
      std::lock_guard lock(planner_mutex());
      p = fftw_plan_dft_1d(static_cast<int>(size_), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(p);
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(p);
    }
    return data;
  }

  cplx interpolate(const std::vector<cplx>& grid, double L) const {
    constexpr int kHalfWidth = 8;
    const double pos = L / period_ * static_cast<double>(size_);
    const double base = std::floor(pos);
    const double frac = pos - base;
    const auto k0 = static_cast<long>(base);
    cplx acc{0.0, 0.0};
    for (int a = -kHalfWidth + 1; a <= kHalfWidth; ++a) {
      double w = 1.0;
      for (int b = -kHalfWidth + 1; b <= kHalfWidth; ++b)
        if (b != a) w *= (frac - b) / static_cast<double>(a - b);
      acc += w * grid[wrap(k0 + a)];
    }
    return acc;
  }

  double sigma_;
  double period_;
  std::size_t size_ = 0;
  std::vector<cplx> plus_;
  std::vector<cplx> minus_;
};

}  // namespace lmoment
