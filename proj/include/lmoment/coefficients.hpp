#pragma once

// Hecke eigenvalue sources: tabulated files, Eisenstein series, and a seeded
// synthetic cusp-like family; Hecke extension, L(1, f), and diagnostics.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lmoment/arith.hpp"
#include "lmoment/characters.hpp"
#include "lmoment/contour.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/special_functions.hpp"

namespace lmoment {

enum class CoefficientSource { file, eisenstein, synthetic };

inline std::string to_string(CoefficientSource s) {
  switch (s) {
    case CoefficientSource::file: return "file";
    case CoefficientSource::eisenstein: return "eisenstein";
    case CoefficientSource::synthetic: return "synthetic";
  }
  return "unknown";
}

/// lambda_t(n) = sum_{ab = n} cos(t log(a/b)).
inline double eisenstein_lambda(SpectralParameter t, u64 n) {
  if (n == 0) throw std::invalid_argument("eisenstein_lambda: n must be positive");
  double acc = 0.0;
  for (u64 a = 1; a * a <= n; ++a) {
    if (n % a != 0) continue;
    const u64 b = n / a;
    const double term = std::cos(t.t * (std::log(static_cast<double>(a)) - std::log(static_cast<double>(b))));
    acc += (a == b) ? term : 2.0 * term;
  }
  return acc;
}

namespace detail {

inline u64 splitmix64(u64& state) {
  u64 z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double unit_uniform(u64& state) { return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53; }

/// 2 cos(theta) with theta Sato-Tate distributed, a pure function of (seed, p).
inline double sato_tate_value(u64 seed, u64 p) {
  u64 state = seed ^ (p * 0xd1342543de82ef95ULL);
  for (;;) {
    const double theta = std::numbers::pi * unit_uniform(state);
    const double accept = unit_uniform(state);
    const double s = std::sin(theta);
    if (accept <= s * s) return 2.0 * std::cos(theta);
  }
}

/// lambda(p^k) for k >= 0 from lambda(p) via the level-one Hecke recursion.
inline double prime_power_value(double lambda_p, int k) {
  double prev = 1.0, cur = lambda_p;
  if (k == 0) return 1.0;
  for (int j = 1; j < k; ++j) {
    const double next = lambda_p * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace detail

/// Normalized Hecke eigenvalues lambda(n) of a level-one form together with
/// its spectral parameter. Values on [1, n_max] are stored densely; values
/// beyond come from hecke_extend. Built once, then read-only.
class HeckeCoefficients {
 public:
  static HeckeCoefficients eisenstein(SpectralParameter t, std::size_t n_max = 200000) {
    HeckeCoefficients h(CoefficientSource::eisenstein, t, "eisenstein:" + format_real(t.t));
    h.values_ = eisenstein_table(t, std::max<std::size_t>(n_max, 1));
    return h;
  }

  /// Cusp-like test data: lambda(p) = 2 cos(theta_p) with theta_p drawn from
  /// the Sato-Tate law by a seeded generator, extended multiplicatively.
  static HeckeCoefficients synthetic(u64 seed, std::size_t n_max = 200000, SpectralParameter t = {}) {
    HeckeCoefficients h(CoefficientSource::synthetic, t, "synthetic:" + std::to_string(seed));
    h.seed_ = seed;
    h.values_ = multiplicative_table(std::max<std::size_t>(n_max, 1),
                                     [seed](u64 p) { return detail::sato_tate_value(seed, p); });
    return h;
  }

  /// Dense table values[n] for n = 1..size-1 (values[0] ignored), plus
  /// optional entries beyond the dense range used as prime data.
  static HeckeCoefficients from_table(SpectralParameter t, std::vector<double> values, std::string origin,
                                      std::map<u64, double> sparse = {}) {
    if (values.size() < 2) throw std::invalid_argument("HeckeCoefficients: table must contain n = 1");
    HeckeCoefficients h(CoefficientSource::file, t, std::move(origin));
    values[0] = 0.0;
    h.values_ = std::move(values);
    h.sparse_ = std::move(sparse);
    return h;
  }

  CoefficientSource source() const noexcept { return source_; }
  const std::string& origin() const noexcept { return origin_; }
  SpectralParameter spectral() const noexcept { return t_; }
  double t() const noexcept { return t_.t; }
  double theta_bound() const noexcept { return theta_bound_; }
  std::size_t n_max() const noexcept { return values_.size() - 1; }
  bool is_cuspidal() const noexcept { return source_ != CoefficientSource::eisenstein; }

  /// lambda(n) for 1 <= n <= n_max, unchecked.
  double operator[](std::size_t n) const noexcept { return values_[n]; }

  /// lambda(n) from the dense table or the extension cache.
  double at(u64 n) const {
    if (n == 0) throw std::out_of_range("HeckeCoefficients: n must be positive");
    if (n <= n_max()) return values_[n];
    if (auto it = sparse_.find(n); it != sparse_.end()) return it->second;
    throw std::out_of_range("HeckeCoefficients: lambda(" + std::to_string(n) + ") not available");
  }

  /// lambda(p) for a prime p, from the table or the generating rule.
  std::optional<double> prime_value(u64 p) const {
    if (p <= n_max()) return values_[p];
    if (auto it = sparse_.find(p); it != sparse_.end()) return it->second;
    if (source_ == CoefficientSource::eisenstein) return 2.0 * std::cos(t_.t * std::log(static_cast<double>(p)));
    if (source_ == CoefficientSource::synthetic) return detail::sato_tate_value(seed_, p);
    return std::nullopt;
  }

  /// lambda(n) assembled from prime data through the Hecke relations.
  double derive(u64 n) const {
    double out = 1.0;
    for (auto [p, e] : factorize(static_cast<i64>(n))) {
      const auto lp = prime_value(static_cast<u64>(p));
      if (!lp) throw std::out_of_range("hecke_extend: missing prime value lambda(" + std::to_string(p) + ")");
      out *= detail::prime_power_value(*lp, e);
    }
    return out;
  }

  /// Grows the dense table to cover [1, n]. Single-writer; call before any
  /// concurrent reads.
  void extend_to(std::size_t n) {
    if (n <= n_max()) return;
    if (source_ == CoefficientSource::eisenstein) {
      values_ = eisenstein_table(t_, n);
      return;
    }
    const std::size_t old = n_max();
    std::vector<double> grown = multiplicative_table(n, [this](u64 p) {
      const auto v = prime_value(p);
      if (!v) throw std::out_of_range("hecke_extend: missing prime value lambda(" + std::to_string(p) + ")");
      return *v;
    });
    for (std::size_t k = 1; k <= old; ++k) grown[k] = values_[k];
    values_ = std::move(grown);
  }

  void cache(u64 n, double value) { sparse_[n] = value; }

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  HeckeCoefficients(CoefficientSource s, SpectralParameter t, std::string origin)
      : source_(s), t_(t), origin_(std::move(origin)) {}

  static std::string format_real(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  // Definitional divisor sweep, so the Hecke relations remain a genuine check.
  static std::vector<double> eisenstein_table(SpectralParameter t, std::size_t n) {
    std::vector<double> logs(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) logs[k] = std::log(static_cast<double>(k));
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t a = 1; a <= n; ++a)
      for (std::size_t b = 1; a * b <= n; ++b) out[a * b] += std::cos(t.t * (logs[a] - logs[b]));
    return out;
  }

  template <class PrimeRule>
  static std::vector<double> multiplicative_table(std::size_t n, PrimeRule&& rule) {
    const auto spf = smallest_prime_factors(n);
    std::vector<double> out(n + 1, 0.0);
    if (n >= 1) out[1] = 1.0;
    for (std::size_t k = 2; k <= n; ++k) {
      const std::size_t p = spf[k];
      std::size_t rest = k;
      int e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      if (rest == 1) {
        if (e == 1) {
          out[k] = rule(static_cast<u64>(p));
        } else {
          const double lp = out[p];
          out[k] = lp * out[k / p] - out[k / (p * p)];
        }
      } else {
        out[k] = out[k / rest] * out[rest];
      }
    }
    return out;
  }

  CoefficientSource source_;
  SpectralParameter t_;
  std::string origin_;
  double theta_bound_ = 7.0 / 64.0;
  u64 seed_ = 0;
  std::vector<double> values_{0.0, 1.0};
  std::map<u64, double> sparse_;
};

/// lambda(n), computing it from prime values through the Hecke relations when
/// n lies beyond the stored table and caching the result.
inline double hecke_extend(HeckeCoefficients& h, u64 n) {
  if (n == 0) throw std::invalid_argument("hecke_extend: n must be positive");
  if (n <= h.n_max()) return h[n];
  try {
    return h.at(n);
  } catch (const std::out_of_range&) {
  }
  const double v = h.derive(n);
  h.cache(n, v);
  return v;
}

/// Parses "t <decimal>" followed by "<n> <decimal>" rows. '#' starts a
/// comment line; blank lines and CRLF endings are accepted. Rows must start
/// at n = 1 and increase strictly. Gaps are filled from prime data where the
/// Hecke relations allow; the dense range stops at the first gap that cannot
/// be filled, and later rows are kept as extension data.
inline HeckeCoefficients parse_coefficients(std::istream& in, const std::string& origin) {
  auto fail = [&](std::size_t line_no, const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto parse_real = [&](std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail(line_no, "malformed number '" + std::string(tok) + "'");
    return v;
  };
  auto split = [](std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  };

  std::optional<double> t;
  std::map<u64, double> rows;
  u64 last_n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 2) fail(line_no, "expected two fields");
    if (!t) {
      if (tokens[0] != "t") fail(line_no, "first line must be 't <decimal>'");
      t = parse_real(tokens[1], line_no);
      continue;
    }
    u64 n = 0;
    const auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), n);
    if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size() || n == 0)
      fail(line_no, "malformed index '" + std::string(tokens[0]) + "'");
    if (last_n == 0 && n != 1) fail(line_no, "first row must be n = 1");
    if (n <= last_n) fail(line_no, "indices must increase strictly");
    last_n = n;
    rows[n] = parse_real(tokens[1], line_no);
  }
  if (!t) throw std::runtime_error(origin + ": missing 't <decimal>' header");
  if (rows.empty() || rows.begin()->first != 1) throw std::runtime_error(origin + ": missing n = 1");
  if (std::abs(rows[1] - 1.0) > 1e-6) throw std::runtime_error(origin + ": lambda(1) must equal 1");
  rows[1] = 1.0;

  // Dense prefix, filling gaps from prime rows when possible.
  std::vector<double> dense{0.0, 1.0};
  auto prime_row = [&](u64 p) -> std::optional<double> {
    if (auto it = rows.find(p); it != rows.end()) return it->second;
    return std::nullopt;
  };
  for (u64 n = 2; n <= last_n; ++n) {
    if (auto it = rows.find(n); it != rows.end()) {
      dense.push_back(it->second);
      continue;
    }
    double v = 1.0;
    bool ok = true;
    for (auto [p, e] : factorize(static_cast<i64>(n))) {
      const auto lp = prime_row(static_cast<u64>(p));
      if (!lp) {
        ok = false;
        break;
      }
      v *= detail::prime_power_value(*lp, e);
    }
    if (!ok) break;
    dense.push_back(v);
  }
  std::map<u64, double> sparse;
  for (auto it = rows.upper_bound(dense.size() - 1); it != rows.end(); ++it) sparse.insert(*it);
  return HeckeCoefficients::from_table(SpectralParameter(*t), std::move(dense), origin, std::move(sparse));
}

inline HeckeCoefficients load_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open coefficient file " + path.string());
  return parse_coefficients(in, path.string());
}

/// Largest departures from the Hecke relations over the stored range.
struct HeckeResiduals {
  double multiplicativity = 0.0;  // |lambda(m)lambda(n) - sum_{d | (m,n)} lambda(mn/d^2)|
  double prime_power = 0.0;       // |lambda(p)lambda(p^k) - lambda(p^{k+1}) - lambda(p^{k-1})|
  std::size_t pairs_checked = 0;
  std::string worst_case;
};

/// Checks every pair m <= n with mn <= limit (limit 0 means n_max).
inline HeckeResiduals hecke_residuals(const HeckeCoefficients& h, std::size_t limit = 0) {
  const std::size_t L = (limit == 0 || limit > h.n_max()) ? h.n_max() : limit;
  HeckeResiduals r;
  for (std::size_t m = 2; m * m <= L; ++m) {
    for (std::size_t n = m; m * n <= L; ++n) {
      const std::size_t g = static_cast<std::size_t>(gcd(static_cast<i64>(m), static_cast<i64>(n)));
      double rhs = 0.0;
      for (std::size_t d = 1; d <= g; ++d)
        if (g % d == 0) rhs += h[m * n / (d * d)];
      const double dev = std::abs(h[m] * h[n] - rhs);
      ++r.pairs_checked;
      if (dev > r.multiplicativity) {
        r.multiplicativity = dev;
        r.worst_case = "m=" + std::to_string(m) + " n=" + std::to_string(n);
      }
    }
  }
  const auto spf = smallest_prime_factors(L);
  for (std::size_t p = 2; p * p <= L; ++p) {
    if (spf[p] != p) continue;
    std::size_t prev = 1, cur = p;
    while (cur <= L / p) {
      const std::size_t next = cur * p;
      const double dev = std::abs(h[p] * h[cur] - h[next] - h[prev]);
      r.prime_power = std::max(r.prime_power, dev);
      prev = cur;
      cur = next;
    }
  }
  return r;
}

/// Fraction of n <= n_max with |lambda(n)| > d(n) n^theta.
inline double ramanujan_violation_fraction(const HeckeCoefficients& h) {
  const std::size_t N = h.n_max();
  const auto d = divisor_counts(N);
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= N; ++n)
    if (std::abs(h[n]) > d[n] * std::pow(static_cast<double>(n), h.theta_bound()) * (1.0 + 1e-12)) ++bad;
  return static_cast<double>(bad) / static_cast<double>(N);
}

struct LOneEstimate {
  double value = 0.0;
  double spread = 0.0;  // |v(X2) - v(X1)| between the two smoothing scales
  double x_small = 0.0;
  double x_large = 0.0;
};

/// L(1, f) from sum lambda(n) e^{-n/X} / n at X = n_max/20 and n_max/10,
/// extrapolated linearly in 1/X. For Eisenstein data the two polar terms
/// Gamma(±it) X^{±it} zeta(1 ± 2it) of the smoothed sum are removed first.
inline LOneEstimate l_one(const HeckeCoefficients& f) {
  if (f.n_max() < 10000) throw std::invalid_argument("l_one: coefficients needed to n >= 10^4");
  const bool eis = f.source() == CoefficientSource::eisenstein;
  if (eis && std::abs(f.t()) < 1e-12) throw std::domain_error("L(1,f) divergent: Eisenstein series at t = 0");
  const double N = static_cast<double>(f.n_max());
  auto smoothed = [&](double X) {
    CompensatedSum<double> acc;
    for (std::size_t n = 1; n <= f.n_max(); ++n) {
      const double x = static_cast<double>(n);
      acc.add(f[n] * std::exp(-x / X) / x);
    }
    double v = acc.value();
    if (eis) {
      const cplx it{0.0, f.t()};
      const cplx polar = std::exp(log_gamma(it) + it * std::log(X)) * riemann_zeta(1.0 + 2.0 * it);
      v -= 2.0 * polar.real();
    }
    return v;
  };
  LOneEstimate e;
  e.x_small = N / 20.0;
  e.x_large = N / 10.0;
  const double v1 = smoothed(e.x_small);
  const double v2 = smoothed(e.x_large);
  e.value = 2.0 * v2 - v1;
  e.spread = std::abs(v2 - v1);
  return e;
}

struct ExpSumReport {
  std::vector<std::size_t> lengths;
  std::vector<double> max_ratio;         // max_alpha |S(alpha, N)| / N^0.6
  std::vector<double> argmax_alpha;
  std::vector<double> alpha_zero_ratio;  // |S(0, N)| / N^0.6
  bool bounded = false;                  // every ratio <= 1.5 x the first
  bool non_cuspidal_exception = false;   // unbounded, and the source is not cuspidal
  double worst_growth = 0.0;             // max_N ratio(N) / ratio(N_0)
};

/// Normalized sup over alpha in {j / grid_size} of |sum_{n <= N} lambda(n) e(alpha n)|.
inline ExpSumReport exp_sum_bound_check(const HeckeCoefficients& f, const std::vector<std::size_t>& lengths,
                                        std::size_t grid_size = 200) {
  if (lengths.empty() || grid_size == 0) throw std::invalid_argument("exp_sum_bound_check: empty input");
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (lengths[k] > f.n_max()) throw std::out_of_range("exp_sum_bound_check: N exceeds coefficient range");
    if (k > 0 && lengths[k] <= lengths[k - 1]) throw std::invalid_argument("exp_sum_bound_check: N not increasing");
  }
  ExpSumReport r;
  r.lengths = lengths;
  r.max_ratio.assign(lengths.size(), 0.0);
  r.argmax_alpha.assign(lengths.size(), 0.0);
  r.alpha_zero_ratio.assign(lengths.size(), 0.0);
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double alpha = static_cast<double>(j) / static_cast<double>(grid_size);
    cplx acc{0.0, 0.0};
    std::size_t k = 0;
    for (std::size_t n = 1; n <= lengths.back(); ++n) {
      acc += f[n] * e_of(static_cast<double>((j * n) % grid_size) / static_cast<double>(grid_size));
      if (n == lengths[k]) {
        const double ratio = std::abs(acc) / std::pow(static_cast<double>(n), 0.6);
        if (ratio > r.max_ratio[k]) {
          r.max_ratio[k] = ratio;
          r.argmax_alpha[k] = alpha;
        }
        if (j == 0) r.alpha_zero_ratio[k] = ratio;
        ++k;
      }
    }
  }
  r.bounded = true;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const double growth = r.max_ratio[0] > 0.0 ? r.max_ratio[k] / r.max_ratio[0] : 0.0;
    r.worst_growth = std::max(r.worst_growth, growth);
    if (r.max_ratio[k] > 1.5 * r.max_ratio[0]) r.bounded = false;
  }
  r.non_cuspidal_exception = !r.bounded && !f.is_cuspidal();
  return r;
}

}  // namespace lmoment
