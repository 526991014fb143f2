#pragma once

// Brute-force verification of the finite identities: character
// orthogonality, the B and D closed forms, Gauss-sum multiplicativity,
// Voronoi summation, the exponential-sum bound, and a Poisson sanity check.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/coefficients.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/special_functions.hpp"
#include "lmoment/voronoi.hpp"

namespace lmoment {

struct VerificationReport {
  std::string name;
  std::size_t cases_run = 0;
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string worst_case;
  // Set when the check fails for a reason the statement itself excludes
  // (a non-cuspidal source in the exponential-sum bound).
  bool flagged_exception = false;

  static VerificationReport start(std::string name, double tolerance) {
    VerificationReport r;
    r.name = std::move(name);
    r.tolerance = tolerance;
    return r;
  }

  void record(double deviation, const std::string& where) {
    ++cases_run;
    if (!(deviation <= max_abs_deviation)) {
      max_abs_deviation = deviation;
      worst_case = where;
    }
  }
  VerificationReport& finish() {
    passed = max_abs_deviation <= tolerance;
    return *this;
  }
};

/// Every product of two distinct odd primes up to q_max, ascending.
inline std::vector<Modulus> odd_semiprimes_up_to(i64 q_max) {
  std::vector<Modulus> out;
  for (i64 q = 15; q <= q_max; q += 2) {
    const auto fs = factorize(q);
    if (fs.size() == 2 && fs[0].second == 1 && fs[1].second == 1 && fs[0].first > 2) out.emplace_back(q);
  }
  return out;
}

/// (1/phi(q)) sum_chi chi(a) conj(chi(b)) = [a == b] over all unit pairs.
inline VerificationReport verify_orthogonality(const std::vector<Modulus>& moduli, double tolerance = 1e-10) {
  auto r = VerificationReport::start("orthogonality", tolerance);
  for (const auto& m : moduli) {
    const i64 q = m.value();
    const auto chars = enumerate_characters(m);
    const auto& roots = chars.front().roots();
    const int L = chars.front().order();
    std::vector<i64> units;
    for (i64 a = 1; a < q; ++a)
      if (gcd(a, q) == 1) units.push_back(a);
    for (i64 a : units) {
      for (i64 b : units) {
        CompensatedSum<cplx> acc;
        for (const auto& chi : chars) {
          int ph = chi.phase(a) - chi.phase(b);
          if (ph < 0) ph += L;
          acc.add(roots[static_cast<std::size_t>(ph)]);
        }
        const cplx mean = acc.value() / static_cast<double>(m.phi());
        const double expected = a == b ? 1.0 : 0.0;
        r.record(std::abs(mean - expected), "q=" + std::to_string(q) + " a=" + std::to_string(a) +
                                                " b=" + std::to_string(b));
      }
    }
  }
  return r.finish();
}

namespace detail {

template <class Direct, class Formula>
VerificationReport verify_family_identity(const char* name, const std::vector<Modulus>& moduli, i64 ab_limit,
                                          double tolerance, Direct direct, Formula formula) {
  auto r = VerificationReport::start(name, tolerance);
  for (const auto& m : moduli) {
    const CharacterFamily family(m);
    const i64 q = m.value();
    for (i64 a = 1; a <= ab_limit; ++a) {
      if (gcd(a, q) != 1) continue;
      for (i64 b = 1; b <= ab_limit; ++b) {
        if (gcd(b, q) != 1) continue;
        const double dev = std::abs(direct(family, a, b) - formula(family, a, b));
        r.record(dev, "q=" + std::to_string(q) + " a=" + std::to_string(a) + " b=" + std::to_string(b));
      }
    }
  }
  return r.finish();
}

}  // namespace detail

inline VerificationReport verify_B_identity(const std::vector<Modulus>& moduli, i64 ab_limit = 50,
                                            double tolerance = 1e-9) {
  return detail::verify_family_identity(
      "B_identity", moduli, ab_limit, tolerance,
      [](const CharacterFamily& f, i64 a, i64 b) { return f.B_direct(a, b); },
      [](const CharacterFamily& f, i64 a, i64 b) { return f.B_formula(a, b); });
}

inline VerificationReport verify_D_identity(const std::vector<Modulus>& moduli, i64 ab_limit = 50,
                                            double tolerance = 1e-9) {
  return detail::verify_family_identity(
      "D_identity", moduli, ab_limit, tolerance,
      [](const CharacterFamily& f, i64 a, i64 b) { return f.D_direct(a, b); },
      [](const CharacterFamily& f, i64 a, i64 b) { return f.D_formula(a, b); });
}

inline VerificationReport verify_gauss_mult(const std::vector<Modulus>& moduli, double tolerance = 1e-9) {
  auto r = VerificationReport::start("gauss_multiplicativity", tolerance);
  for (const auto& m : moduli) {
    const auto rep = gauss_multiplicativity_check(m);
    r.cases_run += rep.pairs;
    if (!(rep.max_deviation <= r.max_abs_deviation)) {
      r.max_abs_deviation = rep.max_deviation;
      r.worst_case = "q=" + std::to_string(m.value());
    }
  }
  return r.finish();
}

/// Both sides of the Voronoi formula for one additive twist:
///   sum lambda(n) e(n dbar/c) psi(n/N)  - polar
///     = c sum_± sum_n lambda(n)/n e(±nd/c) Psi±(n N / c^2).
/// The polar term is present only for the Eisenstein series.
struct VoronoiSides {
  cplx lhs;
  cplx polar;
  cplx rhs;
  std::size_t dual_terms = 0;
};

inline cplx voronoi_polar_term(const HeckeCoefficients& f, const BumpFunction& psi, i64 c, double N) {
  if (f.source() != CoefficientSource::eisenstein) return {0.0, 0.0};
  const double cd = static_cast<double>(c);
  if (std::abs(f.t()) < 1e-12) {
    // (1/c) int psi(y/N) (log y + 2 gamma - 2 log c) dy
    const double base = std::log(N) + 2.0 * std::numbers::egamma - 2.0 * std::log(cd);
    return N / cd * (mellin_log_moment(psi, 1.0) + base * mellin(psi, 1.0));
  }
  cplx acc{0.0, 0.0};
  for (double e : {1.0, -1.0}) {
    const cplx it{0.0, e * f.t()};
    acc += std::exp(-(1.0 + 2.0 * it) * std::log(cd) + (1.0 + it) * std::log(N)) * riemann_zeta(1.0 + 2.0 * it) *
           mellin(psi, 1.0 + it);
  }
  return acc;
}

/// Dual terms are kept until their size c |Psi(x)| / n stays below
/// `term_threshold` for a decade of x, and never beyond x_limit.
struct VoronoiTruncation {
  double term_threshold = 1e-12;
  double x_limit = 1e6;
};

inline VoronoiSides voronoi_sides(const HeckeCoefficients& f, const VoronoiTable& table, const BumpFunction& psi,
                                  i64 c, i64 d, double N, const VoronoiTruncation& cut = {}) {
  if (c < 1) throw std::invalid_argument("verify_voronoi: c must be positive");
  if (gcd(mod_floor(d, c), c) != 1) throw std::invalid_argument("verify_voronoi: gcd(c, d) must be 1");
  const i64 dbar = c == 1 ? 0 : mod_inverse(d, c);
  const i64 dm = mod_floor(d, c);
  const double cd = static_cast<double>(c);

  const double x_from = N / (cd * cd);
  // dual term n has size about c |Psi(x)| / n = (N / c) |Psi(x)| / x
  const double x_cut = table.tail_horizon(cut.term_threshold, x_from, std::max(cut.x_limit, x_from), N / cd);
  const auto n_cut = static_cast<std::size_t>(std::ceil(x_cut * cd * cd / N)) + 1;
  const auto n_lhs = static_cast<std::size_t>(std::ceil(psi.hi() * N));
  const std::size_t need = std::max(n_cut, n_lhs);

  const HeckeCoefficients* src = &f;
  HeckeCoefficients extended = f;
  if (f.n_max() < need) {
    extended.extend_to(need);
    src = &extended;
  }
  const HeckeCoefficients& lambda = *src;

  VoronoiSides out;
  CompensatedSum<cplx> lhs;
  for (std::size_t n = 1; n <= n_lhs; ++n) {
    const double w = psi(static_cast<double>(n) / N);
    if (w == 0.0) continue;
    const i64 r = static_cast<i64>(n % static_cast<std::size_t>(c));
    lhs.add(lambda[n] * w * e_of(static_cast<double>(mod_floor(r * dbar, c)) / cd));
  }
  out.lhs = lhs.value();
  out.polar = voronoi_polar_term(f, psi, c, N);

  CompensatedSum<cplx> rhs;
  for (std::size_t n = 1; n <= n_cut; ++n) {
    const double x = static_cast<double>(n) * N / (cd * cd);
    const i64 r = static_cast<i64>(n % static_cast<std::size_t>(c));
    const cplx tw = e_of(static_cast<double>(mod_floor(r * dm, c)) / cd);
    rhs.add(lambda[n] / static_cast<double>(n) * (tw * table(x, +1) + std::conj(tw) * table(x, -1)));
  }
  out.rhs = cd * rhs.value();
  out.dual_terms = n_cut;
  return out;
}

/// Deviation |LHS - polar - RHS| for each (c, d) twist, tolerance 1e-4.
inline VerificationReport verify_voronoi(const HeckeCoefficients& f, const VoronoiTable& table,
                                         const BumpFunction& psi, const std::vector<std::pair<i64, i64>>& twists,
                                         double N, double tolerance = 1e-4) {
  auto r = VerificationReport::start("voronoi", tolerance);
  for (auto [c, d] : twists) {
    const auto s = voronoi_sides(f, table, psi, c, d, N);
    std::ostringstream where;
    where << "t=" << f.t() << " c=" << c << " d=" << d << " N=" << N;
    r.record(std::abs(s.lhs - s.polar - s.rhs), where.str());
  }
  return r.finish();
}

inline VerificationReport verify_voronoi(const HeckeCoefficients& f, const BumpFunction& psi, i64 c, i64 d, double N,
                                         const ContourPlan& plan = ContourPlan::voronoi_default(),
                                         unsigned threads = 1, double tolerance = 1e-4) {
  const VoronoiContour contour(psi, f.spectral(), plan, threads);
  const VoronoiTable table(contour);
  return verify_voronoi(f, table, psi, {{c, d}}, N, tolerance);
}

/// Gate: max_alpha ratio at each N stays within 1.5x the first N. The
/// deviation reported is the worst growth factor against tolerance 1.5.
inline VerificationReport verify_exp_sum_bound(const HeckeCoefficients& f, const std::vector<std::size_t>& lengths,
                                               std::size_t grid_size = 200) {
  const auto rep = exp_sum_bound_check(f, lengths, grid_size);
  auto r = VerificationReport::start("exp_sum_bound", 1.5);
  std::ostringstream where;
  where << f.origin() << " ratios";
  for (std::size_t k = 0; k < rep.lengths.size(); ++k) {
    where << " N=" << rep.lengths[k] << ":" << rep.max_ratio[k] << "@" << rep.argmax_alpha[k];
    ++r.cases_run;
  }
  r.max_abs_deviation = rep.worst_growth;
  r.worst_case = where.str();
  r.finish();
  r.flagged_exception = rep.non_cuspidal_exception;
  if (r.flagged_exception) r.worst_case += " (non-cuspidal source: bound not expected)";
  return r;
}

/// sum_n g(n) = sum_m g^(m) for g(x) = exp(-((x - x0)/s)^2), whose transform
/// with e(x) = exp(2 pi i x) is s sqrt(pi) exp(-(pi m s)^2) e(-m x0).
inline cplx poisson_lhs(double s, double x0) {
  CompensatedSum<cplx> acc;
  const long K = static_cast<long>(std::ceil(std::abs(x0) + 40.0 * s)) + 2;
  for (long n = -K; n <= K; ++n) {
    const double u = (static_cast<double>(n) - x0) / s;
    acc.add(std::exp(-u * u));
  }
  return acc.value();
}

inline cplx poisson_rhs(double s, double x0) {
  CompensatedSum<cplx> acc;
  const long M = static_cast<long>(std::ceil(40.0 / (std::numbers::pi * s))) + 2;
  for (long m = -M; m <= M; ++m) {
    const double u = std::numbers::pi * static_cast<double>(m) * s;
    acc.add(s * std::sqrt(std::numbers::pi) * std::exp(-u * u) * e_of(-static_cast<double>(m) * x0));
  }
  return acc.value();
}

inline VerificationReport verify_poisson_sanity(double tolerance = 1e-10) {
  auto r = VerificationReport::start("poisson_sanity", tolerance);
  const std::vector<std::pair<double, double>> cases = {{1.0, 0.0}, {1.0, 0.3}, {0.5, 0.0},
                                                        {0.7, -0.45}, {3.0, 0.0}, {10.0, 0.25}};
  for (auto [s, x0] : cases) {
    std::ostringstream where;
    where << "width=" << s << " shift=" << x0;
    r.record(std::abs(poisson_lhs(s, x0) - poisson_rhs(s, x0)), where.str());
  }
  return r.finish();
}

struct SuiteConfig {
  i64 q_max = 221;
  i64 ab_limit = 50;
  double tolerance_exact = 1e-9;
  double tolerance_quad = 1e-4;
  unsigned threads = 1;
};

/// The full suite with default parameters. A report fails the run only if it
/// did not pass and is not a flagged exception.
inline std::vector<VerificationReport> run_identity_suite(const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  const auto moduli = odd_semiprimes_up_to(cfg.q_max);
  out.push_back(verify_orthogonality(moduli, std::min(cfg.tolerance_exact, 1e-10)));
  out.push_back(verify_B_identity(moduli, cfg.ab_limit, cfg.tolerance_exact));
  out.push_back(verify_D_identity(moduli, cfg.ab_limit, cfg.tolerance_exact));
  out.push_back(verify_gauss_mult(moduli, cfg.tolerance_exact));

  const BumpFunction psi;
  const std::vector<std::pair<i64, i64>> twists = {{1, 1}, {5, 2}, {7, 3}};
  for (double t : {0.0, 1.0}) {
    const auto f = HeckeCoefficients::eisenstein(SpectralParameter(t), 20000);
    const VoronoiContour contour(psi, f.spectral(), ContourPlan::voronoi_default(), cfg.threads);
    const VoronoiTable table(contour);
    auto rep = verify_voronoi(f, table, psi, twists, 10.0, cfg.tolerance_quad);
    rep.name = "voronoi_t" + std::to_string(static_cast<int>(t));
    out.push_back(rep);
  }

  const auto synthetic = HeckeCoefficients::synthetic(1, 4096);
  out.push_back(verify_exp_sum_bound(synthetic, {256, 1024, 4096}));
  const auto divisor = HeckeCoefficients::eisenstein(SpectralParameter(0.0), 4096);
  auto eis = verify_exp_sum_bound(divisor, {256, 1024, 4096});
  eis.name = "exp_sum_bound_eisenstein_t0";
  out.push_back(eis);

  out.push_back(verify_poisson_sanity(std::min(cfg.tolerance_exact, 1e-10)));
  return out;
}

inline bool suite_failed(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.passed && !r.flagged_exception) return true;
  return false;
}

}  // namespace lmoment
