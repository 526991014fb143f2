#pragma once

// First twisted moment over the even primitive family: family sum, main
// term, the S1 + S2 split, and trend tables.

#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/coefficients.hpp"
#include "lmoment/lvalues.hpp"
#include "lmoment/parallel.hpp"

namespace lmoment {

struct MomentReport {
  i64 q = 0;
  i64 q1 = 0;
  i64 q2 = 0;
  cplx family_sum;
  double main_term = 0.0;
  cplx ratio;
  cplx s1;
  cplx s2;
  std::size_t num_characters = 0;
  i64 runtime_ms = 0;
};

/// Per-character products in family order.
inline std::vector<cplx> family_products(const ProductEvaluator& eval, const CharacterFamily& family,
                                         unsigned threads = 1) {
  return parallel_map(family.size(), threads,
                      [&](std::size_t k) { return eval(family.member(k), family.member_gauss_sum(k)); });
}

/// Sum of L(1/2, f x chi) conj(L(1/2, chi)) over even primitive chi mod q,
/// reduced in ascending character order.
inline cplx family_sum(const HeckeCoefficients& f, const Modulus& m, const AfeOptions& opts = {},
                       unsigned threads = 1) {
  const CharacterFamily family(m);
  if (family.size() == 0) return {0.0, 0.0};
  const ProductEvaluator eval(f, m, opts);
  return ordered_sum(family_products(eval, family, threads));
}

/// phi(q)/2 prod_{p | q} (1 - lambda(p)/p + 1/p^2) L(1, f) for q = q1 q2, and
/// (q - 2)/2 L(1, f) for prime q. L(1, f) may be supplied to avoid
/// recomputation.
inline double main_term(const HeckeCoefficients& f, const Modulus& m, std::optional<double> l1 = std::nullopt) {
  const double L = l1 ? *l1 : l_one(f).value;
  if (m.is_prime()) return (static_cast<double>(m.value()) - 2.0) / 2.0 * L;
  double euler = 1.0;
  for (const auto& pp : m.factors()) {
    const auto lp = f.prime_value(static_cast<u64>(pp.prime));
    if (!lp) throw std::out_of_range("main_term: lambda(" + std::to_string(pp.prime) + ") unavailable");
    const double p = static_cast<double>(pp.prime);
    euler *= 1.0 - *lp / p + 1.0 / (p * p);
  }
  return static_cast<double>(m.phi()) / 2.0 * euler * L;
}

/// Which evaluation of the family sums B and D feeds the decomposition.
enum class IdentityRoute { direct, formula };

struct Decomposition {
  cplx s1;
  cplx s2;
  cplx family_sum;
  double residual = 0.0;  // |s1 + s2 - family_sum|
};

/// S1 = sum_{m,n} lambda(n) V_{mn}/sqrt(mn) B(m, n) and
/// S2 = q^{-1/2} sum_{m,n} lambda(n) V_{mn}/sqrt(mn) D(m, n) over the AFE
/// horizon. Pairs with gcd(mn, q) > 1 contribute nothing. Throws if the
/// split misses the supplied family sum by more than `tolerance`.
inline Decomposition s1_s2_decomposition(const ProductEvaluator& eval, cplx family_total,
                                         IdentityRoute route = IdentityRoute::direct, double tolerance = 1e-6) {
  const Modulus& m = eval.modulus();
  const i64 q = m.value();
  const CharacterFamily family(m);
  const auto qs = static_cast<std::size_t>(q);
  std::vector<cplx> B(qs * qs, cplx{0.0, 0.0}), D(qs * qs, cplx{0.0, 0.0});
  for (i64 a = 1; a < q; ++a) {
    if (gcd(a, q) != 1) continue;
    for (i64 b = 1; b < q; ++b) {
      if (gcd(b, q) != 1) continue;
      const std::size_t idx = static_cast<std::size_t>(a) * qs + static_cast<std::size_t>(b);
      B[idx] = route == IdentityRoute::direct ? family.B_direct(a, b) : family.B_formula(a, b);
      D[idx] = route == IdentityRoute::direct ? family.D_direct(a, b) : family.D_formula(a, b);
    }
  }
  const auto& w = eval.weights();
  const auto& lambda = eval.coefficients();
  const std::size_t T = eval.truncation();
  CompensatedSum<cplx> s1, s2;
  for (std::size_t mm = 1; mm <= T; ++mm) {
    const std::size_t ma = mm % qs;
    if (gcd(static_cast<i64>(ma), q) != 1) continue;
    for (std::size_t n = 1; mm * n <= T; ++n) {
      const std::size_t nb = n % qs;
      const std::size_t idx = ma * qs + nb;
      if (B[idx] == cplx{0.0, 0.0} && D[idx] == cplx{0.0, 0.0}) continue;
      const double c = lambda[n] * w[mm * n];
      s1.add(c * B[idx]);
      s2.add(c * D[idx]);
    }
  }
  Decomposition out;
  out.s1 = s1.value();
  out.s2 = s2.value() / std::sqrt(static_cast<double>(q));
  out.family_sum = family_total;
  out.residual = std::abs(out.s1 + out.s2 - family_total);
  if (out.residual > tolerance)
    throw std::runtime_error("s1_s2_decomposition: S1 + S2 misses the family sum by " + std::to_string(out.residual));
  return out;
}

inline Decomposition s1_s2_decomposition(const HeckeCoefficients& f, const Modulus& m, const AfeOptions& opts = {},
                                         IdentityRoute route = IdentityRoute::direct, unsigned threads = 1) {
  const CharacterFamily family(m);
  const ProductEvaluator eval(f, m, opts);
  const cplx total = ordered_sum(family_products(eval, family, threads));
  return s1_s2_decomposition(eval, total, route);
}

/// Family sum, main term, and decomposition for one modulus. runtime_ms is
/// filled only when `timing` is set, so reports stay reproducible by default.
inline MomentReport moment_report(const HeckeCoefficients& f, const Modulus& m, double l1,
                                  const AfeOptions& opts = {}, unsigned threads = 1, bool timing = false) {
  const auto start = std::chrono::steady_clock::now();
  MomentReport r;
  r.q = m.value();
  r.q1 = m.q1();
  r.q2 = m.q2();
  const CharacterFamily family(m);
  r.num_characters = family.size();
  const ProductEvaluator eval(f, m, opts);
  r.family_sum = ordered_sum(family_products(eval, family, threads));
  const auto dec = s1_s2_decomposition(eval, r.family_sum);
  r.s1 = dec.s1;
  r.s2 = dec.s2;
  r.main_term = main_term(f, m, l1);
  if (r.main_term == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    r.ratio = {inf, inf};
  } else {
    r.ratio = r.family_sum / r.main_term;
  }
  if (timing)
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                       .count();
  return r;
}

struct TrendTable {
  std::vector<MomentReport> rows;
  double target = 0.5;
  double first_deviation = 0.0;  // |ratio - 1| at the smallest q
  double last_deviation = 0.0;   // |ratio - 1| at the largest q
  bool within_target = false;    // last_deviation <= target
  bool improved = false;         // last_deviation < first_deviation
};

/// One MomentReport per modulus (ascending), with the convergence flags.
inline TrendTable moment_trend(const HeckeCoefficients& f, const std::vector<Modulus>& moduli, double target = 0.5,
                               const AfeOptions& opts = {}, unsigned threads = 1, bool timing = false) {
  for (std::size_t k = 1; k < moduli.size(); ++k)
    if (moduli[k].value() <= moduli[k - 1].value())
      throw std::invalid_argument("moment_trend: moduli must be strictly ascending");
  TrendTable table;
  table.target = target;
  if (moduli.empty()) return table;
  const double l1 = l_one(f).value;
  for (const auto& m : moduli) table.rows.push_back(moment_report(f, m, l1, opts, threads, timing));
  table.first_deviation = std::abs(table.rows.front().ratio - 1.0);
  table.last_deviation = std::abs(table.rows.back().ratio - 1.0);
  table.within_target = table.last_deviation <= target;
  table.improved = table.last_deviation < table.first_deviation;
  return table;
}

}  // namespace lmoment
