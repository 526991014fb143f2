#pragma once

// Central values: the joint approximate functional equation for
// L(1/2, f x chi) conj(L(1/2, chi)), Dirichlet L-values through the Hurwitz
// zeta function, and the Eisenstein factorization oracle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/coefficients.hpp"
#include "lmoment/contour.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/special_functions.hpp"

namespace lmoment {

/// L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q) for non-principal chi.
/// The poles of the Hurwitz terms cancel, so s = 1 is allowed.
inline cplx dirichlet_central(const DirichletCharacter& chi, cplx s) {
  if (chi.is_principal()) throw std::invalid_argument("dirichlet_central: principal character");
  const i64 q = chi.modulus().value();
  const double qd = static_cast<double>(q);
  CompensatedSum<cplx> acc;
  for (i64 a = 1; a < q; ++a) {
    if (chi.phase(a) < 0) continue;
    acc.add(chi(a) * detail::hurwitz_zeta_regular(s, static_cast<double>(a) / qd));
  }
  return std::exp(-s * std::log(qd)) * acc.value();
}

/// L(1/2 + it, chi) L(1/2 - it, chi) conj(L(1/2, chi)): the value of the
/// joint product when f is the Eisenstein series with parameter t.
inline cplx factorization_oracle(SpectralParameter t, const DirichletCharacter& chi) {
  if (chi.is_principal()) throw std::invalid_argument("factorization_oracle: principal character");
  const cplx half{0.5, 0.0};
  const cplx it{0.0, t.t};
  return dirichlet_central(chi, half + it) * dirichlet_central(chi, half - it) *
         std::conj(dirichlet_central(chi, half));
}

struct AfeOptions {
  ContourPlan plan = ContourPlan::afe_default();
  AfeCutoff cutoff = AfeCutoff::unit;
  double margin = 20.0;            // safety margin in the truncation horizon
  double truncation_scale = 1.0;   // multiplies the horizon (stability checks)
};

/// ceil(q^{3/2} (ln q + margin) / pi^{3/2}).
inline std::size_t afe_truncation(i64 q, double margin) {
  const double qd = static_cast<double>(q);
  return static_cast<std::size_t>(
      std::ceil(std::pow(qd, 1.5) * (std::log(qd) + margin) / std::pow(std::numbers::pi, 1.5)));
}

struct CentralValueRecord {
  std::size_t chi_id = 0;
  cplx product_afe;
  cplx l_chi;
  cplx l_twist;
  std::size_t truncation_n = 0;
  double tail_estimate = 0.0;
};

/// Joint AFE for one modulus and one form. Holds the weights V(pi^{3/2} k /
/// q^{3/2}) / sqrt(k) for k up to the horizon; evaluation per character is
/// a divisor sweep grouping m n = k.
class ProductEvaluator {
 public:
  ProductEvaluator(const HeckeCoefficients& f, const Modulus& m, const AfeOptions& opts = {})
      : f_(&f), modulus_(m), opts_(opts) {
    const auto base = static_cast<double>(afe_truncation(m.value(), opts.margin));
    horizon_ = static_cast<std::size_t>(std::ceil(base * opts.truncation_scale));
    if (horizon_ < 1) horizon_ = 1;
    if (f.n_max() < horizon_)
      throw std::out_of_range("ProductEvaluator: coefficients needed to n = " + std::to_string(horizon_));
    const AfeWeight V(f.spectral(), opts.plan, opts.cutoff);
    const double scale = std::pow(std::numbers::pi / static_cast<double>(m.value()), 1.5);
    weights_.assign(horizon_ + 1, 0.0);
    for (std::size_t k = 1; k <= horizon_; ++k) {
      const double kd = static_cast<double>(k);
      weights_[k] = V(scale * kd) / std::sqrt(kd);
    }
    // |V| just past the horizon times a divisor-sum envelope of the tail
    const double beyond = std::abs(V(scale * static_cast<double>(horizon_ + 1)));
    const double log_h = std::log(static_cast<double>(horizon_) + 1.0);
    tail_ = beyond * std::sqrt(static_cast<double>(horizon_)) * (log_h + 1.0) * (log_h + 1.0);
  }

  /// L(1/2, f x chi) conj(L(1/2, chi)) for an even primitive chi mod q.
  cplx operator()(const DirichletCharacter& chi, cplx gauss) const {
    require_family_member(chi);
    const auto acc = sweep(chi);
    CompensatedSum<cplx> first, dual;
    for (std::size_t k = 1; k <= horizon_; ++k) {
      if (acc[k] == cplx{0.0, 0.0}) continue;
      first.add(acc[k] * weights_[k]);
      dual.add(std::conj(acc[k]) * weights_[k]);
    }
    return first.value() + gauss / std::sqrt(static_cast<double>(modulus_.value())) * dual.value();
  }

  cplx operator()(const DirichletCharacter& chi) const { return (*this)(chi, gauss_sum(chi)); }

  /// a_k = sum_{mn = k} lambda(n) chi(n) conj(chi(m)), k = 0..horizon.
  std::vector<cplx> sweep(const DirichletCharacter& chi) const {
    const i64 q = modulus_.value();
    const int L = chi.order();
    const auto& roots = chi.roots();
    std::vector<int> phase(horizon_ + 1, -1);
    for (std::size_t k = 1; k <= horizon_; ++k) phase[k] = chi.phase(static_cast<i64>(k % static_cast<std::size_t>(q)));
    std::vector<cplx> acc(horizon_ + 1, cplx{0.0, 0.0});
    const auto& lambda = *f_;
    for (std::size_t m = 1; m <= horizon_; ++m) {
      const int pm = phase[m];
      if (pm < 0) continue;
      for (std::size_t n = 1; m * n <= horizon_; ++n) {
        const int pn = phase[n];
        if (pn < 0) continue;
        int r = pn - pm;
        if (r < 0) r += L;
        acc[m * n] += lambda[n] * roots[static_cast<std::size_t>(r)];
      }
    }
    return acc;
  }

  std::size_t truncation() const noexcept { return horizon_; }
  double tail_estimate() const noexcept { return tail_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Modulus& modulus() const noexcept { return modulus_; }
  const HeckeCoefficients& coefficients() const noexcept { return *f_; }

 private:
  void require_family_member(const DirichletCharacter& chi) const {
    if (!(chi.modulus() == modulus_)) throw std::invalid_argument("product_central: character modulus mismatch");
    if (!chi.is_even()) throw std::invalid_argument("product_central: character must be even");
    if (!chi.is_primitive()) throw std::invalid_argument("product_central: character must be primitive");
  }

  const HeckeCoefficients* f_;
  Modulus modulus_;
  AfeOptions opts_;
  std::size_t horizon_ = 0;
  double tail_ = 0.0;
  std::vector<double> weights_;
};

inline cplx product_central(const HeckeCoefficients& f, const DirichletCharacter& chi, const AfeOptions& opts = {}) {
  return ProductEvaluator(f, chi.modulus(), opts)(chi);
}

/// One record per even primitive character, in family order.
inline std::vector<CentralValueRecord> central_values(const HeckeCoefficients& f, const Modulus& m,
                                                      const AfeOptions& opts = {}, unsigned threads = 1) {
  const CharacterFamily family(m);
  const ProductEvaluator eval(f, m, opts);
  return parallel_map(family.size(), threads, [&](std::size_t k) {
    const auto& chi = family.member(k);
    CentralValueRecord rec;
    rec.chi_id = family.even_primitive_ids()[k];
    rec.product_afe = eval(chi, family.member_gauss_sum(k));
    rec.l_chi = dirichlet_central(chi, {0.5, 0.0});
    if (f.source() == CoefficientSource::eisenstein) {
      const cplx it{0.0, f.t()};
      rec.l_twist = dirichlet_central(chi, 0.5 + it) * dirichlet_central(chi, 0.5 - it);
    } else if (std::abs(rec.l_chi) < 1e-8) {
      rec.l_twist = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    } else {
      rec.l_twist = rec.product_afe / std::conj(rec.l_chi);
    }
    rec.truncation_n = eval.truncation();
    rec.tail_estimate = eval.tail_estimate();
    return rec;
  });
}

struct NonvanishingEntry {
  std::size_t chi_id = 0;
  double magnitude = 0.0;
};

/// Even primitive characters with |product| > threshold, largest first.
inline std::vector<NonvanishingEntry> nonvanishing_scan(const HeckeCoefficients& f, const Modulus& m,
                                                        double threshold = 1e-4, const AfeOptions& opts = {},
                                                        unsigned threads = 1) {
  if (!(threshold > 0.0)) throw std::invalid_argument("nonvanishing_scan: threshold must be positive");
  const CharacterFamily family(m);
  const ProductEvaluator eval(f, m, opts);
  const auto values = parallel_map(family.size(), threads, [&](std::size_t k) {
    return std::abs(eval(family.member(k), family.member_gauss_sum(k)));
  });
  std::vector<NonvanishingEntry> out;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] > threshold) out.push_back({family.even_primitive_ids()[k], values[k]});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return a.chi_id < b.chi_id;
  });
  return out;
}

}  // namespace lmoment
