#pragma once

// Dirichlet characters modulo a prime or a product of two distinct odd
// primes, their Gauss sums, and the even-primitive family sums
//
//   B_q(m, n) = sum_{chi even primitive} conj(chi(m)) chi(n)
//   D_q(m, n) = sum_{chi even primitive} chi(m) conj(chi(n)) tau(chi)
//
// together with their closed forms via the Chinese remainder theorem.
//
// A character is stored by its exponents against the smallest primitive root
// of each prime factor. Every value is then e(r / L) for an integer phase r,
// L = lcm(p_i - 1), so conjugation and products are exact integer operations.

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmoment/arith.hpp"

namespace lmoment {

using cplx = std::complex<double>;

/// e(x) = exp(2 pi i x), the additive character used throughout the library.
inline cplx e_of(double x) { return std::polar(1.0, 2.0 * std::numbers::pi * x); }

struct PrimePower {
  i64 prime;
  int exponent;
};

/// A supported modulus: an odd or even prime q >= 3, or q1 * q2 with q1 < q2 distinct odd primes.
class Modulus {
 public:
  explicit Modulus(i64 q) : q_(q) {
    if (q < 3) throw std::invalid_argument("Modulus: q must be >= 3");
    for (auto [p, e] : factorize(q)) factors_.push_back({p, e});
    const bool prime = factors_.size() == 1 && factors_[0].exponent == 1;
    const bool semiprime = factors_.size() == 2 && factors_[0].exponent == 1 &&
                           factors_[1].exponent == 1 && factors_[0].prime != 2;
    if (!prime && !semiprime)
      throw std::invalid_argument("Modulus: " + std::to_string(q) +
                                  " is neither prime nor a product of two distinct odd primes");
    phi_ = 1;
    for (auto f : factors_) phi_ *= f.prime - 1;
  }

  static Modulus semiprime(i64 q1, i64 q2) {
    if (!lmoment::is_prime(q1) || !lmoment::is_prime(q2) || q1 == q2)
      throw std::invalid_argument("Modulus::semiprime: need two distinct primes");
    return Modulus(q1 * q2);
  }

  i64 value() const noexcept { return q_; }
  i64 phi() const noexcept { return phi_; }
  std::span<const PrimePower> factors() const noexcept { return factors_; }
  bool is_prime() const noexcept { return factors_.size() == 1; }
  bool is_semiprime() const noexcept { return factors_.size() == 2; }

  /// Smaller prime factor (q itself when prime).
  i64 q1() const noexcept { return factors_.front().prime; }
  /// Larger prime factor (1 when q is prime).
  i64 q2() const noexcept { return is_semiprime() ? factors_.back().prime : 1; }

  /// "q1xq2" for semiprimes, "q" for primes.
  std::string spec() const {
    return is_semiprime() ? std::to_string(q1()) + "x" + std::to_string(q2()) : std::to_string(q_);
  }

  friend bool operator==(const Modulus& a, const Modulus& b) noexcept { return a.q_ == b.q_; }

 private:
  i64 q_;
  i64 phi_ = 0;
  std::vector<PrimePower> factors_;
};

namespace detail {

// Discrete-log data for one modulus, shared by all characters built from it.
struct CharacterBasis {
  i64 q = 0;
  int order = 1;                       // L = lcm(p_i - 1)
  std::vector<i64> primes;
  std::vector<i64> generators;         // smallest primitive root per prime
  std::vector<std::vector<int>> dlog;  // dlog[i][a mod p_i], -1 for a = 0
  std::vector<cplx> roots;             // roots[r] = e(r / L)

  explicit CharacterBasis(const Modulus& m) : q(m.value()) {
    i64 l = 1;
    for (auto f : m.factors()) {
      primes.push_back(f.prime);
      l = std::lcm(l, f.prime - 1);
    }
    order = static_cast<int>(l);
    for (i64 p : primes) {
      const i64 g = smallest_primitive_root(p);
      generators.push_back(g);
      std::vector<int> table(static_cast<std::size_t>(p), -1);
      i64 x = 1;
      for (i64 k = 0; k < p - 1; ++k) {
        table[static_cast<std::size_t>(x)] = static_cast<int>(k);
        x = x * g % p;
      }
      dlog.push_back(std::move(table));
    }
    roots.resize(static_cast<std::size_t>(order));
    for (int r = 0; r < order; ++r) roots[static_cast<std::size_t>(r)] = e_of(static_cast<double>(r) / order);
  }
};

}  // namespace detail

/// One Dirichlet character modulo a supported modulus.
class DirichletCharacter {
 public:
  /// Character with the given exponent per prime factor: chi(g_i) = e(j_i / (p_i - 1)).
  DirichletCharacter(const Modulus& m, std::vector<int> exponents)
      : DirichletCharacter(m, std::make_shared<const detail::CharacterBasis>(m), std::move(exponents)) {}

  DirichletCharacter(const Modulus& m, std::shared_ptr<const detail::CharacterBasis> basis,
                     std::vector<int> exponents)
      : modulus_(m), basis_(std::move(basis)), exponents_(std::move(exponents)) {
    if (exponents_.size() != basis_->primes.size())
      throw std::invalid_argument("DirichletCharacter: one exponent per prime factor required");
    for (std::size_t i = 0; i < exponents_.size(); ++i)
      exponents_[i] = static_cast<int>(mod_floor(exponents_[i], basis_->primes[i] - 1));
    const i64 q = modulus_.value();
    const int order = basis_->order;
    phases_.assign(static_cast<std::size_t>(q), -1);
    values_.assign(static_cast<std::size_t>(q), cplx{0.0, 0.0});
    for (i64 a = 0; a < q; ++a) {
      if (gcd(a, q) != 1) continue;
      i64 r = 0;
      for (std::size_t i = 0; i < exponents_.size(); ++i) {
        const i64 p = basis_->primes[i];
        const i64 l = basis_->dlog[i][static_cast<std::size_t>(a % p)];
        r += static_cast<i64>(exponents_[i]) * l * (order / (p - 1));
      }
      const int phase = static_cast<int>(r % order);
      phases_[static_cast<std::size_t>(a)] = phase;
      values_[static_cast<std::size_t>(a)] = basis_->roots[static_cast<std::size_t>(phase)];
    }
    conductor_ = 1;
    for (std::size_t i = 0; i < exponents_.size(); ++i)
      if (exponents_[i] != 0) conductor_ *= basis_->primes[i];
  }

  const Modulus& modulus() const noexcept { return modulus_; }
  std::span<const int> exponents() const noexcept { return exponents_; }
  int order() const noexcept { return basis_->order; }

  /// chi(a) for any integer a.
  cplx operator()(i64 a) const noexcept { return values_[static_cast<std::size_t>(mod_floor(a, modulus_.value()))]; }
  /// Integer phase r with chi(a) = e(r / order()), or -1 when gcd(a, q) > 1.
  int phase(i64 a) const noexcept { return phases_[static_cast<std::size_t>(mod_floor(a, modulus_.value()))]; }
  /// Value table indexed by residue 0..q-1.
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<const int> phases() const noexcept { return phases_; }
  const std::vector<cplx>& roots() const noexcept { return basis_->roots; }

  bool is_even() const noexcept { return phase(modulus_.value() - 1) == 0; }
  bool is_principal() const noexcept { return conductor_ == 1; }
  i64 conductor() const noexcept { return conductor_; }
  bool is_primitive() const noexcept { return conductor_ == modulus_.value(); }

  DirichletCharacter conj() const {
    std::vector<int> e(exponents_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = -exponents_[i];
    return {modulus_, basis_, std::move(e)};
  }

  friend DirichletCharacter operator*(const DirichletCharacter& a, const DirichletCharacter& b) {
    if (!(a.modulus_ == b.modulus_)) throw std::invalid_argument("character product: moduli differ");
    std::vector<int> e(a.exponents_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.exponents_[i] + b.exponents_[i];
    return {a.modulus_, a.basis_, std::move(e)};
  }

  const std::shared_ptr<const detail::CharacterBasis>& basis() const noexcept { return basis_; }

 private:
  Modulus modulus_;
  std::shared_ptr<const detail::CharacterBasis> basis_;
  std::vector<int> exponents_;
  std::vector<int> phases_;
  std::vector<cplx> values_;
  i64 conductor_ = 1;
};

/// All phi(q) characters mod q, ordered lexicographically by exponent vector.
/// The position in this list is the character id used in reports.
inline std::vector<DirichletCharacter> enumerate_characters(const Modulus& m) {
  auto basis = std::make_shared<const detail::CharacterBasis>(m);
  std::vector<DirichletCharacter> out;
  out.reserve(static_cast<std::size_t>(m.phi()));
  const auto fs = m.factors();
  if (fs.size() == 1) {
    for (int j = 0; j < fs[0].prime - 1; ++j) out.emplace_back(m, basis, std::vector<int>{j});
  } else {
    for (int j1 = 0; j1 < fs[0].prime - 1; ++j1)
      for (int j2 = 0; j2 < fs[1].prime - 1; ++j2) out.emplace_back(m, basis, std::vector<int>{j1, j2});
  }
  return out;
}

/// tau(chi) = sum_{a mod q} chi(a) e(a / q).
inline cplx gauss_sum(const DirichletCharacter& chi) {
  const i64 q = chi.modulus().value();
  cplx acc{0.0, 0.0};
  for (i64 a = 1; a < q; ++a) {
    if (chi.phase(a) < 0) continue;
    acc += chi(a) * e_of(static_cast<double>(a) / static_cast<double>(q));
  }
  return acc;
}

/// Factor chi mod q1 q2 as chi1 chi2 with chi_i mod q_i.
inline std::pair<DirichletCharacter, DirichletCharacter> crt_split(const DirichletCharacter& chi) {
  const Modulus& m = chi.modulus();
  if (!m.is_semiprime()) throw std::invalid_argument("crt_split: modulus is not semiprime");
  const auto e = chi.exponents();
  return {DirichletCharacter(Modulus(m.q1()), {e[0]}), DirichletCharacter(Modulus(m.q2()), {e[1]})};
}

/// The even primitive characters mod q with cached Gauss sums; evaluates the
/// B and D family sums both directly and through their closed forms.
class CharacterFamily {
 public:
  explicit CharacterFamily(const Modulus& m) : modulus_(m), all_(enumerate_characters(m)) {
    for (std::size_t i = 0; i < all_.size(); ++i) {
      if (all_[i].is_primitive() && all_[i].is_even()) {
        even_primitive_.push_back(i);
        gauss_.push_back(gauss_sum(all_[i]));
      }
    }
  }

  const Modulus& modulus() const noexcept { return modulus_; }
  const std::vector<DirichletCharacter>& all() const noexcept { return all_; }
  /// Ids (positions in all()) of the even primitive characters, ascending.
  const std::vector<std::size_t>& even_primitive_ids() const noexcept { return even_primitive_; }
  std::size_t size() const noexcept { return even_primitive_.size(); }
  const DirichletCharacter& member(std::size_t k) const { return all_[even_primitive_[k]]; }
  cplx member_gauss_sum(std::size_t k) const { return gauss_[k]; }

  cplx B_direct(i64 a, i64 b) const {
    require_coprime(a, b, "family_B_direct");
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < even_primitive_.size(); ++k) {
      const auto& chi = member(k);
      const int L = chi.order();
      acc += chi.roots()[static_cast<std::size_t>(mod_floor(chi.phase(b) - chi.phase(a), L))];
    }
    return acc;
  }

  cplx B_formula(i64 a, i64 b) const {
    require_semiprime("family_B_formula");
    require_coprime(a, b, "family_B_formula");
    const i64 q1 = modulus_.q1(), q2 = modulus_.q2();
    double acc = 0.0;
    for (int sign : {1, -1}) {
      const double f1 = (mod_floor(b - sign * a, q1) == 0 ? static_cast<double>(q1 - 1) : 0.0) - 1.0;
      const double f2 = (mod_floor(b - sign * a, q2) == 0 ? static_cast<double>(q2 - 1) : 0.0) - 1.0;
      acc += f1 * f2;
    }
    return {0.5 * acc, 0.0};
  }

  cplx D_direct(i64 a, i64 b) const {
    require_coprime(a, b, "family_D_direct");
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < even_primitive_.size(); ++k) {
      const auto& chi = member(k);
      const int L = chi.order();
      acc += chi.roots()[static_cast<std::size_t>(mod_floor(chi.phase(a) - chi.phase(b), L))] * gauss_[k];
    }
    return acc;
  }

  cplx D_formula(i64 a, i64 b) const {
    require_semiprime("family_D_formula");
    require_coprime(a, b, "family_D_formula");
    const i64 q1 = modulus_.q1(), q2 = modulus_.q2();
    const i64 abar1 = mod_inverse(a, q1), abar2 = mod_inverse(a, q2);
    const i64 q2bar = mod_inverse(q2, q1), q1bar = mod_inverse(q1, q2);
    const i64 r1 = mod_floor(abar1 * q2bar % q1 * mod_floor(b, q1), q1);
    const i64 r2 = mod_floor(abar2 * q1bar % q2 * mod_floor(b, q2), q2);
    const double phi1 = static_cast<double>(q1 - 1), phi2 = static_cast<double>(q2 - 1);
    cplx acc{0.0, 0.0};
    for (int sign : {1, -1}) {
      const cplx f1 = phi1 * e_of(static_cast<double>(sign * r1) / static_cast<double>(q1)) + 1.0;
      const cplx f2 = phi2 * e_of(static_cast<double>(sign * r2) / static_cast<double>(q2)) + 1.0;
      acc += f1 * f2;
    }
    return 0.5 * acc;
  }

 private:
  void require_coprime(i64 a, i64 b, const char* what) const {
    const i64 q = modulus_.value();
    if (gcd(mod_floor(a, q), q) != 1 || gcd(mod_floor(b, q), q) != 1)
      throw std::invalid_argument(std::string(what) + ": arguments must be coprime to q");
  }
  void require_semiprime(const char* what) const {
    if (!modulus_.is_semiprime()) throw std::invalid_argument(std::string(what) + ": modulus must be semiprime");
  }

  Modulus modulus_;
  std::vector<DirichletCharacter> all_;
  std::vector<std::size_t> even_primitive_;
  std::vector<cplx> gauss_;
};

inline cplx family_B_direct(const Modulus& m, i64 a, i64 b) { return CharacterFamily(m).B_direct(a, b); }
inline cplx family_B_formula(const Modulus& m, i64 a, i64 b) { return CharacterFamily(m).B_formula(a, b); }
inline cplx family_D_direct(const Modulus& m, i64 a, i64 b) { return CharacterFamily(m).D_direct(a, b); }
inline cplx family_D_formula(const Modulus& m, i64 a, i64 b) { return CharacterFamily(m).D_formula(a, b); }

struct GaussMultiplicativityReport {
  std::size_t pairs = 0;
  double max_deviation = 0.0;
};

/// Checks tau(chi1 chi2) = chi1(q2) chi2(q1) tau(chi1) tau(chi2) over all
/// primitive pairs chi1 mod q1, chi2 mod q2.
inline GaussMultiplicativityReport gauss_multiplicativity_check(const Modulus& m) {
  if (!m.is_semiprime()) throw std::invalid_argument("gauss_multiplicativity_check: modulus must be semiprime");
  const i64 q1 = m.q1(), q2 = m.q2();
  const Modulus m1(q1), m2(q2);
  const auto chars1 = enumerate_characters(m1);
  const auto chars2 = enumerate_characters(m2);
  auto basis = std::make_shared<const detail::CharacterBasis>(m);
  GaussMultiplicativityReport report;
  for (const auto& c1 : chars1) {
    if (!c1.is_primitive()) continue;
    const cplx tau1 = gauss_sum(c1);
    for (const auto& c2 : chars2) {
      if (!c2.is_primitive()) continue;
      const DirichletCharacter product(m, basis, {c1.exponents()[0], c2.exponents()[0]});
      const cplx lhs = gauss_sum(product);
      const cplx rhs = c1(q2) * c2(q1) * tau1 * gauss_sum(c2);
      report.max_deviation = std::max(report.max_deviation, std::abs(lhs - rhs));
      ++report.pairs;
    }
  }
  return report;
}

}  // namespace lmoment
