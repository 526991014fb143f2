#pragma once

// Elementary integer arithmetic shared by the character and coefficient code.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <tuple>
#include <vector>

namespace lmoment {

using i64 = std::int64_t;
using u64 = std::uint64_t;

/// Non-negative residue of a modulo m (m > 0).
constexpr i64 mod_floor(i64 a, i64 m) noexcept {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

constexpr i64 gcd(i64 a, i64 b) noexcept { return std::gcd(a, b); }

constexpr i64 pow_mod(i64 base, i64 exp, i64 m) noexcept {
  i64 result = 1 % m;
  base = mod_floor(base, m);
  while (exp > 0) {
    if (exp & 1) result = static_cast<i64>((__int128)result * base % m);
    base = static_cast<i64>((__int128)base * base % m);
    exp >>= 1;
  }
  return result;
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline i64 mod_inverse(i64 a, i64 m) {
  i64 old_r = mod_floor(a, m), r = m;
  i64 old_s = 1, s = 0;
  while (r != 0) {
    const i64 quot = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - quot * r};
    std::tie(old_s, s) = std::pair{s, old_s - quot * s};
  }
  if (old_r != 1) throw std::invalid_argument("mod_inverse: argument not invertible");
  return mod_floor(old_s, m);
}

constexpr bool is_prime(i64 n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (i64 d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

/// Trial-division factorization as ascending (prime, exponent) pairs.
inline std::vector<std::pair<i64, int>> factorize(i64 n) {
  if (n < 1) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<i64, int>> out;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Smallest positive primitive root modulo an odd prime p.
inline i64 smallest_primitive_root(i64 p) {
  if (!is_prime(p)) throw std::invalid_argument("smallest_primitive_root: modulus is not prime");
  if (p == 2) return 1;
  const auto fs = factorize(p - 1);
  for (i64 g = 2; g < p; ++g) {
    bool ok = true;
    for (auto [r, e] : fs) {
      if (pow_mod(g, (p - 1) / r, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("smallest_primitive_root: none found");
}

/// Smallest-prime-factor table on [0, n].
inline std::vector<std::uint32_t> smallest_prime_factors(std::size_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j <= n; j += i)
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
  }
  return spf;
}

/// Divisor-count table d(n) on [0, n] (d(0) = 0).
inline std::vector<std::uint32_t> divisor_counts(std::size_t n) {
  std::vector<std::uint32_t> d(n + 1, 0);
  for (std::size_t a = 1; a <= n; ++a)
    for (std::size_t k = a; k <= n; k += a) ++d[k];
  return d;
}

}  // namespace lmoment
