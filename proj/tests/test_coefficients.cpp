#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lmoment/coefficients.hpp"

using namespace lmoment;

namespace {

HeckeCoefficients parse(const std::string& text) {
  std::istringstream in(text);
  return parse_coefficients(in, "inline");
}

// d(n) by trial division, independent of the sieve in the library.
int divisor_count_naive(int n) {
  int c = 0;
  for (int d = 1; d * d <= n; ++d)
    if (n % d == 0) c += (d * d == n) ? 1 : 2;
  return c;
}

}  // namespace

TEST(Eisenstein, DivisorFunctionAtZero) {
  EXPECT_EQ(eisenstein_lambda(SpectralParameter(0.0), 12), 6.0);
  const auto h = HeckeCoefficients::eisenstein(SpectralParameter(0.0), 10000);
  for (int n = 1; n <= 10000; ++n) ASSERT_EQ(h[static_cast<std::size_t>(n)], divisor_count_naive(n)) << n;
}

TEST(Eisenstein, PrimeValues) {
  for (double t : {0.5, 1.0, 9.533695})
    for (u64 p : {2, 3, 5, 101, 9973}) {
      const double want = 2.0 * std::cos(t * std::log(static_cast<double>(p)));
      EXPECT_NEAR(eisenstein_lambda(SpectralParameter(t), p), want, 1e-13);
    }
}

TEST(Eisenstein, CoprimeMultiplicativity) {
  const SpectralParameter t(1.0);
  EXPECT_NEAR(eisenstein_lambda(t, 2) * eisenstein_lambda(t, 3), eisenstein_lambda(t, 6), 1e-12);
  const auto h = HeckeCoefficients::eisenstein(t, 20000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<u64> pick(1, 20000);
  int checked = 0;
  while (checked < 500) {
    const u64 m = pick(rng), n = pick(rng);
    if (m * n > h.n_max() || gcd(static_cast<i64>(m), static_cast<i64>(n)) != 1) continue;
    ++checked;
    EXPECT_NEAR(h[m] * h[n], h[m * n], 1e-9) << m << " " << n;
  }
}

TEST(Eisenstein, TableMatchesPointEvaluation) {
  const SpectralParameter t(2.5);
  const auto h = HeckeCoefficients::eisenstein(t, 5000);
  for (u64 n : {1, 2, 36, 210, 4096, 4999}) EXPECT_NEAR(h[n], eisenstein_lambda(t, n), 1e-12);
  EXPECT_FALSE(h.is_cuspidal());
  EXPECT_DOUBLE_EQ(h.theta_bound(), 7.0 / 64.0);
}

TEST(Hecke, ResidualsSmallForEisenstein) {
  for (double t : {0.0, 1.0, 9.533695}) {
    const auto h = HeckeCoefficients::eisenstein(SpectralParameter(t), 10000);
    const auto r = hecke_residuals(h);
    EXPECT_LT(r.multiplicativity, 1e-9) << t;
    EXPECT_LT(r.prime_power, 1e-9) << t;
    EXPECT_GT(r.pairs_checked, 10000u);
  }
}

TEST(Hecke, ResidualsSmallForSynthetic) {
  const auto h = HeckeCoefficients::synthetic(3, 10000);
  const auto r = hecke_residuals(h);
  EXPECT_LT(r.multiplicativity, 1e-9);
  EXPECT_LT(r.prime_power, 1e-9);
  EXPECT_TRUE(h.is_cuspidal());
}

TEST(Hecke, ExtendFromPrimeData) {
  const double a = 0.37, b = -1.21;
  auto h = parse("t 4.2\n1 1\n2 0.37\n3 -1.21\n");
  EXPECT_EQ(h.n_max(), 3u);
  EXPECT_NEAR(hecke_extend(h, 4), a * a - 1.0, 1e-15);
  EXPECT_NEAR(hecke_extend(h, 6), a * b, 1e-15);
  EXPECT_NEAR(hecke_extend(h, 8), a * (a * a - 1.0) - a, 1e-15);
  EXPECT_NEAR(h.at(6), a * b, 1e-15);
  EXPECT_THROW(hecke_extend(h, 5), std::out_of_range);
  EXPECT_THROW(hecke_extend(h, 0), std::invalid_argument);
}

TEST(Hecke, ExtensionReproducesDivisorCounts) {
  std::string text = "t 0\n";
  for (int n = 1; n <= 100; ++n) text += std::to_string(n) + " " + std::to_string(divisor_count_naive(n)) + "\n";
  auto h = parse(text);
  ASSERT_EQ(h.n_max(), 100u);
  // primes beyond 100 are missing from the file, so extend only where they are not needed
  for (int n = 101; n <= 10000; ++n) {
    bool smooth = true;
    for (auto [p, e] : factorize(n)) smooth = smooth && p <= 100;
    if (!smooth) continue;
    ASSERT_NEAR(hecke_extend(h, static_cast<u64>(n)), divisor_count_naive(n), 1e-9) << n;
  }
  auto e = HeckeCoefficients::eisenstein(SpectralParameter(0.0), 50);
  e.extend_to(10000);
  for (int n = 1; n <= 10000; ++n) ASSERT_EQ(e[static_cast<std::size_t>(n)], divisor_count_naive(n));
}

TEST(Synthetic, SatoTateSizedAndDeterministic) {
  const auto a = HeckeCoefficients::synthetic(11, 5000);
  const auto b = HeckeCoefficients::synthetic(11, 5000);
  const auto c = HeckeCoefficients::synthetic(12, 5000);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
  EXPECT_EQ(a[1], 1.0);
  for (u64 p : {2, 3, 5, 7, 4999}) EXPECT_LE(std::abs(a[p]), 2.0);
  // the Sato-Tate law has mean lambda(p)^2 = 1
  double sum = 0.0;
  int count = 0;
  for (u64 p = 2; p <= 5000; ++p)
    if (is_prime(static_cast<i64>(p))) {
      sum += a[p] * a[p];
      ++count;
    }
  EXPECT_NEAR(sum / count, 1.0, 0.15);
  EXPECT_EQ(a.prime_value(7919), HeckeCoefficients::synthetic(11, 8000)[7919]);
}

TEST(Ramanujan, NoViolationsForEisenstein) {
  EXPECT_EQ(ramanujan_violation_fraction(HeckeCoefficients::eisenstein(SpectralParameter(1.0), 20000)), 0.0);
  EXPECT_EQ(ramanujan_violation_fraction(HeckeCoefficients::eisenstein(SpectralParameter(0.0), 20000)), 0.0);
}

TEST(Ramanujan, CountsOversizedValues) {
  const auto h = parse("t 0\n1 1\n2 5\n3 0\n4 0\n");
  EXPECT_DOUBLE_EQ(ramanujan_violation_fraction(h), 0.25);
}

TEST(Parse, DivisorFileHasZeroResidual) {
  std::string text = "# divisor counts\nt 0\n";
  for (int n = 1; n <= 500; ++n) text += std::to_string(n) + " " + std::to_string(divisor_count_naive(n)) + "\n";
  const auto h = parse(text);
  EXPECT_EQ(h.n_max(), 500u);
  EXPECT_EQ(h.t(), 0.0);
  EXPECT_EQ(h.source(), CoefficientSource::file);
  const auto r = hecke_residuals(h);
  EXPECT_EQ(r.multiplicativity, 0.0);
  EXPECT_EQ(r.prime_power, 0.0);
}

TEST(Parse, ReportsPrimeSquareResidual) {
  const auto h = parse("t 9.533695\n1 1\n2 1.0\n3 0.2\n4 0.5\n");
  const auto r = hecke_residuals(h);
  EXPECT_NEAR(r.prime_power, 0.5, 1e-15);
  EXPECT_NEAR(r.multiplicativity, 0.5, 1e-15);
}

TEST(Parse, AcceptsCrlfCommentsAndBlankLines) {
  const auto h = parse("# header comment\r\nt 1.5\r\n\r\n1 1.0\r\n# mid comment\r\n2\t-0.25\r\n3 0.75\r\n");
  EXPECT_EQ(h.n_max(), 3u);
  EXPECT_DOUBLE_EQ(h.t(), 1.5);
  EXPECT_DOUBLE_EQ(h[2], -0.25);
  EXPECT_DOUBLE_EQ(h[3], 0.75);
}

TEST(Parse, FillsGapsFromPrimeRows) {
  const auto h = parse("t 2\n1 1\n2 0.5\n3 -0.5\n5 1.5\n7 0.1\n");
  ASSERT_EQ(h.n_max(), 7u);
  EXPECT_NEAR(h[4], 0.25 - 1.0, 1e-15);
  EXPECT_NEAR(h[6], -0.25, 1e-15);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("t 0\n2 1\n"), std::runtime_error);             // missing n = 1
  EXPECT_THROW(parse("t 0\n"), std::runtime_error);                  // no rows
  EXPECT_THROW(parse("1 1\n2 1\n"), std::runtime_error);             // no header
  EXPECT_THROW(parse("t 0\n1 1\n3 1\n2 1\n"), std::runtime_error);   // not increasing
  EXPECT_THROW(parse("t 0\n1 1\n2 1\n2 1\n"), std::runtime_error);   // repeated index
  EXPECT_THROW(parse("t 0\n1 1\n2 abc\n"), std::runtime_error);      // malformed value
  EXPECT_THROW(parse("t 0\n1 1\n2 1 3\n"), std::runtime_error);      // extra field
  EXPECT_THROW(parse("t 0\n1 0.5\n"), std::runtime_error);           // lambda(1) != 1
  EXPECT_THROW(parse("t x\n1 1\n"), std::runtime_error);             // bad t
  EXPECT_THROW(parse("t 0\n-1 1\n"), std::runtime_error);            // bad index
  EXPECT_THROW(load_coefficients("/nonexistent/file.txt"), std::runtime_error);
}

TEST(Parse, LoadsFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "lmoment_coeffs_test.txt";
  {
    std::ofstream out(path);
    out << "t 0\n1 1\n2 2\n3 2\n4 3\n";
  }
  const auto h = load_coefficients(path);
  EXPECT_EQ(h.n_max(), 4u);
  EXPECT_EQ(h.origin(), path.string());
  std::filesystem::remove(path);
}

TEST(LOne, DivergentAtZero) {
  const auto h = HeckeCoefficients::eisenstein(SpectralParameter(0.0), 20000);
  try {
    l_one(h);
    FAIL() << "expected divergence";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("L(1,f) divergent"), std::string::npos);
  }
}

TEST(LOne, MatchesZetaProduct) {
  // L(1, E_t) = |zeta(1 + i t)|^2; value for t = 2 from mpmath
  const auto h = HeckeCoefficients::eisenstein(SpectralParameter(2.0), 200000);
  const auto e = l_one(h);
  EXPECT_NEAR(e.value, 0.48160381058146959556, 1e-4);
  EXPECT_NEAR(e.value, std::norm(riemann_zeta({1.0, 2.0})), 1e-4);
  EXPECT_DOUBLE_EQ(e.x_small, 10000.0);
  EXPECT_DOUBLE_EQ(e.x_large, 20000.0);
}

TEST(LOne, SyntheticSpreadSmall) {
  // random prime data has no analytic continuation; the smoothed sums settle
  // at the square-root scale X^{-1/2}
  const auto e = l_one(HeckeCoefficients::synthetic(5, 200000));
  EXPECT_LT(e.spread, 2.0 / std::sqrt(e.x_small));
  EXPECT_GT(e.value, 0.0);
}

TEST(LOne, NeedsLongTable) {
  EXPECT_THROW(l_one(HeckeCoefficients::eisenstein(SpectralParameter(1.0), 5000)), std::invalid_argument);
}

TEST(ExpSum, EisensteinZeroFlaggedNotFailed) {
  const auto h = HeckeCoefficients::eisenstein(SpectralParameter(0.0), 4096);
  const auto r = exp_sum_bound_check(h, {256, 1024, 4096}, 200);
  // sum_{n <= N} d(n) ~ N log N outgrows N^0.6
  EXPECT_GT(r.alpha_zero_ratio[2], 1.5 * r.alpha_zero_ratio[0]);
  EXPECT_FALSE(r.bounded);
  EXPECT_TRUE(r.non_cuspidal_exception);
}

TEST(ExpSum, CuspLikeSourceBounded) {
  const auto h = HeckeCoefficients::synthetic(1, 4096);
  const auto r = exp_sum_bound_check(h, {256, 1024, 4096}, 200);
  EXPECT_TRUE(r.bounded);
  EXPECT_FALSE(r.non_cuspidal_exception);
  EXPECT_LE(r.worst_growth, 1.5);
  // at alpha = 0 the partial sums stay near sqrt(N)
  EXPECT_LT(r.alpha_zero_ratio[2], r.max_ratio[0]);
}

TEST(ExpSum, MatchesDirectSum) {
  const auto h = HeckeCoefficients::synthetic(2, 1024);
  const auto r = exp_sum_bound_check(h, {1024}, 50);
  const double alpha = r.argmax_alpha[0];
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 1; n <= 1024; ++n)
    acc += h[n] * std::polar(1.0, 2.0 * std::numbers::pi * alpha * static_cast<double>(n));
  EXPECT_NEAR(std::abs(acc) / std::pow(1024.0, 0.6), r.max_ratio[0], 1e-9);
}

TEST(ExpSum, InputValidation) {
  const auto h = HeckeCoefficients::synthetic(1, 1000);
  EXPECT_THROW(exp_sum_bound_check(h, {}, 10), std::invalid_argument);
  EXPECT_THROW(exp_sum_bound_check(h, {2000}, 10), std::out_of_range);
  EXPECT_THROW(exp_sum_bound_check(h, {500, 100}, 10), std::invalid_argument);
}
