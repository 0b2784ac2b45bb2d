#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <boost/math/special_functions/next.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "besselrad/wigner.hpp"

namespace w = besselrad::wigner;
using w::BigInt;
using w::BigRational;

namespace {

w::WignerValue exact(int sign, long num, long den) { return {sign, BigRational(num, den)}; }

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Closed form for zero projections, independent of the Racah sum:
// (a b c; 0 0 0) = (-1)^g sqrt[(J-2a)!(J-2b)!(J-2c)!/(J+1)!] g!/((g-a)!(g-b)!(g-c)!), J = 2g.
w::WignerValue threej_000_closed(int a, int b, int c) {
  const int J = a + b + c;
  if (J % 2 != 0 || c < std::abs(a - b) || c > a + b) return {};
  const int g = J / 2;
  const BigRational ratio(factorial(g), factorial(g - a) * factorial(g - b) * factorial(g - c));
  const BigRational rad = BigRational(factorial(J - 2 * a) * factorial(J - 2 * b) * factorial(J - 2 * c),
                                      factorial(J + 1)) * ratio * ratio;
  return {g % 2 == 0 ? 1 : -1, rad};
}

int phase(int j) { return j % 2 == 0 ? 1 : -1; }

}  // namespace

TEST(Wigner3j, Examples) {
  const auto v = w::wigner_3j(1, 1, 0, 0, 0, 0);
  EXPECT_EQ(v, exact(-1, 1, 3));
  EXPECT_DOUBLE_EQ(v.to_double(), -1 / std::sqrt(3.0));
  EXPECT_TRUE(w::wigner_3j(1, 1, 1, 0, 0, 0).is_zero());
  EXPECT_TRUE(w::wigner_3j(2, 1, 4, 0, 0, 0).is_zero());
  EXPECT_EQ(v.exact_string(), "-sqrt(1/3)");
  EXPECT_EQ(w::wigner_3j(1, 1, 1, 0, 0, 0).exact_string(), "0");
  EXPECT_EQ(w::wigner_3j(0, 0, 0, 0, 0, 0), w::WignerValue::one());
}

TEST(Wigner3j, TotalOnInvalidProjections) {
  EXPECT_TRUE(w::wigner_3j(2, 2, 2, 1, 1, 1).is_zero());
  EXPECT_TRUE(w::wigner_3j(1, 1, 1, 2, -2, 0).is_zero());
  EXPECT_THROW(w::wigner_3j(61, 1, 60, 0, 0, 0), std::invalid_argument);
}

TEST(Wigner3j, ZeroRepresentation) {
  const auto z = w::WignerValue::zero();
  EXPECT_EQ(z.sign(), 0);
  EXPECT_EQ(z.radicand_num(), 0);
  EXPECT_EQ(z.radicand_den(), 1);
}

TEST(Wigner3j, ZeroProjectionMatchesClosedForm) {
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b)
      for (int c = 0; c <= 40; ++c) {
        EXPECT_EQ(w::wigner_3j(a, b, c, 0, 0, 0), threej_000_closed(a, b, c)) << a << b << c;
        EXPECT_EQ(w::threej_000_nonzero(a, b, c), !threej_000_closed(a, b, c).is_zero());
      }
}

TEST(Wigner3j, ParityPredicate) {
  EXPECT_TRUE(w::threej_000_nonzero(1, 1, 0));
  EXPECT_FALSE(w::threej_000_nonzero(1, 1, 1));
  EXPECT_TRUE(w::threej_000_nonzero(0, 1, 1));
  EXPECT_FALSE(w::threej_000_nonzero(2, 0, 4));
}

TEST(Wigner3j, ExactOrthogonality) {
  constexpr int jmax = 5;
  for (int j1 = 0; j1 <= jmax; ++j1)
    for (int j2 = 0; j2 <= jmax; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(j1 + j2, jmax); ++j3)
        for (int j3p = std::abs(j1 - j2); j3p <= std::min(j1 + j2, jmax); ++j3p)
          for (int m3 = -j3; m3 <= j3; ++m3)
            for (int m3p = -j3p; m3p <= j3p; ++m3p) {
              w::SurdAccumulator sum;
              for (int m1 = -j1; m1 <= j1; ++m1)
                for (int m2 = -j2; m2 <= j2; ++m2)
                  sum.add_product(w::wigner_3j(j1, j2, j3, m1, m2, m3), w::wigner_3j(j1, j2, j3p, m1, m2, m3p),
                                  BigRational(2 * j3 + 1));
              const bool diag = j3 == j3p && m3 == m3p;
              EXPECT_EQ(sum.value(), diag ? w::WignerValue::one() : w::WignerValue::zero())
                  << j1 << j2 << j3 << j3p << m3 << m3p;
            }
}

TEST(Wigner3j, ColumnAndReflectionSymmetry) {
  constexpr int jmax = 5;
  for (int j1 = 0; j1 <= jmax; ++j1)
    for (int j2 = 0; j2 <= jmax; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(j1 + j2, jmax); ++j3)
        for (int m1 = -j1; m1 <= j1; ++m1)
          for (int m2 = -j2; m2 <= j2; ++m2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            const auto v = w::wigner_3j(j1, j2, j3, m1, m2, m3);
            const int odd = phase(j1 + j2 + j3);
            // even (cyclic) permutations
            EXPECT_EQ(w::wigner_3j(j2, j3, j1, m2, m3, m1), v);
            EXPECT_EQ(w::wigner_3j(j3, j1, j2, m3, m1, m2), v);
            // odd permutations
            const auto flip = odd > 0 ? v : -v;
            EXPECT_EQ(w::wigner_3j(j2, j1, j3, m2, m1, m3), flip);
            EXPECT_EQ(w::wigner_3j(j1, j3, j2, m1, m3, m2), flip);
            EXPECT_EQ(w::wigner_3j(j3, j2, j1, m3, m2, m1), flip);
            // m -> -m
            EXPECT_EQ(w::wigner_3j(j1, j2, j3, -m1, -m2, -m3), flip);
          }
}

TEST(Wigner6j, Examples) {
  EXPECT_EQ(w::wigner_6j(1, 1, 0, 1, 1, 1), exact(-1, 1, 9));
  EXPECT_NEAR(w::wigner_6j(1, 1, 0, 1, 1, 1).to_double(), -1.0 / 3.0, 1e-16);
  EXPECT_EQ(w::wigner_6j(1, 1, 1, 1, 1, 1), exact(1, 1, 36));
  EXPECT_EQ(w::wigner_6j(1, 1, 1, 1, 1, 1).exact_string(), "sqrt(1/36)");
  EXPECT_EQ(w::wigner_6j(0, 0, 0, 0, 0, 0), w::WignerValue::one());
  EXPECT_TRUE(w::wigner_6j(1, 1, 3, 1, 1, 1).is_zero());
}

TEST(Wigner6j, ReductionWithZeroEntry) {
  // {a b 0; d e f} = delta_ab delta_de (-1)^(a+d+f) / sqrt((2a+1)(2d+1))
  for (int a = 0; a <= 6; ++a)
    for (int d = 0; d <= 6; ++d)
      for (int f = std::abs(a - d); f <= a + d; ++f)
        EXPECT_EQ(w::wigner_6j(a, a, 0, d, d, f), exact(phase(a + d + f), 1, (2 * a + 1) * (2 * d + 1)));
}

TEST(Wigner6j, TetrahedralSymmetry) {
  constexpr int jmax = 4;
  std::array<int, 6> j{};
  for (j[0] = 0; j[0] <= jmax; ++j[0])
    for (j[1] = 0; j[1] <= jmax; ++j[1])
      for (j[2] = 0; j[2] <= jmax; ++j[2])
        for (j[3] = 0; j[3] <= jmax; ++j[3])
          for (j[4] = 0; j[4] <= jmax; ++j[4])
            for (j[5] = 0; j[5] <= jmax; ++j[5]) {
              const auto [a, b, c, d, e, f] = j;
              const auto v = w::wigner_6j(a, b, c, d, e, f);
              EXPECT_EQ(w::wigner_6j(b, a, c, e, d, f), v);
              EXPECT_EQ(w::wigner_6j(a, c, b, d, f, e), v);
              EXPECT_EQ(w::wigner_6j(c, b, a, f, e, d), v);
              EXPECT_EQ(w::wigner_6j(d, e, c, a, b, f), v);
              EXPECT_EQ(w::wigner_6j(a, e, f, d, b, c), v);
            }
}

TEST(WignerValue, FloatConversionWithinFourUlp) {
  using Dec = boost::multiprecision::cpp_dec_float_50;
  auto check = [](const w::WignerValue& v) {
    if (v.is_zero()) return;
    const Dec hp = v.sign() * boost::multiprecision::sqrt(Dec(v.radicand_num()) / Dec(v.radicand_den()));
    const double ref = hp.convert_to<double>();
    EXPECT_LE(std::abs(boost::math::float_distance(v.to_double(), ref)), 4.0) << v.exact_string();
  };
  for (int a = 0; a <= 12; ++a)
    for (int b = 0; b <= 12; ++b)
      for (int c = std::abs(a - b); c <= a + b; ++c) {
        check(w::wigner_3j(a, b, c, 0, 0, 0));
        check(w::wigner_3j(a, b, c, std::min(a, 1), -std::min(a, 1), 0));
        check(w::wigner_6j(a, b, c, std::max(a - 1, 0), b, c));
      }
  check(w::wigner_3j(60, 60, 60, 0, 0, 0));
  check(w::wigner_6j(60, 60, 60, 60, 60, 60));
}

TEST(WignerValue, FloatConversionIsMonotone) {
  std::vector<w::WignerValue> values;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b)
      for (int c = std::abs(a - b); c <= a + b; ++c) values.push_back(w::wigner_6j(a, b, c, 2, 3, 4));
  auto exact_less = [](const w::WignerValue& x, const w::WignerValue& y) {
    if (x.sign() != y.sign()) return x.sign() < y.sign();
    if (x.sign() == 0) return false;
    return x.sign() > 0 ? x.radicand() < y.radicand() : x.radicand() > y.radicand();
  };
  std::sort(values.begin(), values.end(), exact_less);
  for (std::size_t i = 1; i < values.size(); ++i) EXPECT_LE(values[i - 1].to_double(), values[i].to_double());
}

TEST(SurdAccumulator, RejectsIncommensurateTerms) {
  w::SurdAccumulator sum;
  sum.add_term(1, BigRational(2));
  EXPECT_THROW(sum.add_term(1, BigRational(3)), std::domain_error);
  w::SurdAccumulator ok;
  ok.add_term(1, BigRational(2));
  ok.add_term(1, BigRational(8));
  EXPECT_EQ(ok.value(), exact(1, 18, 1));  // sqrt2 + 2 sqrt2 = sqrt18
}

TEST(SymbolCache, AgreesWithExactValues) {
  auto& cache = w::SymbolCache::instance();
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = 0; c <= 12; ++c) {
        EXPECT_EQ(cache.threej_000(a, b, c), w::wigner_3j(a, b, c, 0, 0, 0).to_double());
        EXPECT_EQ(cache.sixj(a, b, c, 2, 1, 3), w::wigner_6j(a, b, c, 2, 1, 3).to_double());
      }
}
