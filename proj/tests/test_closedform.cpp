#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "besselrad/closedform.hpp"
#include "besselrad/oracle.hpp"

namespace cf = besselrad::closedform;
namespace sf = besselrad::specfun;
namespace w = besselrad::wigner;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

constexpr double kGrid[] = {0.5, 1.0, 2.0};

}  // namespace

TEST(Parameters, Examples) {
  EXPECT_DOUBLE_EQ(cf::y_param(1, 1, 1), 1.5);
  EXPECT_DOUBLE_EQ(cf::y_param(1, 2, 0.5), 5.25 / 4);
  EXPECT_DOUBLE_EQ(cf::delta_param(1, 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(cf::delta_param(1, 1, 2), -1.0);
  EXPECT_EQ(cf::beta_step(0.5), 1.0);
  EXPECT_EQ(cf::beta_step(-1.0), 0.5);
  EXPECT_EQ(cf::beta_step(1.0), 0.5);
  EXPECT_EQ(cf::beta_step(1.5), 0.0);
  EXPECT_DOUBLE_EQ(cf::condition_number(1, 1, 0.1), 200.0);
  EXPECT_THROW(cf::y_param(0, 1, 1), std::invalid_argument);
  EXPECT_THROW(cf::y_param(1, 1, -1), std::invalid_argument);
}

TEST(Parameters, QArgumentCarriesExactOffset) {
  const auto arg = cf::q_argument(1.0, 1.0 + 1e-9, 1e-9);
  EXPECT_GT(arg.y_minus_1, 0.0);
  EXPECT_LT(rel(arg.y_minus_1, (1e-18 + 1e-18) / (2 * (1.0 + 1e-9))), 1e-6);
}

TEST(Parameters, SummationBounds) {
  EXPECT_EQ(cf::summation_bounds(0, 0, 0, 0), std::make_pair(0, 0));
  EXPECT_EQ(cf::summation_bounds(1, 1, 2, 1), std::make_pair(0, 2));
  EXPECT_EQ(cf::summation_bounds(2, 1, 1, 0), std::make_pair(1, 1));
}

TEST(MethodNames, WireStrings) {
  EXPECT_EQ(cf::method_name(cf::Method::kPowerPlusOne), "EQ_2_8");
  EXPECT_EQ(cf::method_name(cf::Method::kEqualOrder), "EQ_2_9");
  EXPECT_EQ(cf::method_name(cf::Method::kPowerPlusTwo), "EQ_2_11");
  EXPECT_EQ(cf::method_name(cf::Method::kThreeBessel), "EQ_2_1");
  EXPECT_EQ(cf::method_name(cf::Method::kLaplacePlusOne), "EQ_2_4");
  EXPECT_EQ(cf::method_name(cf::Method::kLaplacePlusTwo), "EQ_2_10");
  EXPECT_EQ(cf::method_name(cf::Method::kNone), "NA");
}

TEST(Laplace, Examples) {
  // int r e^(-r) j0(r) dr = 1 / (1 + 1)
  EXPECT_DOUBLE_EQ(cf::laplace_single_bessel(0, 1, 1, 1), 0.5);
  EXPECT_LT(rel(cf::laplace_single_bessel(2, 0.5, 2, 1), 32 / std::pow(4.25, 3)), 1e-15);
  // offset 2 is minus the alpha-derivative of offset 1
  const double h = 1e-5;
  const double fd = -(cf::laplace_single_bessel(3, 1 + h, 1.5, 1) - cf::laplace_single_bessel(3, 1 - h, 1.5, 1)) / (2 * h);
  EXPECT_LT(rel(cf::laplace_single_bessel(3, 1, 1.5, 2), fd), 1e-8);
  EXPECT_THROW(cf::laplace_single_bessel(1, 1, 1, 3), std::invalid_argument);
}

TEST(ThreeBessel, Examples) {
  EXPECT_LT(rel(cf::three_bessel_product({0, 0, 0, 1, 1, 1}), std::numbers::pi / 4), 1e-15);
  EXPECT_EQ(cf::three_bessel_product({0, 0, 0, 1, 1, 3}), 0.0);
  EXPECT_EQ(cf::three_bessel_product({1, 1, 1, 1, 1, 1}), 0.0);
  // boundary: beta = 1/2
  EXPECT_LT(rel(cf::three_bessel_product({0, 0, 0, 1, 1, 2}), std::numbers::pi / 16), 1e-15);
}

TEST(ThreeBessel, MatchesRegularisedQuadrature) {
  const cf::ThreeBesselSpec spec{1, 1, 0, 1, 1, 1};
  const double threej = w::wigner_3j(1, 1, 0, 0, 0, 0).to_double();
  const auto eps = besselrad::oracle::default_eps_list();
  const auto o = besselrad::oracle::integrate_three_bessel_regularized(spec, eps, 1e-9);
  EXPECT_LT(rel(cf::three_bessel_product(spec), threej * o.value), 1e-4);
}

TEST(TwoBessel, FrozenHighPrecisionValues) {
  // mpmath, 40 digits
  EXPECT_LT(rel(cf::two_bessel_equal_order(2, 1, 1, 0.5).value, 0.14676794645715366868), 1e-14);
  EXPECT_LT(rel(cf::two_bessel_product(0, 1, 1, 1, 2, 1, 1).value, -0.086943101708719862639), 1e-14);
  EXPECT_LT(rel(cf::bare_integral({2, 2, 0.5, 2, 1, 3}).value, 0.003713408249333058752), 1e-13);
  EXPECT_LT(rel(cf::bare_integral({0, 1, 1, 1, 0.1, 2}).value, 1.2491137982231327012), 1e-12);
  // high orders near y = 1: derivatives of Q up to order 20
  EXPECT_LT(rel(cf::bare_integral({10, 10, 2, 2, 0.5, 21}).value, 16107587590808237368195.18), 1e-13);
  EXPECT_LT(rel(cf::bare_integral({10, 10, 2, 0.5, 0.5, 21}).value, 3706031928.980720353349459), 1e-13);
}

TEST(TwoBessel, ElementaryExamples) {
  // int r e^(-r) j0(r)^2 dr = ln(5) / 4
  EXPECT_LT(rel(cf::bare_integral({0, 0, 1, 1, 1, 1}).value, std::log(5.0) / 4), 1e-15);
  // int r^2 e^(-r) j0(r)^2 dr = 2/5
  EXPECT_LT(rel(cf::bare_integral({0, 0, 1, 1, 1, 2}).value, 0.4), 1e-15);
  EXPECT_LT(rel(cf::two_bessel_equal_order(0, 1, 2, 1).value, std::log(5.0) / 8), 1e-15);
}

TEST(TwoBessel, ParityZero) {
  const auto r = cf::two_bessel_product(1, 1, 1, 1, 2, 0.5, 1);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.method, cf::Method::kPowerPlusOne);
  EXPECT_EQ(cf::two_bessel_product(2, 0, 1, 1, 2, 0.5, 2).value, 0.0);
}

TEST(TwoBessel, RouteSelection) {
  EXPECT_EQ(cf::select_route(1, 0, 0), std::make_pair(0, 1));
  EXPECT_EQ(cf::select_route(2, 0, 0), std::make_pair(0, 2));
  EXPECT_EQ(cf::select_route(2, 1, 0), std::make_pair(1, 1));
  EXPECT_EQ(cf::bare_integral({1, 0, 1, 1, 1, 2}).method, cf::Method::kPowerPlusOne);
  EXPECT_EQ(cf::bare_integral({0, 0, 1, 1, 1, 2}).method, cf::Method::kPowerPlusTwo);
  EXPECT_THROW(cf::bare_integral({1, 2, 1, 1, 1, 1}), cf::FormulaInapplicable);
  EXPECT_THROW(cf::bare_integral({0, 4, 1, 1, 1, 2}), cf::FormulaInapplicable);
  EXPECT_THROW(cf::bare_integral({0, 0, 1, 1, 1, 0}), std::invalid_argument);
}

TEST(TwoBessel, EqualOrderConsistentWithGeneralRoute) {
  for (int L = 0; L <= 5; ++L)
    for (double k1 : kGrid)
      for (double k2 : kGrid)
        for (double a : kGrid) {
          const double general = cf::bare_integral({L, L, k1, k2, a, 1}).value;
          EXPECT_LT(rel(general, cf::two_bessel_equal_order(L, k1, k2, a).value), 1e-12) << L << k1 << k2 << a;
        }
}

TEST(TwoBessel, SwapSymmetry) {
  for (int l1 = 0; l1 <= 3; ++l1)
    for (int l2 = 0; l2 <= 3; ++l2)
      for (int n = 1; n <= 6; ++n) {
        try {
          const double x = cf::bare_integral({l1, l2, 0.7, 1.9, 0.6, n}).value;
          const double y = cf::bare_integral({l2, l1, 1.9, 0.7, 0.6, n}).value;
          EXPECT_LE(std::abs(x - y), 1e-12 * std::abs(x)) << l1 << l2 << n;
        } catch (const cf::FormulaInapplicable&) {
          EXPECT_THROW(cf::bare_integral({l2, l1, 1.9, 0.7, 0.6, n}), cf::FormulaInapplicable);
        }
      }
}

TEST(TwoBessel, GrowsTowardsSingularity) {
  double previous = 0;
  for (double a : {1.0, 0.3, 0.1, 0.03, 0.01, 0.003}) {
    const auto r = cf::bare_integral({1, 0, 1, 1, a, 2});
    EXPECT_GT(r.value, previous);
    EXPECT_LT(rel(r.condition, 2 / (a * a)), 1e-12);
    previous = r.value;
  }
}

TEST(TwoBessel, OffsetTwoIsAlphaDerivativeOfOffsetOne) {
  // power l3+2 integrand is -d/dalpha of the power l3+1 integrand
  const double h = 1e-5;
  for (int l3 : {0, 2, 4}) {
    const auto f = [&](double a) { return cf::two_bessel_product(2, 2, l3, 0.8, 1.3, a, 1).value; };
    const double fd = -(f(0.9 + h) - f(0.9 - h)) / (2 * h);
    EXPECT_LT(rel(cf::two_bessel_product(2, 2, l3, 0.8, 1.3, 0.9, 2).value, fd), 1e-8) << l3;
  }
}

TEST(TwoBessel, RejectsInvalidArguments) {
  EXPECT_THROW(cf::two_bessel_product(21, 0, 21, 1, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(cf::two_bessel_product(0, 0, 0, 1, 1, 0, 1), std::invalid_argument);
  EXPECT_THROW(cf::two_bessel_product(0, 0, 0, 1, 1, 1, 3), std::invalid_argument);
  EXPECT_THROW(cf::bare_integral({0, 0, -1, 1, 1, 1}), std::invalid_argument);
}

TEST(WideQ, AgreesWithDouble) {
  for (double y : {1.001, 1.3, 4.0, 60.0}) {
    const auto narrow = sf::legendre_q_sequence(20, sf::QArgument<double>::from_y(y));
    const auto wide = sf::legendre_q_sequence(20, sf::QArgument<w::WideFloat>::from_y(w::WideFloat(y)));
    for (int L = 0; L <= 20; ++L) EXPECT_LT(rel(narrow[L], wide[L].convert_to<double>()), 1e-13) << y << L;
  }
}
