#pragma once
// Closed forms for radial integrals of spherical Bessel functions.
//
// The two-Bessel results fix the product
//   (l1 l2 l3; 0 0 0) * int_0^inf r^(l3+p) e^(-alpha r) j_l1(k1 r) j_l2(k2 r) dr,  p in {1, 2}
// as a finite double sum over 3j/6j symbols and the signed Q derivatives
// D_M(l, y), y = (k1^2 + k2^2 + alpha^2) / (2 k1 k2). All phases are real
// signs; no complex arithmetic is involved.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "besselrad/specfun.hpp"
#include "besselrad/wigner.hpp"

namespace besselrad::closedform {

inline constexpr int kMaxOrder = 20;

/// Which formula produced a value. The wire names are fixed by the CLI and
/// file formats.
enum class Method {
  kPowerPlusOne,    // power l3 + 1
  kEqualOrder,      // l1 = l2, power 1
  kPowerPlusTwo,    // power l3 + 2
  kThreeBessel,
  kLaplacePlusOne,
  kLaplacePlusTwo,
  kNone,            // no closed form; value came from quadrature
};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::kPowerPlusOne: return "EQ_2_8";
    case Method::kEqualOrder: return "EQ_2_9";
    case Method::kPowerPlusTwo: return "EQ_2_11";
    case Method::kThreeBessel: return "EQ_2_1";
    case Method::kLaplacePlusOne: return "EQ_2_4";
    case Method::kLaplacePlusTwo: return "EQ_2_10";
    case Method::kNone: return "NA";
  }
  return "NA";
}

/// The requested integral has no closed form here: the parity-selected l3
/// violates the triangle rule, so the outer 3j symbol vanishes.
class FormulaInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegralSpec {
  int lambda1 = 0;
  int lambda2 = 0;
  double k1 = 1;
  double k2 = 1;
  double alpha = 1;
  int n = 1;

  void validate() const {
    if (lambda1 < 0 || lambda2 < 0 || lambda1 > kMaxOrder || lambda2 > kMaxOrder)
      throw std::invalid_argument("Bessel orders must lie in [0, 20]");
    if (n < 0) throw std::invalid_argument("radial power must be non-negative");
    if (!(k1 > 0) || !(k2 > 0) || !std::isfinite(k1) || !std::isfinite(k2))
      throw std::invalid_argument("wavenumbers must be positive and finite");
    if (!(alpha > 0) || !std::isfinite(alpha))
      throw std::invalid_argument("alpha must be positive and finite");
  }
};

struct ThreeBesselSpec {
  int lambda1 = 0;
  int lambda2 = 0;
  int lambda3 = 0;
  double k1 = 1;
  double k2 = 1;
  double k3 = 1;

  void validate() const {
    for (int l : {lambda1, lambda2, lambda3})
      if (l < 0 || l > kMaxOrder) throw std::invalid_argument("Bessel orders must lie in [0, 20]");
    for (double k : {k1, k2, k3})
      if (!(k > 0) || !std::isfinite(k)) throw std::invalid_argument("wavenumbers must be positive");
  }
};

struct EvalResult {
  double value = 0;
  Method method = Method::kNone;
  double condition = 0;  // 1 / (y - 1)
  std::optional<double> oracle_value;
  std::optional<double> oracle_error;
};

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

inline int parity_sign(int exponent) { return exponent % 2 == 0 ? 1 : -1; }

}  // namespace detail

inline double y_param(double k1, double k2, double alpha) {
  detail::require_positive(k1, "k1");
  detail::require_positive(k2, "k2");
  detail::require_positive(alpha, "alpha");
  return (k1 * k1 + k2 * k2 + alpha * alpha) / (2 * k1 * k2);
}

/// y together with y - 1 = ((k1 - k2)^2 + alpha^2) / (2 k1 k2), formed without cancellation.
inline specfun::QArgument<double> q_argument(double k1, double k2, double alpha) {
  const double y = y_param(k1, k2, alpha);
  const double dk = k1 - k2;
  return {y, (dk * dk + alpha * alpha) / (2 * k1 * k2)};
}

/// 1 / (y - 1) = 2 k1 k2 / ((k1 - k2)^2 + alpha^2).
inline double condition_number(double k1, double k2, double alpha) {
  const double dk = k1 - k2;
  return 2 * k1 * k2 / (dk * dk + alpha * alpha);
}

inline double delta_param(double k1, double k2, double k3) {
  detail::require_positive(k1, "k1");
  detail::require_positive(k2, "k2");
  detail::require_positive(k3, "k3");
  return (k1 * k1 + k2 * k2 - k3 * k3) / (2 * k1 * k2);
}

/// Wavenumber triangle indicator: 1 inside, 0 outside, 1/2 on the boundary.
inline double beta_step(double delta) {
  const double a = std::abs(delta);
  if (a < 1) return 1.0;
  if (a > 1) return 0.0;
  return 0.5;
}

/// Selection-rule bounds of the inner l sum for a given script_l.
inline std::pair<int, int> summation_bounds(int lambda1, int lambda2, int lambda3, int script_l) {
  const int lo = std::max(std::abs(lambda1 - (lambda3 - script_l)), std::abs(lambda2 - script_l));
  const int hi = std::min(lambda1 + lambda3 - script_l, lambda2 + script_l);
  return {lo, hi};
}

/// int_0^inf r^(l3+offset) e^(-alpha r) j_l3(k3 r) dr for offset 1 or 2.
inline double laplace_single_bessel(int lambda3, double alpha, double k3, int offset) {
  if (offset != 1 && offset != 2) throw std::invalid_argument("laplace_single_bessel: offset must be 1 or 2");
  if (lambda3 < 0 || lambda3 > 50) throw std::invalid_argument("laplace_single_bessel: order out of range");
  detail::require_positive(alpha, "alpha");
  detail::require_positive(k3, "k3");
  const double s = k3 * k3 + alpha * alpha;
  // (2 k3)^l3 / s^(l3+1) built up term by term to keep intermediates in range
  double v = 1 / s;
  for (int i = 0; i < lambda3; ++i) v *= 2 * k3 / s;
  if (offset == 1) return v * specfun::factorial(lambda3);
  return 2 * alpha * v * specfun::factorial(lambda3 + 1) / s;
}

namespace detail {

using Wide = wigner::WideFloat;

template <class Real>
Real threej_000(int l1, int l2, int l3) {
  auto& cache = wigner::SymbolCache::instance();
  if constexpr (std::is_same_v<Real, double>) return cache.threej_000(l1, l2, l3);
  else return cache.threej_000_wide(l1, l2, l3);
}

template <class Real>
Real sixj(int j1, int j2, int j3, int j4, int j5, int j6) {
  auto& cache = wigner::SymbolCache::instance();
  if constexpr (std::is_same_v<Real, double>) return cache.sixj(j1, j2, j3, j4, j5, j6);
  else return cache.sixj_wide(j1, j2, j3, j4, j5, j6);
}

template <class Real>
Real binomial_sqrt(int n, int k) {
  if constexpr (std::is_same_v<Real, double>) return specfun::binomial_sqrt(n, k);
  else return sqrt(Real(specfun::binomial_exact(n, k)));
}

// Common angular sum
//   sqrt(2 l3 + 1) sum_L sqrt(C(2 l3, 2L)) (k2/k1)^L
//     sum_l (2l+1) 3j(l1, l3-L, l) 3j(l2, L, l) 6j{l1 l2 l3; L l3-L l} f(l)
// The terms cancel heavily when y is close to 1, so the two-Bessel sums run
// in Wide.
template <class Real, class Radial>
Real angular_sum(int l1, int l2, int l3, Real k1, Real k2, Radial&& radial) {
  using std::sqrt;
  Real total = 0;
  Real ratio_pow = 1;
  const Real ratio = k2 / k1;
  for (int script_l = 0; script_l <= l3; ++script_l, ratio_pow *= ratio) {
    const auto [lo, hi] = summation_bounds(l1, l2, l3, script_l);
    Real inner = 0;
    for (int l = lo; l <= hi; ++l) {
      if (!wigner::threej_000_nonzero(l1, l3 - script_l, l) || !wigner::threej_000_nonzero(l2, script_l, l))
        continue;
      const Real angular = Real(2 * l + 1) * threej_000<Real>(l1, l3 - script_l, l) *
                           threej_000<Real>(l2, script_l, l) * sixj<Real>(l1, l2, l3, script_l, l3 - script_l, l);
      if (angular == 0) continue;
      inner += angular * radial(l);
    }
    if (inner != 0) total += binomial_sqrt<Real>(2 * l3, 2 * script_l) * ratio_pow * inner;
  }
  return sqrt(Real(2 * l3 + 1)) * total;
}

inline int max_inner_l(int l1, int l2, int l3) {
  int lmax = 0;
  for (int s = 0; s <= l3; ++s) lmax = std::max(lmax, summation_bounds(l1, l2, l3, s).second);
  return lmax;
}

}  // namespace detail

/// (l1 l2 l3; 0 0 0) * int_0^inf r^2 j_l1(k1 r) j_l2(k2 r) j_l3(k3 r) dr.
inline double three_bessel_product(const ThreeBesselSpec& spec) {
  spec.validate();
  const auto [l1, l2, l3, k1, k2, k3] = spec;
  if (!wigner::threej_000_nonzero(l1, l2, l3)) return 0.0;
  const double delta = delta_param(k1, k2, k3);
  const double beta = beta_step(delta);
  if (beta == 0) return 0.0;
  const double clamped = std::clamp(delta, -1.0, 1.0);
  const double sum = detail::angular_sum<double>(l1, l2, l3, k1, k2,
                                                 [&](int l) { return specfun::legendre_p(l, clamped); });
  const double sign = detail::parity_sign((l1 + l2 - l3) / 2);
  return sign * std::numbers::pi * beta / (4 * k1 * k2 * k3) * std::pow(k1 / k3, l3) * sum;
}

/// (l1 l2 l3; 0 0 0) * int_0^inf r^(l3+offset) e^(-alpha r) j_l1(k1 r) j_l2(k2 r) dr.
inline EvalResult two_bessel_product(int l1, int l2, int l3, double k1, double k2, double alpha, int offset) {
  if (offset != 1 && offset != 2) throw std::invalid_argument("two_bessel_product: offset must be 1 or 2");
  for (int l : {l1, l2, l3})
    if (l < 0 || l > kMaxOrder) throw std::invalid_argument("Bessel orders must lie in [0, 20]");
  detail::require_positive(k1, "k1");
  detail::require_positive(k2, "k2");
  detail::require_positive(alpha, "alpha");
  EvalResult result;
  result.method = offset == 1 ? Method::kPowerPlusOne : Method::kPowerPlusTwo;
  result.condition = condition_number(k1, k2, alpha);
  if (!wigner::threej_000_nonzero(l1, l2, l3)) return result;

  using detail::Wide;
  const Wide wk1 = k1, wk2 = k2, wa = alpha;
  const Wide dk = wk1 - wk2;
  const specfun::QArgument<Wide> warg{(wk1 * wk1 + wk2 * wk2 + wa * wa) / (2 * wk1 * wk2),
                                      (dk * dk + wa * wa) / (2 * wk1 * wk2)};
  const int order = l3 + offset - 1;
  const auto d = specfun::paper_q_combination_table(detail::max_inner_l(l1, l2, l3), order, warg);
  const Wide sum = detail::angular_sum<Wide>(l1, l2, l3, wk1, wk2, [&](int l) { return d[l]; });
  const int sign = detail::parity_sign((l1 + l2 - l3) / 2);
  Wide value = offset == 1 ? Wide(sum / (2 * wk1 * pow(wk2, l3 + 1)))
                           : Wide(wa * sum / (2 * wk1 * wk1 * pow(wk2, l3 + 2)));
  result.value = sign * value.convert_to<double>();
  return result;
}

/// int_0^inf r e^(-alpha r) j_L(k1 r) j_L(k2 r) dr = Q_L(y) / (2 k1 k2).
inline EvalResult two_bessel_equal_order(int L, double k1, double k2, double alpha) {
  if (L < 0 || L > kMaxOrder) throw std::invalid_argument("Bessel order must lie in [0, 20]");
  const auto arg = q_argument(k1, k2, alpha);
  EvalResult result;
  result.method = Method::kEqualOrder;
  result.condition = condition_number(k1, k2, alpha);
  result.value = specfun::legendre_q_sequence(L, arg)[L] / (2 * k1 * k2);
  return result;
}

/// The l3 whose route recovers int r^n ..., or FormulaInapplicable.
inline std::pair<int, int> select_route(int n, int l1, int l2) {
  // returns {l3, offset}
  if (n >= 1 && (l1 + l2 + n - 1) % 2 == 0) {
    if (!wigner::threej_000_nonzero(l1, l2, n - 1))
      throw FormulaInapplicable("no closed form: l3 = " + std::to_string(n - 1) +
                                " violates the triangle rule with l1 = " + std::to_string(l1) +
                                ", l2 = " + std::to_string(l2));
    return {n - 1, 1};
  }
  if (n >= 2) {
    if (!wigner::threej_000_nonzero(l1, l2, n - 2))
      throw FormulaInapplicable("no closed form: l3 = " + std::to_string(n - 2) +
                                " violates the triangle rule with l1 = " + std::to_string(l1) +
                                ", l2 = " + std::to_string(l2));
    return {n - 2, 2};
  }
  throw FormulaInapplicable("no closed form: power 1 requires l1 + l2 even");
}

/// The bare integral int_0^inf r^n e^(-alpha r) j_l1(k1 r) j_l2(k2 r) dr,
/// recovered from the 3j-weighted product by dividing by the exact outer 3j.
inline EvalResult bare_integral(const IntegralSpec& spec) {
  spec.validate();
  if (spec.n < 1) throw std::invalid_argument("bare_integral: power must be at least 1");
  const auto [l3, offset] = select_route(spec.n, spec.lambda1, spec.lambda2);
  EvalResult result = two_bessel_product(spec.lambda1, spec.lambda2, l3, spec.k1, spec.k2, spec.alpha, offset);
  result.value /= wigner::wigner_3j(spec.lambda1, spec.lambda2, l3, 0, 0, 0).to_double();
  return result;
}

}  // namespace besselrad::closedform
