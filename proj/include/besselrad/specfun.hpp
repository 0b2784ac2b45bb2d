#pragma once
// Scalar special functions: spherical Bessel j_l, Legendre P_l, Legendre
// functions of the second kind Q_L on (1, inf) and their signed derivatives.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/special_functions/log1p.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/number.hpp>

namespace besselrad::specfun {

inline constexpr int kMaxBesselOrder = 50;
inline constexpr int kMaxLegendreDegree = 100;
inline constexpr int kMaxQDegree = 50;
inline constexpr int kMaxQOrder = 24;
inline constexpr int kMaxBinomialN = 200;

/// Below this distance from the branch point Q_L is evaluated by direct
/// quadrature of the split integral instead of the ratio recurrence.
inline constexpr double kNearBranchCut = 1e-6;

/// Built-in floating types and Boost.Multiprecision reals. The Q machinery
/// is generic so that cancelling sums downstream can run in extended precision.
template <class T>
concept RealType = std::floating_point<T> || boost::multiprecision::is_number<T>::value;

namespace detail {

template <RealType Real>
Real j_series(int l, Real x) {
  using std::abs;
  Real prefactor = 1;
  for (int i = 1; i <= l; ++i) prefactor *= x / Real(2 * i + 1);
  const Real half_x2 = x * x / 2;
  Real term = 1, sum = 1;
  for (int k = 1; k < 200; ++k) {
    term *= -half_x2 / (Real(k) * Real(2 * l + 2 * k + 1));
    sum += term;
    if (abs(term) <= std::numeric_limits<Real>::epsilon() * abs(sum) / 4) break;
  }
  return prefactor * sum;
}

template <RealType Real>
Real j0_direct(Real x) {
  using std::sin;
  if (x < Real(1e-4)) return j_series(0, x);
  return sin(x) / x;
}

template <RealType Real>
Real j1_direct(Real x) {
  using std::cos, std::sin;
  return (sin(x) / x - cos(x)) / x;
}

// Miller's downward recurrence, normalised against whichever of j0, j1 is
// larger in magnitude at x.
template <RealType Real>
Real j_miller(int l, Real x) {
  using std::abs;
  // extra depth grows with the working precision
  const double reach = std::max<double>(l, static_cast<double>(x));
  const double decades = std::numeric_limits<Real>::digits10;
  const int top = static_cast<int>(reach) + 20 + static_cast<int>(std::sqrt(2.5 * decades * reach));
  // cur = f_k, next = f_{k+1}
  Real next = 0, cur = Real(1e-30);
  Real at_l = 0;
  const Real big = Real(1e200);
  for (int k = top; k >= 1; --k) {
    if (k == l) at_l = cur;
    const Real prev = Real(2 * k + 1) / x * cur - next;
    next = cur;
    cur = prev;
    if (abs(cur) > big) {
      cur /= big;
      next /= big;
      at_l /= big;
    }
  }
  const Real at_0 = cur, at_1 = next;
  const Real j0 = j0_direct(x);
  const Real j1 = j1_direct(x);
  if (abs(j0) >= abs(j1)) return at_l * (j0 / at_0);
  return at_l * (j1 / at_1);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n,
// converged to the precision of Real.
template <RealType Real>
void gauss_legendre(int n, std::vector<Real>& nodes, std::vector<Real>& weights) {
  using std::abs, std::cos;
  nodes.assign(n, Real(0));
  weights.assign(n, Real(0));
  // P_n(z) and P_n'(z)
  auto evaluate = [n](const Real& z) {
    Real p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const Real p2 = (Real(2 * k - 1) * z * p1 - Real(k - 1) * p0) / Real(k);
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1;
    return std::pair<Real, Real>{p1, Real(n) * (z * p1 - p0) / (z * z - 1)};
  };
  const Real tol = 4 * std::numeric_limits<Real>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = evaluate(z);
      const Real dz = p / dp;
      z -= dz;
      if (abs(dz) <= tol) break;
    }
    const Real dp = evaluate(z).second;
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace detail

/// Spherical Bessel function of the first kind j_l(x) for 0 <= l <= 50, x >= 0.
template <RealType Real>
Real spherical_bessel_j(int l, Real x) {
  if (l < 0 || l > kMaxBesselOrder)
    throw std::invalid_argument("spherical_bessel_j: order out of range: " + std::to_string(l));
  if (!(x >= 0) || !boost::math::isfinite(x))
    throw std::invalid_argument("spherical_bessel_j: argument must be finite and non-negative");
  if (x == 0) return l == 0 ? Real(1) : Real(0);
  if (l == 0) return detail::j0_direct(x);
  if (x <= 1) return detail::j_series(l, x);
  if (x >= Real(l)) {
    Real jm = detail::j0_direct(x);
    Real jc = detail::j1_direct(x);
    for (int k = 1; k < l; ++k) {
      const Real jn = Real(2 * k + 1) / x * jc - jm;
      jm = jc;
      jc = jn;
    }
    return jc;
  }
  return detail::j_miller(l, x);
}

/// Legendre polynomial P_l(x) on [-1, 1].
template <RealType Real>
Real legendre_p(int l, Real x) {
  if (l < 0 || l > kMaxLegendreDegree)
    throw std::invalid_argument("legendre_p: degree out of range: " + std::to_string(l));
  using std::abs;
  if (!(abs(x) <= 1)) throw std::invalid_argument("legendre_p: |x| > 1");
  if (l == 0) return 1;
  Real p0 = 1, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Legendre polynomial without the |x| <= 1 restriction; used for P_L(y), y > 1.
template <RealType Real>
Real legendre_p_unrestricted(int l, Real x) {
  if (l == 0) return 1;
  Real p0 = 1, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Argument of Q on (1, inf) carried together with y - 1, which callers can
/// often form without cancellation.
template <RealType Real>
struct QArgument {
  Real y;
  Real y_minus_1;

  static QArgument from_y(Real y) {
    if (!(y > 1) || !boost::math::isfinite(y))
      throw std::domain_error("Legendre Q: argument must satisfy y > 1");
    return {y, y - 1};
  }
  Real y2_minus_1() const { return y_minus_1 * (y + 1); }
};

/// Q_0 .. Q_lmax on (1, inf).
///
/// Away from the branch point the ratios Q_L / Q_{L-1} come from the
/// three-term recurrence run downwards (a continued fraction for the minimal
/// solution), anchored by Q_0 = atanh(1/y). Very close to y = 1 the ratios
/// converge too slowly, and Q_L = P_L(y) Q_0(y) - W_{L-1}(y) is used instead,
/// with the polynomial part W evaluated by Gauss-Legendre quadrature of the
/// difference quotient (P_L(y) - P_L(x)) / (y - x). Near y = 1 the log term
/// dominates so there is no cancellation.
template <RealType Real>
std::vector<Real> legendre_q_sequence(int lmax, QArgument<Real> arg) {
  if (lmax < 0 || lmax > kMaxQDegree)
    throw std::invalid_argument("legendre_q: degree out of range: " + std::to_string(lmax));
  if (!(arg.y_minus_1 > 0)) throw std::domain_error("Legendre Q: argument must satisfy y > 1");
  const Real y = arg.y, d = arg.y_minus_1;
  std::vector<Real> q(lmax + 1);
  using std::ceil, std::exp, std::sqrt;
  q[0] = boost::math::log1p(Real(2 / d)) / 2;
  if (lmax == 0) return q;

  if (d < Real(kNearBranchCut)) {
    std::vector<Real> nodes, weights;
    detail::gauss_legendre(lmax / 2 + 2, nodes, weights);
    for (int L = 1; L <= lmax; ++L) {
      const Real py = legendre_p_unrestricted(L, y);
      Real w = 0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Real& x = nodes[i];
        w += weights[i] * (py - legendre_p(L, x)) / (y - x);
      }
      q[L] = py * q[0] - w / 2;
    }
    return q;
  }

  const Real acosh_y = boost::math::log1p(Real(d + sqrt(Real(d * (2 + d)))));
  // the ratio error decays like exp(-2 acosh(y) (top - L)); start deep
  // enough for the working precision
  const double decades = std::numeric_limits<Real>::digits10 + 3;
  const int top = lmax + 12 + static_cast<int>(ceil(Real(decades * std::numbers::ln10 / 2 / acosh_y)));
  Real ratio = exp(Real(-acosh_y));  // asymptotic Q_{L+1}/Q_L
  std::vector<Real> ratios(lmax + 1);
  for (int L = top; L >= 1; --L) {
    ratio = Real(L) / (Real(2 * L + 1) * y - Real(L + 1) * ratio);
    if (L <= lmax) ratios[L] = ratio;
  }
  for (int L = 1; L <= lmax; ++L) q[L] = q[L - 1] * ratios[L];
  return q;
}

/// Legendre function of the second kind Q_L(y) for y > 1.
template <RealType Real>
Real legendre_q(int L, Real y) {
  if (L < 0 || L > kMaxQDegree)
    throw std::invalid_argument("legendre_q: degree out of range: " + std::to_string(L));
  return legendre_q_sequence(L, QArgument<Real>::from_y(y))[L];
}

/// Signed derivatives D_M(L, y) = (-1)^M d^M Q_L / dy^M for M = 0..mmax,
/// from Q_L and Q_{L-1}.
///
/// D_1 comes from (y^2 - 1) Q_L' = L (y Q_L - Q_{L-1}); higher orders from the
/// M-times differentiated Legendre equation
///   D_{m+2} (y^2 - 1) = 2 (m + 1) y D_{m+1} + (L(L+1) - m(m+1)) D_m.
template <RealType Real>
std::vector<Real> q_signed_derivatives(int L, int mmax, Real q_l, Real q_lm1, QArgument<Real> arg) {
  std::vector<Real> d(mmax + 1);
  d[0] = q_l;
  if (mmax == 0) return d;
  const Real y2m1 = arg.y2_minus_1();
  d[1] = L == 0 ? Real(1 / y2m1) : Real(Real(L) * ((q_lm1 - q_l) - arg.y_minus_1 * q_l) / y2m1);
  const Real ll1 = Real(L) * Real(L + 1);
  for (int m = 0; m + 2 <= mmax; ++m) {
    d[m + 2] = (Real(2 * (m + 1)) * arg.y * d[m + 1] + (ll1 - Real(m) * Real(m + 1)) * d[m]) / y2m1;
  }
  return d;
}

/// The real combination (1 - y^2)^(-M/2) Q_L^M(y) fixed by
///   int_{-1}^{1} P_L(x) / (y - x)^(M+1) dx = (2 / M!) (1 - y^2)^(-M/2) Q_L^M(y),
/// which equals (-1)^M d^M Q_L / dy^M and is positive for y > 1.
template <RealType Real>
Real paper_q_combination(int L, int M, QArgument<Real> arg) {
  if (L < 0 || L > kMaxQDegree || M < 0 || M > kMaxQOrder)
    throw std::invalid_argument("paper_q_combination: degree/order out of range");
  const auto q = legendre_q_sequence(L, arg);
  const Real q_lm1 = L > 0 ? q[L - 1] : Real(0);
  return q_signed_derivatives(L, M, q[L], q_lm1, arg)[M];
}

template <RealType Real>
Real paper_q_combination(int L, int M, Real y) {
  return paper_q_combination(L, M, QArgument<Real>::from_y(y));
}

/// Table of D_M(l, y) for l = 0..lmax at a single argument and order.
template <RealType Real>
std::vector<Real> paper_q_combination_table(int lmax, int M, QArgument<Real> arg) {
  if (M < 0 || M > kMaxQOrder) throw std::invalid_argument("paper_q_combination: order out of range");
  const auto q = legendre_q_sequence(lmax, arg);
  std::vector<Real> out(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    out[l] = q_signed_derivatives(l, M, q[l], l > 0 ? q[l - 1] : Real(0), arg)[M];
  }
  return out;
}

using BigInt = boost::multiprecision::cpp_int;

inline BigInt binomial_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("binomial: need 0 <= k <= n");
  k = std::min(k, n - k);
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

/// sqrt(C(n, k)) from the exact integer binomial coefficient, n <= 200.
inline double binomial_sqrt(int n, int k) {
  if (n > kMaxBinomialN) throw std::invalid_argument("binomial_sqrt: n > 200");
  return std::sqrt(binomial_exact(n, k).convert_to<double>());
}

/// n! as a floating value (exact up to 22!).
inline double factorial(int n) {
  if (n < 0 || n > 170) throw std::invalid_argument("factorial: argument out of range");
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace besselrad::specfun
