#pragma once
// Independent numerical checks of the closed forms: globally adaptive
// Gauss-Kronrod quadrature over oscillation-sized panels, analytic tail
// bounds for the semi-infinite integrals, and epsilon-regularised Richardson
// extrapolation for the undamped three-Bessel integral.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "besselrad/closedform.hpp"
#include "besselrad/specfun.hpp"

namespace besselrad::oracle {

inline constexpr long kDefaultEvaluationBudget = 1'000'000;

/// Envelope constant: |j_l(x)| <= kBesselEnvelope * x^(-5/6) for x >= 1 and
/// every l, from the uniform bound |J_nu(x)| <= 0.7858 x^(-1/3).
inline constexpr double kBesselEnvelope = 1.0;

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0;
  double abs_error_estimate = 0;
  long panels_used = 0;
  bool converged = false;
};

/// Evaluation budget; BESSELRAD_PANEL_BUDGET overrides the default.
inline long default_evaluation_budget() {
  if (const char* env = std::getenv("BESSELRAD_PANEL_BUDGET")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultEvaluationBudget;
}

struct QuadratureOptions {
  double rel_tol = 1e-10;
  long evaluation_budget = default_evaluation_budget();
};

namespace detail {

// Integrands are evaluated and summed in long double: several of the radial
// integrals are 1e6 smaller than the integral of their absolute value. Where
// that is still not enough the two-Bessel integral is redone in quad precision.
using Real = long double;
using Quad = boost::multiprecision::cpp_bin_float_quad;
inline constexpr int kPointsPerPanel = 21;

template <class R>
struct RawResult {
  R value = 0;
  R error = 0;
  R mass = 0;  // integral of |f|
  long panels = 0;
  bool converged = false;

  QuadratureResult narrow() const {
    return {static_cast<double>(value), static_cast<double>(error), panels, converged};
  }
};

template <class R>
struct Panel {
  R a, b;
  R value;
  R error;
  R mass;
  bool splittable;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class R>
class Integrator {
 public:
  using Rule = boost::math::quadrature::gauss_kronrod<R, 21>;
  static inline const R kEps = std::numeric_limits<R>::epsilon();

  explicit Integrator(long budget) : budget_(budget) {}

  long evaluations() const { return evaluations_; }
  long panels() const { return evaluations_ / kPointsPerPanel; }

  template <class F>
  Panel<R> panel(F& f, R a, R b) {
    using std::abs;
    evaluations_ += kPointsPerPanel;
    R err = 0, l1 = 0;
    const R v = Rule::integrate(f, a, b, 0, R(0), &err, &l1);
    // Boost reports the non-adaptive error on the reference interval [-1, 1]
    // (L1 is rescaled, the error is not)
    err *= (b - a) / 2;
    // roundoff floor of the rule; a panel at the floor gains nothing from bisection
    const R floor = 50 * kEps * l1;
    const bool splittable = err > floor && (b - a) > R(1e-16) * std::max(R(1), R(abs(a)));
    return {a, b, v, std::max(err, floor), l1, splittable};
  }

  /// Globally adaptive: repeatedly bisects the panel with the largest error
  /// until the summed error meets max(abs_tol, rel_tol * |value|), or until
  /// every panel sits at its roundoff floor. The second case still counts as
  /// converged: the error estimate is then the attainable accuracy, which can
  /// exceed rel_tol * |value| when the integral is nearly zero.
  template <class F>
  RawResult<R> integrate(F&& f, std::span<const double> breakpoints, double rel_tol, double abs_tol) {
    using std::abs;
    std::priority_queue<Panel<R>> active;
    std::vector<Panel<R>> settled;
    R value = 0, error = 0, mass = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      const auto p = panel(f, R(breakpoints[i]), R(breakpoints[i + 1]));
      value += p.value;
      error += p.error;
      mass += p.mass;
      active.push(p);
    }
    auto totals = [&] {
      // Neumaier-compensated sums over all panels
      R s = 0, c = 0, e = 0;
      auto add = [&](const Panel<R>& p) {
        const R t = s + p.value;
        c += abs(s) >= abs(p.value) ? R((s - t) + p.value) : R((p.value - t) + s);
        s = t;
        e += p.error;
      };
      for (const auto& p : settled) add(p);
      auto copy = active;
      while (!copy.empty()) {
        add(copy.top());
        copy.pop();
      }
      return std::pair<R, R>{s + c, e};
    };
    auto target = [&](const R& v) { return std::max(R(abs_tol), R(rel_tol * abs(v))); };
    bool converged = false;
    long since_resum = 0;
    while (true) {
      if (error <= target(value)) {
        std::tie(value, error) = totals();
        if (error <= target(value)) {
          converged = true;
          break;
        }
      }
      while (!active.empty() && !active.top().splittable) {
        settled.push_back(active.top());
        active.pop();
      }
      if (active.empty()) {
        std::tie(value, error) = totals();
        converged = true;
        break;
      }
      if (evaluations_ + 2 * kPointsPerPanel > budget_) {
        std::tie(value, error) = totals();
        break;
      }
      const Panel<R> worst = active.top();
      active.pop();
      const R mid = (worst.a + worst.b) / 2;
      const auto left = panel(f, worst.a, mid);
      const auto right = panel(f, mid, worst.b);
      value += left.value + right.value - worst.value;
      error += left.error + right.error - worst.error;
      mass += left.mass + right.mass - worst.mass;
      active.push(left);
      active.push(right);
      if (++since_resum == 256) {
        std::tie(value, error) = totals();
        since_resum = 0;
      }
    }
    return {value, error, mass, panels(), converged};
  }

 private:
  long budget_;
  long evaluations_ = 0;
};

inline std::vector<double> uniform_breakpoints(double a, double b, double max_width) {
  const long n = std::max(1L, static_cast<long>(std::ceil((b - a) / max_width)));
  std::vector<double> bp(n + 1);
  for (long i = 0; i <= n; ++i) bp[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  bp[n] = b;
  return bp;
}

/// Integrates f over [lo, inf): panels of at most `width` over [lo, first_end],
/// then successively doubled ranges until tail(R) is negligible. The returned
/// error estimate includes the analytic tail bound.
///
/// Each range is refined against the running sum. When later ranges cancel
/// most of it, that tolerance is too loose for the final value, and [lo, R] is
/// redone as a single adaptive integration targeting rel_tol of the total.
template <class R, class F, class Tail>
RawResult<R> integrate_to_infinity(F&& f, double lo, double first_end, double width, Tail&& tail, double rel_tol,
                                   long budget) {
  using std::abs;
  Integrator<R> integrator(budget);
  auto resolvable = [&](const R& value, const R& mass) {
    return std::max(R(rel_tol * abs(value)), R(50 * Integrator<R>::kEps * mass));
  };
  auto negligible = [&](double t, const R& value, const R& mass) {
    return t <= 0.1 * resolvable(value, mass) || t < 1e-300;
  };
  double a = lo, b = first_end;
  R value = 0, error = 0, mass = 0;
  bool first = true;
  while (true) {
    const auto bp = uniform_breakpoints(a, b, width);
    const double abs_tol = first ? 0.0 : std::max(0.25 * rel_tol * static_cast<double>(abs(value)), 1e-300);
    const auto seg = integrator.integrate(f, bp, rel_tol, abs_tol);
    if (!seg.converged) return {value + seg.value, error + seg.error, mass + seg.mass, integrator.panels(), false};
    value += seg.value;
    error += seg.error;
    mass += seg.mass;
    first = false;
    const double t = tail(b);
    if (negligible(t, value, mass)) {
      error += t;
      break;
    }
    if (integrator.evaluations() >= budget) return {value, error + t, mass, integrator.panels(), false};
    a = b;
    b = lo + 2 * (b - lo);
  }
  if (error <= resolvable(value, mass)) return {value, error, mass, integrator.panels(), true};

  while (true) {
    const auto whole = integrator.integrate(f, uniform_breakpoints(lo, b, width), rel_tol, 0.0);
    const double t = tail(b);
    if (!whole.converged) return {whole.value, whole.error + t, whole.mass, integrator.panels(), false};
    if (negligible(t, whole.value, whole.mass)) return {whole.value, whole.error + t, whole.mass, integrator.panels(), true};
    b = lo + 2 * (b - lo);
  }
}

// int_R^inf r^p e^(-a r) dr, valid for R >= 2p/a when p > 0.
inline double power_exp_tail(double p, double a, double R) {
  const double log_head = p * std::log(R) - a * R;
  return (p > 0 ? 2.0 : 1.0) * std::exp(log_head) / a;
}

// r^n e^(-a r), with 0^0 = 1.
template <class R>
R power_exp(int n, R a, R r) {
  using std::exp, std::log;
  if (r == 0) return n == 0 ? 1 : 0;
  return exp(n * log(r) - a * r);
}

inline void check_rel_tol(double rel_tol) {
  if (!(rel_tol >= 1e-12) || !(rel_tol < 1))
    throw std::invalid_argument("rel_tol must lie in [1e-12, 1)");
}

template <class R>
QuadratureResult require_converged(const RawResult<R>& raw, const std::string& what) {
  const QuadratureResult r = raw.narrow();
  if (!r.converged)
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, ": no convergence (value %.6g, error estimate %.3g, %ld panels)", r.value,
                  r.abs_error_estimate, r.panels_used);
    throw NonConvergence(what + buf);
  }
  return r;
}

// Kernel 1/(y-x)^(M+1) with its Taylor polynomial of degree < L in x removed.
// P_L is orthogonal to that polynomial, so the integral is unchanged while the
// large cancellation for y >> 1 disappears:
//   x^L sum_{j=0}^{M} [(L)_j / j!] y^(-L-j) (y-x)^(-(M+1-j))
// where (L)_j is the rising factorial. `w` is y - x.
inline Real reduced_kernel(int L, int M, Real x, Real y, Real w) {
  Real sum = 0, rising = 1;
  const Real inv_y = 1 / y, inv_w = 1 / w;
  Real ypow = std::pow(inv_y, L);
  Real wpow = std::pow(inv_w, M + 1);
  for (int j = 0; j <= M; ++j) {
    sum += rising * ypow * wpow;
    rising *= static_cast<Real>(L + j) / (j + 1);
    ypow *= inv_y;
    wpow *= w;
  }
  return std::pow(x, L) * sum;
}

}  // namespace detail

/// int_0^inf r^n e^(-alpha r) j_l1(k1 r) j_l2(k2 r) dr.
///
/// Runs in long double; if cancellation leaves the result at its roundoff
/// floor above the requested accuracy, or the budget runs out first, it is
/// recomputed in quad precision with a budget of its own.
inline QuadratureResult integrate_two_bessel(int n, int l1, int l2, double k1, double k2, double alpha,
                                             double rel_tol, long budget = default_evaluation_budget()) {
  closedform::IntegralSpec{l1, l2, k1, k2, alpha, n}.validate();
  detail::check_rel_tol(rel_tol);
  const double p = n - 5.0 / 3.0;
  const double scale = kBesselEnvelope * kBesselEnvelope * std::pow(k1 * k2, -5.0 / 6.0);
  auto tail = [=](double R) { return scale * detail::power_exp_tail(p, alpha, R); };
  const double width = std::min(std::numbers::pi / (k1 + k2), 4 / alpha);
  const double first_end = std::max({40 / alpha, 2 * p / alpha, 1 / std::min(k1, k2)});
  auto run = [&]<class R>(R) {
    auto f = [=](R r) {
      return detail::power_exp(n, R(alpha), r) * specfun::spherical_bessel_j(l1, R(k1 * r)) *
             specfun::spherical_bessel_j(l2, R(k2 * r));
    };
    return detail::integrate_to_infinity<R>(f, 0.0, first_end, width, tail, rel_tol, budget);
  };
  const auto raw = run(detail::Real());
  using std::abs;
  if (!raw.converged || raw.error > rel_tol * abs(raw.value)) {
    const auto wide = run(detail::Quad());
    if (wide.converged) return wide.narrow();
  }
  return detail::require_converged(raw, "integrate_two_bessel");
}

/// int_0^inf r^n e^(-alpha r) j_l(k r) dr.
inline QuadratureResult integrate_single_bessel(int n, int l, double k, double alpha, double rel_tol,
                                                long budget = default_evaluation_budget()) {
  closedform::IntegralSpec{l, 0, k, k, alpha, n}.validate();
  detail::check_rel_tol(rel_tol);
  auto f = [=](detail::Real r) { return detail::power_exp<detail::Real>(n, alpha, r) * specfun::spherical_bessel_j(l, k * r); };
  const double p = n - 5.0 / 6.0;
  const double scale = kBesselEnvelope * std::pow(k, -5.0 / 6.0);
  auto tail = [=](double R) { return scale * detail::power_exp_tail(p, alpha, R); };
  const double width = std::min(2 * std::numbers::pi / k, 4 / alpha);
  const double first_end = std::max({40 / alpha, 2 * p / alpha, 1 / k});
  return detail::require_converged(
      detail::integrate_to_infinity<detail::Real>(f, 0.0, first_end, width, tail, rel_tol, budget),
      "integrate_single_bessel");
}

/// int_{-1}^{1} P_L(x) / (y - x)^(M+1) dx for y > 1.
///
/// For y - 1 < 0.1 the substitution u = log(y - x) spreads the endpoint peak
/// at x = 1 evenly over the u range.
inline QuadratureResult integrate_q_definition(int L, int M, double y, double rel_tol,
                                               long budget = default_evaluation_budget()) {
  if (L < 0 || L > 20 || M < 0 || M > 8) throw std::invalid_argument("integrate_q_definition: L <= 20, M <= 8");
  if (!(y > 1) || !std::isfinite(y)) throw std::domain_error("integrate_q_definition: y must exceed 1");
  detail::check_rel_tol(rel_tol);
  detail::Integrator<detail::Real> integrator(budget);
  detail::RawResult<detail::Real> r;
  if (y - 1 < 0.1) {
    auto g = [=](detail::Real u) {
      const detail::Real w = std::exp(u);
      const detail::Real x = std::clamp<detail::Real>(y - w, -1, 1);
      return specfun::legendre_p(L, x) * detail::reduced_kernel(L, M, x, y, w) * w;
    };
    const double lo = std::log(y - 1), hi = std::log(y + 1);
    r = integrator.integrate(g, detail::uniform_breakpoints(lo, hi, 0.5), rel_tol, 0.0);
  } else {
    auto g = [=](detail::Real x) {
      return specfun::legendre_p(L, x) * detail::reduced_kernel(L, M, x, y, y - x);
    };
    r = integrator.integrate(g, detail::uniform_breakpoints(-1.0, 1.0, 0.25), rel_tol, 0.0);
  }
  return detail::require_converged(r, "integrate_q_definition");
}

/// int_0^inf r^2 j_l1(k1 r) j_l2(k2 r) j_l3(k3 r) dr via exponential damping
/// e^(-eps r) and Richardson extrapolation to eps = 0 over `eps_list`.
inline QuadratureResult integrate_three_bessel_regularized(const closedform::ThreeBesselSpec& spec,
                                                           std::span<const double> eps_list, double rel_tol,
                                                           long budget = default_evaluation_budget()) {
  spec.validate();
  detail::check_rel_tol(rel_tol);
  if (eps_list.size() < 2) throw std::invalid_argument("eps_list needs at least two entries");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0) || (i > 0 && !(eps_list[i] < eps_list[i - 1])))
      throw std::invalid_argument("eps_list must be positive and strictly decreasing");
  }
  const auto [l1, l2, l3, k1, k2, k3] = spec;
  std::vector<double> values;
  double quad_error = 0;
  long panels = 0;
  for (double eps : eps_list) {
    auto f = [=](detail::Real r) {
      return detail::power_exp<detail::Real>(2, eps, r) * specfun::spherical_bessel_j(l1, k1 * r) *
             specfun::spherical_bessel_j(l2, k2 * r) * specfun::spherical_bessel_j(l3, k3 * r);
    };
    const double kmin = std::min({k1, k2, k3});
    const double scale = std::pow(kBesselEnvelope, 3) * std::pow(k1 * k2 * k3, -5.0 / 6.0);
    auto tail = [=](double R) { return scale * detail::power_exp_tail(-0.5, eps, R); };
    const double width = std::numbers::pi / (k1 + k2 + k3);
    const auto r = detail::require_converged(
        detail::integrate_to_infinity<detail::Real>(f, 0.0, std::max(40 / eps, 1 / kmin), width, tail, rel_tol,
                                                    budget),
        "integrate_three_bessel_regularized");
    values.push_back(r.value);
    quad_error = std::max(quad_error, r.abs_error_estimate);
    panels += r.panels_used;
  }
  // Neville tableau in eps, evaluated at eps = 0
  const std::size_t n = values.size();
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    t[i][0] = values[i];
    for (std::size_t j = 1; j <= i; ++j) {
      t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) * eps_list[i] / (eps_list[i - j] - eps_list[i]);
    }
  }
  std::vector<double> increments;
  for (std::size_t i = 1; i < n; ++i) increments.push_back(std::abs(t[i][i] - t[i - 1][i - 1]));
  const double estimate = t[n - 1][n - 1];
  const double settled = 1e-9 * std::max(1.0, std::abs(estimate));
  bool converged = true;
  for (std::size_t i = 1; i < increments.size(); ++i) {
    if (increments[i] > settled && !(increments[i] < increments[i - 1])) converged = false;
  }
  QuadratureResult result{estimate, increments.back() + quad_error, panels, converged};
  if (!converged) throw NonConvergence("integrate_three_bessel_regularized: extrapolation increments do not decrease");
  return result;
}

inline std::vector<double> default_eps_list() { return {0.1, 0.05, 0.025, 0.0125}; }

/// int over k3 in [|k1-k2|, k1+k2] of k3 / (k3^2 + alpha^2)^(l3+1) P_l(Delta) dk3,
/// Delta = (k1^2 + k2^2 - k3^2) / (2 k1 k2). The step factor is 1 on the open
/// interval and 0 outside it.
inline QuadratureResult check_eq_2_6(int l, int lambda3, double k1, double k2, double alpha, double rel_tol,
                                     long budget = default_evaluation_budget()) {
  if (l < 0 || l > 50 || lambda3 < 0 || lambda3 > closedform::kMaxOrder)
    throw std::invalid_argument("check_eq_2_6: order out of range");
  closedform::IntegralSpec{0, 0, k1, k2, alpha, 0}.validate();
  detail::check_rel_tol(rel_tol);
  auto f = [=](detail::Real k3) {
    const detail::Real a = k1, b = k2;
    const detail::Real delta = std::clamp<detail::Real>((a * a + b * b - k3 * k3) / (2 * a * b), -1, 1);
    return k3 / std::pow(k3 * k3 + detail::Real(alpha) * alpha, lambda3 + 1) * specfun::legendre_p(l, delta);
  };
  const double lo = std::abs(k1 - k2), hi = k1 + k2;
  detail::Integrator<detail::Real> integrator(budget);
  return detail::require_converged(
      integrator.integrate(f, detail::uniform_breakpoints(lo, hi, (hi - lo) / 16), rel_tol, 0.0), "check_eq_2_6");
}

/// int_{y0}^inf D_{L+1}(l, y) dy, D_M = (-1)^M d^M Q_l / dy^M, for comparison
/// with D_L(l, y0). Integrated in t = log(y - 1) with the analytic tail bound
///   |D_M(l, y)| <= M! C(l+M, M) (y-1)^(-(l+M+1)).
inline QuadratureResult check_eq_2_12(int l, int L, double y0, double rel_tol,
                                      long budget = default_evaluation_budget()) {
  if (l < 0 || l > 20 || L < 0 || L + 1 > specfun::kMaxQOrder)
    throw std::invalid_argument("check_eq_2_12: order out of range");
  if (!(y0 > 1) || !std::isfinite(y0)) throw std::domain_error("check_eq_2_12: y0 must exceed 1");
  detail::check_rel_tol(rel_tol);
  const int M = L + 1;
  auto g = [=](detail::Real t) {
    const detail::Real d = std::exp(t);
    return specfun::paper_q_combination(l, M, specfun::QArgument<detail::Real>{1 + d, d}) * d;
  };
  const double coeff = specfun::factorial(M) * specfun::binomial_exact(l + M, M).convert_to<double>() / (l + M);
  auto tail = [=](double t) { return coeff * std::exp(-(l + M) * t); };
  const double t0 = std::log(y0 - 1);
  return detail::require_converged(
      detail::integrate_to_infinity<detail::Real>(g, t0, t0 + 8, 0.5, tail, rel_tol, budget), "check_eq_2_12");
}

}  // namespace besselrad::oracle
