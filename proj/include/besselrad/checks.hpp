#pragma once
// Identity-check suites behind `besselrad check`: each compares a closed form
// with an independent quadrature (or exact arithmetic) over a parameter grid.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "besselrad/closedform.hpp"
#include "besselrad/oracle.hpp"
#include "besselrad/specfun.hpp"
#include "besselrad/wigner.hpp"

namespace besselrad::checks {

inline constexpr std::string_view kSuites[] = {"eq28", "eq211", "eq29", "eq26", "eq212", "eq21", "wigner", "qfunc"};
inline constexpr int kMaxL = 10;

struct Case {
  std::string suite;
  std::string label;
  double discrepancy = 0;
  double tolerance = 0;
  bool passed = false;
};

struct Settings {
  int max_l = 4;
  std::optional<double> tolerance;  // overrides each suite's default threshold
  std::optional<double> oracle_rel_tol;  // default: threshold / 100, within [1e-12, 1e-9]
};

/// Pass threshold a suite uses unless overridden.
inline double default_tolerance(std::string_view suite) {
  if (suite == "eq28" || suite == "eq211" || suite == "eq26") return 1e-7;
  if (suite == "eq29") return 1e-8;
  if (suite == "eq212") return 1e-6;
  if (suite == "eq21") return 1e-3;
  if (suite == "qfunc") return 1e-9;
  if (suite == "wigner") return 0;
  throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
}

namespace detail {

inline constexpr double kGrid[] = {0.5, 1.0, 2.0};

inline std::string fmt(const char* f, auto... args) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

class Recorder {
 public:
  Recorder(std::string suite, double tolerance, std::vector<Case>& out)
      : suite_(std::move(suite)), tolerance_(tolerance), out_(out) {}

  void add(const std::string& label, double discrepancy) {
    out_.push_back({suite_, label, discrepancy, tolerance_, discrepancy <= tolerance_});
  }

  // Exact checks pass or fail outright.
  void add_exact(const std::string& label, bool ok) { out_.push_back({suite_, label, ok ? 0.0 : 1.0, 0.0, ok}); }

  double tolerance() const { return tolerance_; }

  double oracle_tolerance(const Settings& s) const {
    return s.oracle_rel_tol.value_or(std::clamp(tolerance_ / 100, 1e-12, 1e-9));
  }

 private:
  std::string suite_;
  double tolerance_;
  std::vector<Case>& out_;
};

// 3j-weighted product vs 3j * quadrature; an integral the oracle cannot
// separate from zero is compared absolutely at the oracle's error level.
inline void two_bessel(Recorder& rec, const Settings& s, int offset) {
  for (int l1 = 0; l1 <= s.max_l; ++l1)
    for (int l2 = 0; l2 <= s.max_l; ++l2)
      for (int l3 = 0; l3 <= std::min(2 * s.max_l, closedform::kMaxOrder); ++l3) {
        if (!wigner::threej_000_nonzero(l1, l2, l3)) continue;
        const double threej = wigner::wigner_3j(l1, l2, l3, 0, 0, 0).to_double();
        for (double k1 : kGrid)
          for (double k2 : kGrid)
            for (double a : kGrid) {
              const double closed = closedform::two_bessel_product(l1, l2, l3, k1, k2, a, offset).value;
              const auto o = oracle::integrate_two_bessel(l3 + offset, l1, l2, k1, k2, a, rec.oracle_tolerance(s));
              const double reference = threej * o.value;
              const double err = std::abs(threej) * o.abs_error_estimate;
              const std::string label = fmt("(%d,%d,%d) k=(%g,%g) alpha=%g", l1, l2, l3, k1, k2, a);
              if (std::abs(reference) <= 3 * err) rec.add(label + " [zero]", std::abs(closed) <= 3 * err ? 0.0 : 1.0);
              else rec.add(label, rel(closed, reference));
            }
      }
}

inline void equal_order(Recorder& rec, const Settings& s) {
  for (int L = 0; L <= s.max_l; ++L)
    for (double k1 : kGrid)
      for (double k2 : kGrid)
        for (double a : kGrid) {
          const double closed = closedform::two_bessel_equal_order(L, k1, k2, a).value;
          const auto o = oracle::integrate_two_bessel(1, L, L, k1, k2, a, rec.oracle_tolerance(s));
          rec.add(fmt("L=%d k=(%g,%g) alpha=%g", L, k1, k2, a), rel(closed, o.value));
        }
}

inline void kernel(Recorder& rec, const Settings& s) {
  for (int l = 0; l <= s.max_l; ++l)
    for (int l3 = 0; l3 <= s.max_l; ++l3)
      for (double k1 : kGrid)
        for (double k2 : kGrid)
          for (double a : kGrid) {
            const double closed = specfun::paper_q_combination(l, l3, closedform::q_argument(k1, k2, a)) /
                                  (std::pow(2 * k1 * k2, l3) * specfun::factorial(l3));
            const auto o = oracle::check_eq_2_6(l, l3, k1, k2, a, rec.oracle_tolerance(s));
            rec.add(fmt("l=%d l3=%d k=(%g,%g) alpha=%g", l, l3, k1, k2, a), rel(closed, o.value));
          }
}

inline void derivative_identity(Recorder& rec, const Settings& s) {
  for (double y0 : {1.1, 1.5, 3.0})
    for (int l = 0; l <= s.max_l + 2; ++l)
      for (int L = 0; L <= s.max_l; ++L) {
        const auto o = oracle::check_eq_2_12(l, L, y0, 1e-10);
        rec.add(fmt("l=%d L=%d y0=%g", l, L, y0), rel(o.value, specfun::paper_q_combination(l, L, y0)));
      }
}

inline void three_bessel(Recorder& rec, const Settings& s) {
  const int triples[][3] = {{0, 0, 0}, {1, 1, 0}, {0, 1, 1}, {1, 1, 2}, {2, 2, 2}};
  const double inside[][3] = {{1, 1, 1}, {1, 1.2, 1.4}, {0.8, 1.1, 1.5}};
  const double outside[][3] = {{1, 1, 3}, {0.5, 1, 2.5}};
  const auto eps = oracle::default_eps_list();
  for (const auto& l : triples) {
    if (std::max({l[0], l[1], l[2]}) > s.max_l) continue;
    const double threej = wigner::wigner_3j(l[0], l[1], l[2], 0, 0, 0).to_double();
    for (const auto& k : inside) {
      const closedform::ThreeBesselSpec spec{l[0], l[1], l[2], k[0], k[1], k[2]};
      const auto o = oracle::integrate_three_bessel_regularized(spec, eps, 1e-9);
      rec.add(fmt("(%d,%d,%d) k=(%g,%g,%g)", l[0], l[1], l[2], k[0], k[1], k[2]),
              rel(closedform::three_bessel_product(spec), threej * o.value));
    }
    for (const auto& k : outside) {
      const closedform::ThreeBesselSpec spec{l[0], l[1], l[2], k[0], k[1], k[2]};
      const double closed = closedform::three_bessel_product(spec);
      const auto o = oracle::integrate_three_bessel_regularized(spec, eps, 1e-9);
      rec.add(fmt("(%d,%d,%d) k=(%g,%g,%g) outside", l[0], l[1], l[2], k[0], k[1], k[2]),
              std::abs(closed - threej * o.value) + (closed == 0 ? 0.0 : 1.0));
    }
  }
}

inline void qfunc(Recorder& rec, const Settings& s) {
  for (double y : {1.01, 1.5, 2.0, 10.0, 100.0})
    for (int L = 0; L <= std::min(2 * s.max_l + 2, 20); ++L)
      for (int M = 0; M <= std::min(s.max_l + 2, 8); ++M) {
        const double closed = specfun::paper_q_combination(L, M, y);
        const auto o = oracle::integrate_q_definition(L, M, y, 1e-12);
        rec.add(fmt("L=%d M=%d y=%g", L, M, y), rel(closed, specfun::factorial(M) / 2 * o.value));
      }
}

inline void wigner_suite(Recorder& rec, const Settings& s) {
  const int jo = s.max_l + 1;
  for (int j1 = 0; j1 <= jo; ++j1)
    for (int j2 = 0; j2 <= jo; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(j1 + j2, jo); ++j3)
        for (int j3p = std::abs(j1 - j2); j3p <= std::min(j1 + j2, jo); ++j3p)
          for (int m3 = -j3; m3 <= j3; ++m3)
            for (int m3p = -j3p; m3p <= j3p; ++m3p) {
              wigner::SurdAccumulator sum;
              for (int m1 = -j1; m1 <= j1; ++m1)
                for (int m2 = -j2; m2 <= j2; ++m2)
                  sum.add_product(wigner::wigner_3j(j1, j2, j3, m1, m2, m3),
                                  wigner::wigner_3j(j1, j2, j3p, m1, m2, m3p), wigner::BigRational(2 * j3 + 1));
              const bool diag = j3 == j3p && m3 == m3p;
              rec.add_exact(fmt("orthogonality (%d %d %d|%d) m3=%d|%d", j1, j2, j3, j3p, m3, m3p),
                            sum.value() == (diag ? wigner::WignerValue::one() : wigner::WignerValue::zero()));
            }
  const int js = s.max_l;
  for (int a = 0; a <= js; ++a)
    for (int b = 0; b <= js; ++b)
      for (int c = 0; c <= js; ++c) {
        for (int m1 = -a; m1 <= a; ++m1)
          for (int m2 = -b; m2 <= b; ++m2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > c) continue;
            const auto v = wigner::wigner_3j(a, b, c, m1, m2, m3);
            const auto odd = (a + b + c) % 2 == 0 ? v : -v;
            rec.add_exact(fmt("3j symmetry (%d %d %d; %d %d %d)", a, b, c, m1, m2, m3),
                          wigner::wigner_3j(b, c, a, m2, m3, m1) == v &&
                              wigner::wigner_3j(b, a, c, m2, m1, m3) == odd &&
                              wigner::wigner_3j(a, b, c, -m1, -m2, -m3) == odd);
          }
        for (int d = 0; d <= js; ++d)
          for (int e = 0; e <= js; ++e)
            for (int f = 0; f <= js; ++f) {
              const auto v = wigner::wigner_6j(a, b, c, d, e, f);
              rec.add_exact(fmt("6j symmetry {%d %d %d; %d %d %d}", a, b, c, d, e, f),
                            wigner::wigner_6j(b, a, c, e, d, f) == v && wigner::wigner_6j(a, c, b, d, f, e) == v &&
                                wigner::wigner_6j(d, e, c, a, b, f) == v);
            }
      }
}

}  // namespace detail

/// Runs one suite, or every suite for "all". Oracle failures propagate as
/// oracle::NonConvergence.
inline std::vector<Case> run_suite(std::string_view suite, const Settings& s) {
  if (s.max_l < 0 || s.max_l > kMaxL) throw std::invalid_argument("max-l must lie in [0, 10]");
  std::vector<Case> out;
  if (suite == "all") {
    for (auto name : kSuites) {
      auto part = run_suite(name, s);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  detail::Recorder rec(std::string(suite), s.tolerance.value_or(default_tolerance(suite)), out);
  if (suite == "eq28") detail::two_bessel(rec, s, 1);
  else if (suite == "eq211") detail::two_bessel(rec, s, 2);
  else if (suite == "eq29") detail::equal_order(rec, s);
  else if (suite == "eq26") detail::kernel(rec, s);
  else if (suite == "eq212") detail::derivative_identity(rec, s);
  else if (suite == "eq21") detail::three_bessel(rec, s);
  else if (suite == "qfunc") detail::qfunc(rec, s);
  else detail::wigner_suite(rec, s);
  return out;
}

}  // namespace besselrad::checks
