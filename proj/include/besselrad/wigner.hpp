#pragma once
// Exact Wigner 3j and 6j symbols for integer angular momenta.
//
// Every such symbol squares to a rational number, so values are held as
// sign * sqrt(p / q) with p / q in lowest terms. The Racah sums are evaluated
// in big-integer rational arithmetic.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace besselrad::wigner {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using WideFloat = boost::multiprecision::cpp_bin_float_50;

inline constexpr int kMaxMomentum = 60;

struct AngularMomenta3j {
  int j1, j2, j3;
  int m1, m2, m3;
};

class WignerValue {
 public:
  WignerValue() = default;

  /// sign * sqrt(radicand); radicand must be >= 0 and is reduced.
  WignerValue(int sign, const BigRational& radicand) {
    if (radicand < 0) throw std::invalid_argument("WignerValue: negative radicand");
    if (sign == 0 || radicand == 0) return;
    sign_ = sign > 0 ? 1 : -1;
    num_ = boost::multiprecision::numerator(radicand);
    den_ = boost::multiprecision::denominator(radicand);
  }

  static WignerValue zero() { return {}; }
  static WignerValue one() { return {1, BigRational(1)}; }

  int sign() const { return sign_; }
  const BigInt& radicand_num() const { return num_; }
  const BigInt& radicand_den() const { return den_; }
  BigRational radicand() const { return BigRational(num_, den_); }
  bool is_zero() const { return sign_ == 0; }

  /// Nearest double, via a 100-digit intermediate.
  double to_double() const {
    using Wide = boost::multiprecision::cpp_bin_float_100;
    if (sign_ == 0) return 0.0;
    Wide r = Wide(num_) / Wide(den_);
    return sign_ * boost::multiprecision::sqrt(r).convert_to<double>();
  }

  /// Rounded to a multiprecision float type.
  template <class Float>
  Float to_float() const {
    if (sign_ == 0) return Float(0);
    Float r = Float(num_) / Float(den_);
    return sign_ * boost::multiprecision::sqrt(r);
  }

  /// "0", "sqrt(p/q)" or "-sqrt(p/q)".
  std::string exact_string() const {
    if (sign_ == 0) return "0";
    return std::string(sign_ < 0 ? "-" : "") + "sqrt(" + num_.str() + "/" + den_.str() + ")";
  }

  WignerValue operator-() const {
    WignerValue v = *this;
    v.sign_ = -v.sign_;
    return v;
  }

  friend bool operator==(const WignerValue& a, const WignerValue& b) {
    return a.sign_ == b.sign_ && a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  int sign_ = 0;
  BigInt num_ = 0;
  BigInt den_ = 1;
};

namespace detail {

inline const std::vector<BigInt>& factorial_table() {
  static const std::vector<BigInt> table = [] {
    std::vector<BigInt> f(4 * kMaxMomentum + 2);
    f[0] = 1;
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<unsigned>(i);
    return f;
  }();
  return table;
}

inline const BigInt& fact(int n) {
  const auto& f = factorial_table();
  if (n < 0 || static_cast<std::size_t>(n) >= f.size())
    throw std::out_of_range("factorial table: index " + std::to_string(n));
  return f[n];
}

inline bool triangle(int a, int b, int c) {
  return a >= 0 && b >= 0 && c >= 0 && c >= std::abs(a - b) && c <= a + b;
}

// Delta(abc) = (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!
inline BigRational triangle_coefficient(int a, int b, int c) {
  return BigRational(fact(a + b - c) * fact(a - b + c) * fact(-a + b + c), fact(a + b + c + 1));
}

inline int sign_of(const BigRational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

inline void check_range(int j) {
  if (j < 0 || j > kMaxMomentum)
    throw std::invalid_argument("wigner: angular momentum out of range: " + std::to_string(j));
}

}  // namespace detail

/// (l1 l2 l3; 0 0 0) is nonzero iff l1 + l2 + l3 is even and the triangle rule holds.
inline bool threej_000_nonzero(int l1, int l2, int l3) {
  return (l1 + l2 + l3) % 2 == 0 && detail::triangle(l1, l2, l3);
}

/// Wigner 3j symbol by the Racah single-sum formula.
inline WignerValue wigner_3j(const AngularMomenta3j& a) {
  using detail::fact;
  const auto [j1, j2, j3, m1, m2, m3] = a;
  detail::check_range(j1);
  detail::check_range(j2);
  detail::check_range(j3);
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return {};
  if (m1 + m2 + m3 != 0 || !detail::triangle(j1, j2, j3)) return {};
  if (m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3) % 2 != 0) return {};

  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  BigRational sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const BigInt den = fact(k) * fact(j3 - j2 + k + m1) * fact(j3 - j1 + k - m2) *
                       fact(j1 + j2 - j3 - k) * fact(j1 - k - m1) * fact(j2 - k + m2);
    sum += BigRational(k % 2 == 0 ? 1 : -1, 1) / den;
  }
  if (sum == 0) return {};
  const BigInt projections = fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) *
                             fact(j3 + m3) * fact(j3 - m3);
  const BigRational radicand = detail::triangle_coefficient(j1, j2, j3) * projections * sum * sum;
  const int phase = ((j1 - j2 - m3) % 2 == 0) ? 1 : -1;
  return {phase * detail::sign_of(sum), radicand};
}

inline WignerValue wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  return wigner_3j(AngularMomenta3j{j1, j2, j3, m1, m2, m3});
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6} by the Racah formula.
inline WignerValue wigner_6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  using detail::fact;
  for (int j : {j1, j2, j3, j4, j5, j6}) detail::check_range(j);
  if (!detail::triangle(j1, j2, j3) || !detail::triangle(j1, j5, j6) ||
      !detail::triangle(j4, j2, j6) || !detail::triangle(j4, j5, j3))
    return {};
  const std::array<int, 4> a = {j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3};
  const std::array<int, 3> b = {j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4};
  const int tmin = std::max({a[0], a[1], a[2], a[3]});
  const int tmax = std::min({b[0], b[1], b[2]});
  BigRational sum = 0;
  for (int t = tmin; t <= tmax; ++t) {
    BigInt den = 1;
    for (int ai : a) den *= fact(t - ai);
    for (int bi : b) den *= fact(bi - t);
    sum += BigRational(t % 2 == 0 ? fact(t + 1) : BigInt(-fact(t + 1)), den);
  }
  if (sum == 0) return {};
  const BigRational radicand = detail::triangle_coefficient(j1, j2, j3) *
                               detail::triangle_coefficient(j1, j5, j6) *
                               detail::triangle_coefficient(j4, j2, j6) *
                               detail::triangle_coefficient(j4, j5, j3) * sum * sum;
  return {detail::sign_of(sum), radicand};
}

/// Exact sum of terms c_i * sqrt(r_i) whose radicands are commensurate, i.e.
/// every r_i / r_0 is the square of a rational. Products of 3j symbols that
/// share their outer momenta have this property, so orthogonality sums can
/// be verified with zero tolerance.
class SurdAccumulator {
 public:
  /// Adds factor * a * b.
  void add_product(const WignerValue& a, const WignerValue& b, const BigRational& factor = 1) {
    if (a.is_zero() || b.is_zero() || factor == 0) return;
    const int sign = a.sign() * b.sign() * detail::sign_of(factor);
    add_term(sign, a.radicand() * b.radicand() * factor * factor);
  }

  /// Adds sign * sqrt(radicand).
  void add_term(int sign, const BigRational& radicand) {
    if (sign == 0 || radicand == 0) return;
    if (basis_ == 0) {
      basis_ = radicand;
      coefficient_ += sign;
      return;
    }
    const BigRational ratio = radicand / basis_;
    const BigInt n = boost::multiprecision::numerator(ratio);
    const BigInt d = boost::multiprecision::denominator(ratio);
    const BigInt rn = boost::multiprecision::sqrt(n);
    const BigInt rd = boost::multiprecision::sqrt(d);
    if (rn * rn != n || rd * rd != d)
      throw std::domain_error("SurdAccumulator: incommensurate radicands");
    coefficient_ += BigRational(sign > 0 ? rn : BigInt(-rn), rd);
  }

  /// The exact total as sign * sqrt(rational).
  WignerValue value() const {
    if (coefficient_ == 0 || basis_ == 0) return {};
    return {detail::sign_of(coefficient_), basis_ * coefficient_ * coefficient_};
  }

 private:
  BigRational basis_ = 0;
  BigRational coefficient_ = 0;
};

/// Thread-safe memo of 3j(l1 l2 l3; 0 0 0) and 6j values rounded to double
/// and to WideFloat, used by the closed-form sums where the same symbols
/// recur across calls.
class SymbolCache {
 public:
  static SymbolCache& instance() {
    static SymbolCache cache;
    return cache;
  }

  double threej_000(int l1, int l2, int l3) { return threej_000_entry(l1, l2, l3).narrow; }
  double sixj(int j1, int j2, int j3, int j4, int j5, int j6) { return sixj_entry(j1, j2, j3, j4, j5, j6).narrow; }

  WideFloat threej_000_wide(int l1, int l2, int l3) { return threej_000_entry(l1, l2, l3).wide; }
  WideFloat sixj_wide(int j1, int j2, int j3, int j4, int j5, int j6) {
    return sixj_entry(j1, j2, j3, j4, j5, j6).wide;
  }

 private:
  struct Entry {
    double narrow = 0;
    WideFloat wide = 0;
  };

  Entry threej_000_entry(int l1, int l2, int l3) {
    if (!threej_000_nonzero(l1, l2, l3)) return {};
    return lookup(key(0, l1, l2, l3, 0, 0, 0), [&] { return wigner_3j(l1, l2, l3, 0, 0, 0); });
  }

  Entry sixj_entry(int j1, int j2, int j3, int j4, int j5, int j6) {
    return lookup(key(1, j1, j2, j3, j4, j5, j6), [&] { return wigner_6j(j1, j2, j3, j4, j5, j6); });
  }

  static std::uint64_t key(int kind, int a, int b, int c, int d, int e, int f) {
    std::uint64_t k = static_cast<std::uint64_t>(kind);
    for (int v : {a, b, c, d, e, f}) k = (k << 8) | static_cast<std::uint64_t>(v & 0xff);
    return k;
  }

  template <class Compute>
  Entry lookup(std::uint64_t k, Compute&& compute) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(k); it != values_.end()) return it->second;
    }
    const WignerValue exact = compute();
    Entry e{exact.to_double(), exact.to_float<WideFloat>()};
    std::lock_guard lock(mutex_);
    values_.emplace(k, e);
    return e;
  }

  std::mutex mutex_;
  std::unordered_map<std::uint64_t, Entry> values_;
};

}  // namespace besselrad::wigner
