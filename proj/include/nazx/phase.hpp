#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace nazx {

namespace detail {

using wide = __int128;

inline wide gcd_wide(wide a, wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

/// An angle stored as an exact rational multiple of pi.
///
/// Numerator and denominator are arbitrary-precision integers, kept reduced
/// and normalized into the half-open interval (-pi, pi], i.e. the stored
/// coefficient num/den lies in (-1, 1].
class Phase {
 public:
  using Int = boost::multiprecision::cpp_int;

  Phase() = default;
  Phase(std::int64_t num, std::int64_t den) { assign(Int(num), Int(den)); }
  Phase(Int num, Int den) { assign(std::move(num), std::move(den)); }

  static Phase zero() { return {}; }
  static Phase pi() { return {1, 1}; }

  /// Closest rational multiple of pi to `radians` found by continued
  /// fractions with denominator at most `max_den`; nullopt when no convergent
  /// lies within `tolerance` (absolute, in radians) or when the double itself
  /// is too coarse to be pinned down to `tolerance`.
  static std::optional<Phase> from_radians(double radians,
                                           std::int64_t max_den = 1 << 20,
                                           double tolerance = 1e-10);

  [[nodiscard]] const Int& numerator() const { return num_; }
  [[nodiscard]] const Int& denominator() const { return den_; }

  [[nodiscard]] double to_radians() const {
    return coefficient() * std::numbers::pi;
  }
  /// |value| / pi as a double; lies in [0, 1].
  [[nodiscard]] double abs_over_pi() const { return std::abs(coefficient()); }

  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }
  /// 0 or pi.
  [[nodiscard]] bool is_pauli() const { return den_ == 1; }
  /// +-pi/2.
  [[nodiscard]] bool is_proper_clifford() const { return den_ == 2; }
  /// Multiple of pi/2.
  [[nodiscard]] bool is_clifford() const { return den_ <= 2; }

  Phase operator-() const { return {-num_, den_}; }

  friend Phase operator+(const Phase& a, const Phase& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Phase operator-(const Phase& a, const Phase& b) { return a + (-b); }
  Phase& operator+=(const Phase& o) { return *this = *this + o; }
  Phase& operator-=(const Phase& o) { return *this = *this - o; }

  friend Phase operator*(const Phase& a, std::int64_t k) {
    return {a.num_ * k, a.den_};
  }
  friend Phase operator*(std::int64_t k, const Phase& a) { return a * k; }

  /// Exact division by 2^k.
  [[nodiscard]] Phase div_pow2(unsigned k) const {
    return {num_, den_ << k};
  }
  [[nodiscard]] Phase mul_pow2(unsigned k) const {
    return {num_ << k, den_};
  }

  friend bool operator==(const Phase&, const Phase&) = default;

  /// Human readable, e.g. "3pi/4", "-pi/2", "0".
  [[nodiscard]] std::string to_string() const { return format("pi", ""); }
  /// OpenQASM expression, e.g. "3*pi/4", "-pi/2", "0".
  [[nodiscard]] std::string to_qasm() const { return format("pi", "*"); }

  friend std::ostream& operator<<(std::ostream& os, const Phase& p) {
    return os << p.to_string();
  }

 private:
  [[nodiscard]] double coefficient() const {
    return boost::multiprecision::cpp_rational(num_, den_)
        .convert_to<double>();
  }

  [[nodiscard]] std::string format(const char* pi, const char* times) const {
    if (num_.is_zero()) return "0";
    std::string s = num_ < 0 ? "-" : "";
    const Int n = abs(num_);
    if (n != 1) s += n.str() + times;
    s += pi;
    if (den_ != 1) s += "/" + den_.str();
    return s;
  }

  void assign(Int num, Int den) {
    if (den.is_zero()) throw std::invalid_argument("phase denominator is zero");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    // Reduce modulo 2 (units of pi) into (-1, 1].
    const Int period = 2 * den;
    num %= period;
    if (num <= -den) num += period;
    if (num > den) num -= period;
    Int g = gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num.is_zero()) den = 1;
    num_ = std::move(num);
    den_ = std::move(den);
  }

  Int num_ = 0;
  Int den_ = 1;
};

inline std::optional<Phase> Phase::from_radians(double radians,
                                                std::int64_t max_den,
                                                double tolerance) {
  if (!std::isfinite(radians)) return std::nullopt;
  const double spacing =
      std::nextafter(std::abs(radians), INFINITY) - std::abs(radians);
  if (spacing > tolerance) return std::nullopt;
  const double x = radians / std::numbers::pi;
  // Continued-fraction convergents of x.
  double rest = x;
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(rest));
  std::int64_t k_prev = 0, k = 1;
  rest -= std::floor(rest);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(static_cast<double>(h) / static_cast<double>(k) - x) *
            std::numbers::pi <=
        tolerance) {
      return Phase(h, k);
    }
    if (rest < 1e-300) break;
    double inv = 1.0 / rest;
    double a = std::floor(inv);
    if (a > 1e15) break;
    rest = inv - a;
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t h_next = ai * h + h_prev;
    std::int64_t k_next = ai * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
  }
  if (std::abs(static_cast<double>(h) / static_cast<double>(k) - x) *
          std::numbers::pi <=
      tolerance) {
    return Phase(h, k);
  }
  return std::nullopt;
}

}  // namespace nazx
