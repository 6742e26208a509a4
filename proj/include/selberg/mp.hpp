#pragma once

// Arbitrary-precision real and complex numbers on top of MPFR.
//
// Every value carries its own binary precision. Binary operations produce a
// result at the larger of the two operand precisions, so mixing precisions
// always coerces upward. Precision is never taken from a global default.

#include <mpfr.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selberg::mp {

/// Working precision WP in decimal digits.
class Precision {
 public:
  /// Extra binary digits carried beyond the requested decimal digits.
  static constexpr mpfr_prec_t kGuardBits = 16;

  explicit Precision(int digits);

  int digits() const noexcept { return digits_; }
  mpfr_prec_t bits() const noexcept;
  Precision plus(int extra_digits) const { return Precision(digits_ + extra_digits); }

  /// Largest decimal precision whose bits() does not exceed `bits`.
  static Precision from_bits(mpfr_prec_t bits);

  friend auto operator<=>(const Precision&, const Precision&) = default;

 private:
  int digits_;
};

/// Decimal digits represented by a binary precision (without guard bits).
int bits_to_digits(mpfr_prec_t bits) noexcept;

class Real {
 public:
  explicit Real(mpfr_prec_t bits);
  Real(double value, mpfr_prec_t bits);
  Real(long value, mpfr_prec_t bits);
  Real(int value, mpfr_prec_t bits) : Real(static_cast<long>(value), bits) {}
  /// Parses a decimal string such as "1.25e-3". Throws std::invalid_argument.
  Real(std::string_view decimal, mpfr_prec_t bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  Real& operator=(double value);
  Real& operator=(long value);
  ~Real();

  mpfr_ptr raw() noexcept { return value_; }
  mpfr_srcptr raw() const noexcept { return value_; }
  mpfr_prec_t bits() const noexcept { return mpfr_get_prec(value_); }

  /// Copy of this value rounded (or widened) to `bits`.
  Real with_bits(mpfr_prec_t bits) const;
  /// Raise the precision in place, keeping the value.
  void widen_to(mpfr_prec_t bits);

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  long to_long_floor() const;
  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }
  /// Base-2 exponent e with 0.5 <= |x| / 2^e < 1; very negative for zero.
  long exponent2() const noexcept;

  Real operator-() const;
  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);
  Real& operator+=(long rhs);
  Real& operator-=(long rhs);
  Real& operator*=(long rhs);
  Real& operator/=(long rhs);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator+(const Real& a, long b) { Real r(a); r += b; return r; }
  friend Real operator-(const Real& a, long b) { Real r(a); r -= b; return r; }
  friend Real operator*(const Real& a, long b) { Real r(a); r *= b; return r; }
  friend Real operator/(const Real& a, long b) { Real r(a); r /= b; return r; }
  friend Real operator+(long a, const Real& b) { return b + a; }
  friend Real operator-(long a, const Real& b) { return -(b - a); }
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator/(long a, const Real& b);
  // a double operand would otherwise convert silently to long
  template <std::floating_point F> Real& operator+=(F) = delete;
  template <std::floating_point F> Real& operator-=(F) = delete;
  template <std::floating_point F> Real& operator*=(F) = delete;
  template <std::floating_point F> Real& operator/=(F) = delete;
  template <std::floating_point F> friend Real operator+(const Real&, F) = delete;
  template <std::floating_point F> friend Real operator-(const Real&, F) = delete;
  template <std::floating_point F> friend Real operator*(const Real&, F) = delete;
  template <std::floating_point F> friend Real operator/(const Real&, F) = delete;
  template <std::floating_point F> friend Real operator+(F, const Real&) = delete;
  template <std::floating_point F> friend Real operator-(F, const Real&) = delete;
  template <std::floating_point F> friend Real operator*(F, const Real&) = delete;
  template <std::floating_point F> friend Real operator/(F, const Real&) = delete;

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.value_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, double b);

 private:
  mpfr_t value_;
};

class Complex {
 public:
  explicit Complex(mpfr_prec_t bits) : re_(bits), im_(bits) {}
  Complex(const Real& re) : re_(re), im_(0L, re.bits()) {}
  Complex(Real re, Real im);
  Complex(double re, double im, mpfr_prec_t bits) : re_(re, bits), im_(im, bits) {}

  Real& re() noexcept { return re_; }
  Real& im() noexcept { return im_; }
  const Real& re() const noexcept { return re_; }
  const Real& im() const noexcept { return im_; }
  mpfr_prec_t bits() const noexcept { return re_.bits() > im_.bits() ? re_.bits() : im_.bits(); }

  Complex with_bits(mpfr_prec_t bits) const { return {re_.with_bits(bits), im_.with_bits(bits)}; }
  bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }
  bool is_finite() const noexcept { return re_.is_finite() && im_.is_finite(); }

  Complex operator-() const { return {-re_, -im_}; }
  Complex& operator+=(const Complex& rhs);
  Complex& operator-=(const Complex& rhs);
  Complex& operator*=(const Complex& rhs);
  Complex& operator/=(const Complex& rhs);
  Complex& operator*=(const Real& rhs);
  Complex& operator/=(const Real& rhs);
  Complex& operator*=(long rhs);
  Complex& operator/=(long rhs) { re_ /= rhs; im_ /= rhs; return *this; }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const Real& b) { return a *= b; }
  friend Complex operator*(const Real& b, Complex a) { return a *= b; }
  friend Complex operator/(Complex a, const Real& b) { return a /= b; }
  friend Complex operator+(Complex a, const Real& b) { a.re_ += b; return a; }
  friend Complex operator-(Complex a, const Real& b) { a.re_ -= b; return a; }
  friend Complex operator+(Complex a, long b) { a.re_ += b; return a; }
  friend Complex operator-(Complex a, long b) { a.re_ -= b; return a; }
  friend Complex operator*(Complex a, long b) { return a *= b; }
  friend Complex operator/(Complex a, long b) { return a /= b; }
  friend Complex operator-(long a, const Complex& b) { return Complex(Real(a, b.bits())) - b; }
  template <std::floating_point F> Complex& operator*=(F) = delete;
  template <std::floating_point F> Complex& operator/=(F) = delete;
  template <std::floating_point F> friend Complex operator+(Complex, F) = delete;
  template <std::floating_point F> friend Complex operator-(Complex, F) = delete;
  template <std::floating_point F> friend Complex operator*(Complex, F) = delete;
  template <std::floating_point F> friend Complex operator/(Complex, F) = delete;
  template <std::floating_point F> friend Complex operator-(F, const Complex&) = delete;

  friend bool operator==(const Complex& a, const Complex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

 private:
  Real re_;
  Real im_;
};

// Constants
Real pi(mpfr_prec_t bits);
Real ln2(mpfr_prec_t bits);

// Real functions
Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real tan(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& base, const Real& exponent);
Real pow(const Real& base, long exponent);
Real floor(const Real& x);
Real hypot(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

// Complex functions; branch cuts follow the principal logarithm, arg in (-pi, pi].
Complex conj(const Complex& z);
Real abs(const Complex& z);
/// |re| + |im|, the cheap magnitude used in deflation tests.
Real abs1(const Complex& z);
Real norm2(const Complex& z);
Real arg(const Complex& z);
Complex polar(const Real& modulus, const Real& angle);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex pow(const Complex& base, const Complex& exponent);
/// base^exponent for a positive real base, computed as exp(exponent * log(base)).
Complex pow(const Real& base, const Complex& exponent);
Complex pow(const Complex& base, long exponent);
Complex sin(const Complex& z);
Complex cos(const Complex& z);
Complex tan(const Complex& z);
Complex inverse(const Complex& z);

/// Scientific decimal rendering with `digits` significant digits.
std::string to_string(const Real& x, int digits);
/// "re+imi" / "re-imi" rendering.
std::string to_string(const Complex& z, int digits);
/// Significant decimal digits justified by a binary precision.
int natural_digits(mpfr_prec_t bits) noexcept;

/// Parses forms like "2", "-1.5", "5i", "0.5+5i", "0.5-2.25e-1i", "i".
Complex parse_complex(std::string_view text, mpfr_prec_t bits);

std::ostream& operator<<(std::ostream& os, const Real& x);
std::ostream& operator<<(std::ostream& os, const Complex& z);

/// Thrown when a function is evaluated at one of its poles.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace selberg::mp
