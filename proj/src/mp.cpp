#include "selberg/mp.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <string>

namespace selberg::mp {

namespace {

constexpr double kLog2Of10 = 3.321928094887362;

mpfr_prec_t wider(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }

}  // namespace

Precision::Precision(int digits) : digits_(digits) {
  if (digits < 1) throw std::invalid_argument("precision must be at least one decimal digit");
}

mpfr_prec_t Precision::bits() const noexcept {
  return static_cast<mpfr_prec_t>(std::ceil(digits_ * kLog2Of10)) + kGuardBits;
}

Precision Precision::from_bits(mpfr_prec_t bits) {
  int d = static_cast<int>(std::floor(static_cast<double>(bits - kGuardBits) / kLog2Of10));
  return Precision(std::max(d, 1));
}

int bits_to_digits(mpfr_prec_t bits) noexcept {
  return static_cast<int>(std::floor(static_cast<double>(bits) / kLog2Of10));
}

int natural_digits(mpfr_prec_t bits) noexcept { return std::max(1, bits_to_digits(bits)); }

// ---------------------------------------------------------------------------
// Real

Real::Real(mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

Real::Real(double value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_d(value_, value, MPFR_RNDN);
}

Real::Real(long value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_si(value_, value, MPFR_RNDN);
}

Real::Real(std::string_view decimal, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  std::string text(decimal);
  char* end = nullptr;
  if (!text.empty()) mpfr_strtofr(value_, text.c_str(), &end, 10, MPFR_RNDN);
  if (text.empty() || end == text.c_str() || *end != '\0') {
    mpfr_clear(value_);
    throw std::invalid_argument("not a decimal number: '" + text + "'");
  }
}

Real::Real(const Real& other) {
  mpfr_init2(value_, other.bits());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

// Moved-from objects keep a null limb pointer; the destructor skips them.
Real::Real(Real&& other) noexcept {
  value_[0] = other.value_[0];
  other.value_[0]._mpfr_d = nullptr;
}

Real& Real::operator=(const Real& other) {
  if (this == &other) return *this;
  if (value_[0]._mpfr_d == nullptr) {
    mpfr_init2(value_, other.bits());
  } else if (bits() != other.bits()) {
    mpfr_set_prec(value_, other.bits());
  }
  mpfr_set(value_, other.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) std::swap(value_[0], other.value_[0]);
  return *this;
}

Real& Real::operator=(double value) {
  mpfr_set_d(value_, value, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(long value) {
  mpfr_set_si(value_, value, MPFR_RNDN);
  return *this;
}

Real::~Real() {
  if (value_[0]._mpfr_d != nullptr) mpfr_clear(value_);
}

Real Real::with_bits(mpfr_prec_t bits) const {
  Real r(bits);
  mpfr_set(r.value_, value_, MPFR_RNDN);
  return r;
}

void Real::widen_to(mpfr_prec_t b) {
  if (b > bits()) mpfr_prec_round(value_, b, MPFR_RNDN);
}

long Real::to_long_floor() const {
  if (!is_finite()) throw std::domain_error("floor of a non-finite value");
  if (!mpfr_fits_slong_p(value_, MPFR_RNDD)) throw std::overflow_error("value does not fit a long");
  return mpfr_get_si(value_, MPFR_RNDD);
}

long Real::exponent2() const noexcept {
  if (mpfr_zero_p(value_)) return LONG_MIN / 2;
  return mpfr_get_exp(value_);
}

Real Real::operator-() const {
  Real r(bits());
  mpfr_neg(r.value_, value_, MPFR_RNDN);
  return r;
}

Real& Real::operator+=(const Real& rhs) {
  widen_to(rhs.bits());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& rhs) {
  widen_to(rhs.bits());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& rhs) {
  widen_to(rhs.bits());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& rhs) {
  widen_to(rhs.bits());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator+=(long rhs) {
  mpfr_add_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(long rhs) {
  mpfr_sub_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

Real operator+(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_add(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_sub(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_mul(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_div(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator/(long a, const Real& b) {
  Real r(b.bits());
  mpfr_si_div(r.value_, a, b.value_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

std::partial_ordering operator<=>(const Real& a, double b) {
  if (mpfr_nan_p(a.value_) || std::isnan(b)) return std::partial_ordering::unordered;
  int c = mpfr_cmp_d(a.value_, b);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

// ---------------------------------------------------------------------------
// Complex

Complex::Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {
  mpfr_prec_t b = std::max(re_.bits(), im_.bits());
  re_.widen_to(b);
  im_.widen_to(b);
}

Complex& Complex::operator+=(const Complex& rhs) {
  re_ += rhs.re_;
  im_ += rhs.im_;
  return *this;
}

Complex& Complex::operator-=(const Complex& rhs) {
  re_ -= rhs.re_;
  im_ -= rhs.im_;
  return *this;
}

Complex& Complex::operator*=(const Complex& rhs) {
  mpfr_prec_t b = std::max(bits(), rhs.bits());
  Real re(b), im(b);
  mpfr_fmms(re.raw(), re_.raw(), rhs.re_.raw(), im_.raw(), rhs.im_.raw(), MPFR_RNDN);
  mpfr_fmma(im.raw(), re_.raw(), rhs.im_.raw(), im_.raw(), rhs.re_.raw(), MPFR_RNDN);
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Complex& Complex::operator/=(const Complex& rhs) {
  // Smith's algorithm keeps intermediate magnitudes bounded.
  mpfr_prec_t b = std::max(bits(), rhs.bits());
  const Real& c = rhs.re_;
  const Real& d = rhs.im_;
  if (c.is_zero() && d.is_zero()) throw PoleError("complex division by zero");
  Real re(b), im(b);
  if (mpfr_cmpabs(c.raw(), d.raw()) >= 0) {
    Real ratio = d / c;
    Real denom = c + d * ratio;
    re = (re_ + im_ * ratio) / denom;
    im = (im_ - re_ * ratio) / denom;
  } else {
    Real ratio = c / d;
    Real denom = c * ratio + d;
    re = (re_ * ratio + im_) / denom;
    im = (im_ * ratio - re_) / denom;
  }
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Complex& Complex::operator*=(const Real& rhs) {
  re_ *= rhs;
  im_ *= rhs;
  return *this;
}

Complex& Complex::operator/=(const Real& rhs) {
  re_ /= rhs;
  im_ /= rhs;
  return *this;
}

Complex& Complex::operator*=(long rhs) {
  re_ *= rhs;
  im_ *= rhs;
  return *this;
}

// ---------------------------------------------------------------------------
// Functions

Real pi(mpfr_prec_t bits) {
  Real r(bits);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

Real ln2(mpfr_prec_t bits) {
  Real r(bits);
  mpfr_const_log2(r.raw(), MPFR_RNDN);
  return r;
}

#define SELBERG_UNARY_REAL(name, fn)         \
  Real name(const Real& x) {                 \
    Real r(x.bits());                        \
    fn(r.raw(), x.raw(), MPFR_RNDN);         \
    return r;                                \
  }

SELBERG_UNARY_REAL(abs, mpfr_abs)
SELBERG_UNARY_REAL(sqrt, mpfr_sqrt)
SELBERG_UNARY_REAL(exp, mpfr_exp)
SELBERG_UNARY_REAL(log, mpfr_log)
SELBERG_UNARY_REAL(sin, mpfr_sin)
SELBERG_UNARY_REAL(cos, mpfr_cos)
SELBERG_UNARY_REAL(tan, mpfr_tan)

#undef SELBERG_UNARY_REAL

Real floor(const Real& x) {
  Real r(x.bits());
  mpfr_floor(r.raw(), x.raw());
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r(wider(y, x));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& base, const Real& exponent) {
  Real r(wider(base, exponent));
  mpfr_pow(r.raw(), base.raw(), exponent.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& base, long exponent) {
  Real r(base.bits());
  mpfr_pow_si(r.raw(), base.raw(), exponent, MPFR_RNDN);
  return r;
}

Real hypot(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_hypot(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

Complex conj(const Complex& z) { return {z.re(), -z.im()}; }

Real abs(const Complex& z) { return hypot(z.re(), z.im()); }

Real abs1(const Complex& z) { return abs(z.re()) + abs(z.im()); }

Real norm2(const Complex& z) {
  Real r(z.bits());
  mpfr_fmma(r.raw(), z.re().raw(), z.re().raw(), z.im().raw(), z.im().raw(), MPFR_RNDN);
  return r;
}

Real arg(const Complex& z) { return atan2(z.im(), z.re()); }

Complex polar(const Real& modulus, const Real& angle) {
  mpfr_prec_t b = wider(modulus, angle);
  Real s(b), c(b);
  mpfr_sin_cos(s.raw(), c.raw(), angle.raw(), MPFR_RNDN);
  return {modulus * c, modulus * s};
}

Complex exp(const Complex& z) { return polar(exp(z.re()), z.im()); }

Complex log(const Complex& z) {
  if (z.is_zero()) throw PoleError("log(0)");
  return {log(abs(z)), arg(z)};
}

Complex sqrt(const Complex& z) {
  if (z.is_zero()) return z;
  // Principal root: re >= 0, computed without cancellation.
  Real modulus = abs(z);
  Real t = sqrt((modulus + abs(z.re())) / 2L);
  if (z.re().sign() >= 0) return {t, z.im() / (t * 2L)};
  Real im = z.im().sign() < 0 ? -t : t;
  return {abs(z.im()) / (t * 2L), im};
}

namespace {

// exp(w * l) rounded to `bits`, with the product carried at enough extra
// precision that the absolute error of the exponent stays below one ulp.
Complex exp_of_product(const Complex& w, const Complex& l, mpfr_prec_t bits) {
  Complex probe = w * l;
  long magnitude = std::max(probe.re().exponent2(), probe.im().exponent2());
  mpfr_prec_t extra = 8 + static_cast<mpfr_prec_t>(std::max(0L, magnitude));
  Complex product = w.with_bits(bits + extra) * l.with_bits(bits + extra);
  return exp(product).with_bits(bits);
}

}  // namespace

Complex pow(const Complex& base, const Complex& exponent) {
  if (base.is_zero()) {
    if (exponent.re().sign() > 0) return Complex(std::max(base.bits(), exponent.bits()));
    throw PoleError("0 raised to a power with non-positive real part");
  }
  const mpfr_prec_t bits = std::max(base.bits(), exponent.bits());
  return exp_of_product(exponent, log(base.with_bits(bits + 16)), bits);
}

Complex pow(const Real& base, const Complex& exponent) {
  if (base.sign() <= 0) throw std::domain_error("real-base power requires a positive base");
  const mpfr_prec_t bits = std::max(base.bits(), exponent.bits());
  return exp_of_product(exponent, Complex(log(base.with_bits(bits + 16))), bits);
}

Complex pow(const Complex& base, long exponent) {
  Complex result(Real(1L, base.bits()));
  Complex square = base;
  unsigned long e = exponent < 0 ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
  while (e != 0) {
    if (e & 1UL) result *= square;
    e >>= 1;
    if (e != 0) square *= square;
  }
  return exponent < 0 ? inverse(result) : result;
}

Complex sin(const Complex& z) {
  mpfr_prec_t b = z.bits();
  Real s(b), c(b), sh(b), ch(b);
  mpfr_sin_cos(s.raw(), c.raw(), z.re().raw(), MPFR_RNDN);
  mpfr_sinh_cosh(sh.raw(), ch.raw(), z.im().raw(), MPFR_RNDN);
  return {s * ch, c * sh};
}

Complex cos(const Complex& z) {
  mpfr_prec_t b = z.bits();
  Real s(b), c(b), sh(b), ch(b);
  mpfr_sin_cos(s.raw(), c.raw(), z.re().raw(), MPFR_RNDN);
  mpfr_sinh_cosh(sh.raw(), ch.raw(), z.im().raw(), MPFR_RNDN);
  return {c * ch, -(s * sh)};
}

Complex tan(const Complex& z) {
  // tan(x+iy) = (sin 2x + i sinh 2y) / (cos 2x + cosh 2y)
  mpfr_prec_t b = z.bits();
  Real x2 = z.re() * 2L;
  Real y2 = z.im() * 2L;
  Real s(b), c(b), sh(b), ch(b);
  mpfr_sin_cos(s.raw(), c.raw(), x2.raw(), MPFR_RNDN);
  mpfr_sinh_cosh(sh.raw(), ch.raw(), y2.raw(), MPFR_RNDN);
  Real denom = c + ch;
  if (denom.is_zero()) throw PoleError("tan evaluated at a pole");
  return {s / denom, sh / denom};
}

Complex inverse(const Complex& z) { return Complex(Real(1L, z.bits())) / z; }

std::string to_string(const Real& x, int digits) {
  if (mpfr_nan_p(x.raw())) return "nan";
  if (mpfr_inf_p(x.raw())) return x.sign() > 0 ? "inf" : "-inf";
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Re", std::max(digits - 1, 0), x.raw());
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

std::string to_string(const Complex& z, int digits) {
  std::string im = to_string(z.im(), digits);
  std::string sign = (im.front() == '-') ? "" : "+";
  return to_string(z.re(), digits) + sign + im + "i";
}

Complex parse_complex(std::string_view text, mpfr_prec_t bits) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  if (s.back() != 'i' && s.back() != 'I' && s.back() != 'j') return Complex(Real(s, bits));
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re_text = split == std::string::npos ? "0" : s.substr(0, split);
  std::string im_text = split == std::string::npos ? s : s.substr(split);
  if (im_text.empty() || im_text == "+") im_text = "1";
  if (im_text == "-") im_text = "-1";
  if (im_text.front() == '+') im_text.erase(0, 1);
  return {Real(re_text, bits), Real(im_text, bits)};
}

std::ostream& operator<<(std::ostream& os, const Real& x) {
  return os << to_string(x, static_cast<int>(std::min<std::streamsize>(os.precision(), 1000)));
}

std::ostream& operator<<(std::ostream& os, const Complex& z) {
  return os << to_string(z, static_cast<int>(std::min<std::streamsize>(os.precision(), 1000)));
}

}  // namespace selberg::mp
