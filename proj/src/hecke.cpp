#include "selberg/hecke.hpp"

#include <sstream>
#include <stdexcept>

namespace selberg::hecke {

GroupParams make_group(int q, mpfr_prec_t bits) {
  if (q < 3) throw std::invalid_argument("Hecke group requires q >= 3, got " + std::to_string(q));
  Real lambda = mp::cos(mp::pi(bits) / static_cast<long>(q)) * 2L;
  // exact forms where the rounded pi/q would perturb the last digits
  if (q == 3) lambda = Real(1L, bits);
  if (q == 4) lambda = mp::sqrt(Real(2L, bits));
  if (q == 6) lambda = mp::sqrt(Real(3L, bits));
  Parity parity = q % 2 == 0 ? Parity::Even : Parity::Odd;
  int h = parity == Parity::Even ? (q - 2) / 2 : (q - 3) / 2;
  int kappa = parity == Parity::Even ? h : 2 * h + 1;
  return {q, std::move(lambda), parity, h, kappa};
}

Real default_tolerance(mpfr_prec_t bits) {
  Real tol(1L, bits);
  mpfr_mul_2si(tol.raw(), tol.raw(), 40 - static_cast<long>(bits), MPFR_RNDN);
  return tol;
}

long nearest_multiple(const Real& x, const GroupParams& g) {
  Real y = x / g.lambda;
  y += Real(0.5, y.bits());
  return y.to_long_floor();
}

FqStep fq_step(const Real& x, const GroupParams& g) {
  if (x.is_zero()) throw std::domain_error("fq_step: F_q is not stepped at the cusp 0");
  Real half = g.lambda / 2L;
  if (mp::abs(x) > half) throw std::domain_error("fq_step: x outside I_q = [-lambda/2, lambda/2]");
  Real y = Real(-1L, x.bits()) / x;
  long a = nearest_multiple(y, g);
  y -= g.lambda * a;
  return {std::move(y), a};
}

std::string LambdaFraction::to_string() const {
  std::ostringstream out;
  out << a0 << ";[";
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (kind == FractionKind::Preperiodic && k == preperiod) out << "(";
    out << digits[k];
    if (k + 1 < digits.size()) out << ",";
  }
  if (kind == FractionKind::Preperiodic) out << ")";
  if (kind == FractionKind::Truncated) out << ",...";
  out << "]";
  return out.str();
}

namespace {

Real pow2_bound(mpfr_prec_t bits) {
  Real r(1L, bits);
  mpfr_mul_2si(r.raw(), r.raw(), -60, MPFR_RNDN);
  return r;
}

}  // namespace

LambdaFraction expand(const Real& x, const GroupParams& g, std::size_t max_len, const Real& tol) {
  if (max_len < 1) throw std::invalid_argument("expand: max_len must be positive");
  LambdaFraction f;
  f.a0 = nearest_multiple(x, g);
  Real current = x - g.lambda * f.a0;
  std::vector<Real> orbit;
  orbit.push_back(current);
  while (f.digits.size() < max_len) {
    if (mp::abs(current) < tol) {
      f.kind = FractionKind::Terminating;
      return f;
    }
    // a digit beyond the range of long means current is rounding noise
    if (mp::abs(current) * g.lambda < pow2_bound(current.bits())) return f;
    FqStep step = fq_step(current, g);
    f.digits.push_back(step.digit);
    current = std::move(step.x);
    // A revisited point closes the period; the orbit point orbit[m] is the
    // state before digit m, so the cycle consists of digits m..end.
    for (std::size_t m = 0; m < orbit.size(); ++m) {
      if (mp::abs(orbit[m] - current) < tol) {
        f.kind = FractionKind::Preperiodic;
        f.preperiod = m;
        f.period = orbit.size() - m;
        return f;
      }
    }
    orbit.push_back(current);
  }
  if (mp::abs(current) < tol) f.kind = FractionKind::Terminating;
  return f;
}

Real evaluate(const LambdaFraction& f, const GroupParams& g, std::size_t n) {
  const mpfr_prec_t bits = g.bits();
  n = std::min(n, f.digits.size());
  Real x(0L, bits);
  for (std::size_t k = n; k-- > 0;) x = Real(-1L, bits) / (x + g.lambda * f.digits[k]);
  return x + g.lambda * f.a0;
}

// ---------------------------------------------------------------------------

MoebiusMap::MoebiusMap(Real a, Real b, Real c, Real d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {}

MoebiusMap MoebiusMap::identity(mpfr_prec_t bits) {
  return {Real(1L, bits), Real(0L, bits), Real(0L, bits), Real(1L, bits)};
}

MoebiusMap MoebiusMap::S(mpfr_prec_t bits) {
  return {Real(0L, bits), Real(-1L, bits), Real(1L, bits), Real(0L, bits)};
}

MoebiusMap MoebiusMap::T(long power, const GroupParams& g) {
  const mpfr_prec_t bits = g.bits();
  return {Real(1L, bits), g.lambda * power, Real(0L, bits), Real(1L, bits)};
}

MoebiusMap MoebiusMap::ST(long n, const GroupParams& g) {
  const mpfr_prec_t bits = g.bits();
  return {Real(0L, bits), Real(-1L, bits), Real(1L, bits), g.lambda * n};
}

MapClass MoebiusMap::classify(const Real& tol) const {
  Real excess = mp::abs(trace()) - 2L;
  if (mp::abs(excess) <= tol) return MapClass::Parabolic;
  return excess.sign() > 0 ? MapClass::Hyperbolic : MapClass::Elliptic;
}

Real MoebiusMap::apply(const Real& x) const { return (a_ * x + b_) / (c_ * x + d_); }

Complex MoebiusMap::apply(const Complex& z) const { return (z * a_ + b_) / (z * c_ + d_); }

Real MoebiusMap::derivative(const Real& x) const {
  Real denominator = c_ * x + d_;
  return Real(1L, x.bits()) / (denominator * denominator);
}

MoebiusMap MoebiusMap::inverse() const { return {d_, -b_, -c_, a_}; }

MoebiusMap& MoebiusMap::operator*=(const MoebiusMap& rhs) {
  Real a = a_ * rhs.a_ + b_ * rhs.c_;
  Real b = a_ * rhs.b_ + b_ * rhs.d_;
  Real c = c_ * rhs.a_ + d_ * rhs.c_;
  Real d = c_ * rhs.b_ + d_ * rhs.d_;
  a_ = std::move(a);
  b_ = std::move(b);
  c_ = std::move(c);
  d_ = std::move(d);
  if (++compositions_ % 32 == 0) renormalize();
  return *this;
}

void MoebiusMap::renormalize() {
  Real det_value = det();
  if (det_value.sign() <= 0) return;
  Real scale = mp::sqrt(det_value);
  a_ /= scale;
  b_ /= scale;
  c_ /= scale;
  d_ /= scale;
}

bool MoebiusMap::equivalent(const MoebiusMap& other, const Real& tol) const {
  auto close = [&](int sign) {
    return mp::abs(a_ - other.a_ * static_cast<long>(sign)) < tol &&
           mp::abs(b_ - other.b_ * static_cast<long>(sign)) < tol &&
           mp::abs(c_ - other.c_ * static_cast<long>(sign)) < tol &&
           mp::abs(d_ - other.d_ * static_cast<long>(sign)) < tol;
  };
  return close(1) || close(-1);
}

MoebiusMap word_to_matrix(const std::vector<long>& digits, const GroupParams& g) {
  if (digits.empty()) throw std::invalid_argument("word_to_matrix: empty word");
  MoebiusMap m = MoebiusMap::ST(digits.front(), g);
  for (std::size_t k = 1; k < digits.size(); ++k) m *= MoebiusMap::ST(digits[k], g);
  return m;
}

Real norm_from_trace(const Real& trace) {
  Real t = mp::abs(trace);
  Real disc = t * t - 4L;
  if (disc.sign() <= 0) throw std::domain_error("norm_of: element is not hyperbolic");
  Real x = (t + mp::sqrt(disc)) / 2L;
  return x * x;
}

Real norm_of(const MoebiusMap& m) { return norm_from_trace(m.trace()); }

Real attracting_fixed_point(const MoebiusMap& m) {
  Real t = m.trace();
  Real disc = t * t - 4L;
  if (disc.sign() <= 0) throw std::domain_error("attracting_fixed_point: element is not hyperbolic");
  if (m.c().is_zero()) throw std::domain_error("attracting_fixed_point: fixed point at infinity");
  Real root = mp::sqrt(disc);
  // c x^2 + (d - a) x - b = 0
  Real diff = m.a() - m.d();
  Real two_c = m.c() * 2L;
  Real x1 = (diff + root) / two_c;
  Real x2 = (diff - root) / two_c;
  // attracting iff |c x + d| > 1
  Real k1 = mp::abs(m.c() * x1 + m.d());
  Real k2 = mp::abs(m.c() * x2 + m.d());
  return k1 > k2 ? x1 : x2;
}

std::vector<long> r_pattern(const GroupParams& g) {
  std::vector<long> word;
  if (g.even()) {
    word.assign(static_cast<std::size_t>(g.h - 1), 1L);
    word.push_back(2);
    return word;
  }
  if (g.h == 0) return {3};  // S T^2 (S T)^{-1} S T^2 = S T^3
  word.assign(static_cast<std::size_t>(g.h), 1L);
  word.push_back(2);
  word.insert(word.end(), static_cast<std::size_t>(g.h - 1), 1L);
  word.push_back(2);
  return word;
}

namespace {

Real positive_root_minus_lambda(const GroupParams& g, long constant) {
  // R^2 + (2 - lambda) R - constant = 0
  Real b = Real(2L, g.bits()) - g.lambda;
  Real R = (mp::sqrt(b * b + Real(4L * constant, g.bits())) - b) / 2L;
  return R - g.lambda;
}

}  // namespace

RPointData r_point(const GroupParams& g) {
  std::vector<long> word = r_pattern(g);
  MoebiusMap A = word_to_matrix(word, g);
  Real r = attracting_fixed_point(A);
  Real tol = default_tolerance(g.bits());
  LambdaFraction fraction = expand(r, g, 4 * word.size() + 8, tol);
  Real norm = norm_of(A);
  RPointData data{std::move(word), std::move(r), std::move(fraction), std::move(A), std::move(norm), {}, {}};
  if (!g.even()) {
    data.r_literal = positive_root_minus_lambda(g, 2);
    data.r_corrected = positive_root_minus_lambda(g, 1);
  }
  return data;
}

}  // namespace selberg::hecke
