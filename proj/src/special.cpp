#include "selberg/special.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace selberg::mp {

namespace {

constexpr mpfr_prec_t kInternalGuard = 32;
constexpr double kLn2 = 0.6931471805599453;
constexpr double kLn10 = 2.302585092994046;
constexpr double kTwoPi = 6.283185307179586;

// Tangent numbers T_1..T_n: tan x = sum T_k x^(2k-1) / (2k-1)!.
std::vector<mpz_class> tangent_numbers(int n) {
  std::vector<mpz_class> t(static_cast<std::size_t>(n) + 1);
  if (n < 1) return t;
  t[1] = 1;
  for (int k = 2; k <= n; ++k) t[k] = (k - 1) * t[k - 1];
  for (int k = 2; k <= n; ++k)
    for (int j = k; j <= n; ++j) t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j];
  return t;
}

bool is_nonpositive_integer(const Complex& s) {
  if (!s.im().is_zero()) return false;
  if (s.re().sign() > 0) return false;
  return mpfr_integer_p(s.re().raw()) != 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// BernoulliCache

BernoulliCache& BernoulliCache::global() {
  static BernoulliCache cache;
  return cache;
}

void BernoulliCache::extend_to(int n) {
  if (n < static_cast<int>(exact_.size())) return;
  int target = std::max(n + 1, static_cast<int>(exact_.size()) * 2);
  int half = target / 2 + 1;
  std::vector<mpz_class> t = tangent_numbers(half);
  std::vector<mpq_class> b(static_cast<std::size_t>(target));
  b[0] = 1;
  if (target > 1) b[1] = mpq_class(-1, 2);
  for (int k = 1; 2 * k < target; ++k) {
    mpz_class four_k;
    mpz_ui_pow_ui(four_k.get_mpz_t(), 4, static_cast<unsigned long>(k));
    mpq_class value(mpz_class(2 * k * t[k]), mpz_class(four_k * (four_k - 1)));
    value.canonicalize();
    b[2 * k] = (k % 2 == 1) ? value : mpq_class(-value);
  }
  exact_ = std::move(b);
}

mpq_class BernoulliCache::exact(int n) {
  if (n < 0) throw std::invalid_argument("Bernoulli index must be non-negative");
  {
    std::shared_lock lock(mutex_);
    if (n < static_cast<int>(exact_.size())) return exact_[n];
  }
  std::unique_lock lock(mutex_);
  extend_to(n);
  return exact_[n];
}

Real BernoulliCache::value(int n, mpfr_prec_t bits) {
  {
    std::shared_lock lock(mutex_);
    auto it = rounded_.find({n, bits});
    if (it != rounded_.end()) return it->second;
  }
  mpq_class q = exact(n);
  Real r(bits);
  mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
  std::unique_lock lock(mutex_);
  rounded_.insert_or_assign({n, bits}, r);
  return r;
}

std::vector<Real> BernoulliCache::even_values(int count, mpfr_prec_t bits) {
  exact(2 * count);
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) out.push_back(value(2 * k, bits));
  return out;
}

int BernoulliCache::size() const {
  std::shared_lock lock(mutex_);
  return static_cast<int>(exact_.size());
}

int BernoulliCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return 0;
  int accepted = 0;
  std::string line;
  std::unique_lock lock(mutex_);
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    int index = 0;
    std::string value;
    long bits = 0;
    if (!(fields >> index >> value >> bits) || index < 0 || bits < MPFR_PREC_MIN) continue;
    try {
      rounded_.insert_or_assign({index, static_cast<mpfr_prec_t>(bits)}, Real(value, bits));
      ++accepted;
    } catch (const std::invalid_argument&) {
      // malformed record: recomputed on demand
    }
  }
  return accepted;
}

void BernoulliCache::save(const std::filesystem::path& path, mpfr_prec_t bits, int max_index) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write Bernoulli cache " + path.string());
  auto& self = const_cast<BernoulliCache&>(*this);
  for (int n = 0; n <= max_index; ++n) {
    Real v = self.value(n, bits);
    out << n << ' ' << to_string(v, natural_digits(bits) + 2) << ' ' << bits << '\n';
  }
}

// ---------------------------------------------------------------------------
// Pochhammer

Complex pochhammer(const Complex& x, int n) {
  if (n < 0) throw std::invalid_argument("pochhammer order must be non-negative");
  Complex result(Real(1L, x.bits()));
  Complex factor = x;
  for (int k = 0; k < n; ++k) {
    result *= factor;
    factor.re() += 1L;
  }
  return result;
}

Real pochhammer(const Real& x, int n) {
  if (n < 0) throw std::invalid_argument("pochhammer order must be non-negative");
  Real result(1L, x.bits());
  Real factor = x;
  for (int k = 0; k < n; ++k) {
    result *= factor;
    factor += 1L;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gamma

namespace {

// Stirling series for log Gamma(z), valid once |z| is large relative to the
// precision (the caller guarantees Re z >= threshold).
Complex stirling_log_gamma(const Complex& z) {
  mpfr_prec_t bits = z.bits();
  Complex result = (z - Real(0.5, bits)) * log(z) - z;
  Real half_log_2pi = log(pi(bits) * 2L) / 2L;
  result.re() += half_log_2pi;

  Complex inv = inverse(z);
  Complex inv2 = inv * inv;
  Complex power = inv;  // z^(1-2k)
  Real eps(1L, bits);
  mpfr_mul_2si(eps.raw(), eps.raw(), -static_cast<long>(bits), MPFR_RNDN);
  Real scale = max(abs(result), Real(1L, bits));
  auto& cache = BernoulliCache::global();
  for (int k = 1; k < 4 * static_cast<int>(bits); ++k) {
    Real coefficient = cache.value(2 * k, bits) / static_cast<long>(2 * k * (2 * k - 1));
    Complex term = power * coefficient;
    result += term;
    if (abs1(term) < eps * scale) break;
    power *= inv2;
  }
  return result;
}

// Shift amount that pushes Re z beyond the Stirling threshold.
long stirling_shift(const Complex& z) {
  double digits = static_cast<double>(z.bits()) * kLn2 / kLn10;
  double threshold = 0.4 * digits + 10.0;
  double re = z.re().to_double();
  return re >= threshold ? 0 : static_cast<long>(std::ceil(threshold - re));
}

}  // namespace

Complex log_gamma(const Complex& s) {
  if (s.re() < 0.5) throw std::domain_error("log_gamma requires Re s >= 1/2");
  mpfr_prec_t bits = s.bits();
  Complex z = s.with_bits(bits + kInternalGuard);
  long shift = stirling_shift(z);
  Complex shifted = z;
  shifted.re() += shift;
  Complex result = stirling_log_gamma(shifted);
  for (long k = 0; k < shift; ++k) {
    Complex factor = z;
    factor.re() += k;
    result -= log(factor);
  }
  return result.with_bits(bits);
}

Complex gamma(const Complex& s) {
  if (is_nonpositive_integer(s)) throw PoleError("Gamma has a pole at a non-positive integer");
  mpfr_prec_t bits = s.bits();
  mpfr_prec_t work = bits + kInternalGuard;
  Complex z = s.with_bits(work);
  if (z.re() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    Real pi_w = pi(work);
    Complex one_minus = Complex(Real(1L, work)) - z;
    Complex denominator = sin(z * pi_w) * gamma(one_minus);
    return (Complex(pi_w) / denominator).with_bits(bits);
  }
  long shift = stirling_shift(z);
  Complex shifted = z;
  shifted.re() += shift;
  Complex product(Real(1L, work));
  for (long k = 0; k < shift; ++k) {
    Complex factor = z;
    factor.re() += k;
    product *= factor;
  }
  return (exp(stirling_log_gamma(shifted)) / product).with_bits(bits);
}

// ---------------------------------------------------------------------------
// Hurwitz zeta

namespace {

struct EulerMaclaurinPlan {
  long head_terms;   // M: terms summed directly
  int corrections;   // K: Bernoulli correction terms
};

// Chooses (M, K) with double-precision magnitude estimates so that the first
// omitted correction term is below 2^-bits relative to the reference size.
EulerMaclaurinPlan plan_euler_maclaurin(double sigma, double t, double a, mpfr_prec_t bits) {
  const double log_eps = -static_cast<double>(bits) * kLn2;
  // Reference magnitude: a^-sigma for convergent series, O(1) otherwise.
  const double log_ref = sigma > 1.0 ? -sigma * std::log(a) : std::max(0.0, -sigma * std::log(a));
  const double target = log_eps + log_ref;
  const int k_max = std::max(8, static_cast<int>(4 * bits * kLn2 / kLn10) + 16);

  long m = 0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    double w = static_cast<double>(m) + a;
    double log_w = std::log(w);
    // t_k ~ 2 (2 pi)^{-2k} |(s)_{2k-1}| w^{1 - sigma - 2k}
    double log_poch = 0.0;  // log |(s)_{2k-1}|
    double previous = INFINITY;
    for (int k = 1; k <= k_max; ++k) {
      for (int j = (k == 1 ? 0 : 2 * k - 3); j <= 2 * k - 2; ++j) log_poch += 0.5 * std::log((sigma + j) * (sigma + j) + t * t + 1e-300);
      double log_term = std::log(2.0) - 2.0 * k * std::log(kTwoPi) + log_poch + (1.0 - sigma - 2.0 * k) * log_w;
      if (log_term < target) return {m, k};
      if (log_term > previous && k > 2) break;
      previous = log_term;
    }
    m = m + std::max(1L, m / 4);
  }
  throw std::runtime_error("hurwitz_zeta: no Euler-Maclaurin plan found");
}

}  // namespace

Complex hurwitz_zeta(const Complex& s, const Real& a) {
  if (!(a.sign() > 0)) throw std::domain_error("hurwitz_zeta requires a > 0");
  if (s.im().is_zero() && s.re() == 1.0) throw PoleError("hurwitz_zeta has a pole at s = 1");
  const mpfr_prec_t bits = std::max(s.bits(), a.bits());

  const double sigma = s.re().to_double();
  const double t = s.im().to_double();
  const double a_d = a.to_double();
  EulerMaclaurinPlan plan = plan_euler_maclaurin(sigma, t, a_d, bits + kInternalGuard);

  // Guard bits for the cancellation when the head terms grow (sigma < 1).
  double w_d = static_cast<double>(plan.head_terms) + a_d;
  mpfr_prec_t guard = kInternalGuard;
  if (sigma < 1.0) guard += static_cast<mpfr_prec_t>(std::ceil((1.0 - sigma) * std::log2(w_d + 1.0)));
  guard += static_cast<mpfr_prec_t>(std::ceil(std::log2(std::abs(t) + 2.0)));
  const mpfr_prec_t work = bits + guard;

  Complex z = s.with_bits(work);
  Real base = a.with_bits(work);
  Complex neg_s = -z;

  Complex sum(work);
  Real point = base;
  for (long n = 0; n < plan.head_terms; ++n) {
    sum += exp(neg_s * log(point));
    point += 1L;
  }
  // point == w = M + a
  Real log_w = log(point);
  Complex w_neg_s = exp(neg_s * log_w);              // w^{-s}
  Complex s_minus_1 = z - 1L;
  sum += w_neg_s * point / s_minus_1;                // w^{1-s} / (s-1)
  sum += w_neg_s / 2L;

  // P_k = (s)_{2k-1} / ((2k)! w^{2k-1})
  Real w2 = point * point;
  Complex p = z / (point * 2L);
  Complex correction(work);
  auto& cache = BernoulliCache::global();
  for (int k = 1; k <= plan.corrections; ++k) {
    correction += p * cache.value(2 * k, work);
    Complex next = z + static_cast<long>(2 * k - 1);
    next *= z + static_cast<long>(2 * k);
    p *= next;
    p /= w2 * static_cast<long>((2 * k + 1) * (2 * k + 2));
  }
  sum += correction * w_neg_s;
  return sum.with_bits(bits);
}

Complex riemann_zeta(const Complex& s) { return hurwitz_zeta(s, Real(1L, s.bits())); }

}  // namespace selberg::mp
