#include "selberg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace selberg::linalg {

namespace {

// Scratch mpfr variables, allocated once per routine.
class Scratch {
 public:
  Scratch(std::size_t count, mpfr_prec_t bits) : vars_(count) {
    for (auto& v : vars_) mpfr_init2(&v, bits);
  }
  ~Scratch() {
    for (auto& v : vars_) mpfr_clear(&v);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  mpfr_ptr operator[](std::size_t k) { return &vars_[k]; }

 private:
  std::vector<__mpfr_struct> vars_;
};

inline mpfr_ptr re(Matrix& m, std::size_t r, std::size_t c) { return m(r, c).re().raw(); }
inline mpfr_ptr im(Matrix& m, std::size_t r, std::size_t c) { return m(r, c).im().raw(); }

constexpr mpfr_prec_t kTestBits = 64;

// |re| + |im| at low precision
void cabs1(mpfr_ptr out, const Complex& z) {
  mpfr_abs(out, z.re().raw(), MPFR_RNDU);
  if (z.im().is_zero()) return;
  mpfr_t t;
  mpfr_init2(t, kTestBits);
  mpfr_abs(t, z.im().raw(), MPFR_RNDU);
  mpfr_add(out, out, t, MPFR_RNDU);
  mpfr_clear(t);
}

Real cabs1_low(const Complex& z) {
  Real out(kTestBits);
  cabs1(out.raw(), z);
  return out;
}

// Givens rotation G = [c s; -conj(s) c] with G [x; y] = [r; 0].
struct Rotation {
  Real c;
  Complex s;
};

Rotation make_rotation(const Complex& x, const Complex& y) {
  const mpfr_prec_t bits = std::max(x.bits(), y.bits());
  if (y.is_zero()) return {Real(1L, bits), Complex(bits)};
  if (x.is_zero()) return {Real(0L, bits), Complex(Real(1L, bits))};
  Real ax = mp::abs(x);
  Real r = mp::hypot(ax, mp::abs(y));
  Real c = ax / r;
  Complex s = (x / ax) * mp::conj(y);
  s /= r;
  return {std::move(c), std::move(s)};
}

class RotationApplier {
 public:
  explicit RotationApplier(mpfr_prec_t bits) : t_(6, bits) {}

  // rows k, k+1 over columns [c0, c1]
  void left(Matrix& H, const Rotation& g, std::size_t k, std::size_t c0, std::size_t c1) {
    mpfr_srcptr c = g.c.raw(), sr = g.s.re().raw(), si = g.s.im().raw();
    for (std::size_t j = c0; j <= c1; ++j) {
      mpfr_ptr ar = re(H, k, j), ai = im(H, k, j), br = re(H, k + 1, j), bi = im(H, k + 1, j);
      // c a + s b
      mpfr_fmms(t_[0], sr, br, si, bi, MPFR_RNDN);
      mpfr_fma(t_[0], c, ar, t_[0], MPFR_RNDN);
      mpfr_fmma(t_[1], sr, bi, si, br, MPFR_RNDN);
      mpfr_fma(t_[1], c, ai, t_[1], MPFR_RNDN);
      // -conj(s) a + c b
      mpfr_fmma(t_[2], sr, ar, si, ai, MPFR_RNDN);
      mpfr_fms(t_[2], c, br, t_[2], MPFR_RNDN);
      mpfr_fmms(t_[3], sr, ai, si, ar, MPFR_RNDN);
      mpfr_fms(t_[3], c, bi, t_[3], MPFR_RNDN);
      mpfr_swap(ar, t_[0]);
      mpfr_swap(ai, t_[1]);
      mpfr_swap(br, t_[2]);
      mpfr_swap(bi, t_[3]);
    }
  }

  // columns k, k+1 over rows [r0, r1], multiplying by G^H from the right
  void right(Matrix& H, const Rotation& g, std::size_t k, std::size_t r0, std::size_t r1) {
    mpfr_srcptr c = g.c.raw(), sr = g.s.re().raw(), si = g.s.im().raw();
    for (std::size_t i = r0; i <= r1; ++i) {
      mpfr_ptr ar = re(H, i, k), ai = im(H, i, k), br = re(H, i, k + 1), bi = im(H, i, k + 1);
      // c a + conj(s) b
      mpfr_fmma(t_[0], sr, br, si, bi, MPFR_RNDN);
      mpfr_fma(t_[0], c, ar, t_[0], MPFR_RNDN);
      mpfr_fmms(t_[1], sr, bi, si, br, MPFR_RNDN);
      mpfr_fma(t_[1], c, ai, t_[1], MPFR_RNDN);
      // -s a + c b
      mpfr_fmms(t_[2], sr, ar, si, ai, MPFR_RNDN);
      mpfr_fms(t_[2], c, br, t_[2], MPFR_RNDN);
      mpfr_fmma(t_[3], sr, ai, si, ar, MPFR_RNDN);
      mpfr_fms(t_[3], c, bi, t_[3], MPFR_RNDN);
      mpfr_swap(ar, t_[0]);
      mpfr_swap(ai, t_[1]);
      mpfr_swap(br, t_[2]);
      mpfr_swap(bi, t_[3]);
    }
  }

 private:
  Scratch t_;
};

// Eigenvalues of [a b; c d], larger-magnitude root first.
std::pair<Complex, Complex> eig2(const Complex& a, const Complex& b, const Complex& c, const Complex& d) {
  Complex half_trace = (a + d) / 2L;
  Complex half_diff = (a - d) / 2L;
  Complex root = mp::sqrt(half_diff * half_diff + b * c);
  Complex l1 = half_trace + root;
  Complex l2 = half_trace - root;
  if (mp::abs1(l2) > mp::abs1(l1)) std::swap(l1, l2);
  if (l1.is_zero()) return {l1, l2};
  Complex det = a * d - b * c;
  return {l1, det / l1};
}

Complex wilkinson_shift(const Matrix& H, std::size_t hi) {
  const Complex& a = H(hi - 1, hi - 1);
  const Complex& b = H(hi - 1, hi);
  const Complex& c = H(hi, hi - 1);
  const Complex& d = H(hi, hi);
  auto [l1, l2] = eig2(a, b, c, d);
  return mp::abs1(l1 - d) < mp::abs1(l2 - d) ? l1 : l2;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<long> balance(Matrix& m) {
  const std::size_t n = m.size();
  std::vector<long> scale(n, 0);
  Scratch t(3, kTestBits);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      mpfr_set_zero(t[0], 1);  // column norm
      mpfr_set_zero(t[1], 1);  // row norm
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        cabs1(t[2], m(j, i));
        mpfr_add(t[0], t[0], t[2], MPFR_RNDN);
        cabs1(t[2], m(i, j));
        mpfr_add(t[1], t[1], t[2], MPFR_RNDN);
      }
      if (mpfr_zero_p(t[0]) || mpfr_zero_p(t[1])) continue;
      long ec = 0, er = 0;
      double fc = mpfr_get_d_2exp(&ec, t[0], MPFR_RNDN);
      double fr = mpfr_get_d_2exp(&er, t[1], MPFR_RNDN);
      double log_c = std::log2(fc) + static_cast<double>(ec);
      double log_r = std::log2(fr) + static_cast<double>(er);
      long e = std::lround((log_r - log_c) / 2.0);
      if (e == 0) continue;
      // accept only a clear reduction of c + r
      double before = std::exp2(log_c - log_r) + 1.0;
      double after = std::exp2(log_c - log_r + static_cast<double>(e)) + std::exp2(-static_cast<double>(e));
      if (after >= 0.95 * before) continue;
      changed = true;
      scale[i] += e;
      for (std::size_t j = 0; j < n; ++j) {
        // row i by 2^-e, column i by 2^e
        mpfr_mul_2si(re(m, i, j), re(m, i, j), -e, MPFR_RNDN);
        mpfr_mul_2si(im(m, i, j), im(m, i, j), -e, MPFR_RNDN);
        mpfr_mul_2si(re(m, j, i), re(m, j, i), e, MPFR_RNDN);
        mpfr_mul_2si(im(m, j, i), im(m, j, i), e, MPFR_RNDN);
      }
    }
    if (!changed) break;
  }
  return scale;
}

void hessenberg(Matrix& m) {
  const std::size_t n = m.size();
  if (n < 3) return;
  const mpfr_prec_t bits = m.bits();
  Scratch t(8, bits);
  std::vector<Complex> v;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    // norm of the tail below the subdiagonal
    mpfr_set_zero(t[0], 1);
    for (std::size_t r = k + 2; r < n; ++r) {
      mpfr_fmma(t[1], re(m, r, k), re(m, r, k), im(m, r, k), im(m, r, k), MPFR_RNDN);
      mpfr_add(t[0], t[0], t[1], MPFR_RNDN);
    }
    if (mpfr_zero_p(t[0])) continue;
    Complex x0 = m(k + 1, k);
    Real x0_abs = mp::abs(x0);
    Real tail(bits);
    mpfr_set(tail.raw(), t[0], MPFR_RNDN);
    Real norm = mp::sqrt(x0_abs * x0_abs + tail);
    Complex alpha = x0_abs.is_zero() ? Complex(-norm) : -(x0 / x0_abs) * norm;
    v.assign(len, Complex(bits));
    for (std::size_t r = 0; r < len; ++r) v[r] = m(k + 1 + r, k);
    v[0] -= alpha;
    Real tau = Real(1L, bits) / (norm * (norm + x0_abs));  // 2 / |v|^2

    // left: H[k+1.., j] -= tau v (v^H H[k+1.., j]) for j >= k+1
    for (std::size_t j = k + 1; j < n; ++j) {
      mpfr_set_zero(t[2], 1);
      mpfr_set_zero(t[3], 1);
      for (std::size_t r = 0; r < len; ++r) {
        mpfr_srcptr vr = v[r].re().raw(), vi = v[r].im().raw();
        mpfr_ptr hr = re(m, k + 1 + r, j), hi = im(m, k + 1 + r, j);
        mpfr_fmma(t[4], vr, hr, vi, hi, MPFR_RNDN);
        mpfr_add(t[2], t[2], t[4], MPFR_RNDN);
        mpfr_fmms(t[4], vr, hi, vi, hr, MPFR_RNDN);
        mpfr_add(t[3], t[3], t[4], MPFR_RNDN);
      }
      mpfr_mul(t[2], t[2], tau.raw(), MPFR_RNDN);
      mpfr_mul(t[3], t[3], tau.raw(), MPFR_RNDN);
      for (std::size_t r = 0; r < len; ++r) {
        mpfr_srcptr vr = v[r].re().raw(), vi = v[r].im().raw();
        mpfr_ptr hr = re(m, k + 1 + r, j), hi = im(m, k + 1 + r, j);
        mpfr_fmms(t[4], vr, t[2], vi, t[3], MPFR_RNDN);
        mpfr_sub(hr, hr, t[4], MPFR_RNDN);
        mpfr_fmma(t[4], vr, t[3], vi, t[2], MPFR_RNDN);
        mpfr_sub(hi, hi, t[4], MPFR_RNDN);
      }
    }
    // right: H[i, k+1..] -= tau (H[i, k+1..] v) v^H for all rows
    for (std::size_t i = 0; i < n; ++i) {
      mpfr_set_zero(t[2], 1);
      mpfr_set_zero(t[3], 1);
      for (std::size_t r = 0; r < len; ++r) {
        mpfr_srcptr vr = v[r].re().raw(), vi = v[r].im().raw();
        mpfr_ptr hr = re(m, i, k + 1 + r), hi = im(m, i, k + 1 + r);
        mpfr_fmms(t[4], hr, vr, hi, vi, MPFR_RNDN);
        mpfr_add(t[2], t[2], t[4], MPFR_RNDN);
        mpfr_fmma(t[4], hr, vi, hi, vr, MPFR_RNDN);
        mpfr_add(t[3], t[3], t[4], MPFR_RNDN);
      }
      mpfr_mul(t[2], t[2], tau.raw(), MPFR_RNDN);
      mpfr_mul(t[3], t[3], tau.raw(), MPFR_RNDN);
      for (std::size_t r = 0; r < len; ++r) {
        mpfr_srcptr vr = v[r].re().raw(), vi = v[r].im().raw();
        mpfr_ptr hr = re(m, i, k + 1 + r), hi = im(m, i, k + 1 + r);
        // w conj(v)
        mpfr_fmma(t[4], t[2], vr, t[3], vi, MPFR_RNDN);
        mpfr_sub(hr, hr, t[4], MPFR_RNDN);
        mpfr_fmms(t[4], t[3], vr, t[2], vi, MPFR_RNDN);
        mpfr_sub(hi, hi, t[4], MPFR_RNDN);
      }
    }
    m(k + 1, k) = alpha;
    for (std::size_t r = k + 2; r < n; ++r) m(r, k) = Complex(bits);
  }
}

// ---------------------------------------------------------------------------

namespace {

// Deflation test for the subdiagonal H(l, l-1) (standard test with the
// Ahues-Tisseur refinement). Returns true and sets `threshold` when negligible.
bool negligible(const Matrix& H, std::size_t l, std::size_t lo, std::size_t hi, const Real& ulp, const Real& tiny,
                Real& threshold) {
  Real sub = cabs1_low(H(l, l - 1));
  if (sub <= tiny) {
    threshold = tiny;
    return true;
  }
  Real tst = cabs1_low(H(l - 1, l - 1)) + cabs1_low(H(l, l));
  if (tst.is_zero()) {
    if (l >= lo + 2) tst += mp::abs(H(l - 1, l - 2).re());
    if (l + 1 <= hi) tst += mp::abs(H(l + 1, l).re());
  }
  if (!(sub <= ulp * tst)) return false;
  Real sup = cabs1_low(H(l - 1, l));
  Real ab = mp::max(sub, sup), ba = mp::min(sub, sup);
  Real hll = cabs1_low(H(l, l));
  Real diff = cabs1_low(H(l - 1, l - 1) - H(l, l));
  Real aa = mp::max(hll, diff), bb = mp::min(hll, diff);
  Real s = aa + ab;
  if (ba * (ab / s) <= mp::max(tiny, ulp * (bb * (aa / s)))) {
    threshold = ulp * tst;
    return true;
  }
  return false;
}

}  // namespace

std::vector<Complex> eigenvalues(const Matrix& input, const EigenOptions& options, Real* residual,
                                 std::size_t* iterations) {
  const std::size_t n = input.size();
  const mpfr_prec_t bits = input.bits();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (!input(r, c).is_finite()) throw std::domain_error("eigenvalues: matrix has non-finite entries");
  std::vector<Complex> values(n, Complex(bits));
  Real max_threshold(0L, kTestBits);
  std::size_t total_iterations = 0;
  if (n == 0) return values;

  Matrix H = input;
  if (options.balance) balance(H);
  hessenberg(H);

  Real ulp(1L, kTestBits);
  mpfr_mul_2si(ulp.raw(), ulp.raw(), 4 - static_cast<long>(bits), MPFR_RNDN);
  Real tiny(1L, kTestBits);
  mpfr_mul_2si(tiny.raw(), tiny.raw(), -static_cast<long>(64 * bits), MPFR_RNDN);

  RotationApplier apply(bits);
  const std::size_t budget = static_cast<std::size_t>(options.iterations_per_eigenvalue) * std::max<std::size_t>(n, 10);
  long hi = static_cast<long>(n) - 1;
  int since_deflation = 0;
  while (hi >= 0) {
    std::size_t h = static_cast<std::size_t>(hi);
    std::size_t lo = h;
    Real threshold(kTestBits);
    while (lo > 0) {
      if (negligible(H, lo, 0, h, ulp, tiny, threshold)) {
        H(lo, lo - 1) = Complex(bits);
        if (threshold > max_threshold) max_threshold = threshold;
        break;
      }
      --lo;
    }
    if (lo == h) {
      values[h] = H(h, h);
      --hi;
      since_deflation = 0;
      continue;
    }
    if (lo + 1 == h) {
      auto [l1, l2] = eig2(H(lo, lo), H(lo, h), H(h, lo), H(h, h));
      values[lo] = l1;
      values[h] = l2;
      hi -= 2;
      since_deflation = 0;
      continue;
    }
    if (++total_iterations > budget)
      throw ConvergenceError("eigenvalues: QR iteration budget exhausted; raise the working precision");
    ++since_deflation;

    Complex shift(bits);
    if (since_deflation % 10 == 0) {
      // exceptional shifts break cycling
      const bool bottom = (since_deflation / 10) % 2 == 0;
      std::size_t at = bottom ? h : lo;
      Real kick = mp::abs(H(bottom ? h : lo + 1, bottom ? h - 1 : lo).re()) * Real(0.75, bits);
      shift = H(at, at) + kick;
    } else {
      shift = wilkinson_shift(H, h);
    }

    // implicit single-shift sweep on [lo, h]
    Rotation g = make_rotation(H(lo, lo) - shift, H(lo + 1, lo));
    apply.left(H, g, lo, lo, h);
    apply.right(H, g, lo, lo, std::min(lo + 2, h));
    for (std::size_t k = lo + 1; k < h; ++k) {
      g = make_rotation(H(k, k - 1), H(k + 1, k - 1));
      apply.left(H, g, k, k - 1, h);
      H(k + 1, k - 1) = Complex(bits);
      apply.right(H, g, k, lo, std::min(k + 2, h));
    }
  }
  sort_spectrum(values);
  if (residual) *residual = max_threshold;
  if (iterations) *iterations = total_iterations;
  return values;
}

Spectrum eigenvalues(const transfer::TransferMatrix& m, const EigenOptions& options) {
  Spectrum s;
  s.q = m.q;
  s.beta = m.beta;
  s.N = m.N;
  s.digits = m.digits;
  s.values = eigenvalues(m.entries, options, &s.residual_bound, &s.iterations);
  return s;
}

void sort_spectrum(std::vector<Complex>& values) {
  struct Keyed {
    Real magnitude;
    Real angle;
    Complex value;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(values.size());
  for (auto& v : values) keyed.push_back({mp::abs(v), v.is_zero() ? Real(0L, v.bits()) : mp::arg(v), std::move(v)});
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return a.angle < b.angle;
  });
  values.clear();
  for (auto& k : keyed) values.push_back(std::move(k.value));
}

Complex determinant(const Matrix& input) {
  const std::size_t n = input.size();
  Matrix a = input;
  Complex det(Real(1L, a.bits()));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    Real best = mp::abs(a(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      Real v = mp::abs(a(r, k));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best.is_zero()) return Complex(a.bits());
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
      det = -det;
    }
    det *= a(k, k);
    Complex inv = mp::inverse(a(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (a(r, k).is_zero()) continue;
      Complex f = a(r, k) * inv;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

CharPolyReport char_poly_check(const Matrix& m, const std::vector<Complex>& values, int samples) {
  const mpfr_prec_t bits = m.bits();
  CharPolyReport report{Real(0L, bits), Real(0L, bits), 0};
  Complex sum(bits);
  for (const auto& v : values) sum += v;
  Complex tr = m.trace();
  report.trace_deviation = mp::abs(sum - tr) / mp::max(Real(1L, bits), mp::abs(tr));
  if (m.size() > 60) return report;

  const mpfr_prec_t wide = 2 * bits;
  Real radius(0L, bits);
  for (const auto& v : values) radius = mp::max(radius, mp::abs(v));
  radius = mp::max(radius, Real(1L, bits));
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    Complex z = Complex(unit(rng), unit(rng), wide) * radius.with_bits(wide) * Real(1.5, wide);
    Matrix shifted(m.size(), wide);
    for (std::size_t r = 0; r < m.size(); ++r)
      for (std::size_t c = 0; c < m.size(); ++c) shifted(r, c) = -m(r, c).with_bits(wide);
    for (std::size_t r = 0; r < m.size(); ++r) shifted(r, r) += z;
    Complex det = determinant(shifted);
    Complex product(Real(1L, wide));
    for (const auto& v : values) product *= z - v.with_bits(wide);
    Real dev = mp::abs(product - det) / mp::max(mp::abs(det), Real(1e-300, wide));
    report.determinant_deviation = mp::max(report.determinant_deviation, dev.with_bits(bits));
    ++report.samples;
  }
  return report;
}

nlohmann::json to_json(const Spectrum& s) {
  nlohmann::json out;
  out["q"] = s.q;
  out["beta"] = mp::to_string(s.beta, s.digits);
  out["N"] = s.N;
  out["WP"] = s.digits;
  out["residual_bound"] = mp::to_string(s.residual_bound, 6);
  out["iterations"] = s.iterations;
  auto& values = out["eigenvalues"] = nlohmann::json::array();
  for (const auto& v : s.values) values.push_back({mp::to_string(v.re(), s.digits), mp::to_string(v.im(), s.digits)});
  return out;
}

}  // namespace selberg::linalg
