#include "selberg/selberg.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>

namespace selberg::zeta {

Real FilteredSpectrum::tail() const {
  if (pairs.empty()) return Real(0L, 64);
  return mp::abs(pairs.back().at_m);
}

Real FilteredSpectrum::max_delta() const {
  Real out(0L, 64);
  for (const auto& p : pairs) out = mp::max(out, p.delta);
  return out;
}

std::vector<Real> FilteredSpectrum::deltas() const {
  std::vector<Real> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.delta);
  return out;
}

Real relative_difference(const Complex& a, const Complex& b) {
  Real denom = mp::abs(a) + mp::abs(b);
  if (denom.is_zero()) return Real(0L, denom.bits());
  return mp::abs(a - b) / denom;
}

FilteredSpectrum match_spectra(const std::vector<Complex>& at_n, const std::vector<Complex>& at_m, double delta) {
  FilteredSpectrum out;
  std::vector<bool> used(at_m.size(), false);
  for (const auto& a : at_n) {
    std::optional<std::size_t> best;
    Real best_delta(64);
    for (std::size_t j = 0; j < at_m.size(); ++j) {
      if (used[j]) continue;
      Real d = relative_difference(a, at_m[j]);
      if (!best || d < best_delta) {
        best = j;
        best_delta = d;
      }
    }
    if (best && best_delta < delta) {
      used[*best] = true;
      out.pairs.push_back({a, at_m[*best], best_delta});
    }
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(),
                   [](const MatchedPair& x, const MatchedPair& y) { return mp::abs(x.at_m) > mp::abs(y.at_m); });
  return out;
}

Complex fredholm_product(const FilteredSpectrum& f) {
  mpfr_prec_t bits = 64;
  for (const auto& p : f.pairs) bits = std::max(bits, p.at_m.bits());
  Complex d(Real(1L, bits));
  for (const auto& p : f.pairs) d *= 1L - p.at_m;
  return d;
}

Complex det_K(const Real& nu, const Complex& beta, const Real& tol) {
  const mpfr_prec_t bits = std::max(nu.bits(), beta.bits());
  if (!(nu > 1.0)) throw std::domain_error("det_K: the r-point norm must exceed 1");
  Real log_nu = mp::log(nu.with_bits(bits));
  // nu^{-(n+beta)} = exp(-(n+beta) log nu); successive factors shrink by 1/nu
  Complex mu = mp::exp(-(beta.with_bits(bits) * log_nu));
  Real inv_nu = Real(1L, bits) / nu.with_bits(bits);
  Complex det(Real(1L, bits));
  for (int n = 0; n < 1000000; ++n) {
    Complex factor = 1L - mu;
    if (factor.is_zero()) return Complex(bits);
    det *= factor;
    if (mp::abs(mu) < tol) break;
    mu *= inv_nu;
  }
  return det;
}

Complex det_K(const GroupParams& g, const Complex& beta, const Real& tol) {
  return det_K(hecke::r_point(g).norm, beta, tol);
}

namespace {

double log10_of(const Real& x) {
  if (x.is_zero()) return -1e9;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, x.raw(), MPFR_RNDN);
  return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

}  // namespace

// The leading deltas of a healthy run shrink with N but stay well above the
// working precision. Once they reach the rounding floor, precision rather than
// truncation limits what the larger N can add.
bool detect_precision_break(const std::vector<Real>& deltas, mpfr_prec_t bits, const BreakRule& rule) {
  if (deltas.empty()) return false;
  const double floor = std::log10(rule.floor_factor) - static_cast<double>(bits) * std::log10(2.0);
  return std::any_of(deltas.begin(), deltas.end(), [floor](const Real& d) { return log10_of(d) < floor; });
}

bool detect_precision_break(const FilteredSpectrum& f, mpfr_prec_t bits, const BreakRule& rule) {
  return detect_precision_break(f.deltas(), bits, rule);
}

std::pair<linalg::Spectrum, linalg::Spectrum> spectra(const GroupParams& g, const Complex& s, int N, int M, int digits,
                                                      const linalg::EigenOptions& options) {
  auto run = [&g, &s, digits, &options](int order) {
    return linalg::eigenvalues(transfer::assemble(g, s, order, digits), options);
  };
  if (!mpfr_buildopt_tls_p()) return {run(N), run(M)};
  auto at_m = std::async(std::launch::async, run, M);
  auto at_n = run(N);
  return {std::move(at_n), at_m.get()};
}

namespace {

// Matrix entries have poles where 2s + p = 1, p = 0..2M.
void guard_poles(const Complex& s, int M, mpfr_prec_t bits) {
  Real limit(1L, 64);
  mpfr_mul_2si(limit.raw(), limit.raw(), -static_cast<long>(bits) / 2, MPFR_RNDN);
  if (mp::abs(s.im()) > limit) return;
  for (long p = 0; p <= 2L * M; ++p) {
    Real pole(static_cast<double>(1 - p) / 2.0, bits);
    if (mp::abs(s.re() - pole) < limit)
      throw PoleProximityError("z_value: s lies on a pole of the coefficient matrix (2s + p = 1)");
  }
}

}  // namespace

ZetaValue z_value(int q, const Complex& s_in, const ZetaConfig& cfg) {
  if (cfg.n0 < 1 || cfg.m_offset < 1) throw std::invalid_argument("z_value: N and M - N must be positive");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("z_value: delta must lie in (0, 1)");
  ZetaValue out;
  int N = cfg.n0;
  int digits = cfg.digits;
  std::optional<std::size_t> previous_k;  // K of the last pass at this WP and a smaller N
  for (;;) {
    const int M = N + cfg.m_offset;
    const GroupParams g = hecke::make_group(q, mp::Precision(digits).bits());
    const Complex s = s_in.with_bits(g.bits());
    guard_poles(s, M, g.bits());
    auto [sn, sm] = spectra(g, s, N, M, digits, cfg.eigen);
    FilteredSpectrum f = match_spectra(sn.values, sm.values, cfg.delta);
    // more terms and fewer persistent eigenvalues: rounding, not truncation, limits the spectrum
    const bool regressed = previous_k && f.count() < *previous_k;
    const bool broke = regressed || detect_precision_break(f, g.bits(), cfg.rule);
    // nothing persisted: the largest unmatched eigenvalue bounds what was dropped
    Real tail = f.count() > 0 ? f.tail() : (sm.values.empty() ? Real(0L, 64) : mp::abs(sm.values.front()));

    out.s = s;
    out.N = N;
    out.M = M;
    out.digits = digits;
    out.K = f.count();
    out.tail = tail;
    out.max_delta = f.max_delta();
    out.precision_break = broke;
    out.fredholm = fredholm_product(f);
    Real tol(1L, 64);
    mpfr_mul_2si(tol.raw(), tol.raw(), -static_cast<long>(g.bits()), MPFR_RNDN);
    out.det_k = det_K(g, s, tol);
    if (out.det_k.is_zero()) throw PoleProximityError("z_value: det(1 - K) vanishes at s");
    out.value = out.fredholm / out.det_k;
    out.error_estimate = tail;
    out.accepted.clear();
    for (const auto& p : f.pairs) out.accepted.push_back(p.at_m);

    const bool small_tail = tail < cfg.eps;
    out.converged = small_tail && !broke;
    if (!cfg.escalate || out.converged) break;
    if (broke && digits + cfg.digits_step <= cfg.digits_max) {
      digits += cfg.digits_step;
      ++out.digit_escalations;
      previous_k.reset();
      if (cfg.on_escalate && !cfg.on_escalate(out)) break;
      continue;
    }
    const int next = static_cast<int>(std::ceil(cfg.n_growth * N));
    if (!small_tail && next <= cfg.n_max) {
      N = next;
      ++out.n_escalations;
      previous_k = out.K;
      if (cfg.on_escalate && !cfg.on_escalate(out)) break;
      continue;
    }
    break;
  }
  return out;
}

nlohmann::json to_json(const FilteredSpectrum& f, int digits) {
  nlohmann::json out;
  out["K"] = f.count();
  out["tail"] = mp::to_string(f.tail(), 6);
  out["max_delta"] = mp::to_string(f.max_delta(), 6);
  out["escalate"] = f.escalate;
  auto& pairs = out["pairs"] = nlohmann::json::array();
  for (const auto& p : f.pairs)
    pairs.push_back({{"lambda_N", mp::to_string(p.at_n, digits)},
                     {"lambda_M", mp::to_string(p.at_m, digits)},
                     {"delta", mp::to_string(p.delta, 6)}});
  return out;
}

nlohmann::json to_json(const ZetaValue& z) {
  nlohmann::json out;
  out["s"] = mp::to_string(z.s, std::min(z.digits, 30));
  out["value"] = {{"re", mp::to_string(z.value.re(), z.digits)}, {"im", mp::to_string(z.value.im(), z.digits)}};
  out["error_estimate"] = mp::to_string(z.error_estimate, 6);
  out["converged"] = z.converged;
  out["N"] = z.N;
  out["M"] = z.M;
  out["WP"] = z.digits;
  out["K"] = z.K;
  out["tail"] = mp::to_string(z.tail, 6);
  out["max_delta"] = mp::to_string(z.max_delta, 6);
  out["n_escalations"] = z.n_escalations;
  out["wp_escalations"] = z.digit_escalations;
  out["precision_break"] = z.precision_break;
  out["fredholm_determinant"] = mp::to_string(z.fredholm, z.digits);
  out["det_K"] = mp::to_string(z.det_k, z.digits);
  auto& acc = out["accepted"] = nlohmann::json::array();
  for (const auto& v : z.accepted) acc.push_back(mp::to_string(v, z.digits));
  return out;
}

}  // namespace selberg::zeta
