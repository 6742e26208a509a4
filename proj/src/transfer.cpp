#include "selberg/transfer.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "selberg/special.hpp"

namespace selberg::transfer {

Matrix::Matrix(std::size_t n, mpfr_prec_t bits) : n_(n), bits_(bits), data_(n * n, Complex(bits)) {}

Complex Matrix::trace() const {
  Complex sum(bits_);
  for (std::size_t k = 0; k < n_; ++k) sum += (*this)(k, k);
  return sum;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (rhs.n_ != n_) throw std::invalid_argument("matrix size mismatch");
  Matrix out(n_, std::max(bits_, rhs.bits_));
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex& a = (*this)(r, k);
      if (a.is_zero()) continue;
      for (std::size_t c = 0; c < n_; ++c) out(r, c) += a * rhs(k, c);
    }
  return out;
}

Complex Matrix::trace_of_power(int l) const {
  if (l < 1) throw std::invalid_argument("trace_of_power: l must be positive");
  if (l == 1) return trace();
  if (l == 2) {
    Complex sum(bits_);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c) sum += (*this)(r, c) * (*this)(c, r);
    return sum;
  }
  Matrix power = *this;
  for (int k = 1; k < l; ++k) power = power * (*this);
  return power.trace();
}

// ---------------------------------------------------------------------------

namespace {

Complex two_beta(const Complex& beta) { return beta * 2L; }

// (2beta+k)_m / m!
Complex scaled_pochhammer(const Complex& s, int m) {
  Complex value(Real(1L, s.bits()));
  for (int r = 0; r < m; ++r) {
    value *= s + static_cast<long>(r);
    value /= static_cast<long>(r + 1);
  }
  return value;
}

}  // namespace

Complex alpha_ray(int m, int k, const Complex& beta, long n0, const GroupParams& g) {
  Complex s = two_beta(beta) + static_cast<long>(k);
  Complex exponent = s + static_cast<long>(m);
  if (exponent.im().is_zero() && exponent.re() == 1.0)
    throw mp::PoleError("alpha_ray: 2beta+k+m = 1 at m=" + std::to_string(m) + ", k=" + std::to_string(k));
  Complex value = scaled_pochhammer(s, m) * mp::hurwitz_zeta(exponent, Real(n0, beta.bits()));
  value *= mp::pow(g.lambda, -exponent);
  return (k + m) % 2 == 0 ? value : -value;
}

Complex alpha_single(int m, int k, const Complex& beta, long n, const GroupParams& g) {
  Complex s = two_beta(beta) + static_cast<long>(k);
  Complex exponent = s + static_cast<long>(m);
  Complex value = scaled_pochhammer(s, m) * mp::pow(g.lambda * n, -exponent);
  return (k + m) % 2 == 0 ? value : -value;
}

TransferMatrix assemble(const GroupParams& g, const Complex& beta_in, int N, int digits) {
  if (N < 0) throw std::invalid_argument("assemble: N must be non-negative");
  const mpfr_prec_t bits = mp::Precision(digits).bits();
  const GroupParams& group = g;
  Complex beta = beta_in.with_bits(bits);
  const int kappa = group.kappa;
  const std::size_t block = static_cast<std::size_t>(N + 1);
  TransferMatrix out{group.q, beta, N, digits, Matrix(2 * static_cast<std::size_t>(kappa) * block, bits)};

  Real lambda = group.lambda.with_bits(bits);
  Complex s0 = beta * 2L;
  // lambda^{-(2beta+p)} for p = 0..2N
  std::vector<Complex> lambda_pow;
  {
    Complex base = mp::pow(lambda, -s0);
    Real inv_lambda = Real(1L, bits) / lambda;
    for (int p = 0; p <= 2 * N; ++p) {
      lambda_pow.push_back(base);
      base *= inv_lambda;
    }
  }
  // (2beta+k)_m / m!
  std::vector<Complex> poch(block * block, Complex(bits));
  for (int k = 0; k <= N; ++k) {
    Complex s = s0 + static_cast<long>(k);
    Complex v(Real(1L, bits));
    for (int m = 0; m <= N; ++m) {
      poch[static_cast<std::size_t>(k) * block + m] = v;
      v *= s + static_cast<long>(m);
      v /= static_cast<long>(m + 1);
    }
  }
  // W_p = lambda^{-(2beta+p)} * (zeta(2beta+p, n0) or n^{-(2beta+p)}) per distinct digit set
  std::map<std::pair<bool, long>, std::vector<Complex>> weights;
  auto weight_table = [&](const markov::TransitionSet& set) -> const std::vector<Complex>& {
    auto key = std::make_pair(set.ray(), set.n0);
    auto it = weights.find(key);
    if (it != weights.end()) return it->second;
    std::vector<Complex> w;
    Real n0(set.n0, bits);
    Complex single_pow = set.ray() ? Complex(bits) : mp::pow(n0, -s0);
    Real inv_n0 = Real(1L, bits) / n0;
    for (int p = 0; p <= 2 * N; ++p) {
      Complex s = s0 + static_cast<long>(p);
      Complex z(bits);
      if (set.ray()) {
        if (s.im().is_zero() && s.re() == 1.0)
          throw mp::PoleError("assemble: Hurwitz pole at 2beta+k+m = 1 (k+m=" + std::to_string(p) + ")");
        z = mp::hurwitz_zeta(s, n0);
      } else {
        z = single_pow;
        single_pow *= inv_n0;
      }
      w.push_back(z * lambda_pow[static_cast<std::size_t>(p)]);
    }
    return weights.emplace(key, std::move(w)).first->second;
  };

  const markov::NijTable table = markov::build_nij(group);
  for (int i : markov::labels(kappa)) {
    for (int j : markov::labels(kappa)) {
      const markov::TransitionSet& set = table.at(i, j);
      if (set.empty()) continue;
      const std::vector<Complex>& w = weight_table(set);
      const bool alternate = !set.negative();
      for (int m = 0; m <= N; ++m) {
        const std::size_t row = out.index(i, m, kappa);
        for (int k = 0; k <= N; ++k) {
          Complex value = poch[static_cast<std::size_t>(k) * block + m] * w[static_cast<std::size_t>(k + m)];
          if (alternate && (k + m) % 2 == 1) value = -value;
          out.entries(row, out.index(j, k, kappa)) = std::move(value);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Periodic point sums

namespace {

// N^{-beta} / (1 - N^{-1}) for the class with |trace| = t > 2.
Complex class_weight(const Real& t, const Complex& beta) {
  Real disc = t * t - 4L;
  if (disc.sign() <= 0) throw std::logic_error("periodic_point_sum: admissible cycle is not hyperbolic");
  Real u = Real(2L, t.bits()) / (t + mp::sqrt(disc));  // 1 / N^{1/2}
  Complex value = mp::pow(u, beta * 2L);
  return value / (Real(1L, t.bits()) - u * u);
}

// Coefficients D_J of N^{-beta}/(1-N^{-1}) = sum_J D_J t^{-2beta-2J}.
std::vector<Complex> trace_expansion(const Complex& beta, int count) {
  const mpfr_prec_t bits = beta.bits();
  std::vector<Complex> D(static_cast<std::size_t>(count), Complex(bits));
  for (int m = 0; m < count; ++m) {
    // u^a = sum_j c_j(a) t^{-a-2j}, a = 2beta + 2m
    Complex a = beta * 2L + static_cast<long>(2 * m);
    Complex c(Real(1L, bits));
    for (int j = 0; m + j < count; ++j) {
      D[static_cast<std::size_t>(m + j)] += c;
      Complex next = c * (a + static_cast<long>(2 * j + 1)) * (a + static_cast<long>(2 * j));
      c = next / ((a + static_cast<long>(j + 1)) * static_cast<long>(j + 1));
    }
  }
  return D;
}

// Coefficients E_K with sum_J D_J (P - 2 sign)^{-2beta-2J} = sum_K E_K P^{-2beta-K}.
std::vector<Complex> product_expansion(const Complex& beta, const std::vector<Complex>& D, int count, int sign) {
  const mpfr_prec_t bits = beta.bits();
  std::vector<Complex> E(static_cast<std::size_t>(count), Complex(bits));
  for (int J = 0; 2 * J < count; ++J) {
    Complex p = beta * 2L + static_cast<long>(2 * J);
    Complex term = D[static_cast<std::size_t>(J)];  // D_J (p)_i/i! (2 sign)^i
    for (int i = 0; 2 * J + i < count; ++i) {
      E[static_cast<std::size_t>(2 * J + i)] += term;
      term *= p + static_cast<long>(i);
      term *= static_cast<long>(2 * sign);
      term /= static_cast<long>(i + 1);
    }
  }
  return E;
}

struct Digits {
  bool ray;
  long n0;
  int sign;
};

Digits digits_of(const markov::TransitionSet& s) { return {s.ray(), s.n0, s.negative() ? -1 : 1}; }

long ceil_div(long a, long b) { return (a + b - 1) / b; }

// Sums of n^{-r}, r = 2beta + K, with memoised n^{-2beta} and Hurwitz values.
class PowerSums {
 public:
  explicit PowerSums(const Complex& beta) : two_beta_(beta * 2L), bits_(beta.bits()) {}

  Complex power(long n, int K) {
    auto it = base_.find(n);
    if (it == base_.end()) it = base_.emplace(n, mp::pow(Real(n, bits_), -two_beta_)).first;
    return it->second * mp::pow(Real(n, bits_), -static_cast<long>(K));
  }

  Complex zeta(int K, long a) {
    auto key = std::make_pair(K, a);
    auto it = zeta_.find(key);
    if (it != zeta_.end()) return it->second;
    Complex value = mp::hurwitz_zeta(two_beta_ + static_cast<long>(K), Real(a, bits_));
    return zeta_.emplace(key, value).first->second;
  }

  // zeta(r, c) from zeta(r, b0) for c >= b0
  Complex zeta_from(int K, long b0, long c) {
    Complex value = zeta(K, b0);
    for (long n = b0; n < c; ++n) value -= power(n, K);
    return value;
  }

 private:
  Complex two_beta_;
  mpfr_prec_t bits_;
  std::map<long, Complex> base_;
  std::map<std::pair<int, long>, Complex> zeta_;
};

// sum over a in A, b in B with a*b >= cut of (a b)^{-r}
Complex product_region_sum(PowerSums& ps, int K, const Digits& A, const Digits& B, long cut, mpfr_prec_t bits) {
  if (!A.ray && !B.ray) return A.n0 * B.n0 >= cut ? ps.power(A.n0, K) * ps.power(B.n0, K) : Complex(bits);
  if (!A.ray) return ps.power(A.n0, K) * ps.zeta_from(K, B.n0, std::max(B.n0, ceil_div(cut, A.n0)));
  if (!B.ray) return ps.power(B.n0, K) * ps.zeta_from(K, A.n0, std::max(A.n0, ceil_div(cut, B.n0)));
  long a_star = std::max(A.n0, ceil_div(cut, B.n0));
  Complex sum = ps.zeta_from(K, A.n0, a_star) * ps.zeta(K, B.n0);
  for (long a = A.n0; a < a_star; ++a) sum += ps.power(a, K) * ps.zeta_from(K, B.n0, std::max(B.n0, ceil_div(cut, a)));
  return sum;
}

// Direct sum over cycles with digit-magnitude product below cut.
void enumerate_cycles(const GroupParams& g, const markov::NijTable& t, const Complex& beta, int l, long cut,
                      Complex& sum, std::size_t& count) {
  const auto all = markov::labels(g.kappa);
  std::vector<long> word;
  std::function<void(int, int, long)> extend = [&](int start, int current, long product) {
    if (static_cast<int>(word.size()) == l) {
      if (current != start) return;
      Real trace = hecke::word_to_matrix(word, g).trace();
      sum += class_weight(mp::abs(trace), beta);
      ++count;
      return;
    }
    for (int next : all) {
      if (static_cast<int>(word.size()) == l - 1 && next != start) continue;
      const markov::TransitionSet& s = t.at(current, next);
      if (s.empty()) continue;
      for (long mag = s.n0; product * mag < cut; ++mag) {
        word.push_back(s.negative() ? -mag : mag);
        extend(start, next, product * mag);
        word.pop_back();
        if (!s.ray()) break;
      }
    }
  };
  for (int i : all) extend(i, i, 1);
}

}  // namespace

TraceSum periodic_point_sum(const GroupParams& g, const markov::NijTable& t, const Complex& beta_in, int l,
                            long product_cut) {
  if (l < 1) throw std::invalid_argument("periodic_point_sum: l must be positive");
  if (beta_in.re() <= 0.5) throw std::domain_error("periodic_point_sum: requires Re beta > 1/2");
  const mpfr_prec_t out_bits = beta_in.bits();
  const mpfr_prec_t bits = out_bits + 32;
  Complex beta = beta_in.with_bits(bits);
  hecke::GroupParams group = hecke::make_group(g.q, bits);
  Real lambda = group.lambda;

  // the expansions need the threshold trace safely above their radius
  const double lambda_l = std::pow(lambda.to_double(), l);
  const double min_threshold = l == 1 ? 8.0 : 16.0;
  product_cut = std::max(product_cut, static_cast<long>(std::ceil(min_threshold / lambda_l)));

  TraceSum result{Complex(bits), Real(0L, bits), 0};
  enumerate_cycles(group, t, beta, l, product_cut, result.value, result.direct_terms);

  const auto all = markov::labels(group.kappa);
  const double threshold = static_cast<double>(product_cut) * lambda_l;
  if (l == 1) {
    const double ratio = std::log(threshold / 2.0) * 2.0;
    const int count = static_cast<int>(std::ceil(static_cast<double>(bits) * std::log(2.0) / ratio)) + 10;
    std::vector<Complex> D = trace_expansion(beta, count);
    PowerSums ps(beta);
    for (int i : all) {
      const markov::TransitionSet& s = t.at(i, i);
      if (s.empty()) continue;
      if (!s.ray()) {
        if (s.n0 >= product_cut) result.value += class_weight(lambda * s.n0, beta);
        continue;
      }
      long split = std::max(s.n0, product_cut);
      Complex lambda_factor = mp::pow(lambda, -(beta * 2L));
      Real inv_lambda2 = Real(1L, bits) / (lambda * lambda);
      for (int J = 0; J < count; ++J) {
        result.value += D[static_cast<std::size_t>(J)] * lambda_factor * ps.zeta(2 * J, split);
        lambda_factor *= inv_lambda2;
      }
    }
  } else if (l == 2) {
    const double ratio = std::log(threshold / 4.0);
    const int count = static_cast<int>(std::ceil(static_cast<double>(bits) * std::log(2.0) / ratio)) + 10;
    std::vector<Complex> D = trace_expansion(beta, count / 2 + 1);
    std::vector<Complex> E_same = product_expansion(beta, D, count, 1);
    std::vector<Complex> E_mixed = product_expansion(beta, D, count, -1);
    PowerSums ps(beta);
    Real inv_lambda2 = Real(1L, bits) / (lambda * lambda);
    Complex base_factor = mp::pow(inv_lambda2, beta * 2L);
    for (int i : all) {
      for (int j : all) {
        const markov::TransitionSet& s1 = t.at(i, j);
        const markov::TransitionSet& s2 = t.at(j, i);
        if (s1.empty() || s2.empty()) continue;
        Digits A = digits_of(s1), B = digits_of(s2);
        const auto& E = A.sign * B.sign > 0 ? E_same : E_mixed;
        Complex lambda_factor = base_factor;  // lambda^{-2(2beta+K)}
        for (int K = 0; K < count; ++K) {
          result.value += E[static_cast<std::size_t>(K)] * lambda_factor * product_region_sum(ps, K, A, B, product_cut, bits);
          lambda_factor *= inv_lambda2;
        }
      }
    }
  } else {
    // truncated: tail ~ cut^{1-2Re beta} log^{l-1}(cut) / (2Re beta - 1), scaled by lambda^{-2l Re beta}
    double sigma = 2.0 * beta.re().to_double();
    double cut = static_cast<double>(product_cut);
    double tail = std::pow(cut, 1.0 - sigma) * std::pow(std::log(cut) + 1.0, l - 1) / (sigma - 1.0) *
                  std::pow(lambda_l, -sigma) * 2.0 * group.kappa;
    result.tail_estimate = Real(tail, bits);
  }
  result.value = result.value.with_bits(out_bits);
  result.tail_estimate = result.tail_estimate.with_bits(out_bits);
  return result;
}

Complex fixed_point_trace(const GroupParams& g, const Complex& beta, int l) {
  const double lambda_l = std::pow(g.lambda.to_double(), l);
  long cut = l <= 2 ? static_cast<long>(std::ceil(64.0 / lambda_l)) : 400;
  return periodic_point_sum(g, markov::build_nij(g), beta, l, cut).value;
}

nlohmann::json to_json(const TransferMatrix& m) {
  const int digits = m.digits;
  nlohmann::json out;
  out["q"] = m.q;
  out["beta"] = mp::to_string(m.beta, digits);
  out["N"] = m.N;
  out["WP"] = digits;
  out["size"] = m.entries.size();
  auto& entries = out["entries"] = nlohmann::json::array();
  for (std::size_t r = 0; r < m.entries.size(); ++r)
    for (std::size_t c = 0; c < m.entries.size(); ++c) {
      const Complex& z = m.entries(r, c);
      entries.push_back({mp::to_string(z.re(), digits), mp::to_string(z.im(), digits)});
    }
  return out;
}

}  // namespace selberg::transfer
