#pragma once

// Taylor-coefficient matrix of the transfer operator L_beta on the Markov
// partition, and periodic-point trace sums Tr L^l for checking it.

#include <vector>

#include <json.hpp>

#include "selberg/markov.hpp"

namespace selberg::transfer {

using hecke::GroupParams;
using mp::Complex;
using mp::Real;

/// Dense complex matrix, row-major.
class Matrix {
 public:
  Matrix(std::size_t n, mpfr_prec_t bits);

  std::size_t size() const { return n_; }
  mpfr_prec_t bits() const { return bits_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  Complex trace() const;
  /// Tr(M^l) by repeated multiplication (l <= 2 uses the direct index sums).
  Complex trace_of_power(int l) const;
  Matrix operator*(const Matrix& rhs) const;

 private:
  std::size_t n_;
  mpfr_prec_t bits_;
  std::vector<Complex> data_;
};

/// A^{(N,N)}: the kappa_N x kappa_N matrix, kappa_N = 2 kappa (N+1). Row and
/// column (i, n) sit at position(i) * (N+1) + n.
struct TransferMatrix {
  int q;
  Complex beta;
  int N;
  int digits;  // working precision WP
  Matrix entries;

  std::size_t index(int label, int order, int kappa) const {
    return static_cast<std::size_t>(markov::position(label, kappa) * (N + 1) + order);
  }
};

/// Ray column coefficient: ((-1)^{k+m} / (m! lambda^{2beta+k+m})) (2beta+k)_m zeta(2beta+k+m, n0).
/// Throws mp::PoleError when 2beta+k+m = 1.
Complex alpha_ray(int m, int k, const Complex& beta, long n0, const GroupParams& g);
/// Singleton coefficient: the same with zeta replaced by n^{-2beta-k-m}.
Complex alpha_single(int m, int k, const Complex& beta, long n, const GroupParams& g);

/// Fills every block from the digit-set table. Negative digit sets use the
/// branch (|n| lambda - x)^{-2beta}, which drops the (-1)^{k+m} factor.
TransferMatrix assemble(const GroupParams& g, const Complex& beta, int N, int digits);

/// sum over admissible l-cycles of N^{-beta} / (1 - N^{-1}), N the norm of the
/// cycle's word. Cycles with |n_1 ... n_l| < product_cut are summed directly;
/// for l <= 2 the rest is added through asymptotic expansions in Hurwitz zeta
/// values, for l >= 3 every digit is truncated at |n| <= product_cut.
struct TraceSum {
  Complex value;
  Real tail_estimate;  // zero when the expansion closes the sum
  std::size_t direct_terms;
};
TraceSum periodic_point_sum(const GroupParams& g, const markov::NijTable& table, const Complex& beta, int l,
                            long product_cut);

/// periodic_point_sum with a cutoff chosen from the precision.
Complex fixed_point_trace(const GroupParams& g, const Complex& beta, int l);

/// JSON header (q, beta, N, WP) plus row-major decimal-string entries.
nlohmann::json to_json(const TransferMatrix& m);

}  // namespace selberg::transfer
