#pragma once

// Special functions needed by the transfer-operator pipeline: Bernoulli
// numbers, Pochhammer symbols, the complex Gamma function and the Hurwitz /
// Riemann zeta functions, all at a caller-chosen binary precision.

#include <filesystem>
#include <mutex>
#include <shared_mutex>
#include <map>
#include <vector>

#include <gmpxx.h>

#include "selberg/mp.hpp"

namespace selberg::mp {

/// Bernoulli numbers B_0..B_max as exact rationals, extended on demand.
///
/// Convention: B_1 = -1/2 and B_{2k+1} = 0 for k >= 1. Even-index values come
/// from the tangent-number recurrence, which only needs integer arithmetic.
/// Rounded values are memoised per (index, bits) and can be persisted to a
/// text file with one "index value precision" record per line.
class BernoulliCache {
 public:
  /// Process-wide instance shared by the zeta and gamma implementations.
  static BernoulliCache& global();

  /// Exact B_n.
  mpq_class exact(int n);
  /// B_n rounded to `bits`.
  Real value(int n, mpfr_prec_t bits);
  /// B_{2k} for k = 1..count, rounded to `bits` (index 0 holds B_2).
  std::vector<Real> even_values(int count, mpfr_prec_t bits);

  /// Number of exact values currently held (highest index + 1).
  int size() const;

  /// Reads records written by save(); a missing file is not an error.
  /// Returns the number of records accepted.
  int load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path, mpfr_prec_t bits, int max_index) const;

 private:
  void extend_to(int n);  // requires the unique lock

  mutable std::shared_mutex mutex_;
  std::vector<mpq_class> exact_;  // exact_[n] = B_n
  std::map<std::pair<int, mpfr_prec_t>, Real> rounded_;
};

/// x (x+1) ... (x+n-1); 1 for n = 0.
Complex pochhammer(const Complex& x, int n);
Real pochhammer(const Real& x, int n);

/// Gamma(s) for complex s off the non-positive integers (PoleError there).
/// Stirling series after shifting Re s above a precision-dependent threshold;
/// reflection for Re s < 1/2.
Complex gamma(const Complex& s);
/// log Gamma(s) for Re s >= 1/2 (principal branch of the Stirling series).
Complex log_gamma(const Complex& s);

/// Hurwitz zeta(s, a) = sum_{n>=0} (n+a)^{-s}, continued to s != 1, a > 0,
/// by Euler-Maclaurin summation. PoleError at s = 1, std::domain_error for a <= 0.
Complex hurwitz_zeta(const Complex& s, const Real& a);
/// Riemann zeta(s) = hurwitz_zeta(s, 1).
Complex riemann_zeta(const Complex& s);

}  // namespace selberg::mp
