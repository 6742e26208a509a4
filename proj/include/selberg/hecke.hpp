#pragma once

// Hecke triangle groups G_q: the lambda-fraction interval map, word algebra in
// the generators S and T, and the special hyperbolic point r.

#include <optional>
#include <string>
#include <vector>

#include "selberg/mp.hpp"

namespace selberg::hecke {

using mp::Complex;
using mp::Real;

enum class Parity { Even, Odd };

struct GroupParams {
  int q;
  Real lambda;  // 2 cos(pi/q)
  Parity parity;
  int h;      // (q-2)/2 for even q, (q-3)/2 for odd q
  int kappa;  // number of partition intervals on each side of 0

  mpfr_prec_t bits() const { return lambda.bits(); }
  bool even() const { return parity == Parity::Even; }
};

/// Throws std::invalid_argument for q < 3.
GroupParams make_group(int q, mpfr_prec_t bits);

/// Tolerance 2^(40 - bits), roughly 10^(12 - WP); used for cusp and period detection.
Real default_tolerance(mpfr_prec_t bits);

/// floor(x / lambda + 1/2).
long nearest_multiple(const Real& x, const GroupParams& g);

struct FqStep {
  Real x;      // F_q(x)
  long digit;  // nearest_multiple(-1/x)
};

/// One step of F_q(x) = -1/x - a lambda on I_q = [-lambda/2, lambda/2].
/// Throws std::domain_error for x = 0 or x outside I_q.
FqStep fq_step(const Real& x, const GroupParams& g);

enum class FractionKind { Terminating, Preperiodic, Truncated };

struct LambdaFraction {
  long a0 = 0;
  std::vector<long> digits;  // a_1, a_2, ...
  FractionKind kind = FractionKind::Truncated;
  std::size_t preperiod = 0;  // for Preperiodic: digits[preperiod..] repeat
  std::size_t period = 0;

  std::string to_string() const;
};

/// Stops early as Truncated when a digit would exceed 2^60 in magnitude.
LambdaFraction expand(const Real& x, const GroupParams& g, std::size_t max_len, const Real& tol);

/// T^{a0} S T^{a1} ... S T^{an} (0) using the first n digits (all if n exceeds the length).
Real evaluate(const LambdaFraction& f, const GroupParams& g, std::size_t n);

enum class MapClass { Elliptic, Parabolic, Hyperbolic };

/// Element of PSL(2, R): a 2x2 matrix of determinant 1 identified with its negative.
class MoebiusMap {
 public:
  MoebiusMap(Real a, Real b, Real c, Real d);
  static MoebiusMap identity(mpfr_prec_t bits);
  static MoebiusMap S(mpfr_prec_t bits);
  static MoebiusMap T(long power, const GroupParams& g);
  /// S T^n : x -> -1/(x + n lambda).
  static MoebiusMap ST(long n, const GroupParams& g);

  const Real& a() const { return a_; }
  const Real& b() const { return b_; }
  const Real& c() const { return c_; }
  const Real& d() const { return d_; }

  Real trace() const { return a_ + d_; }
  Real det() const { return a_ * d_ - b_ * c_; }
  MapClass classify(const Real& tol) const;

  Real apply(const Real& x) const;
  Complex apply(const Complex& z) const;
  /// d/dx of the action: 1 / (c x + d)^2.
  Real derivative(const Real& x) const;

  MoebiusMap inverse() const;
  MoebiusMap& operator*=(const MoebiusMap& rhs);
  friend MoebiusMap operator*(MoebiusMap lhs, const MoebiusMap& rhs) { return lhs *= rhs; }

  /// Equality up to the overall sign, entrywise within tol.
  bool equivalent(const MoebiusMap& other, const Real& tol) const;

 private:
  void renormalize();

  Real a_, b_, c_, d_;
  int compositions_ = 0;
};

/// Product of S T^{a_k} over the digits, left to right.
MoebiusMap word_to_matrix(const std::vector<long>& digits, const GroupParams& g);

/// N with |tr| = N^{1/2} + N^{-1/2}. Throws std::domain_error unless hyperbolic.
Real norm_of(const MoebiusMap& m);
/// Same from a trace value.
Real norm_from_trace(const Real& trace);

/// Attracting fixed point of a hyperbolic map (the one with |m'(x)| < 1).
Real attracting_fixed_point(const MoebiusMap& m);

struct RPointData {
  std::vector<long> word;  // one period of the lambda-fraction of r
  Real r;                  // attracting fixed point of A_r
  LambdaFraction fraction;
  MoebiusMap A_r;
  Real norm;  // N(A_r)
  // Odd q only: R - lambda for the positive root R of R^2 + (2-lambda)R - c,
  // with c = 2 (the displayed equation taken literally) and c = 1.
  std::optional<Real> r_literal;
  std::optional<Real> r_corrected;
};

/// Periodic digit pattern: [1^{h-1}, 2] for even q, [1^h, 2, 1^{h-1}, 2] for odd q,
/// with q = 3 reduced to [3] (the h = 0 pattern collapses, see r_point).
std::vector<long> r_pattern(const GroupParams& g);

RPointData r_point(const GroupParams& g);

}  // namespace selberg::hecke
