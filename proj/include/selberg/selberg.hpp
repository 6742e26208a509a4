#pragma once

// Z_q(s) from two truncated transfer spectra: eigenvalues that persist
// between orders N and M are kept, the Fredholm determinant over them is
// divided by the correction determinant of the r-point map.

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "selberg/eigen.hpp"

namespace selberg::zeta {

using hecke::GroupParams;
using mp::Complex;
using mp::Real;

struct MatchedPair {
  Complex at_n;  // lambda_{N,i}
  Complex at_m;  // lambda_{M,j}, the accepted value
  Real delta;
};

struct FilteredSpectrum {
  std::vector<MatchedPair> pairs;  // non-increasing |at_m|
  bool escalate = false;

  std::size_t count() const { return pairs.size(); }
  Real tail() const;       // |last accepted|, zero when empty
  Real max_delta() const;  // zero when empty
  std::vector<Real> deltas() const;
};

/// delta_ij = |a - b| / (|a| + |b|); zero when both vanish.
Real relative_difference(const Complex& a, const Complex& b);

/// Each eigenvalue at order N, in order, takes the closest unused eigenvalue
/// at order M and keeps it if the relative difference is below `delta`.
FilteredSpectrum match_spectra(const std::vector<Complex>& at_n, const std::vector<Complex>& at_m, double delta);

/// prod (1 - lambda) over the accepted values.
Complex fredholm_product(const FilteredSpectrum& f);

/// prod_{n>=0} (1 - nu^{-(n+beta)}) with nu the norm of the r-point map,
/// stopped once a factor is within `tol` of 1.
Complex det_K(const GroupParams& g, const Complex& beta, const Real& tol);
Complex det_K(const Real& nu, const Complex& beta, const Real& tol);

struct BreakRule {
  double floor_factor = 100.0;  // multiples of 2^-bits
};

/// True when some delta falls below floor_factor * 2^-bits: the matched
/// eigenvalues agree to the last bits, so accuracy is capped by the working
/// precision and more digits are needed before N can help.
bool detect_precision_break(const std::vector<Real>& deltas, mpfr_prec_t bits, const BreakRule& rule = {});
bool detect_precision_break(const FilteredSpectrum& f, mpfr_prec_t bits, const BreakRule& rule = {});

struct ZetaValue;

struct ZetaConfig {
  int n0 = 50;
  int m_offset = 3;
  double delta = 1e-7;
  double eps = 1e-7;
  int digits = 50;
  int n_max = 400;
  int digits_max = 400;
  double n_growth = 1.5;
  int digits_step = 50;
  BreakRule rule;
  bool escalate = true;  // false: one (N, M) pass at the given order and precision
  linalg::EigenOptions eigen;
  /// Called with the state of the finished pass whenever N or WP is raised;
  /// returning false stops before the next pass.
  std::function<bool(const ZetaValue&)> on_escalate;
};

class PoleProximityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ZetaValue {
  Complex s{64};
  Complex value{64};
  Real error_estimate{0L, 64};
  bool converged = false;
  int N = 0;
  int M = 0;
  int digits = 0;
  std::size_t K = 0;
  Real tail{0L, 64};
  Real max_delta{0L, 64};
  int n_escalations = 0;
  int digit_escalations = 0;
  // Set by the delta floor, and in escalating runs also when raising N at
  // fixed WP lowered K.
  bool precision_break = false;
  Complex fredholm{64};
  Complex det_k{64};
  std::vector<Complex> accepted;
};

/// Spectra at (N, WP) and (M, WP), computed concurrently.
std::pair<linalg::Spectrum, linalg::Spectrum> spectra(const GroupParams& g, const Complex& s, int N, int M, int digits,
                                                      const linalg::EigenOptions& options);

ZetaValue z_value(int q, const Complex& s, const ZetaConfig& cfg);

nlohmann::json to_json(const ZetaValue& z);
nlohmann::json to_json(const FilteredSpectrum& f, int digits);

}  // namespace selberg::zeta
