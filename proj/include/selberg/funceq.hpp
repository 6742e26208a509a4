#pragma once

// The functional equation Z(1-s) = c phi(s) Psi(s) Z(s): Psi_q by quadrature,
// the explicit scattering function for q = 3, tabulated phi for larger q,
// and the real-valued rotation of Z along the critical line.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "selberg/hecke.hpp"

namespace selberg::funceq {

using hecke::GroupParams;
using mp::Complex;
using mp::Real;

/// Raised when the straight integration path passes within 1e-3 of a pole
/// of the Psi integrands (the real half-integers).
class PathError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class MissingDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Psi_q(s) with the integrals taken along [0, s - 1/2]. The elliptic part
/// sums over both elliptic fixed points, of orders q and 2.
Complex psi_q(const GroupParams& g, const Complex& s, const Real& tol);

/// sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s)); -1 at s = 1/2.
Complex phi3(const Complex& s);

/// Gauss-Legendre rule on [0, 1]; nodes and weights are cached per (n, bits).
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};
const GaussRule& gauss_legendre(int n, mpfr_prec_t bits);

/// Adaptive integral of f over [0, 1]: panels are halved until the
/// difference between one panel and its two halves drops below tol.
Complex integrate_unit(const std::function<Complex(const Real&)>& f, const Real& tol, mpfr_prec_t bits,
                       int max_depth = 40);

struct PhiTable {
  int q = 0;
  int digits = 0;
  std::string source = "external-file";
  std::vector<std::pair<Real, Complex>> entries;  // (t, phi(1/2 + it))

  /// The entry whose t lies within tol of the argument.
  std::optional<Complex> lookup(const Real& t, double tol = 1e-12) const;
  /// Largest ||phi| - 1| over the entries.
  Real unitarity_defect() const;
};

/// Header line "q precision" then one "t re im" line per entry; blank lines
/// and lines starting with '#' are skipped. Throws MissingDataError when the
/// file cannot be opened, std::runtime_error on malformed content.
PhiTable load_phi_table(const std::filesystem::path& path);
void save_phi_table(const PhiTable& table, const std::filesystem::path& path);
/// phi3 sampled on the grid, tagged explicit-q3.
PhiTable phi3_table(const std::vector<double>& t, int digits);

/// phi_q(s): phi3 for q = 3, otherwise a table lookup on the critical line.
/// Throws MissingDataError when neither applies.
Complex phi_reference(int q, const Complex& s, const PhiTable* table);

/// phi~ = Z(1-s) / (Z(s) Psi(s)).
Complex phi_estimate(const GroupParams& g, const Complex& s, const Complex& z_s, const Complex& z_1ms,
                     const Real& tol);
/// |phi~ - c phi_ref|.
Real phi_test(const GroupParams& g, const Complex& s, const Complex& z_s, const Complex& z_1ms, const Complex& phi_ref,
              int c = 1);

struct CurlyZPoint {
  Real t;
  Real value;       // Re(Z e^{-i Theta})
  Real im_residue;  // |Im(Z e^{-i Theta})|
  Real error_estimate;
};

struct CurlyZInput {
  Real t;
  Complex z;  // Z(1/2 + it)
  Real error_estimate;
};

/// Theta(t) = -arg(c phi Psi)/2 unwrapped along the grid, so that Z e^{-i Theta} is real. Between nodes whose
/// principal phases differ by pi/2 or more the phase is resampled at
/// bisection points, up to `max_refine` levels, before giving up.
std::vector<Real> unwrapped_theta(const GroupParams& g, const std::vector<Real>& t, const PhiTable* table,
                                  const Real& tol, int c = 1, int max_refine = 12);

std::vector<CurlyZPoint> curly_z(const GroupParams& g, const std::vector<CurlyZInput>& values, const PhiTable* table,
                                 const Real& tol, int c = 1);

/// "t, curly_z, im_residue, error_estimate" with a header line.
std::string curly_z_csv(const std::vector<CurlyZPoint>& points, int digits);

}  // namespace selberg::funceq
