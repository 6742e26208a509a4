#pragma once

// Dense nonsymmetric complex eigenvalues at arbitrary precision: diagonal
// balancing, Householder reduction to Hessenberg form and single-shift
// complex QR with Wilkinson shifts.

#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "selberg/transfer.hpp"

namespace selberg::linalg {

using mp::Complex;
using mp::Real;
using transfer::Matrix;

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Spectrum {
  std::vector<Complex> values;  // |lambda| descending, ties by arg ascending
  int q = 0;
  Complex beta{0.0, 0.0, 64};
  int N = 0;
  int digits = 0;
  Real residual_bound{0L, 64};  // largest deflation threshold used
  std::size_t iterations = 0;
};

struct EigenOptions {
  bool balance = true;
  /// Iteration budget per eigenvalue; the total budget is this times n.
  int iterations_per_eigenvalue = 40;
};

std::vector<Complex> eigenvalues(const Matrix& m, const EigenOptions& options, Real* residual = nullptr,
                                 std::size_t* iterations = nullptr);
Spectrum eigenvalues(const transfer::TransferMatrix& m, const EigenOptions& options = {});

/// In-place ordering used by Spectrum.
void sort_spectrum(std::vector<Complex>& values);

/// Diagonal similarity by powers of two; returns the log2 scale factors.
std::vector<long> balance(Matrix& m);
/// Unitary reduction to upper Hessenberg form (entries below the first
/// subdiagonal set to zero).
void hessenberg(Matrix& m);

/// det(M) by partial-pivoting elimination at the matrix precision.
Complex determinant(const Matrix& m);

struct CharPolyReport {
  Real trace_deviation;       // |sum lambda - tr M| / max(1, |tr M|)
  Real determinant_deviation;  // max over samples of relative |prod(z - lambda) - det(zI - M)|
  int samples = 0;
};

/// Compares the spectrum to tr M and, for n <= 60, to det(zI - M) at
/// `samples` pseudo-random points evaluated at twice the precision.
CharPolyReport char_poly_check(const Matrix& m, const std::vector<Complex>& values, int samples);

nlohmann::json to_json(const Spectrum& s);

}  // namespace selberg::linalg
