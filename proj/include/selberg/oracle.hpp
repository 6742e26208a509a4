#pragma once

// Ground truth for Re s > 1: primitive periodic digit words of the interval
// map, their norms, and the Euler product over them.

#include <string>
#include <vector>

#include "selberg/markov.hpp"

namespace selberg::oracle {

using hecke::GroupParams;
using mp::Complex;
using mp::Real;

struct Geodesic {
  std::vector<long> word;  // least rotation
  Real norm;
  Real length;  // log norm
  // The mirror image of the r-point word. The transfer determinant counts it
  // besides the r-word itself although both give one conjugacy class; the
  // Euler product skips it.
  bool mirrored_r = false;
};

struct GeodesicCatalog {
  int q = 0;
  std::size_t max_length = 0;
  double max_norm = 0.0;
  std::vector<Geodesic> entries;  // sorted by norm

  std::size_t size() const { return entries.size(); }
  /// Entries excluded from the Euler product.
  std::vector<const Geodesic*> excluded() const;
};

/// Primitive admissible cyclic words of length <= L and norm <= X. The
/// search prunes with the lower bound N >= prod max(4/lambda^2, lambda^2 (|n| - 1/2)^2).
GeodesicCatalog enumerate_primitive(const GroupParams& g, std::size_t L, double X);

/// True when no proper rotation of the word is lexicographically <= it.
bool is_lyndon(const std::vector<long>& word);
std::vector<long> least_rotation(const std::vector<long>& word);

struct EulerProduct {
  Complex value;
  double tail_estimate;  // heuristic X^{1-sigma} / ((sigma-1) log X)
  std::size_t classes;
};

/// exp(-sum_{P} sum_{m>=1} N^{-ms} / (m (1 - N^{-m}))) over the catalog.
/// Throws std::domain_error for Re s <= 1.
EulerProduct euler_product_z(const GroupParams& g, const Complex& s, const GeodesicCatalog& catalog);

/// Sum over admissible l-cycles (every rotation counted) of
/// N^{-beta} / (1 - N^{-1}): cycles with |n_1 ... n_l| < n_cut directly, the
/// rest (l <= 2) in closed form through Hurwitz zeta values.
/// Throws std::domain_error for Re beta <= 1/2.
Complex word_trace_sum(const GroupParams& g, const Complex& beta, int l, long n_cut);

/// "word;norm;length" with comma-separated digits.
std::string catalog_csv(const GeodesicCatalog& catalog, int digits);

}  // namespace selberg::oracle
