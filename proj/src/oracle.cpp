#include "selberg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "selberg/transfer.hpp"

namespace selberg::oracle {

bool is_lyndon(const std::vector<long>& word) {
  const std::size_t n = word.size();
  if (n == 0) return false;
  for (std::size_t r = 1; r < n; ++r) {
    // compare rotation r with the word
    for (std::size_t k = 0; k < n; ++k) {
      long a = word[(r + k) % n], b = word[k];
      if (a < b) return false;
      if (a > b) break;
      if (k + 1 == n) return false;  // equal rotation: a proper power
    }
  }
  return true;
}

std::vector<long> least_rotation(const std::vector<long>& word) {
  std::vector<long> best = word, rot = word;
  for (std::size_t r = 1; r < word.size(); ++r) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

std::vector<const Geodesic*> GeodesicCatalog::excluded() const {
  std::vector<const Geodesic*> out;
  for (const auto& e : entries)
    if (e.mirrored_r) out.push_back(&e);
  return out;
}

GeodesicCatalog enumerate_primitive(const GroupParams& g, std::size_t L, double X) {
  if (L < 1 || !(X > 1.0)) throw std::invalid_argument("enumerate_primitive: need L >= 1 and X > 1");
  const markov::NijTable table = markov::build_nij(g);
  const auto labels = markov::labels(g.kappa);
  const double lambda = g.lambda.to_double();
  const double log_x = std::log(X);
  auto log_factor = [lambda](long mag) {
    double digit = lambda * (static_cast<double>(mag) - 0.5);
    return std::log(std::max(4.0 / (lambda * lambda), digit * digit));
  };

  std::map<std::vector<long>, Geodesic> found;
  std::vector<long> word;
  std::function<void(int, int, double)> extend = [&](int start, int current, double log_bound) {
    for (int next : labels) {
      const markov::TransitionSet& s = table.at(current, next);
      if (s.empty()) continue;
      for (long mag = s.n0;; ++mag) {
        // the bound grows with |n|, so the first failure ends the ray
        const double bound = log_bound + log_factor(mag);
        if (bound > log_x) break;
        word.push_back(s.negative() ? -mag : mag);
        if (next == start && is_lyndon(word) && !found.contains(word)) {
          Real trace = mp::abs(hecke::word_to_matrix(word, g).trace());
          if (!(trace > 2L)) throw std::logic_error("enumerate_primitive: admissible word is not hyperbolic");
          Real norm = hecke::norm_from_trace(trace);
          if (norm <= X) found.emplace(word, Geodesic{word, norm, mp::log(norm), false});
        }
        if (word.size() < L) extend(start, next, bound);
        word.pop_back();
        if (!s.ray()) break;
      }
    }
  };
  for (int start : labels) extend(start, start, 0.0);

  GeodesicCatalog catalog;
  catalog.q = g.q;
  catalog.max_length = L;
  catalog.max_norm = X;
  std::vector<long> mirror = hecke::r_pattern(g);
  for (auto& d : mirror) d = -d;
  mirror = least_rotation(mirror);
  for (auto& [w, geo] : found) {
    geo.mirrored_r = w == mirror;
    catalog.entries.push_back(std::move(geo));
  }
  std::sort(catalog.entries.begin(), catalog.entries.end(), [](const Geodesic& a, const Geodesic& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.word < b.word;
  });
  return catalog;
}

EulerProduct euler_product_z(const GroupParams& g, const Complex& s_in, const GeodesicCatalog& catalog) {
  if (s_in.re() <= 1L) throw std::domain_error("euler_product_z: requires Re s > 1");
  const mpfr_prec_t bits = std::max(s_in.bits(), g.bits());
  const Complex s = s_in.with_bits(bits);
  const double sigma = s.re().to_double();
  Real tol(1L, 64);
  mpfr_mul_2si(tol.raw(), tol.raw(), -static_cast<long>(bits), MPFR_RNDN);

  Complex log_z(bits);
  std::size_t classes = 0;
  for (const auto& e : catalog.entries) {
    if (e.mirrored_r) continue;
    ++classes;
    Real log_n = e.length.with_bits(bits);
    Complex step = mp::exp(-(s * log_n));       // N^{-s}
    Real inv_n = mp::exp(-log_n);               // N^{-1}
    Complex power = step;                        // N^{-ms}
    Real inv_power = inv_n;                      // N^{-m}
    for (long m = 1;; ++m) {
      log_z -= power / ((1L - inv_power) * m);
      if (mp::abs(power) < tol) break;
      power *= step;
      inv_power *= inv_n;
    }
  }
  const double x = catalog.max_norm;
  double tail = std::pow(x, 1.0 - sigma) / ((sigma - 1.0) * std::log(x));
  return {mp::exp(log_z).with_bits(s_in.bits()), tail, classes};
}

Complex word_trace_sum(const GroupParams& g, const Complex& beta, int l, long n_cut) {
  return transfer::periodic_point_sum(g, markov::build_nij(g), beta, l, n_cut).value;
}

std::string catalog_csv(const GeodesicCatalog& catalog, int digits) {
  std::ostringstream out;
  out << "word;norm;length\n";
  for (const auto& e : catalog.entries) {
    for (std::size_t k = 0; k < e.word.size(); ++k) out << (k ? "," : "") << e.word[k];
    out << ';' << mp::to_string(e.norm, digits) << ';' << mp::to_string(e.length, digits) << '\n';
  }
  return out.str();
}

}  // namespace selberg::oracle
