#include <doctest.h>

#include <algorithm>
#include <set>

#include "selberg/oracle.hpp"

using namespace selberg;
using mp::Complex;
using mp::Real;

namespace {
constexpr mpfr_prec_t kBits = 128;

bool admissible(const markov::NijTable& t, const std::vector<long>& word, int kappa) {
  // some label cycle i_1 .. i_l with n_k in N(i_k, i_{k+1})
  for (int start : markov::labels(kappa)) {
    std::function<bool(std::size_t, int)> walk = [&](std::size_t k, int at) {
      if (k == word.size()) return at == start;
      for (int next : markov::labels(kappa))
        if (t.at(at, next).contains(word[k]) && walk(k + 1, next)) return true;
      return false;
    };
    if (walk(0, start)) return true;
  }
  return false;
}

// N^{-beta}/(1 - 1/N) from |trace|
Complex weight(const Real& trace, const Complex& beta) {
  Real n = hecke::norm_from_trace(trace);
  return mp::exp(-(beta * mp::log(n))) / (1L - Real(1L, kBits) / n);
}
}  // namespace

TEST_CASE("Lyndon words") {
  CHECK(oracle::is_lyndon({3}));
  CHECK_FALSE(oracle::is_lyndon({3, 3}));
  CHECK(oracle::is_lyndon({3, 4}));
  CHECK_FALSE(oracle::is_lyndon({4, 3}));
  CHECK(oracle::is_lyndon({-3, 2, 2}));
  CHECK_FALSE(oracle::is_lyndon({-3, 2, -3, 2}));
  CHECK(oracle::least_rotation({4, -2, 3}) == std::vector<long>{-2, 3, 4});
}

TEST_CASE("single-digit words for q = 3") {
  auto g = hecke::make_group(3, kBits);
  auto cat = oracle::enumerate_primitive(g, 1, 20.0);
  REQUIRE(cat.size() == 4);
  std::set<long> digits;
  for (const auto& e : cat.entries) digits.insert(e.word.at(0));
  CHECK(digits == std::set<long>{-4, -3, 3, 4});
  Real n3 = (Real(7L, kBits) + mp::sqrt(Real(45L, kBits))) / 2L;
  Real n4 = Real(7L, kBits) + mp::sqrt(Real(48L, kBits));
  CHECK(mp::abs(cat.entries[0].norm - n3) < 1e-30);
  CHECK(mp::abs(cat.entries[3].norm - n4) < 1e-30);
  CHECK(cat.excluded().size() == 1);
  CHECK(cat.excluded()[0]->word == std::vector<long>{-3});
}

TEST_CASE("catalog matches brute force over digit tuples") {
  auto g = hecke::make_group(3, kBits);
  auto table = markov::build_nij(g);
  const double X = 100.0;  // forces |n| <= 10 for q = 3
  auto cat = oracle::enumerate_primitive(g, 3, X);
  std::set<std::vector<long>> expected;
  std::vector<long> w;
  std::function<void(std::size_t)> all = [&](std::size_t len) {
    if (w.size() == len) {
      if (!oracle::is_lyndon(w) || !admissible(table, w, g.kappa)) return;
      Real t = mp::abs(hecke::word_to_matrix(w, g).trace());
      if (hecke::norm_from_trace(t) <= X) expected.insert(w);
      return;
    }
    for (long n = -10; n <= 10; ++n) {
      if (n == 0) continue;
      w.push_back(n);
      all(len);
      w.pop_back();
    }
  };
  for (std::size_t len = 1; len <= 3; ++len) all(len);
  std::set<std::vector<long>> got;
  for (const auto& e : cat.entries) got.insert(e.word);
  CHECK(got == expected);
}

TEST_CASE("catalog entries are hyperbolic classes") {
  for (int q : {3, 4, 5}) {
    auto g = hecke::make_group(q, kBits);
    auto cat = oracle::enumerate_primitive(g, 6, 500.0);
    CHECK(cat.size() > 10);
    for (std::size_t k = 1; k < cat.size(); ++k) CHECK(cat.entries[k - 1].norm <= cat.entries[k].norm);
    for (const auto& e : cat.entries) {
      CAPTURE(q);
      CHECK(oracle::is_lyndon(e.word));
      CHECK(mp::abs(e.length - mp::log(e.norm)) < 1e-35);
      auto w = e.word;
      for (std::size_t r = 0; r < w.size(); ++r) {
        auto m = hecke::word_to_matrix(w, g);
        CHECK(m.classify(hecke::default_tolerance(kBits)) == hecke::MapClass::Hyperbolic);
        CHECK(mp::abs(hecke::norm_of(m) / e.norm - 1L) < 1e-30);
        std::rotate(w.begin(), w.begin() + 1, w.end());
      }
    }
  }
}

TEST_CASE("Euler product") {
  auto g = hecke::make_group(3, kBits);
  auto cat = oracle::enumerate_primitive(g, 12, 1e3);
  // the product form prod_P prod_k (1 - N^{-s-k})
  Complex s(10.0, 0.0, kBits);
  auto e = oracle::euler_product_z(g, s, cat);
  Real product(1L, kBits);
  for (const auto& c : cat.entries) {
    if (c.mirrored_r) continue;
    for (long k = 0; k < 100; ++k) product *= 1L - mp::pow(c.norm, -(10L + k));
  }
  CHECK(mp::abs(e.value - Complex(product)) < 1e-35);
  CHECK(e.classes + 1 == cat.size());
  CHECK_THROWS_AS(oracle::euler_product_z(g, Complex(1.0, 3.0, kBits), cat), std::domain_error);
  // a larger cutoff moves less than the tail estimate
  auto bigger = oracle::euler_product_z(g, Complex(2.0, 0.0, kBits), oracle::enumerate_primitive(g, 20, 1e4));
  auto smaller = oracle::euler_product_z(g, Complex(2.0, 0.0, kBits), cat);
  CHECK(mp::abs(bigger.value - smaller.value) < 3.0 * smaller.tail_estimate);
}

TEST_CASE("word trace sums against brute-force enumeration") {
  // beta = 6: truncating each digit at 150 leaves < 1e-24
  auto g = hecke::make_group(3, kBits);
  auto table = markov::build_nij(g);
  Complex beta(6.0, 0.0, kBits);
  Complex one(kBits), two(kBits);
  for (long n = -150; n <= 150; ++n) {
    if (n != 0 && admissible(table, {n}, g.kappa))
      one += weight(mp::abs(hecke::word_to_matrix({n}, g).trace()), beta);
    for (long m = -150; m <= 150; ++m) {
      if (n == 0 || m == 0 || !admissible(table, {n, m}, g.kappa)) continue;
      two += weight(mp::abs(hecke::word_to_matrix({n, m}, g).trace()), beta);
    }
  }
  CHECK(mp::abs(oracle::word_trace_sum(g, beta, 1, 64) - one) < 1e-24);
  CHECK(mp::abs(oracle::word_trace_sum(g, beta, 2, 64) - two) < 1e-24);
}

TEST_CASE("catalog CSV") {
  auto g = hecke::make_group(4, kBits);
  auto csv = oracle::catalog_csv(oracle::enumerate_primitive(g, 2, 20.0), 10);
  CHECK(csv.rfind("word;norm;length\n", 0) == 0);
  CHECK(csv.find("-1,1;") != std::string::npos);
}
