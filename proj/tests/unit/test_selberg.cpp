#include <doctest.h>

#include "selberg/oracle.hpp"
#include "selberg/selberg.hpp"

using namespace selberg;
using mp::Complex;
using mp::Real;

namespace {
constexpr mpfr_prec_t kBits = 128;
Complex c(double re, double im = 0.0) { return Complex(re, im, kBits); }
std::vector<Real> decades(std::initializer_list<double> v) {
  std::vector<Real> out;
  for (double x : v) out.emplace_back(x, 64);
  return out;
}
}  // namespace

TEST_CASE("relative differences and matching") {
  CHECK(zeta::relative_difference(c(0), c(0)).is_zero());
  CHECK(mp::abs(zeta::relative_difference(c(1), c(3)) - Real(0.5, kBits)) < 1e-30);

  std::vector<Complex> same{c(1), c(0.5), c(0.1)};
  auto f = zeta::match_spectra(same, same, 1e-7);
  CHECK(f.count() == 3);
  CHECK(f.max_delta().is_zero());

  auto g = zeta::match_spectra({c(1), c(0.5)}, {c(1), c(0.4999), c(0.003)}, 1e-2);
  REQUIRE(g.count() == 2);
  CHECK(mp::abs(g.pairs[1].at_m - c(0.4999)) < 1e-30);
  CHECK(mp::abs(g.tail() - Real(0.4999, kBits)) < 1e-15);

  // the nearest unused partner wins, not the first one within delta
  auto h = zeta::match_spectra({c(1)}, {c(1.001), c(1.0000001)}, 1e-2);
  CHECK(mp::abs(h.pairs.at(0).at_m - c(1.0000001)) < 1e-30);
  CHECK(zeta::match_spectra({c(1)}, {c(2)}, 1e-2).count() == 0);
}

TEST_CASE("correction determinant") {
  auto g = hecke::make_group(4, kBits);
  Real nu = Real(3L, kBits) + mp::sqrt(Real(8L, kBits));
  Complex direct(Real(1L, kBits));
  for (int n = 0; n < 200; ++n) direct *= 1L - mp::pow(nu, Real(-(n + 2L), kBits));
  Real tol(1e-35, kBits);
  CHECK(mp::abs(zeta::det_K(g, c(2), tol) - direct) < 1e-33);
  CHECK(mp::abs(zeta::det_K(g, c(60), tol) - c(1)) < 1e-30);
  // doubling the factor count changes nothing at the tolerance
  CHECK(mp::abs(zeta::det_K(nu, c(0.5, 5), tol) - zeta::det_K(nu, c(0.5, 5), Real(1e-70, kBits))) < 1e-33);
}

TEST_CASE("precision-break heuristic") {
  std::vector<Real> monotone;
  for (int k = 0; k < 20; ++k) monotone.emplace_back(std::pow(10.0, -40 + k / 2.0), 64);
  CHECK_FALSE(zeta::detect_precision_break(monotone, 170));
  // irregular growth alone is not a break
  CHECK_FALSE(zeta::detect_precision_break(decades({1e-40, 1e-39, 1e-31, 1e-30}), 170));
  // leading pairs agreeing to the last few bits: precision, not truncation, limits accuracy
  CHECK(zeta::detect_precision_break(decades({9e-56, 7e-56, 2e-52, 8e-50}), 170));
  CHECK_FALSE(zeta::detect_precision_break(decades({9e-56, 7e-56, 2e-52, 8e-50}), 340));
  CHECK_FALSE(zeta::detect_precision_break(std::vector<Real>{}, 170));
}

TEST_CASE("Z_3 at 1/2 + 5i, N = 50, WP = 50") {
  zeta::ZetaConfig cfg;
  cfg.n0 = 50;
  cfg.digits = 50;
  cfg.escalate = false;
  auto z = zeta::z_value(3, Complex(0.5, 5.0, 400), cfg);
  CHECK(z.K == 12);
  CHECK(z.M == 53);
  // the same truncation in published form: 1.192213397499979 + 0.074413721696096i
  CHECK(mp::abs(z.value - Complex(Real("1.192213397499979", kBits), Real("0.074413721696096", kBits))) < 1e-15);
  CHECK(z.error_estimate >= z.tail);
  auto j = zeta::to_json(z);
  CHECK(j["K"] == 12);
  CHECK(j["accepted"].size() == 12);
}

TEST_CASE("real s agrees with the Euler product") {
  zeta::ZetaConfig cfg;
  cfg.n0 = 30;
  cfg.digits = 40;
  cfg.eps = 1e-6;
  auto g = hecke::make_group(3, kBits);
  auto z = zeta::z_value(3, c(2), cfg);
  CHECK(z.converged);
  CHECK(mp::abs(z.value.im()) < 1e-30);
  auto e = oracle::euler_product_z(g, c(2), oracle::enumerate_primitive(g, 20, 1e4));
  CHECK(mp::abs(z.value - e.value) < 1e-3);
}

TEST_CASE("escalation and guards") {
  zeta::ZetaConfig cfg;
  cfg.n0 = 10;
  cfg.digits = 30;
  cfg.eps = 1e-30;
  cfg.n_max = 16;
  int calls = 0;
  cfg.on_escalate = [&calls](const zeta::ZetaValue& v) {
    ++calls;
    CHECK(v.N == 10);
    return true;
  };
  auto z = zeta::z_value(3, c(0.5, 2), cfg);
  CHECK(z.n_escalations == 1);
  CHECK(z.N == 15);
  CHECK(calls == 1);
  CHECK_FALSE(z.converged);

  zeta::ZetaConfig plain;
  plain.n0 = 10;
  plain.digits = 30;
  CHECK_THROWS_AS(zeta::z_value(3, c(0.0), plain), zeta::PoleProximityError);
  CHECK_THROWS_AS(zeta::z_value(3, c(-1.5), plain), zeta::PoleProximityError);
  plain.delta = 2.0;
  CHECK_THROWS_AS(zeta::z_value(3, c(2), plain), std::invalid_argument);
}

TEST_CASE("losing eigenvalues to a larger N raises the precision") {
  // q = 4 at WP = 40: N = 60 keeps 12 eigenvalues, N = 81 only 9
  zeta::ZetaConfig cfg;
  cfg.n0 = 60;
  cfg.digits = 40;
  cfg.eps = 1e-12;
  cfg.n_growth = 1.34;
  std::vector<zeta::ZetaValue> passes;
  cfg.on_escalate = [&passes](const zeta::ZetaValue& v) {
    passes.push_back(v);
    return v.digit_escalations == 0;
  };
  auto z = zeta::z_value(4, c(2), cfg);
  REQUIRE(passes.size() == 2);
  CHECK(passes[0].N == 60);
  CHECK_FALSE(passes[0].precision_break);
  CHECK(passes[1].N == 81);
  CHECK(passes[1].K < passes[0].K);
  CHECK(passes[1].precision_break);
  CHECK(z.digit_escalations == 1);
  CHECK_FALSE(z.converged);
}
