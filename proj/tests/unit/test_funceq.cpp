#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "selberg/funceq.hpp"
#include "selberg/selberg.hpp"

using namespace selberg;
using mp::Complex;
using mp::Real;

namespace {
constexpr mpfr_prec_t kBits = 160;
Complex c(double re, double im = 0.0) { return Complex(re, im, kBits); }
Real tol(double x) { return Real(x, kBits); }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "selberg_funceq_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST_CASE("Gauss-Legendre on [0, 1]") {
  const auto& rule = funceq::gauss_legendre(12, kBits);
  REQUIRE(rule.nodes.size() == 12);
  for (long k : {0L, 5L, 23L}) {
    Real sum(0L, kBits);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += mp::pow(rule.nodes[i], k) * rule.weights[i];
    CHECK(mp::abs(sum - Real(1L, kBits) / (k + 1)) < 1e-45);
  }
  auto e = funceq::integrate_unit([](const Real& x) { return Complex(mp::exp(x)); }, tol(1e-40), kBits);
  CHECK(mp::abs(e - Complex(mp::exp(Real(1L, kBits)) - 1L)) < 1e-40);
}

TEST_CASE("explicit scattering function for q = 3") {
  // pi/2 zeta(3)/zeta(4) with Apery's constant and zeta(4) = pi^4/90
  Real apery("1.2020569031595942853997381615114499907649862923405", kBits);
  Real pi = mp::pi(kBits);
  Real expected = pi / 2L * apery / (mp::pow(pi, 4L) / 90L);
  CHECK(mp::abs(funceq::phi3(c(2)) - Complex(expected)) < 1e-40);
  CHECK(mp::abs(funceq::phi3(c(0.5)) - c(-1)) < 1e-40);
  // 40 digits from an independent arbitrary-precision evaluation
  Complex reference(Real("0.5231271516943812177286899312572318590995", kBits),
                    Real("-0.8522546468985216757820132864453408946748", kBits));
  CHECK(mp::abs(funceq::phi3(c(0.5, 1)) - reference) < 1e-39);
  for (double t : {1.0, 2.5, 7.0}) {
    CAPTURE(t);
    CHECK(mp::abs(mp::abs(funceq::phi3(c(0.5, t))) - 1L) < 1e-40);
  }
  // phi(s) phi(1-s) = 1
  Complex s = c(0.8, 3.3);
  CHECK(mp::abs(funceq::phi3(s) * funceq::phi3(1L - s) - c(1)) < 1e-40);
}

TEST_CASE("Psi on the critical line") {
  CHECK(mp::abs(funceq::psi_q(hecke::make_group(3, kBits), c(0.5), tol(1e-40)) - c(1)) < 1e-40);
  for (int q : {3, 4, 5, 7}) {
    auto g = hecke::make_group(q, kBits);
    for (double t : {0.7, 3.0, 9.5}) {
      CAPTURE(q);
      CAPTURE(t);
      Complex psi = funceq::psi_q(g, c(0.5, t), tol(1e-35));
      CHECK(mp::abs(mp::abs(psi) - 1L) < 1e-33);
      // tightening the quadrature does not move the value
      CHECK(mp::abs(psi - funceq::psi_q(g, c(0.5, t), tol(1e-45))) < 1e-34);
    }
  }
  // Psi(s) Psi(1-s) = 1 off the line too
  auto g = hecke::make_group(4, kBits);
  Complex s = c(0.9, 2.2);
  CHECK(mp::abs(funceq::psi_q(g, s, tol(1e-40)) * funceq::psi_q(g, 1L - s, tol(1e-40)) - c(1)) < 1e-35);
  CHECK_THROWS_AS(funceq::psi_q(g, c(1.5), tol(1e-30)), funceq::PathError);
  CHECK_THROWS_AS(funceq::psi_q(g, c(2.2, 0.0005), tol(1e-30)), funceq::PathError);
}

TEST_CASE("functional equation closes for q = 3") {
  zeta::ZetaConfig cfg;
  cfg.n0 = 50;
  cfg.digits = 50;
  cfg.escalate = false;
  auto g = hecke::make_group(3, mp::Precision(50).bits());
  for (Complex s : {Complex(0.5, 2.0, 200), Complex(0.75, 1.5, 200)}) {
    auto zs = zeta::z_value(3, s, cfg);
    auto z1 = zeta::z_value(3, 1L - s, cfg);
    Real err = funceq::phi_test(g, s.with_bits(g.bits()), zs.value, z1.value, funceq::phi3(s.with_bits(g.bits())));
    CAPTURE(s);
    CHECK(err < 1e-8);
  }
}

TEST_CASE("phi tables") {
  auto table = funceq::phi3_table({0.5, 1.0, 1.5}, 30);
  CHECK(table.source == "explicit-q3");
  CHECK(table.unitarity_defect() < 1e-28);
  auto path = scratch("phi3.txt");
  funceq::save_phi_table(table, path);
  auto back = funceq::load_phi_table(path);
  CHECK(back.q == 3);
  CHECK(back.digits == 30);
  REQUIRE(back.entries.size() == 3);
  CHECK(back.source == "external-file");
  auto hit = back.lookup(Real(1.0, kBits));
  REQUIRE(hit.has_value());
  CHECK(mp::abs(*hit - funceq::phi3(c(0.5, 1))) < 1e-28);
  CHECK_FALSE(back.lookup(Real(1.25, kBits)).has_value());

  CHECK_THROWS_AS(funceq::load_phi_table(scratch("absent.txt")), funceq::MissingDataError);
  {
    std::ofstream bad(scratch("bad.txt"));
    bad << "4 30\n# comment\n1.0 0.5\n";
  }
  CHECK_THROWS_AS(funceq::load_phi_table(scratch("bad.txt")), std::runtime_error);

  CHECK_THROWS_AS(funceq::phi_reference(4, c(0.5, 1), nullptr), funceq::MissingDataError);
  CHECK(mp::abs(funceq::phi_reference(3, c(0.5, 1), nullptr) - funceq::phi3(c(0.5, 1))) < 1e-40);
  // a table for q = 4 is consulted only on its own grid
  funceq::PhiTable four = table;
  four.q = 4;
  CHECK_NOTHROW(funceq::phi_reference(4, c(0.5, 1.5), &four));
  CHECK_THROWS_AS(funceq::phi_reference(4, c(0.5, 1.7), &four), funceq::MissingDataError);
}

TEST_CASE("rotated Z is real on the critical line") {
  zeta::ZetaConfig cfg;
  cfg.n0 = 40;
  cfg.digits = 40;
  cfg.escalate = false;
  auto g = hecke::make_group(3, mp::Precision(40).bits());
  std::vector<funceq::CurlyZInput> in;
  for (double t = 0.5; t <= 2.01; t += 0.5) {
    auto z = zeta::z_value(3, Complex(0.5, t, g.bits()), cfg);
    in.push_back({Real(t, g.bits()), z.value, z.error_estimate});
  }
  auto pts = funceq::curly_z(g, in, nullptr, Real(1e-30, g.bits()));
  REQUIRE(pts.size() == in.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    CAPTURE(k);
    CHECK(pts[k].im_residue < 10 * in[k].error_estimate);
    CHECK(mp::abs(mp::abs(in[k].z) - mp::abs(pts[k].value)) <= pts[k].im_residue);
  }
  auto csv = funceq::curly_z_csv(pts, 12);
  CHECK(csv.rfind("t,curly_z,im_residue,error_estimate\n", 0) == 0);
}
