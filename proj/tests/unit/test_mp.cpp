#include <doctest.h>

#include "selberg/mp.hpp"

using namespace selberg::mp;

TEST_CASE("precision maps digits to bits with guard") {
  Precision p(50);
  CHECK(p.digits() == 50);
  CHECK(p.bits() >= 166 + Precision::kGuardBits);
  CHECK(Precision::from_bits(p.bits()).digits() == 50);
  CHECK_THROWS_AS(Precision(0), std::invalid_argument);
}

TEST_CASE("mixed precision arithmetic coerces upward") {
  Real a(1L, 64), b(3L, 256);
  Real c = a / b;
  CHECK(c.bits() == 256);
  Real check = c * 3L - 1L;
  CHECK(abs(check) < 1e-70);
}

TEST_CASE("string round trip") {
  Real x("1.2345678901234567890123456789e-5", 200);
  std::string s = to_string(x, 30);
  CHECK(Real(s, 200) == Real(s, 200));
  CHECK(abs(Real(s, 200) - x) < 1e-33);
  CHECK_THROWS_AS(Real("1.5x", 100), std::invalid_argument);
  CHECK_THROWS_AS(Real("", 100), std::invalid_argument);
}

TEST_CASE("complex elementary functions") {
  const mpfr_prec_t bits = 300;
  Complex z(0.3, -1.7, bits);
  CHECK(abs(exp(log(z)) - z) < 1e-85);
  CHECK(abs(sqrt(z) * sqrt(z) - z) < 1e-85);
  Complex w(1.25, 0.5, bits);
  CHECK(abs(pow(z, w) - exp(w * log(z))) < 1e-85);
  Complex s = sin(z), c = cos(z);
  CHECK(abs(s * s + c * c - Complex(Real(1L, bits))) < 1e-85);
  CHECK(abs(tan(z) - s / c) < 1e-85);
  CHECK(abs(z * inverse(z) - Complex(Real(1L, bits))) < 1e-85);
  CHECK(abs(pow(z, 5L) - z * z * z * z * z) < 1e-80);
  // principal branch
  Complex neg(-1.0, 0.0, bits);
  CHECK(abs(arg(neg) - pi(bits)) < 1e-85);
  CHECK(abs(sqrt(neg) - Complex(0.0, 1.0, bits)) < 1e-85);
}

TEST_CASE("parse_complex accepts the documented forms") {
  const mpfr_prec_t bits = 128;
  auto near = [&](const Complex& z, double re, double im) {
    return abs(z - Complex(re, im, bits)) < 1e-15;
  };
  CHECK(near(parse_complex("2", bits), 2, 0));
  CHECK(near(parse_complex("-1.5", bits), -1.5, 0));
  CHECK(near(parse_complex("5i", bits), 0, 5));
  CHECK(near(parse_complex("0.5+5i", bits), 0.5, 5));
  CHECK(near(parse_complex("0.5-2.25e-1i", bits), 0.5, -0.225));
  CHECK(near(parse_complex("i", bits), 0, 1));
  CHECK(near(parse_complex("-i", bits), 0, -1));
  CHECK_THROWS(parse_complex("abc", bits));
}
