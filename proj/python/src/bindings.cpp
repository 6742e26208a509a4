#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "selberg/cli.hpp"
#include "selberg/funceq.hpp"
#include "selberg/markov.hpp"
#include "selberg/oracle.hpp"
#include "selberg/selberg.hpp"

namespace py = pybind11;
using namespace selberg;

namespace {

mp::Complex parse(const std::string& s, int digits) { return mp::parse_complex(s, mp::Precision(digits).bits()); }

std::pair<std::string, std::string> parts(const mp::Complex& z, int digits) {
  return {mp::to_string(z.re(), digits), mp::to_string(z.im(), digits)};
}

std::string z_value_json(int q, const std::string& s, int n0, int digits, double delta, double eps, bool escalate,
                         int n_max, int digits_max) {
  zeta::ZetaConfig cfg;
  cfg.n0 = n0;
  cfg.digits = digits;
  cfg.delta = delta;
  cfg.eps = eps;
  cfg.escalate = escalate;
  cfg.n_max = n_max;
  cfg.digits_max = digits_max;
  zeta::ZetaValue z;
  {
    py::gil_scoped_release release;
    z = zeta::z_value(q, parse(s, digits_max), cfg);
  }
  return zeta::to_json(z).dump();
}

std::string partition_json(int q, int digits, long n_check) {
  const auto g = hecke::make_group(q, mp::Precision(digits).bits());
  const auto p = markov::build_partition(g);
  const auto t = markov::build_nij(g);
  auto j = markov::to_json(g, p, t, digits);
  j["violations"] = markov::validate(g, p, t, n_check).violations.size();
  return j.dump();
}

py::dict euler_product(int q, const std::string& s, double X, int L, int digits) {
  const auto g = hecke::make_group(q, mp::Precision(digits).bits());
  auto catalog = oracle::enumerate_primitive(g, static_cast<std::size_t>(L), X);
  auto e = oracle::euler_product_z(g, parse(s, digits), catalog);
  py::dict out;
  out["value"] = parts(e.value, digits);
  out["tail_estimate"] = e.tail_estimate;
  out["classes"] = e.classes;
  return out;
}

std::pair<int, std::string> run(const std::string& mode, int q, const std::string& s, double t_min, double t_max,
                                double t_step, int n0, int prec, double eps, const std::string& format) {
  cli::RunConfig c;
  c.mode = cli::parse_mode(mode);
  c.format = cli::parse_format(format);
  c.q = q;
  c.s = s;
  c.t_min = t_min;
  c.t_max = t_max;
  c.t_step = t_step;
  c.n0 = n0;
  c.prec = prec;
  c.eps = eps;
  c.prec_max = std::max(c.prec_max, prec);
  std::ostringstream out, log;
  int status;
  {
    py::gil_scoped_release release;
    status = cli::run(c, out, log);
  }
  if (status == cli::exit_code::config_error || status == cli::exit_code::missing_data)
    throw std::invalid_argument(log.str());
  return {status, out.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selberg zeta functions of Hecke triangle groups (multiprecision core)";

  m.def("z_value_json", &z_value_json, py::arg("q"), py::arg("s"), py::arg("n0") = 50, py::arg("digits") = 50,
        py::arg("delta") = 1e-7, py::arg("eps") = 1e-7, py::arg("escalate") = true, py::arg("n_max") = 400,
        py::arg("digits_max") = 400);
  m.def(
      "phi3", [](const std::string& s, int digits) { return parts(funceq::phi3(parse(s, digits)), digits); },
      py::arg("s"), py::arg("digits") = 30);
  m.def(
      "psi",
      [](int q, const std::string& s, int digits) {
        const auto g = hecke::make_group(q, mp::Precision(digits).bits());
        mp::Real tol(1L, g.bits());
        mpfr_mul_2si(tol.raw(), tol.raw(), -static_cast<long>(g.bits()), MPFR_RNDN);
        return parts(funceq::psi_q(g, parse(s, digits), tol), digits);
      },
      py::arg("q"), py::arg("s"), py::arg("digits") = 30);
  m.def("partition_json", &partition_json, py::arg("q"), py::arg("digits") = 30, py::arg("n_check") = 50);
  m.def("euler_product", &euler_product, py::arg("q"), py::arg("s"), py::arg("X"), py::arg("L") = 40,
        py::arg("digits") = 30);
  m.def("run", &run, py::arg("mode"), py::arg("q") = 3, py::arg("s") = "0.5+5i", py::arg("t_min") = 1.0,
        py::arg("t_max") = 10.0, py::arg("t_step") = 1.0, py::arg("n0") = 50, py::arg("prec") = 50,
        py::arg("eps") = 1e-7, py::arg("format") = "json");

  py::register_exception<funceq::MissingDataError>(m, "MissingDataError");
  py::register_exception<zeta::PoleProximityError>(m, "PoleProximityError", PyExc_ValueError);
}
