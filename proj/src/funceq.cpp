#include "selberg/funceq.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "selberg/special.hpp"

namespace selberg::funceq {

namespace {

constexpr mpfr_prec_t kGuard = 32;

Real two_pow(long e) {
  Real r(1L, 64);
  mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<Real, Real> legendre(int n, const Real& x) {
  Real p0(1L, x.bits()), p1 = x;
  for (int k = 2; k <= n; ++k) {
    Real p2 = (x * p1 * static_cast<long>(2 * k - 1) - p0 * static_cast<long>(k - 1)) / static_cast<long>(k);
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  Real dp = (x * p1 - p0) * static_cast<long>(n) / (x * x - 1L);
  return {p1, dp};
}

int rule_size(mpfr_prec_t bits) { return 16 + static_cast<int>(bits / 10); }

}  // namespace

const GaussRule& gauss_legendre(int n, mpfr_prec_t bits) {
  static std::mutex lock;
  static std::map<std::pair<int, mpfr_prec_t>, GaussRule> cache;
  std::lock_guard guard(lock);
  auto [it, inserted] = cache.try_emplace({n, bits});
  if (!inserted) return it->second;
  GaussRule& rule = it->second;
  const mpfr_prec_t wide = bits + kGuard;
  const double pi = 3.14159265358979323846;
  Real eps = two_pow(-static_cast<long>(bits) - 8);
  for (int i = 1; i <= n; ++i) {
    Real x(std::cos(pi * (i - 0.25) / (n + 0.5)), wide);
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, dp] = legendre(n, x);
      Real step = p / dp;
      x -= step;
      if (mp::abs(step) < eps) break;
    }
    auto [p, dp] = legendre(n, x);
    Real w = Real(2L, wide) / ((1L - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    rule.nodes.push_back(((x + 1L) / 2L).with_bits(bits));
    rule.weights.push_back((w / 2L).with_bits(bits));
  }
  return rule;
}

namespace {

Complex gauss_panel(const std::function<Complex(const Real&)>& f, const GaussRule& rule, const Real& a,
                    const Real& width, mpfr_prec_t bits) {
  Complex sum(bits);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += f(a + width * rule.nodes[k]) * rule.weights[k];
  return sum * width;
}

Complex adapt(const std::function<Complex(const Real&)>& f, const GaussRule& rule, const Real& a, const Real& width,
              const Complex& whole, const Real& tol, mpfr_prec_t bits, int depth) {
  Real half = width / 2L;
  Complex left = gauss_panel(f, rule, a, half, bits);
  Complex right = gauss_panel(f, rule, a + half, half, bits);
  Complex both = left + right;
  if (mp::abs(both - whole) < tol * width) return both;
  if (depth <= 0) throw std::runtime_error("integrate_unit: panel subdivision limit reached");
  return adapt(f, rule, a, half, left, tol, bits, depth - 1) +
         adapt(f, rule, a + half, half, right, tol, bits, depth - 1);
}

}  // namespace

Complex integrate_unit(const std::function<Complex(const Real&)>& f, const Real& tol, mpfr_prec_t bits, int max_depth) {
  const GaussRule& rule = gauss_legendre(rule_size(bits), bits);
  Real zero(0L, bits), one(1L, bits);
  return adapt(f, rule, zero, one, gauss_panel(f, rule, zero, one, bits), tol, bits, max_depth);
}

// ---------------------------------------------------------------------------

namespace {

void check_path(const Complex& w) {
  Real len2 = mp::norm2(w);
  if (len2.is_zero()) return;
  const long reach = static_cast<long>(std::ceil(mp::abs(w).to_double())) + 1;
  for (long k = -reach; k <= reach; ++k) {
    Real p(static_cast<double>(k) + 0.5, w.bits());
    // closest point of the segment [0, w] to p
    Real tau = mp::max(Real(0L, w.bits()), mp::min(Real(1L, w.bits()), w.re() * p / len2));
    Real dist = mp::abs(w * tau - p);
    if (dist < 1e-3)
      throw PathError("psi_q: the straight path to s - 1/2 passes a pole of the integrand; a deformed path is needed");
  }
}

}  // namespace

Complex psi_q(const GroupParams& g, const Complex& s_in, const Real& tol) {
  const mpfr_prec_t bits = std::max(s_in.bits(), g.bits()) + kGuard;
  const Complex s = s_in.with_bits(bits);
  const int q = g.q;
  const Complex w = s - Real(0.5, bits);
  check_path(w);
  const Real pi = mp::pi(bits);
  const Complex i_unit(Real(0L, bits), Real(1L, bits));

  // Elliptic fixed points of orders q and 2: order m contributes
  // sum_k pi/(m sin(k pi/m)) [e^{-2 pi i k t/m}/(1+e^{-2 pi i t}) + e^{2 pi i k t/m}/(1+e^{2 pi i t})].
  struct Elliptic {
    int order;
    std::vector<Real> weight;
  };
  std::vector<Elliptic> elliptic;
  for (int order : {q, 2}) {
    Elliptic e{order, {}};
    for (int k = 1; k < order; ++k)
      e.weight.push_back(pi / (mp::sin(pi * static_cast<long>(k) / static_cast<long>(order)) * static_cast<long>(order)));
    elliptic.push_back(std::move(e));
  }
  const Real tan_weight = -(pi * static_cast<long>(q - 2)) / static_cast<long>(q);

  auto integrand = [&](const Real& tau) {
    Complex t = w * tau;
    Complex value = t * mp::tan(t * pi) * tan_weight;
    Complex phase = mp::exp(i_unit * t * (pi * 2L));  // e^{2 pi i t}
    Complex denom_minus = mp::inverse(phase) + 1L, denom_plus = phase + 1L;
    for (const auto& e : elliptic) {
      Complex rot = mp::exp(i_unit * t * (pi * 2L / static_cast<long>(e.order)));
      Complex rot_inv = mp::inverse(rot);
      Complex up = rot, down = rot_inv;
      for (const auto& weight : e.weight) {
        value += (down / denom_minus + up / denom_plus) * weight;
        up *= rot;
        down *= rot_inv;
      }
    }
    return value * w;
  };
  Complex integral = w.is_zero() ? Complex(bits) : integrate_unit(integrand, tol.with_bits(bits), bits);
  Complex exponent = integral + (1L - s * 2L) * mp::ln2(bits);
  Complex ratio = mp::gamma(Real(1.5, bits) - s) / mp::gamma(s + Real(0.5, bits));
  return (ratio * mp::exp(exponent)).with_bits(s_in.bits());
}

Complex phi3(const Complex& s_in) {
  const mpfr_prec_t bits = s_in.bits() + kGuard;
  const Complex s = s_in.with_bits(bits);
  const Complex half_point(Real(0.5, bits));
  if (s == half_point) return Complex(Real(-1L, s_in.bits()));
  Complex num = mp::gamma(s - Real(0.5, bits)) * mp::riemann_zeta(s * 2L - 1L);
  Complex den = mp::gamma(s) * mp::riemann_zeta(s * 2L);
  if (den.is_zero()) throw mp::PoleError("phi3: zeta(2s) vanishes");
  return (num / den * mp::sqrt(mp::pi(bits))).with_bits(s_in.bits());
}

// ---------------------------------------------------------------------------

std::optional<Complex> PhiTable::lookup(const Real& t, double tol) const {
  for (const auto& [tt, phi] : entries)
    if (mp::abs(tt - t) <= tol) return phi;
  return std::nullopt;
}

Real PhiTable::unitarity_defect() const {
  Real worst(0L, 64);
  for (const auto& e : entries) worst = mp::max(worst, mp::abs(mp::abs(e.second) - 1L));
  return worst;
}

PhiTable load_phi_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingDataError("cannot open phi table " + path.string());
  PhiTable table;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (!header) {
      if (!(fields >> table.q >> table.digits) || table.q < 3 || table.digits < 1)
        throw std::runtime_error(path.string() + ": expected header \"q precision\"");
      header = true;
      continue;
    }
    std::string t, re, im;
    if (!(fields >> t >> re >> im))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected \"t re im\"");
    const mpfr_prec_t bits = mp::Precision(table.digits).bits();
    table.entries.emplace_back(Real(t, bits), Complex(Real(re, bits), Real(im, bits)));
  }
  if (!header) throw std::runtime_error(path.string() + ": empty phi table");
  return table;
}

void save_phi_table(const PhiTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << table.q << ' ' << table.digits << '\n';
  for (const auto& [t, phi] : table.entries)
    out << mp::to_string(t, table.digits) << ' ' << mp::to_string(phi.re(), table.digits) << ' '
        << mp::to_string(phi.im(), table.digits) << '\n';
}

PhiTable phi3_table(const std::vector<double>& t, int digits) {
  PhiTable table;
  table.q = 3;
  table.digits = digits;
  table.source = "explicit-q3";
  const mpfr_prec_t bits = mp::Precision(digits).bits();
  for (double x : t) table.entries.emplace_back(Real(x, bits), phi3(Complex(0.5, x, bits)));
  return table;
}

Complex phi_reference(int q, const Complex& s, const PhiTable* table) {
  if (q == 3) return phi3(s);
  if (table == nullptr) throw MissingDataError("phi_q for q >= 4 needs a phi table");
  if (table->q != q) throw MissingDataError("phi table is for a different q");
  if (!(mp::abs(s.re() - Real(0.5, s.bits())) < 1e-30))
    throw MissingDataError("phi tables only cover the critical line");
  auto phi = table->lookup(s.im());
  if (!phi) throw MissingDataError("phi table has no entry at t = " + mp::to_string(s.im(), 12));
  return phi->with_bits(s.bits());
}

Complex phi_estimate(const GroupParams& g, const Complex& s, const Complex& z_s, const Complex& z_1ms,
                     const Real& tol) {
  return z_1ms / (z_s * psi_q(g, s, tol));
}

Real phi_test(const GroupParams& g, const Complex& s, const Complex& z_s, const Complex& z_1ms, const Complex& phi_ref,
              int c) {
  Real tol = two_pow(-static_cast<long>(s.bits()) - 8);
  return mp::abs(phi_estimate(g, s, z_s, z_1ms, tol) - phi_ref * static_cast<long>(c));
}

// ---------------------------------------------------------------------------

namespace {

Real phase_at(const GroupParams& g, const Real& t, const PhiTable* table, const Real& tol, int c) {
  Complex s(Real(0.5, t.bits()), t);
  Complex v = phi_reference(g.q, s, table) * psi_q(g, s, tol) * static_cast<long>(c);
  return mp::arg(v);
}

// Principal representative of d in (-pi, pi].
Real wrap(Real d, const Real& pi) {
  Real two_pi = pi * 2L;
  while (d > pi) d -= two_pi;
  while (d <= -pi) d += two_pi;
  return d;
}

Real increment(const GroupParams& g, const Real& t0, const Real& p0, const Real& t1, const Real& p1,
               const PhiTable* table, const Real& tol, int c, int depth, const Real& pi) {
  Real d = wrap(p1 - p0, pi);
  if (mp::abs(d) < pi / 2L) return d;
  if (depth <= 0) throw std::runtime_error("unwrapped_theta: phase jump of pi/2 or more persists after refinement");
  if (table != nullptr && g.q != 3)
    throw std::runtime_error("unwrapped_theta: phase jump of pi/2 or more between tabulated nodes; refine the grid");
  Real tm = (t0 + t1) / 2L;
  Real pm = phase_at(g, tm, table, tol, c);
  return increment(g, t0, p0, tm, pm, table, tol, c, depth - 1, pi) +
         increment(g, tm, pm, t1, p1, table, tol, c, depth - 1, pi);
}

}  // namespace

std::vector<Real> unwrapped_theta(const GroupParams& g, const std::vector<Real>& t, const PhiTable* table,
                                  const Real& tol, int c, int max_refine) {
  std::vector<Real> theta;
  if (t.empty()) return theta;
  const mpfr_prec_t bits = t.front().bits();
  const Real pi = mp::pi(bits);
  Real prev_phase = phase_at(g, t[0], table, tol, c);
  // Z(1-s) = conj Z(s) on the line, so Z e^{i arg(phi Psi)/2} is real
  Real total = prev_phase;
  theta.push_back(-total / 2L);
  for (std::size_t k = 1; k < t.size(); ++k) {
    Real phase = phase_at(g, t[k], table, tol, c);
    total += increment(g, t[k - 1], prev_phase, t[k], phase, table, tol, c, max_refine, pi);
    theta.push_back(-total / 2L);
    prev_phase = std::move(phase);
  }
  return theta;
}

std::vector<CurlyZPoint> curly_z(const GroupParams& g, const std::vector<CurlyZInput>& values, const PhiTable* table,
                                 const Real& tol, int c) {
  std::vector<Real> grid;
  for (const auto& v : values) grid.push_back(v.t);
  auto theta = unwrapped_theta(g, grid, table, tol, c);
  std::vector<CurlyZPoint> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    Complex rotation = mp::exp(Complex(Real(0L, theta[k].bits()), -theta[k]));
    Complex rotated = values[k].z * rotation;
    out.push_back({values[k].t, rotated.re(), mp::abs(rotated.im()), values[k].error_estimate});
  }
  return out;
}

std::string curly_z_csv(const std::vector<CurlyZPoint>& points, int digits) {
  std::ostringstream out;
  out << "t,curly_z,im_residue,error_estimate\n";
  for (const auto& p : points)
    out << mp::to_string(p.t, 12) << ',' << mp::to_string(p.value, digits) << ',' << mp::to_string(p.im_residue, 6)
        << ',' << mp::to_string(p.error_estimate, 6) << '\n';
  return out.str();
}

}  // namespace selberg::funceq
