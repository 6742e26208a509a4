#include "selberg/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "selberg/funceq.hpp"
#include "selberg/markov.hpp"
#include "selberg/oracle.hpp"
#include "selberg/selberg.hpp"
#include "selberg/special.hpp"

namespace selberg::cli {

using mp::Complex;
using mp::Real;
using nlohmann::json;

namespace {

const std::map<std::string, Mode>& mode_names() {
  static const std::map<std::string, Mode> names{{"value", Mode::Value},         {"line", Mode::Line},
                                                 {"verify-phi", Mode::VerifyPhi}, {"oracle", Mode::Oracle},
                                                 {"partition", Mode::Partition}, {"table1", Mode::Table1}};
  return names;
}

}  // namespace

Mode parse_mode(const std::string& name) {
  auto it = mode_names().find(name);
  if (it == mode_names().end()) throw ConfigError("unknown mode '" + name + "'");
  return it->second;
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw ConfigError("unknown format '" + name + "'");
}

std::string to_string(Mode mode) {
  for (const auto& [name, m] : mode_names())
    if (m == mode) return name;
  return "?";
}

void RunConfig::validate() const {
  if (q < 3) throw ConfigError("q must be at least 3");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (prec < 30) throw ConfigError("working precision must be at least 30 digits");
  if (prec_max < prec) throw ConfigError("prec-max is below prec");
  if (n0 < 1 || n_max < n0) throw ConfigError("need 1 <= n0 <= n-max");
  if (c != 1 && c != -1) throw ConfigError("c must be +1 or -1");
  if (time_budget < 0.0) throw ConfigError("time budget must be non-negative");
  if (mode == Mode::Line || mode == Mode::VerifyPhi) {
    if (!(t_step > 0.0) || t_max < t_min) throw ConfigError("t grid needs t-step > 0 and t-max >= t-min");
    if (t_min <= 0.0) throw ConfigError("t-min must be positive");
  }
  if (mode == Mode::Table1 && n_values.empty()) throw ConfigError("table1 needs at least one N");
  for (int n : n_values)
    if (n < 1) throw ConfigError("table1 orders must be positive");
  if (mode == Mode::Oracle && (norm_max <= 1.0 || word_length < 1)) throw ConfigError("oracle needs X > 1 and L >= 1");
  if (mode == Mode::Partition && n_check < 1) throw ConfigError("partition check needs n >= 1");
}

std::vector<double> RunConfig::t_grid() const {
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) grid.push_back(t_min + static_cast<double>(k) * t_step);
  return grid;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

zeta::ZetaConfig zeta_config(const RunConfig& c) {
  zeta::ZetaConfig z;
  z.n0 = c.n0;
  z.delta = c.delta;
  z.eps = c.eps;
  z.digits = c.prec;
  z.n_max = c.n_max;
  z.digits_max = c.prec_max;
  if (c.time_budget > 0.0) {
    auto start = Clock::now();
    const double budget = c.time_budget;
    z.on_escalate = [start, budget](const zeta::ZetaValue&) { return seconds_since(start) < budget; };
  }
  return z;
}

// Each call gets its own budget clock.
zeta::ZetaValue evaluate(const RunConfig& c, const Complex& s) { return zeta::z_value(c.q, s, zeta_config(c)); }

// Runs job(k) for k = 0..n-1 on a small pool; results stay in index order.
void fan_out(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers) : std::thread::hardware_concurrency();
  if (!mpfr_buildopt_tls_p()) threads = 1;
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::optional<funceq::PhiTable> load_table(const RunConfig& c) {
  if (c.phi_table.empty()) return std::nullopt;
  auto table = funceq::load_phi_table(c.phi_table);
  if (table.q != c.q)
    throw ConfigError("phi table is for q = " + std::to_string(table.q) + ", run is for q = " + std::to_string(c.q));
  return table;
}

void require_phi(const RunConfig& c, const std::optional<funceq::PhiTable>& table) {
  if (c.q != 3 && !table)
    throw funceq::MissingDataError("q = " + std::to_string(c.q) + " needs --phi-table (no closed form for phi)");
}

Complex critical_point(double t, mpfr_prec_t bits) { return Complex(0.5, t, bits); }

std::string fixed(double x) {
  std::ostringstream o;
  o.precision(12);
  o << x;
  return o.str();
}

int status_of(bool all_converged) { return all_converged ? exit_code::ok : exit_code::not_converged; }

// ---------------------------------------------------------------------------

int run_value(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const Complex s = mp::parse_complex(c.s, mp::Precision(c.prec_max).bits());
  auto start = Clock::now();
  auto z = evaluate(c, s);
  log << "value: N=" << z.N << " WP=" << z.digits << " K=" << z.K << " tail=" << mp::to_string(z.tail, 3) << " ("
      << fixed(seconds_since(start)) << " s)\n";
  if (c.format == Format::Csv) {
    out << "s,re,im,error_estimate,N,WP,K,converged\n"
        << c.s << ',' << mp::to_string(z.value.re(), z.digits) << ',' << mp::to_string(z.value.im(), z.digits) << ','
        << mp::to_string(z.error_estimate, 6) << ',' << z.N << ',' << z.digits << ',' << z.K << ','
        << (z.converged ? 1 : 0) << '\n';
  } else {
    json j = zeta::to_json(z);
    j["q"] = c.q;
    out << j.dump(2) << '\n';
  }
  return status_of(z.converged);
}

int run_line(const RunConfig& c, std::ostream& out, std::ostream& log) {
  auto table = load_table(c);
  require_phi(c, table);
  const auto grid = c.t_grid();
  const mpfr_prec_t bits = mp::Precision(c.prec_max).bits();
  std::vector<zeta::ZetaValue> values(grid.size());
  fan_out(grid.size(), c.workers, [&](std::size_t k) { values[k] = evaluate(c, critical_point(grid[k], bits)); });

  int used = c.prec;
  for (const auto& v : values) used = std::max(used, v.digits);
  const auto g = hecke::make_group(c.q, mp::Precision(used).bits());
  std::vector<funceq::CurlyZInput> in;
  bool converged = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    in.push_back({Real(grid[k], g.bits()), values[k].value.with_bits(g.bits()), values[k].error_estimate});
    converged = converged && values[k].converged;
  }
  Real tol(1L, g.bits());
  mpfr_mul_2si(tol.raw(), tol.raw(), -static_cast<long>(g.bits()), MPFR_RNDN);
  auto points = funceq::curly_z(g, in, table ? &*table : nullptr, tol, c.c);
  log << "line: " << points.size() << " nodes\n";
  const int digits = c.prec;
  if (c.format == Format::Csv) {
    out << funceq::curly_z_csv(points, digits);
  } else {
    json rows = json::array();
    for (std::size_t k = 0; k < points.size(); ++k)
      rows.push_back({{"t", fixed(grid[k])},
                      {"curly_z", mp::to_string(points[k].value, digits)},
                      {"im_residue", mp::to_string(points[k].im_residue, 6)},
                      {"error_estimate", mp::to_string(points[k].error_estimate, 6)},
                      {"N", values[k].N},
                      {"WP", values[k].digits},
                      {"converged", values[k].converged}});
    out << json{{"q", c.q}, {"c", c.c}, {"points", rows}}.dump(2) << '\n';
  }
  return status_of(converged);
}

struct PhiRow {
  double t;
  Complex phi_tilde{64};
  Real error{0L, 64};
  zeta::ZetaValue z;
};

int run_verify_phi(const RunConfig& c, std::ostream& out, std::ostream& log) {
  auto table = load_table(c);
  require_phi(c, table);
  const auto grid = c.t_grid();
  const mpfr_prec_t bits = mp::Precision(c.prec_max).bits();
  std::vector<PhiRow> rows(grid.size());
  fan_out(grid.size(), c.workers, [&](std::size_t k) {
    const Complex s = critical_point(grid[k], bits);
    auto zs = evaluate(c, s);
    auto z1 = evaluate(c, 1L - s);
    const mpfr_prec_t wp = mp::Precision(std::min(zs.digits, z1.digits)).bits();
    const auto g = hecke::make_group(c.q, wp);
    Real tol(1L, wp);
    mpfr_mul_2si(tol.raw(), tol.raw(), -static_cast<long>(wp), MPFR_RNDN);
    const Complex sw = s.with_bits(wp);
    rows[k].t = grid[k];
    rows[k].phi_tilde = funceq::phi_estimate(g, sw, zs.value.with_bits(wp), z1.value.with_bits(wp), tol);
    Complex reference = funceq::phi_reference(c.q, sw, table ? &*table : nullptr);
    rows[k].error = mp::abs(rows[k].phi_tilde - reference * static_cast<long>(c.c));
    const bool both = zs.converged && z1.converged;
    rows[k].z = std::move(zs);
    rows[k].z.converged = both;
  });
  log << "verify-phi: " << rows.size() << " points\n";
  bool converged = true;
  for (const auto& r : rows) converged = converged && r.z.converged;
  const int digits = c.prec;
  if (c.format == Format::Csv) {
    out << "t,phi_tilde,phi_error,K,tail,max_delta,N,WP,converged\n";
    for (const auto& r : rows)
      out << fixed(r.t) << ',' << mp::to_string(r.phi_tilde, digits) << ',' << mp::to_string(r.error, 3) << ','
          << r.z.K << ',' << mp::to_string(r.z.tail, 3) << ',' << mp::to_string(r.z.max_delta, 3) << ',' << r.z.N << ','
          << r.z.digits << ',' << (r.z.converged ? 1 : 0) << '\n';
  } else {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"t", fixed(r.t)},
                     {"phi_tilde", mp::to_string(r.phi_tilde, digits)},
                     {"phi_error", mp::to_string(r.error, 3)},
                     {"K", r.z.K},
                     {"tail", mp::to_string(r.z.tail, 3)},
                     {"max_delta", mp::to_string(r.z.max_delta, 3)},
                     {"N", r.z.N},
                     {"WP", r.z.digits},
                     {"converged", r.z.converged}});
    out << json{{"q", c.q}, {"c", c.c}, {"phi_source", table ? table->source : "explicit-q3"}, {"rows", arr}}.dump(2)
        << '\n';
  }
  return status_of(converged);
}

int run_oracle(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const mpfr_prec_t bits = mp::Precision(c.prec).bits();
  const Complex s = mp::parse_complex(c.s, bits);
  if (!(s.re() > 1L)) throw ConfigError("oracle mode needs Re s > 1");
  const auto g = hecke::make_group(c.q, bits);
  auto start = Clock::now();
  auto catalog = oracle::enumerate_primitive(g, static_cast<std::size_t>(c.word_length), c.norm_max);
  const double t_enum = seconds_since(start);
  auto euler = oracle::euler_product_z(g, s, catalog);
  auto z = evaluate(c, s);
  Real diff = mp::abs(euler.value - z.value.with_bits(bits));
  log << "oracle: " << catalog.size() << " classes in " << fixed(t_enum) << " s\n";
  const int digits = std::min(c.prec, 30);
  if (c.format == Format::Csv) {
    out << "q,s,X,L,classes,euler,z_value,difference,euler_tail_estimate\n"
        << c.q << ',' << c.s << ',' << fixed(c.norm_max) << ',' << c.word_length << ',' << euler.classes << ','
        << mp::to_string(euler.value, digits) << ',' << mp::to_string(z.value, digits) << ','
        << mp::to_string(diff, 3) << ',' << fixed(euler.tail_estimate) << '\n';
  } else {
    json excluded = json::array();
    for (const auto* e : catalog.excluded()) excluded.push_back(e->word);
    out << json{{"q", c.q},
                {"s", c.s},
                {"X", fixed(c.norm_max)},
                {"L", c.word_length},
                {"classes", euler.classes},
                {"excluded_words", excluded},
                {"euler_product", mp::to_string(euler.value, digits)},
                {"euler_tail_estimate", fixed(euler.tail_estimate)},
                {"z_value", zeta::to_json(z)},
                {"difference", mp::to_string(diff, 3)}}
                   .dump(2)
        << '\n';
  }
  return status_of(z.converged);
}

int run_partition(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto g = hecke::make_group(c.q, mp::Precision(c.prec).bits());
  const auto p = markov::build_partition(g);
  const auto t = markov::build_nij(g);
  const auto report = markov::validate(g, p, t, c.n_check);
  log << "partition: q=" << c.q << ' ' << report.violations.size() << " violations\n";
  json j = markov::to_json(g, p, t, c.prec);
  json v = json::array();
  for (const auto& x : report.violations) v.push_back({{"i", x.i}, {"j", x.j}, {"n", x.n}, {"what", x.what}});
  j["validation"] = {{"n_max", c.n_check},
                     {"containment_checks", report.containment_checks},
                     {"completeness_checks", report.completeness_checks},
                     {"violations", v}};
  if (c.format == Format::Csv) {
    out << "i,j,N_ij\n";
    for (int i : markov::labels(g.kappa))
      for (int k : markov::labels(g.kappa)) out << i << ',' << k << ',' << t.at(i, k).to_string() << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  return report.ok() ? exit_code::ok : exit_code::not_converged;
}

int run_table1(const RunConfig& c, std::ostream& out, std::ostream& log) {
  auto table = load_table(c);
  const bool with_phi = c.q == 3 || table.has_value();
  const Complex s_in = mp::parse_complex(c.s, mp::Precision(c.prec_max).bits());
  json rows = json::array();
  std::ostringstream csv;
  csv << "WP,N,value,phi_error,seconds,K,tail,max_delta,precision_break\n";
  for (int wp = c.prec; wp <= c.prec_max; wp += 50) {
    for (int n : c.n_values) {
      zeta::ZetaConfig z = zeta_config(c);
      z.n0 = n;
      z.digits = wp;
      z.escalate = false;
      auto start = Clock::now();
      auto zs = zeta::z_value(c.q, s_in, z);
      std::string phi_error = "";
      if (with_phi) {
        auto z1 = zeta::z_value(c.q, 1L - s_in, z);
        const auto g = hecke::make_group(c.q, mp::Precision(wp).bits());
        Real tol(1L, g.bits());
        mpfr_mul_2si(tol.raw(), tol.raw(), -static_cast<long>(g.bits()), MPFR_RNDN);
        const Complex sw = s_in.with_bits(g.bits());
        Complex ref = funceq::phi_reference(c.q, sw, table ? &*table : nullptr) * static_cast<long>(c.c);
        phi_error = mp::to_string(mp::abs(funceq::phi_estimate(g, sw, zs.value, z1.value, tol) - ref), 2);
      }
      const double secs = seconds_since(start);
      log << "table1: WP=" << wp << " N=" << n << " K=" << zs.K << " (" << fixed(secs) << " s)\n";
      rows.push_back({{"WP", wp},
                      {"N", n},
                      {"value", mp::to_string(zs.value, wp)},
                      {"phi_error", phi_error},
                      {"seconds", fixed(secs)},
                      {"K", zs.K},
                      {"tail", mp::to_string(zs.tail, 2)},
                      {"max_delta", mp::to_string(zs.max_delta, 2)},
                      {"precision_break", zs.precision_break}});
      csv << wp << ',' << n << ',' << mp::to_string(zs.value, wp) << ',' << phi_error << ',' << fixed(secs) << ','
          << zs.K << ',' << mp::to_string(zs.tail, 2) << ',' << mp::to_string(zs.max_delta, 2) << ','
          << (zs.precision_break ? 1 : 0) << '\n';
    }
  }
  if (c.format == Format::Csv)
    out << csv.str();
  else
    out << json{{"q", c.q}, {"s", c.s}, {"delta", c.delta}, {"rows", rows}}.dump(2) << '\n';
  return exit_code::ok;
}

std::filesystem::path bernoulli_file(const RunConfig& c) {
  return c.cache_dir / ("bernoulli_wp" + std::to_string(c.prec) + ".txt");
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  try {
    config.validate();
    if (!config.cache_dir.empty()) {
      std::filesystem::create_directories(config.cache_dir);
      mp::BernoulliCache::global().load(bernoulli_file(config));
    }
    int status = exit_code::ok;
    switch (config.mode) {
      case Mode::Value: status = run_value(config, out, log); break;
      case Mode::Line: status = run_line(config, out, log); break;
      case Mode::VerifyPhi: status = run_verify_phi(config, out, log); break;
      case Mode::Oracle: status = run_oracle(config, out, log); break;
      case Mode::Partition: status = run_partition(config, out, log); break;
      case Mode::Table1: status = run_table1(config, out, log); break;
    }
    if (!config.cache_dir.empty()) {
      auto& cache = mp::BernoulliCache::global();
      if (cache.size() > 0) cache.save(bernoulli_file(config), mp::Precision(config.prec).bits(), cache.size() - 1);
    }
    return status;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const funceq::MissingDataError& e) {
    log << "missing data: " << e.what() << '\n';
    return exit_code::missing_data;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::domain_error& e) {
    log << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  }
}

}  // namespace selberg::cli
