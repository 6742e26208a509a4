#pragma once

// Run configurations for the command-line front end. run() is kept in the
// library so the Python module and the tests drive the same code paths.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace selberg::cli {

enum class Mode { Value, Line, VerifyPhi, Oracle, Partition, Table1 };
enum class Format { Json, Csv };

Mode parse_mode(const std::string& name);
Format parse_format(const std::string& name);
std::string to_string(Mode mode);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int not_converged = 2;
inline constexpr int config_error = 3;
inline constexpr int missing_data = 4;
}  // namespace exit_code

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Mode mode = Mode::Value;
  int q = 3;
  std::string s = "0.5+5i";
  double t_min = 1.0;
  double t_max = 10.0;
  double t_step = 1.0;

  int n0 = 50;
  double delta = 1e-7;
  double eps = 1e-7;
  int prec = 50;  // decimal digits
  int n_max = 400;
  int prec_max = 400;
  double time_budget = 0.0;  // seconds per value; 0 means unlimited
  int c = 1;                 // sign in the functional equation

  std::vector<int> n_values{25, 50, 75};  // table1 rows per precision
  double norm_max = 1e4;                  // oracle: X
  int word_length = 40;                   // oracle: L
  long n_check = 50;                      // partition: digits checked

  std::filesystem::path phi_table;
  std::filesystem::path cache_dir;
  std::filesystem::path out;
  Format format = Format::Json;
  int workers = 0;  // 0: hardware concurrency

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  /// t_min, t_min + t_step, ... up to t_max (inclusive within 1e-9 t_step).
  std::vector<double> t_grid() const;
};

/// Runs one mode, writing its artifact to `out` and progress to `log`.
/// Returns one of the exit codes; configuration and missing-data errors are
/// reported on `log` rather than thrown.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace selberg::cli
