#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afl/errors.hpp"
#include "afl/orbit.hpp"
#include "afl/series.hpp"

namespace afl {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

/// Parameters of a verification run.  The config file format is one
/// `key = value` per line with `#` comments; keys are the field names below.
struct RunConfig {
  long p = 3;
  int precision = 64;
  std::optional<Setting> setting;
  /// Samples per check (per setting and prime).
  int samples = 200;
  /// Valuation window for the stratified grid of (v(b), v(1 - Na)).
  int vmin = -3;
  int vmax = 3;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Rank for localmodel (0 runs n = 2 and n = 4) and lattice.
  int n = 0;
  /// Local model base ring O_F / pi^k.
  int k = 6;
  std::string out;

  /// Throws ConfigError on inconsistent values (odd prime, window within
  /// precision minus guard digits, positive jobs).
  void validate() const;
};

/// Sets one field from its textual value; throws ConfigError for unknown keys
/// or malformed values.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

struct CheckRecord {
  std::string check;
  std::vector<std::pair<std::string, std::string>> params;
  LogValue lhs;
  LogValue rhs;
  bool pass = false;
  /// The identity is expected to fail for this input.
  bool negative_control = false;
  std::vector<std::string> certificates;
  /// Sort key (prime, setting, sample index, ...).
  std::vector<long> key;
};

/// Record with pass = (lhs == rhs).
CheckRecord make_record(std::string check, std::vector<long> key,
                        std::vector<std::pair<std::string, std::string>> params, const LogValue& lhs,
                        const LogValue& rhs, std::vector<std::string> certificates = {},
                        bool negative_control = false);
LogValue log_value(const GaussQ& r0);
LogValue log_value(bool b);

struct Report {
  std::vector<CheckRecord> records;

  void append(Report other);
  /// Orders records by (check, key).
  void sort();
  /// Every record that is not a negative control passes.
  bool ok() const;
  int count(const std::string& check_prefix) const;
  int failures() const;
  int negative_controls() const;
  std::string to_jsonl() const;
};

/// Unramified n = 2 fundamental lemma (self-dual and almost self-dual, group
/// and Lie algebra) on the stratified grid.
Report cmd_fl_check(const RunConfig& cfg);
/// Ramified n = 2 settings: irregular orbital integrals, intersection
/// numbers against the lifting oracle, germ fits and derivative constancy.
Report cmd_at_check(const RunConfig& cfg);
/// Unramified reductions: theta, Cayley, star vanishing, line-count index,
/// lifting-condition theta invariance and Cayley orders.
Report cmd_reduction_check(const RunConfig& cfg);
/// Local models: the n = 2 Gamma_0 chart, the n = 4 nu closed form and
/// relations on flat points, and the worst-point negative control.
Report cmd_localmodel(const RunConfig& cfg);
/// Arithmetic substrate laws: eta, eta~, reduced norm, F^1 measure, dual
/// lattices and OrbitalSeries.
Report cmd_substrate(const RunConfig& cfg);

/// Element x0 + x1 w of F written "x0" or "x0:x1" with rational coordinates.
struct ElementSpec {
  std::string x0 = "0";
  std::string x1 = "0";
};
ElementSpec parse_element(const std::string& text);

/// Input of the single-element commands: gamma(a, b) in S, or
/// y = [[a, b], [c, d]] in s when lie is set.
struct ElementQuery {
  bool lie = false;
  ElementSpec a, b, c, d;
  /// one_S_O, one_Kprime, one_frak_S_O or one_frak_Kprime (default by lie).
  std::string function;
};

/// Orb(m, f) at s = 0, recomputed at a higher precision as a certificate.
Report cmd_orb(const RunConfig& cfg, const ElementQuery& q);
/// dOrb(m, f) at s = 0, recomputed at a higher precision as a certificate.
Report cmd_dorb(const RunConfig& cfg, const ElementQuery& q);
/// Closed-form intersection number against the lifting oracle.
Report cmd_int(const RunConfig& cfg, const ElementQuery& q);
/// Line count in F_q^n (q = p) by enumeration against (q^n - 1)/(q - 1).
Report cmd_lattice(const RunConfig& cfg);

struct GermQuery {
  ElementSpec a0{"1", "0"};
  ElementSpec d0{"1", "0"};
  long level = 2;
  bool upper = true;
};
/// Germ fit of the congruence ball around [[a0, t], [0, d0]] (or the lower
/// variant) with residuals on fresh neighborhood samples.
Report cmd_germ(const RunConfig& cfg, const GermQuery& q);

/// Lines in F_q^n counted by enumerating vectors whose first nonzero
/// coordinate is 1.
long enumerate_lines(long n, long q);

}  // namespace afl
