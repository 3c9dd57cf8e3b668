#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "afl/checks.hpp"

using namespace afl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

RunConfig config(long p, std::optional<Setting> s, int samples) {
  RunConfig cfg;
  cfg.p = p;
  cfg.setting = s;
  cfg.samples = samples;
  return cfg;
}

std::string param(const CheckRecord& r, const std::string& key) {
  for (const auto& [k, v] : r.params)
    if (k == key) return v;
  return "";
}

/// Counts of records and failures of one check, optionally grouped by a parameter.
std::map<std::string, std::pair<int, int>> tally(const Report& rep, const std::string& check,
                                                 const std::string& by = "") {
  std::map<std::string, std::pair<int, int>> out;
  for (const auto& r : rep.records) {
    if (r.check != check) continue;
    auto& slot = out[by.empty() ? "" : param(r, by)];
    ++slot.first;
    if (!r.pass) ++slot.second;
  }
  return out;
}

/// Every group has at least `min` records and none fails.
void require_all(Outcome& o, const Report& rep, const std::string& check, int min, const std::string& by = "",
                 size_t groups = 1) {
  auto t = tally(rep, check, by);
  o.require(t.size() >= groups, check + ": expected " + std::to_string(groups) + " groups");
  for (const auto& [g, cf] : t) {
    std::string name = check + (g.empty() ? "" : "[" + g + "]");
    o.require(cf.first >= min, name + ": " + std::to_string(cf.first) + " < " + std::to_string(min));
    o.require(cf.second == 0, name + ": " + std::to_string(cf.second) + " failures");
  }
}

void require_negative_controls_fail(Outcome& o, const Report& rep, const std::string& check, int min) {
  int seen = 0;
  for (const auto& r : rep.records) {
    if (r.check != check) continue;
    o.require(r.negative_control, check + ": not flagged as negative control");
    o.require(!r.pass, check + ": negative control passed");
    ++seen;
  }
  o.require(seen >= min, check + ": " + std::to_string(seen) + " negative controls < " + std::to_string(min));
}

int count_with_certificate(const Report& rep, const std::string& check, const std::string& setting,
                           const std::string& cert) {
  int n = 0;
  for (const auto& r : rep.records)
    if (r.check == check && param(r, "setting") == setting)
      for (const auto& c : r.certificates) n += c == cert;
  return n;
}

Outcome fl_criterion(Setting s, const std::string& check) {
  Outcome o;
  for (long p : {3L, 5L, 7L}) {
    Report rep = cmd_fl_check(config(p, s, 200));
    require_all(o, rep, check, 200);
    std::set<std::string> sides;
    for (const auto& r : rep.records)
      if (r.check == check) sides.insert(param(r, "side"));
    o.require(sides.size() == 2, check + ": both sides sampled at p=" + std::to_string(p));
    if (s == Setting::UnramAlmostSelfDual) require_all(o, rep, "fl.unram-almost-selfdual.side0-kprime", 1);
  }
  return o;
}

Outcome irregular_criterion(const std::vector<Report>& at) {
  Outcome o;
  for (const auto& rep : at) {
    require_all(o, rep, "at.irregular.group", 100, "setting", 3);
    require_all(o, rep, "at.irregular.lie", 100, "setting", 3);
  }
  return o;
}

Outcome int_criterion(const std::vector<Report>& at) {
  Outcome o;
  for (const auto& rep : at) {
    require_all(o, rep, "at.int.group", 200, "setting", 3);
    require_all(o, rep, "at.int.lie", 200, "setting", 3);
    o.require(count_with_certificate(rep, "at.int.group", "ram-selfdual-0", "zero-branch") > 0,
              "selfdual-0 group zero branch not sampled");
    for (const char* s : {"ram-even-n2", "ram-selfdual-0", "ram-selfdual-1"}) {
      int zeros = count_with_certificate(rep, "at.int.lie", s, "zero-branch");
      o.require(zeros > 0 && zeros < 200, std::string(s) + " Lie: both branches sampled");
    }
    for (const char* s : {"ram-even-n2", "ram-selfdual-1"})
      o.require(count_with_certificate(rep, "at.int.group", s, "zero-branch") == 0,
                std::string(s) + " group: unexpected zero");
  }
  return o;
}

Outcome germ_criterion(const std::vector<Report>& at) {
  Outcome o;
  for (size_t i = 0; i < 2; ++i) {
    const Report& rep = at[i];
    std::map<std::string, int> balls;
    for (const auto& r : rep.records) {
      if (r.check != "at.germ.fit") continue;
      o.require(r.pass, "germ fit residual nonzero");
      o.require(r.rhs.r0.re >= 30, "fewer than 30 held-out samples");
      ++balls[param(r, "center")];
    }
    o.require(balls.size() == 3, "three centers");
    for (const auto& [center, n] : balls) o.require(n >= 4, "center " + center + ": fewer than 4 balls");
    require_all(o, rep, "at.germ.cancellation", 1);
    std::map<std::string, int> constancy;
    for (const auto& r : rep.records)
      if (r.check == "at.germ.constancy") {
        o.require(r.pass, "derivative quantity not constant");
        ++constancy[param(r, "center") + "/" + param(r, "sigma")];
      }
    o.require(constancy.size() == 6, "constancy on both sides at every center");
    for (const auto& [k, n] : constancy) o.require(n >= 10, "constancy " + k + ": fewer than 10 samples");
    require_negative_controls_fail(o, rep, "at.germ.single-ball-drift", 3);
  }
  return o;
}

Outcome reduction_criterion() {
  Outcome o;
  for (long p : {3L, 5L, 7L}) {
    Report rep = cmd_reduction_check(config(p, std::nullopt, 100));
    for (const char* c : {"reduction.theta.series", "reduction.theta.derivative", "reduction.theta.transfer",
                          "reduction.cayley.kprime.series", "reduction.cayley.kprime.derivative",
                          "reduction.cayley.so.series", "reduction.cayley.so.derivative",
                          "reduction.cayley.transfer", "reduction.star.kprime", "reduction.star.symmetrized-ball",
                          "reduction.lint-theta"})
      require_all(o, rep, c, 100);
    require_all(o, rep, "reduction.index", 15);
    int positive = 0;
    for (const auto& r : rep.records)
      if (r.check == "reduction.cayley-order") {
        o.require(r.pass != r.negative_control, "Cayley order check misclassified");
        positive += !r.negative_control;
      }
    o.require(positive >= 50, "too few strongly integral Cayley samples");
  }
  return o;
}

Outcome localmodel_criterion() {
  Outcome o;
  for (long p : {3L, 5L}) {
    RunConfig cfg = config(p, std::nullopt, 50);
    cfg.k = 6;
    Report rep = cmd_localmodel(cfg);
    for (const char* c : {"localmodel.n2.gamma0", "localmodel.n2.chart-image", "localmodel.n2.chart-coordinates",
                          "localmodel.n2.conditions", "localmodel.n2.nu", "localmodel.n2.off-hyperbola",
                          "localmodel.n4.relations", "localmodel.n4.closed-form-vs-nu",
                          "localmodel.n4.closed-form-vs-flat", "localmodel.n4.closed-form-columns"})
      require_all(o, rep, c, 50);
    require_all(o, rep, "localmodel.n4.not-flat.naive", 1);
    require_negative_controls_fail(o, rep, "localmodel.n4.not-flat.relations", 1);
    require_negative_controls_fail(o, rep, "localmodel.n4.not-flat.nu-wedge", 1);
  }
  return o;
}

Outcome substrate_criterion() {
  Outcome o;
  Report all;
  for (long p : {3L, 5L, 7L}) all.append(cmd_substrate(config(p, std::nullopt, 100)));
  for (const char* c :
       {"substrate.eta.multiplicative", "substrate.eta.trivial-on-norms", "substrate.eta-tilde.extends-eta",
        "substrate.eta-tilde.multiplicative", "substrate.quaternion.norm-multiplicative",
        "substrate.quaternion.anisotropic", "substrate.lattice.dual-involution", "substrate.series.ring-laws",
        "substrate.series.derivation"})
    require_all(o, all, c, 500);
  Report measure;
  for (long p : {3L, 5L, 7L}) measure.append(cmd_substrate(config(p, std::nullopt, 500)));
  require_all(o, measure, "substrate.measure.additivity", 500);
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
  /// Charged for inputs shared with other criteria.
  const double* shared_seconds = nullptr;
};

}  // namespace

int main() {
  std::vector<Report> at;
  double at_seconds = 0;
  auto at_reports = [&]() -> const std::vector<Report>& {
    if (at.empty()) {
      auto start = std::chrono::steady_clock::now();
      for (long p : {3L, 5L, 7L}) at.push_back(cmd_at_check(config(p, std::nullopt, 200)));
      at_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return at;
  };
  std::vector<Criterion> criteria = {
      {1, "FL self-dual n=2", 60, [] { return fl_criterion(Setting::UnramSelfDual, "fl.unram-selfdual.group"); }},
      {2, "FL almost-self-dual n=2", 60,
       [] { return fl_criterion(Setting::UnramAlmostSelfDual, "fl.unram-almost-selfdual.group"); }},
      {3, "Irregular orbital integrals", 300, [&] { return irregular_criterion(at_reports()); }, &at_seconds},
      {4, "Intersection numbers vs oracle", 300, [&] { return int_criterion(at_reports()); }, &at_seconds},
      {5, "Germ expansion and derivative constancy", 300, [&] { return germ_criterion(at_reports()); }, &at_seconds},
      {6, "Reductions (theta, Cayley, star, index, lifting)", 300, reduction_criterion},
      {7, "Local models (Gamma_0 chart, nu closed form, negative control)", 300, localmodel_criterion},
      {8, "Arithmetic substrate properties", 60, substrate_criterion},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.shared_seconds && secs < *c.shared_seconds) secs += *c.shared_seconds;
    if (secs > c.limit_seconds) o.require(false, "runtime limit exceeded");
    std::printf("%s %d %s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
