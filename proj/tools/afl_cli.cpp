#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "afl/checks.hpp"

namespace {

struct Flags {
  std::optional<long> p;
  std::optional<int> precision;
  std::optional<std::string> setting;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<int> samples;
  std::optional<int> vmin;
  std::optional<int> vmax;
  std::optional<int> n;
  std::optional<int> k;
};

struct QueryFlags {
  bool lie = false;
  std::string a = "0", b = "1", c = "0", d = "0";
  std::string function;
};

struct GermFlags {
  std::string a0 = "1", d0 = "1";
  long level = 2;
  bool lower = false;
};

afl::RunConfig resolve(const Flags& f) {
  afl::RunConfig cfg;
  if (f.config) cfg = afl::load_config(*f.config);
  auto set = [&](const char* key, const auto& opt) {
    if (opt) {
      std::ostringstream os;
      os << *opt;
      afl::apply_config_entry(cfg, key, os.str());
    }
  };
  set("p", f.p);
  set("precision", f.precision);
  set("setting", f.setting);
  set("seed", f.seed);
  set("out", f.out);
  set("jobs", f.jobs);
  set("samples", f.samples);
  set("vmin", f.vmin);
  set("vmax", f.vmax);
  set("n", f.n);
  set("k", f.k);
  cfg.validate();
  return cfg;
}

afl::ElementQuery to_query(const QueryFlags& q) {
  afl::ElementQuery out;
  out.lie = q.lie;
  out.a = afl::parse_element(q.a);
  out.b = afl::parse_element(q.b);
  out.c = afl::parse_element(q.c);
  out.d = afl::parse_element(q.d);
  out.function = q.function;
  return out;
}

int emit(const afl::Report& rep, const afl::RunConfig& cfg) {
  std::string text = rep.to_jsonl();
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(cfg.out, std::ios::app);
    if (!os) throw afl::ConfigError("cannot open " + cfg.out);
    os << text;
  }
  std::cerr << rep.records.size() << " records, " << rep.failures() << " failures, " << rep.negative_controls()
            << " negative controls\n";
  return rep.ok() ? 0 : 1;
}

void add_query_options(CLI::App* sub, QueryFlags& q) {
  sub->add_flag("--lie", q.lie, "Lie algebra element [[a, b], [c, d]] instead of gamma(a, b)");
  sub->add_option("--a", q.a, "Entry a as x0 or x0:x1 (x0 + x1 w)");
  sub->add_option("--b", q.b, "Entry b");
  sub->add_option("--c", q.c, "Entry c (Lie only)");
  sub->add_option("--d", q.d, "Entry d (Lie only)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification harness for n = 2 orbital integrals, intersection numbers and local models"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--p", f.p, "Odd prime p");
  app.add_option("--precision", f.precision, "Working p-adic precision");
  app.add_option("--setting", f.setting, "Setting (unram-selfdual, unram-almost-selfdual, ram-even-n2, ...)");
  app.add_option("--seed", f.seed, "Sampling seed");
  app.add_option("--config", f.config, "key = value config file");
  app.add_option("--out", f.out, "Append records to this file instead of stdout");
  app.add_option("--jobs", f.jobs, "Worker threads");
  app.add_option("--samples", f.samples, "Samples per check");
  app.add_option("--vmin", f.vmin, "Lower end of the valuation window");
  app.add_option("--vmax", f.vmax, "Upper end of the valuation window");
  app.add_option("--n", f.n, "Rank for localmodel and lattice");
  app.add_option("--k", f.k, "Local model base ring O_F / pi^k");

  std::function<afl::Report(const afl::RunConfig&)> run;
  auto suite = [&](const char* name, const char* help, afl::Report (*cmd)(const afl::RunConfig&)) {
    app.add_subcommand(name, help)->callback([&run, cmd] { run = cmd; });
  };
  suite("fl-check", "Fundamental lemma for n = 2 in the unramified settings", afl::cmd_fl_check);
  suite("at-check", "Ramified n = 2 arithmetic transfer verification", afl::cmd_at_check);
  suite("reduction-check", "Theta, Cayley, star and index reductions", afl::cmd_reduction_check);
  suite("localmodel", "Local model charts and the nu map", afl::cmd_localmodel);
  suite("substrate", "Arithmetic substrate laws", afl::cmd_substrate);
  suite("lattice", "Line-count index by enumeration", afl::cmd_lattice);

  QueryFlags orb_q, dorb_q, int_q;
  CLI::App* orb = app.add_subcommand("orb", "Orb(m, f) at s = 0");
  add_query_options(orb, orb_q);
  orb->add_option("--function", orb_q.function, "one_S_O, one_Kprime, one_frak_S_O or one_frak_Kprime");
  orb->callback([&] { run = [&](const afl::RunConfig& cfg) { return afl::cmd_orb(cfg, to_query(orb_q)); }; });
  CLI::App* dorb = app.add_subcommand("dorb", "d/ds Orb(m, f) at s = 0");
  add_query_options(dorb, dorb_q);
  dorb->add_option("--function", dorb_q.function, "one_S_O, one_Kprime, one_frak_S_O or one_frak_Kprime");
  dorb->callback([&] { run = [&](const afl::RunConfig& cfg) { return afl::cmd_dorb(cfg, to_query(dorb_q)); }; });
  CLI::App* inter = app.add_subcommand("int", "Intersection number: closed form against the oracle");
  add_query_options(inter, int_q);
  inter->callback([&] { run = [&](const afl::RunConfig& cfg) { return afl::cmd_int(cfg, to_query(int_q)); }; });

  GermFlags gq;
  CLI::App* germ = app.add_subcommand("germ", "Germ fit of a congruence ball near diag(a0, d0)");
  germ->add_option("--a0", gq.a0, "Center entry a0");
  germ->add_option("--d0", gq.d0, "Center entry d0");
  germ->add_option("--level", gq.level, "Ball level");
  germ->add_flag("--lower", gq.lower, "Ball around the lower-triangular center");
  germ->callback([&] {
    run = [&](const afl::RunConfig& cfg) {
      afl::GermQuery q;
      q.a0 = afl::parse_element(gq.a0);
      q.d0 = afl::parse_element(gq.d0);
      q.level = gq.level;
      q.upper = !gq.lower;
      return afl::cmd_germ(cfg, q);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    afl::RunConfig cfg = resolve(f);
    return emit(run(cfg), cfg);
  } catch (const afl::InsufficientPrecision& e) {
    std::cerr << "error: " << e.what() << " (hint: increase --precision)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
