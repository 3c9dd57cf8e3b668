#include "afl/checks.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "afl/fmat.hpp"
#include "afl/intersection.hpp"
#include "afl/lattice.hpp"
#include "afl/local_model.hpp"
#include "afl/measure.hpp"
#include "afl/orbital.hpp"
#include "afl/sampling.hpp"

namespace afl {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return v;
}

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::uint64_t tag_of(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

long setting_index(Setting s) { return static_cast<long>(s); }

/// Runs f(0), ..., f(count - 1) on `jobs` threads; results keep index order and
/// the lowest-index exception is rethrown.
template <class F>
std::vector<CheckRecord> run_indexed(int count, int jobs, F&& f) {
  std::vector<std::vector<CheckRecord>> slots(static_cast<size_t>(std::max(count, 0)));
  std::vector<std::exception_ptr> errors(slots.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::max(1, std::min(jobs, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<CheckRecord> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

void add(Report& rep, std::vector<CheckRecord> recs) {
  for (auto& r : recs) rep.records.push_back(std::move(r));
}

std::string str(long v) { return std::to_string(v); }

FMat conj_x(const FMat& m, const F0Elem& x) {
  FMat r = m;
  r(0, 1) = m(0, 1) / FElem(x);
  r(1, 0) = m(1, 0) * FElem(x);
  return r;
}

/// Center [[a0, t], [0, d0]] (or lower) of a congruence ball with
/// t / conj(t) = -a0 d0 up to the unit part, shifted by varpi^shift.
FMat off_center(const FElem& a0, const FElem& d0, long shift, bool upper) {
  const PadicContext& c = a0.ctx();
  FElem z = FElem::from_int(c, 1) - a0 * d0;
  if (z.is_exact_zero() || z.is_indeterminate()) z = FElem::gen(c);
  z = z * FElem(F0Elem::p_power(c, -floor_div(z.valuation(), c.e())));
  FElem t = z * FElem::pi_power(c, c.e() * shift);
  FElem zero = FElem::zero(c);
  return upper ? fmat(c, {{a0, t}, {zero, d0}}) : fmat(c, {{a0, zero}, {t, d0}});
}

/// Number of exponents at which two series differ.
long series_mismatch(const OrbitalSeries& a, const OrbitalSeries& b) {
  return static_cast<long>((a - b).coefficients().size());
}

/// A series identity as two records: the full series and its derivative at 0.
void series_records(std::vector<CheckRecord>& out, const std::string& check, const std::vector<long>& key,
                    const Params& params, const OrbitalSeries& lhs, const OrbitalSeries& rhs) {
  out.push_back(make_record(check + ".series", key, params, log_value(GaussQ(series_mismatch(lhs, rhs))),
                            log_value(GaussQ(0)), {"lhs=" + lhs.to_string(), "rhs=" + rhs.to_string()}));
  out.push_back(make_record(check + ".derivative", key, params, lhs.derivative_at_0(), rhs.derivative_at_0()));
}

FElem element(const PadicContext& c, const ElementSpec& e) {
  try {
    mpq_class x0(e.x0), x1(e.x1);
    x0.canonicalize();
    x1.canonicalize();
    return FElem::from_coords(c, x0, x1);
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad element coordinates '" + e.x0 + ":" + e.x1 + "'");
  }
}

std::string spec_string(const ElementSpec& e) { return e.x1 == "0" ? e.x0 : e.x0 + ":" + e.x1; }

std::vector<sampling::Stratum> lie_strata(int vmin, int vmax) {
  std::vector<sampling::Stratum> out;
  for (int kb = vmin; kb <= vmax; ++kb)
    for (int kc = vmin; kc <= vmax; ++kc) out.push_back({kb, kc});
  return out;
}

/// gamma in the stratum of index i on the given side; strata whose elements all
/// lie on the other side are passed over in order.
std::optional<FMat> sample_on_side(std::mt19937_64& rng, const PadicContext& c,
                                   const std::vector<sampling::Stratum>& strata, int i, int want,
                                   sampling::Stratum& used) {
  for (size_t offset = 0; offset < strata.size(); ++offset) {
    used = strata[(static_cast<size_t>(i) + offset) % strata.size()];
    for (int attempt = 0; attempt < 32; ++attempt) {
      auto cand = sampling::stratified_S2(rng, c, used);
      if (cand && side(*cand) == want) return cand;
    }
  }
  return std::nullopt;
}

// ---- fl-check ----------------------------------------------------------------

void fl_setting(Report& rep, const RunConfig& cfg, const PadicContext& c, Setting s) {
  const bool sd = s == Setting::UnramSelfDual;
  const std::string name = to_string(s);
  const int target = sd ? 0 : 1;
  TestFunctionU kg = unitary_test_function(c, s, sd ? "K0" : "K1");
  TestFunctionU kl = unitary_test_function(c, s, sd ? "k0" : "k1");
  TestFunctionS fg = sd ? TestFunctionS::one_S_O(c) : TestFunctionS::one_Kprime(c).scaled(GaussQ(-1));
  TestFunctionS fl = sd ? TestFunctionS::one_frak_S_O(c) : TestFunctionS::one_frak_Kprime(c).scaled(GaussQ(-1));
  TestFunctionS kprime = TestFunctionS::one_Kprime(c);

  auto strata = sampling::group_strata(c, cfg.vmin, cfg.vmax);
  if (!strata.empty()) {
    add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
      std::vector<CheckRecord> out;
      const auto& st = strata[static_cast<size_t>(i) % strata.size()];
      auto rng = sampling::sample_rng(cfg.seed, tag_of("fl.group." + name), c.p(), i);
      std::optional<FMat> g = sampling::stratified_S2(rng, c, st);
      if (!g) throw PreconditionViolated("no sample found in stratum");
      int sd_side = side(*g);
      Params params = {{"p", str(c.p())},        {"setting", name},         {"i", str(i)},
                       {"vb", str(st.vb)},       {"vt", str(st.vt)},        {"side", str(sd_side)},
                       {"a", (*g)(0, 0).to_string()}, {"b", (*g)(0, 1).to_string()}};
      std::vector<long> key = {c.p(), setting_index(s), i};
      GaussQ lhs = transfer_factor_S(*g) * orb_S(*g, fg).value_at_0();
      GaussQ rhs(0);
      std::vector<std::string> certs = {"side=" + str(sd_side)};
      if (sd_side == target) {
        FMat u = match_group(s, *g);
        if (!match_check(*g, u)) throw PreconditionViolated("matching element does not match");
        rhs = GaussQ(orb_unitary(u, kg));
        certs.push_back("match=" + u.to_string());
      }
      out.push_back(make_record("fl." + name + ".group", key, params, log_value(lhs), log_value(rhs), certs));
      if (!sd && sd_side == 0)
        out.push_back(make_record("fl." + name + ".side0-kprime", key, params,
                                  log_value(orb_S(*g, kprime).value_at_0()), log_value(GaussQ(0))));
      return out;
    }));
  }

  auto lstrata = lie_strata(cfg.vmin, cfg.vmax);
  if (!lstrata.empty()) {
    add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
      const auto& st = lstrata[static_cast<size_t>(i) % lstrata.size()];
      auto rng = sampling::sample_rng(cfg.seed, tag_of("fl.lie." + name), c.p(), i);
      std::optional<FMat> y = sampling::stratified_s2(rng, c, st.vb, st.vt);
      if (!y) throw PreconditionViolated("no regular semisimple sample in stratum");
      int sl = side_lie(*y);
      Params params = {{"p", str(c.p())}, {"setting", name}, {"i", str(i)}, {"kb", str(st.vb)},
                       {"kc", str(st.vt)}, {"side", str(sl)}, {"y", y->to_string()}};
      GaussQ lhs = transfer_factor_lie(*y) * orb_lie(*y, fl).value_at_0();
      GaussQ rhs(0);
      std::vector<std::string> certs = {"side=" + str(sl)};
      if (sl == target) {
        FMat x = match_lie(s, *y);
        if (!match_check_lie(*y, x)) throw PreconditionViolated("matching element does not match");
        rhs = GaussQ(orb_unitary(x, kl));
      }
      return std::vector<CheckRecord>{make_record("fl." + name + ".lie", {c.p(), setting_index(s), i}, params,
                                                  log_value(lhs), log_value(rhs), certs)};
    }));
  }
}

// ---- at-check ----------------------------------------------------------------

bool is_lie_name(const std::string& name) { return !name.empty() && name[0] == 'k'; }

void at_irregular(Report& rep, const RunConfig& cfg, const PadicContext& c, Setting s) {
  const std::string sname = to_string(s);
  for (const auto& fname : unitary_test_function_names(s)) {
    TestFunctionU f = unitary_test_function(c, s, fname);
    bool lie = is_lie_name(fname);
    add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
      auto rng = sampling::sample_rng(cfg.seed, tag_of("at.irregular." + sname + fname), c.p(), i);
      FElem a = lie ? sampling::random_imag(rng, c, -1, 2) : sampling::random_norm_one(rng, c);
      FElem d = lie ? sampling::random_imag(rng, c, -1, 2) : sampling::random_norm_one(rng, c);
      Params params = {{"p", str(c.p())}, {"setting", sname}, {"function", fname}, {"i", str(i)},
                       {"a", a.to_string()}, {"d", d.to_string()}};
      mpq_class want = 1;
      if (lie) want = (a.is_integral() && d.is_integral()) ? 1 : 0;
      mpq_class got = orb_unitary(fmat_diag({a, d}), f);
      return std::vector<CheckRecord>{make_record(lie ? "at.irregular.lie" : "at.irregular.group",
                                                  {c.p(), setting_index(s), i}, params, log_value(GaussQ(got)),
                                                  log_value(GaussQ(want)))};
    }));
  }
}

void at_int(Report& rep, const RunConfig& cfg, const PadicContext& c, Setting s) {
  const std::string sname = to_string(s);
  const int pside = presentation_side(s);
  auto strata = sampling::group_strata(c, cfg.vmin, cfg.vmax);
  if (!strata.empty()) {
    add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
      auto rng = sampling::sample_rng(cfg.seed, tag_of("at.int.group." + sname), c.p(), i);
      sampling::Stratum st;
      std::optional<FMat> g = sample_on_side(rng, c, strata, i, pside, st);
      if (!g) throw PreconditionViolated("no sample on the presentation side");
      GroupPresentation pres = match_presentation(s, *g);
      long closed = int_closed_form(s, pres);
      long oracle = s == Setting::RamEven ? int_oracle_ram_even(pres) : int_oracle_selfdual(s, pres);
      Params params = {{"p", str(c.p())}, {"setting", sname}, {"i", str(i)}, {"vb", str(st.vb)},
                       {"vt", str(st.vt)}, {"a", (*g)(0, 0).to_string()}, {"b", (*g)(0, 1).to_string()}};
      std::vector<std::string> certs;
      if (closed == 0) certs.push_back("zero-branch");
      return std::vector<CheckRecord>{make_record("at.int.group", {c.p(), setting_index(s), i}, params,
                                                  log_value(GaussQ(closed)), log_value(GaussQ(oracle)), certs)};
    }));
  }
  auto lstrata = lie_strata(cfg.vmin, cfg.vmax);
  if (!lstrata.empty()) {
    add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
      const auto& st = lstrata[static_cast<size_t>(i) % lstrata.size()];
      auto rng = sampling::sample_rng(cfg.seed, tag_of("at.int.lie." + sname), c.p(), i);
      std::optional<FMat> y;
      for (int attempt = 0; attempt < 256 && !y; ++attempt) {
        auto cand = sampling::stratified_s2(rng, c, st.vb, st.vt);
        if (cand && side_lie(*cand) == pside) y = cand;
      }
      if (!y) throw PreconditionViolated("no Lie sample on the presentation side in stratum");
      LiePresentation pres = match_presentation_lie(s, *y);
      long closed = int_closed_form_lie(s, pres);
      long oracle = s == Setting::RamEven ? int_oracle_ram_even_lie(pres) : int_oracle_selfdual_lie(s, pres);
      Params params = {{"p", str(c.p())}, {"setting", sname}, {"i", str(i)}, {"kb", str(st.vb)},
                       {"kc", str(st.vt)}, {"y", y->to_string()}};
      std::vector<std::string> certs;
      if (closed == 0) certs.push_back("zero-branch");
      return std::vector<CheckRecord>{make_record("at.int.lie", {c.p(), setting_index(s), i}, params,
                                                  log_value(GaussQ(closed)), log_value(GaussQ(oracle)), certs)};
    }));
  }
}

constexpr int kGermHeldout = 30;

std::vector<std::pair<FElem, FElem>> germ_centers(const PadicContext& c) {
  FElem one = FElem::from_int(c, 1);
  return {{one, one}, {one, -one}, {norm_one_from(one + FElem::gen(c)), one}};
}

/// Fit records for one congruence ball: held-out residuals on fresh samples.
CheckRecord germ_fit_record(const TestFunctionS& f, const GermFit& fit, const Params& params,
                            const std::vector<long>& key, std::uint64_t seed) {
  auto samples = germ_samples_S(fit.a0, fit.d0, fit.level, kGermHeldout, seed);
  long zero = 0;
  for (const auto& m : samples)
    if (fit.residual(m, f).is_zero()) ++zero;
  return make_record("at.germ.fit", key, params, log_value(GaussQ(zero)),
                     log_value(GaussQ(static_cast<long>(samples.size()))),
                     {"neighborhood-level=" + str(fit.level), "phi+(0)=" + fit.phi_plus_at_0().to_string(),
                      "phi-(0)=" + fit.phi_minus_at_0().to_string(), "fit_samples=" + str(fit.fit_samples),
                      "heldout_in_fit=" + str(fit.heldout_samples)});
}

void at_germ(Report& rep, const RunConfig& cfg, const PadicContext& c, const std::set<int>& sigmas) {
  auto centers = germ_centers(c);
  add(rep, run_indexed(static_cast<int>(centers.size()), cfg.jobs, [&](int ci) {
    std::vector<CheckRecord> out;
    const auto& [a0, d0] = centers[static_cast<size_t>(ci)];
    std::vector<TestFunctionS> balls;
    std::vector<std::string> names;
    for (long level : {2L, 3L})
      for (bool upper : {true, false}) {
        balls.push_back(TestFunctionS::ball(off_center(a0, d0, 1, upper), level));
        names.push_back(std::string(upper ? "upper" : "lower") + "-level" + str(level));
      }
    std::vector<GermFit> fits;
    for (size_t b = 0; b < balls.size(); ++b) {
      GermOptions opt;
      opt.seed = cfg.seed + 17 * static_cast<std::uint64_t>(ci) + b;
      GermFit fit = germ_fit(balls[b], a0, d0, opt);
      Params params = {{"p", str(c.p())}, {"center", str(ci)}, {"a0", a0.to_string()},
                       {"d0", d0.to_string()}, {"ball", names[b]}};
      out.push_back(germ_fit_record(balls[b], fit, params, {c.p(), ci, static_cast<long>(b)},
                                    cfg.seed + 1000 + 31 * static_cast<std::uint64_t>(ci) + b));
      fits.push_back(fit);
    }
    {
      // A single ball has phi_- = 0 but phi_+ != 0, so on side -1 the quantity drifts.
      auto samples = germ_samples_S(a0, d0, fits[0].level, 80, cfg.seed + 3000 + static_cast<std::uint64_t>(ci));
      std::set<std::string> values;
      for (const auto& m : samples)
        if (side_sign(m, false) == -1) values.insert(germ_constant_quantity(fits[0], m, balls[0]).to_string());
      Params params = {{"p", str(c.p())}, {"center", str(ci)}, {"ball", names[0]}, {"sigma", "-1"}};
      out.push_back(make_record("at.germ.single-ball-drift", {c.p(), ci}, params,
                                log_value(GaussQ(static_cast<long>(values.size()))), log_value(GaussQ(1)),
                                {"distinct values of the side -1 quantity"}, true));
    }
    for (int sigma : sigmas) {
      TestFunctionS f = one_sided_combination(balls[0], fits[0], balls[1], fits[1], sigma);
      GermOptions opt;
      opt.seed = cfg.seed + 500 + static_cast<std::uint64_t>(ci);
      GermFit fit = germ_fit(f, a0, d0, opt);
      Params base = {{"p", str(c.p())}, {"center", str(ci)}, {"sigma", str(sigma)}};
      std::vector<long> bkey = {c.p(), ci, sigma};
      out.push_back(make_record("at.germ.cancellation", bkey, base,
                                log_value(fit.phi_plus_at_0() + GaussQ(sigma) * fit.phi_minus_at_0()),
                                log_value(GaussQ(0))));
      auto samples = germ_samples_S(a0, d0, fit.level, 80, cfg.seed + 2000 + static_cast<std::uint64_t>(ci));
      std::optional<LogValue> first;
      long idx = 0;
      for (const auto& m : samples) {
        if (side_sign(m, false) != sigma) continue;
        LogValue v = germ_constant_quantity(fit, m, f);
        if (!first) first = v;
        Params params = base;
        params.emplace_back("i", str(idx));
        params.emplace_back("a", m(0, 0).to_string());
        params.emplace_back("b", m(0, 1).to_string());
        std::vector<long> key = bkey;
        key.push_back(idx++);
        out.push_back(make_record("at.germ.constancy", key, params, v, *first,
                                  {"residual_zero=" + str(fit.residual(m, f).is_zero())}));
      }
    }
    return out;
  }));
}

// ---- reduction-check ---------------------------------------------------------

void reduction_theta(Report& rep, const RunConfig& cfg, const PadicContext& c) {
  auto strata = lie_strata(cfg.vmin, cfg.vmax);
  if (strata.empty()) return;
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    std::vector<CheckRecord> out;
    const auto& st = strata[static_cast<size_t>(i) % strata.size()];
    auto rng = sampling::sample_rng(cfg.seed, tag_of("reduction.theta"), c.p(), i);
    std::optional<FMat> y = sampling::stratified_s2(rng, c, st.vb, st.vt);
    if (!y) throw PreconditionViolated("no regular semisimple sample in stratum");
    FMat ty = theta(*y);
    Params params = {{"p", str(c.p())}, {"i", str(i)}, {"y", y->to_string()}};
    std::vector<long> key = {c.p(), i};
    series_records(out, "reduction.theta", key, params, orb_lie(*y, TestFunctionS::one_frak_Kprime(c)),
                   orb_lie(ty, TestFunctionS::one_frak_S_O(c)));
    out.push_back(make_record("reduction.theta.transfer", key, params, log_value(transfer_factor_lie(*y)),
                              log_value(GaussQ(-1) * transfer_factor_lie(ty))));
    return out;
  }));
}

void reduction_cayley(Report& rep, const RunConfig& cfg, const PadicContext& c) {
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    std::vector<CheckRecord> out;
    auto rng = sampling::sample_rng(cfg.seed, tag_of("reduction.cayley"), c.p(), i);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      FMat y = sampling::random_s2(rng, c, -1, 2);
      if (!is_regular_semisimple(y)) continue;
      if (!det(fmat_identity(c, 2) - y).is_unit()) continue;
      FElem xi = sampling::random_norm_one(rng, c);
      FMat g = cayley(xi, y);
      Params params = {{"p", str(c.p())}, {"i", str(i)}, {"y", y.to_string()}, {"xi", xi.to_string()}};
      std::vector<long> key = {c.p(), i};
      series_records(out, "reduction.cayley.kprime", key, params, orb_lie(y, TestFunctionS::one_frak_Kprime(c)),
                     orb_S(g, TestFunctionS::one_Kprime(c)));
      series_records(out, "reduction.cayley.so", key, params, orb_lie(y, TestFunctionS::one_frak_S_O(c)),
                     orb_S(g, TestFunctionS::one_S_O(c)));
      out.push_back(make_record("reduction.cayley.transfer", key, params, log_value(transfer_factor_lie(y)),
                                log_value(transfer_factor_S(g))));
      return out;
    }
    throw PreconditionViolated("no strongly integral Cayley sample found");
  }));
}

void reduction_star(Report& rep, const RunConfig& cfg, const PadicContext& c) {
  auto strata = sampling::group_strata(c, cfg.vmin, cfg.vmax);
  if (strata.empty()) return;
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    auto rng = sampling::sample_rng(cfg.seed, tag_of("reduction.star"), c.p(), i);
    sampling::Stratum st;
    std::optional<FMat> g = sample_on_side(rng, c, strata, i, 0, st);
    if (!g) throw PreconditionViolated("no side 0 sample");
    FMat center = conj_x(*g, sampling::random_f0(rng, c, -1, 1));
    TestFunctionS b = TestFunctionS::ball(center, static_cast<long>(rng() % 3));
    TestFunctionS f = b + b.starred();
    Params params = {{"p", str(c.p())}, {"i", str(i)}, {"vb", str(st.vb)}, {"vt", str(st.vt)},
                     {"a", (*g)(0, 0).to_string()}, {"b", (*g)(0, 1).to_string()}};
    std::vector<long> key = {c.p(), i};
    return std::vector<CheckRecord>{
        make_record("reduction.star.kprime", key, params,
                    log_value(orb_S(*g, TestFunctionS::one_Kprime(c)).value_at_0()), log_value(GaussQ(0))),
        make_record("reduction.star.symmetrized-ball", key, params, log_value(orb_S(*g, f).value_at_0()),
                    log_value(GaussQ(0)))};
  }));
}

void reduction_index(Report& rep) {
  for (long n = 1; n <= 3; ++n)
    for (long q : {2L, 3L, 4L, 5L, 7L})
      rep.records.push_back(make_record("reduction.index", {n, q}, {{"n", str(n)}, {"q", str(q)}},
                                        log_value(GaussQ(enumerate_lines(n, q))),
                                        log_value(GaussQ(line_count_index(n, q)))));
}

void reduction_lifting(Report& rep, const RunConfig& cfg, const PadicContext& c) {
  FElem varpi = FElem::pi(c);
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    auto rng = sampling::sample_rng(cfg.seed, tag_of("reduction.lint-theta"), c.p(), i);
    FElem cc = sampling::random_f(rng, c, -1, 2);
    FMat x = fmat(c, {{sampling::random_imag(rng, c, -1, 2), -(varpi * cc.conj())},
                      {cc, sampling::random_imag(rng, c, -1, 2)}});
    theta_lifting_equivalent(x);
    Params params = {{"p", str(c.p())}, {"i", str(i)}, {"x", x.to_string()}};
    return std::vector<CheckRecord>{make_record("reduction.lint-theta", {c.p(), i}, params,
                                                log_value(lifts_to_product(x)),
                                                log_value(lifts_to_product(theta(x))))};
  }));
}

void reduction_cayley_order(Report& rep, const RunConfig& cfg, const PadicContext& c) {
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    auto rng = sampling::sample_rng(cfg.seed, tag_of("reduction.cayley-order"), c.p(), i);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      FElem xi = sampling::random_norm_one(rng, c);
      FMat x = fmat(c, {{sampling::random_integral_f(rng, c, 2), sampling::random_integral_f(rng, c, 2)},
                        {sampling::random_integral_f(rng, c, 2), sampling::random_integral_f(rng, c, 2)}});
      FElem d = det(fmat_identity(c, 2) - x);
      if (!d.is_nonzero()) continue;
      bool strongly = d.is_unit();
      Params params = {{"p", str(c.p())}, {"i", str(i)}, {"x", x.to_string()}, {"xi", xi.to_string()}};
      return std::vector<CheckRecord>{make_record("reduction.cayley-order", {c.p(), i}, params,
                                                  log_value(cayley_order_equal(xi, x)), log_value(true),
                                                  {strongly ? "det(1-x) unit" : "det(1-x) not a unit"}, !strongly)};
    }
    throw PreconditionViolated("no Cayley order sample found");
  }));
}

// ---- localmodel --------------------------------------------------------------

const std::vector<Condition> kNaiveKottwitzWedge = {Condition::Naive, Condition::Kottwitz, Condition::Wedge};
const std::vector<Condition> kAllConditions = {Condition::Naive, Condition::Kottwitz, Condition::Wedge,
                                               Condition::Spin, Condition::RankSpin};

void localmodel_n2(Report& rep, const RunConfig& cfg) {
  PadicContext c(cfg.p, true, cfg.precision);
  ChainContext ctx(cfg.p, 2, 1, 1);
  ResidueRing r(cfg.p, cfg.k);
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    std::vector<CheckRecord> out;
    auto rng = sampling::sample_rng(cfg.seed, tag_of("localmodel.n2"), c.p(), i);
    int v = static_cast<int>(rng() % 3);
    FElem xf = FElem::pi_power(c, v) * sampling::random_unit_f(rng, c);
    FElem yf = FElem::from_int(c, cfg.p) / xf;
    RElem x = RElem::from_f(r, xf), y = RElem::from_f(r, yf);
    RElem zero(r, 0), one(r, 1);
    Mat<RElem> chart(2, 2, zero);
    chart(0, 1) = x;
    chart(1, 0) = y;
    ChainPoint pt = chart_point(0, chart);
    ChainPoint image = gamma0_image(x, y);
    Params params = {{"p", str(cfg.p)}, {"k", str(cfg.k)}, {"i", str(i)}, {"x", x.to_string()},
                     {"y", y.to_string()}};
    std::vector<long> key = {cfg.p, 2, i};
    out.push_back(make_record("localmodel.n2.gamma0", key, params, log_value(gamma0_conditions(x, y)),
                              log_value(true)));
    out.push_back(make_record("localmodel.n2.chart-image", key, params,
                              log_value(same_span(image.gens, pt.gens)), log_value(true)));
    std::optional<Mat<RElem>> coords = chart_coordinates(image);
    bool coords_ok = coords && (*coords)(0, 0) == zero && (*coords)(1, 1) == zero && (*coords)(0, 1) == x &&
                     (*coords)(1, 0) == y;
    out.push_back(make_record("localmodel.n2.chart-coordinates", key, params, log_value(coords_ok),
                              log_value(true)));
    out.push_back(make_record("localmodel.n2.conditions", key, params,
                              log_value(check_conditions(ctx, pt, kNaiveKottwitzWedge).all_pass()),
                              log_value(true)));
    NuResult nu = nu_map(ctx, image);
    bool nu_ok = nu.contains_image && nu.lagrangian && nu.pi_stable && nu.maps_into_next &&
                 nu.passing_branches == 1 && check_conditions(ctx, nu.point, kAllConditions).all_pass();
    out.push_back(make_record("localmodel.n2.nu", key, params, log_value(nu_ok), log_value(true),
                              {"branch_ranks=" + str(nu.branch_ranks[0]) + "," + str(nu.branch_ranks[1])}));
    Mat<RElem> off = chart;
    off(1, 0) = y + one;
    bool model_off = check_conditions(ctx, chart_point(0, off), {Condition::Naive, Condition::Kottwitz}).all_pass();
    out.push_back(make_record("localmodel.n2.off-hyperbola", key, params, log_value(gamma0_conditions(x, y + one)),
                              log_value(model_off)));
    return out;
  }));
}

void localmodel_n4(Report& rep, const RunConfig& cfg) {
  PadicContext c(cfg.p, true, cfg.precision);
  ChainContext ctx(cfg.p, 4, 3, 1);
  ResidueRing r(cfg.p, cfg.k);
  Mat<mpq_class> u = ctx.transition(ctx.m() - 1);
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    std::vector<CheckRecord> out;
    auto rng = sampling::sample_rng(cfg.seed, tag_of("localmodel.n4"), c.p(), i);
    for (int attempt = 0; attempt < 200; ++attempt) {
      GenericChainPoint g = eigen_split_point(ctx, c, ctx.m() - 1, rng);
      ChainPoint low = reduce_point(r, g);
      std::optional<Mat<RElem>> x = chart_coordinates(low);
      if (!x) continue;
      ChainPoint high = reduce_point(r, transport(ctx, g, ctx.m()));
      Params params = {{"p", str(cfg.p)}, {"k", str(cfg.k)}, {"i", str(i)}, {"attempts", str(attempt + 1)}};
      std::vector<long> key = {cfg.p, 4, i};
      RelationReport rel = verify_want_relations(ctx, *x);
      std::vector<std::string> certs = {"checked=" + str(rel.checked)};
      for (const auto& f : rel.failures) certs.push_back(f);
      out.push_back(make_record("localmodel.n4.relations", key, params,
                                log_value(GaussQ(static_cast<long>(rel.failures.size()))), log_value(GaussQ(0)),
                                certs));
      ChainPoint closed = nu_closed_form(ctx, *x);
      ChainPoint chart = chart_point(ctx.m() - 1, *x);
      out.push_back(make_record("localmodel.n4.closed-form-vs-nu", key, params,
                                log_value(same_span(closed.gens, nu_map(ctx, chart).point.gens)), log_value(true)));
      out.push_back(make_record("localmodel.n4.closed-form-vs-flat", key, params,
                                log_value(same_span(closed.gens, high.gens)), log_value(true)));
      Mat<RElem> image = to_ring<RElem>(u, r) * chart.gens;
      bool columns = true;
      for (int j = 0; j < ctx.n(); ++j)
        if (j != ctx.m() - 1) columns = columns && image.column(j) == closed.gens.column(j);
      out.push_back(make_record("localmodel.n4.closed-form-columns", key, params, log_value(columns),
                                log_value(true)));
      return out;
    }
    throw PreconditionViolated("no flat point in the chart after 200 attempts");
  }));

  // The worst point pi(Lambda_{m-1}) over O_F / varpi: relations and nu(F) fail.
  ResidueRing r2(cfg.p, 2);
  Mat<RElem> zero(4, 4, RElem(r2, 0));
  Params params = {{"p", str(cfg.p)}, {"k", "2"}, {"point", "worst"}};
  std::vector<long> key = {cfg.p, 4, -1};
  RelationReport rel = verify_want_relations(ctx, zero);
  rep.records.push_back(make_record("localmodel.n4.not-flat.relations", key, params,
                                    log_value(GaussQ(static_cast<long>(rel.failures.size()))), log_value(GaussQ(0)),
                                    rel.failures, true));
  ChainPoint worst = worst_point(ctx, r2, ctx.m() - 1);
  rep.records.push_back(make_record("localmodel.n4.not-flat.naive", key, params,
                                    log_value(check_conditions(ctx, worst, {Condition::Naive}).all_pass()),
                                    log_value(true)));
  NuResult nu = nu_map(ctx, worst);
  rep.records.push_back(make_record("localmodel.n4.not-flat.nu-wedge", key, params,
                                    log_value(check_conditions(ctx, nu.point, {Condition::Wedge}).all_pass()),
                                    log_value(true), {}, true));
}

// ---- substrate ---------------------------------------------------------------

long vertex_type_or_none(const Lattice& l) {
  try {
    return vertex_type(l).r;
  } catch (const NotAVertexLattice&) {
    return -1;
  }
}

void substrate_for(Report& rep, const RunConfig& cfg, bool ram) {
  PadicContext c(cfg.p, ram, cfg.precision);
  PadicContext alt(cfg.p, ram, cfg.precision, EtaTildeBranch::Alternate);
  const std::string tag = std::string(ram ? "ram" : "unram");
  const long rk = ram ? 1 : 0;
  add(rep, run_indexed(cfg.samples, cfg.jobs, [&](int i) {
    std::vector<CheckRecord> out;
    auto rng = sampling::sample_rng(cfg.seed, tag_of("substrate." + tag), c.p(), i);
    Params params = {{"p", str(c.p())}, {"ramified", str(rk)}, {"i", str(i)}};
    std::vector<long> key = {c.p(), rk, i};
    F0Elem x = sampling::random_f0(rng, c), y = sampling::random_f0(rng, c);
    out.push_back(make_record("substrate.eta.multiplicative", key, params, log_value(GaussQ(eta(x * y))),
                              log_value(GaussQ(eta(x) * eta(y)))));
    FElem a = sampling::random_f(rng, c), b = sampling::random_f(rng, c);
    out.push_back(make_record("substrate.eta.trivial-on-norms", key, params, log_value(GaussQ(eta(a.norm()))),
                              log_value(GaussQ(1))));
    for (const PadicContext* ctx : {&c, &alt}) {
      F0Elem x2 = F0Elem::from_rational(*ctx, sampling::random_rational(rng, c.p(), -2, 3));
      FElem a2 = FElem::from_coords(*ctx, sampling::random_rational(rng, c.p(), -2, 3),
                                    sampling::random_rational(rng, c.p(), -2, 3));
      FElem b2 = FElem::from_coords(*ctx, sampling::random_rational(rng, c.p(), -2, 3),
                                    sampling::random_rational(rng, c.p(), -2, 3));
      Params bp = params;
      bp.emplace_back("branch", ctx == &c ? "standard" : "alternate");
      out.push_back(make_record("substrate.eta-tilde.extends-eta", key, bp, log_value(eta_tilde(FElem(x2))),
                                log_value(GaussQ(eta(x2)))));
      out.push_back(make_record("substrate.eta-tilde.multiplicative", key, bp, log_value(eta_tilde(a2 * b2)),
                                log_value(eta_tilde(a2) * eta_tilde(b2))));
    }
    QuatElem qx = sampling::random_quat(rng, c), qy = sampling::random_quat(rng, c);
    out.push_back(make_record("substrate.quaternion.norm-multiplicative", key, params,
                              log_value((qx * qy).reduced_norm() == qx.reduced_norm() * qy.reduced_norm()),
                              log_value(true)));
    out.push_back(make_record("substrate.quaternion.anisotropic", key, params,
                              log_value(qx.reduced_norm().is_nonzero()), log_value(true)));
    out.push_back(make_record("substrate.quaternion.inverse", key, params,
                              log_value(qx * qx.inverse() == QuatElem::one(c)), log_value(true)));
    if (i % 5 == 0) {
      const long m = 2;
      const auto& reps = norm_one_representatives(c, m);
      std::vector<bool> part(reps.size());
      for (size_t j = 0; j < part.size(); ++j) part[j] = rng() & 1;
      auto in_set = [&](const FElem& z, bool which) {
        for (size_t j = 0; j < reps.size(); ++j)
          if ((z - reps[j]).val_at_least(m)) return part[j] == which;
        return false;
      };
      mpq_class ma = f1_measure(c, m, [&](const FElem& z) { return in_set(z, true); });
      mpq_class mb = f1_measure(c, m, [&](const FElem& z) { return in_set(z, false); });
      out.push_back(make_record("substrate.measure.additivity", key, params, log_value(GaussQ(ma + mb)),
                                log_value(GaussQ(1))));
    }
    const int n = 2 + static_cast<int>(rng() % 3);
    HermitianSpace w = sampling::random_space(rng, c, n);
    Lattice l(w, sampling::random_basis(rng, c, n));
    out.push_back(make_record("substrate.lattice.dual-involution", key, params, log_value(l.dual().dual() == l),
                              log_value(true)));
    FMat um = fmat_identity(c, n);
    um(0, n - 1) = sampling::random_integral_f(rng, c);
    um(n - 1, n - 1) = FElem::from_int(c, 1 + static_cast<long>(rng() % static_cast<unsigned long>(c.p() - 1)));
    Lattice same(w, l.basis() * um);
    out.push_back(make_record("substrate.lattice.basis-change", key, params,
                              log_value(same == l && vertex_type_or_none(same) == vertex_type_or_none(l)),
                              log_value(true)));
    OrbitalSeries f = sampling::random_series(rng), g = sampling::random_series(rng),
                  h = sampling::random_series(rng);
    bool ring = f + g == g + f && (f + g) + h == f + (g + h) && f * g == g * f && (f * g) * h == f * (g * h) &&
                f * (g + h) == f * g + f * h && (f - f).is_zero();
    out.push_back(make_record("substrate.series.ring-laws", key, params, log_value(ring), log_value(true)));
    out.push_back(make_record("substrate.series.value-multiplicative", key, params,
                              log_value((f * g).value_at_0()), log_value(f.value_at_0() * g.value_at_0())));
    out.push_back(make_record("substrate.series.derivation", key, params, (f * g).derivative_at_0(),
                              g.value_at_0() * f.derivative_at_0() + f.value_at_0() * g.derivative_at_0()));
    return out;
  }));
}

nlohmann::ordered_json gauss_json(const GaussQ& g) {
  nlohmann::ordered_json j;
  j["re"] = g.re.get_str();
  j["im"] = g.im.get_str();
  return j;
}

nlohmann::ordered_json log_json(const LogValue& v) {
  nlohmann::ordered_json j;
  j["r0"] = gauss_json(v.r0);
  j["r1"] = gauss_json(v.r1);
  return j;
}

FMat query_matrix(const PadicContext& c, const ElementQuery& q) {
  if (q.lie) return lie_y(element(c, q.a), element(c, q.b), element(c, q.c), element(c, q.d));
  FElem a = element(c, q.a);
  FElem b = element(c, q.b);
  if (b.is_exact_zero()) throw NotRegularSemisimple("b = 0");
  return gamma_ab(a, b);
}

TestFunctionS query_function(const PadicContext& c, const ElementQuery& q) {
  std::string name = q.function.empty() ? (q.lie ? "one_frak_S_O" : "one_S_O") : q.function;
  if (name == "one_S_O") return TestFunctionS::one_S_O(c);
  if (name == "one_Kprime") return TestFunctionS::one_Kprime(c);
  if (name == "one_frak_S_O") return TestFunctionS::one_frak_S_O(c);
  if (name == "one_frak_Kprime") return TestFunctionS::one_frak_Kprime(c);
  throw ConfigError("unknown test function '" + name + "'");
}

Params query_params(const RunConfig& cfg, const ElementQuery& q, bool ram) {
  Params params = {{"p", str(cfg.p)}, {"ramified", str(ram)}, {"lie", str(q.lie)},
                   {"function", q.function.empty() ? (q.lie ? "one_frak_S_O" : "one_S_O") : q.function},
                   {"a", spec_string(q.a)}, {"b", spec_string(q.b)}};
  if (q.lie) {
    params.emplace_back("c", spec_string(q.c));
    params.emplace_back("d", spec_string(q.d));
  }
  return params;
}

Report orbital_query(const RunConfig& cfg, const ElementQuery& q, bool derivative) {
  cfg.validate();
  bool ram = cfg.setting && setting_ramified(*cfg.setting);
  PadicContext lo(cfg.p, ram, cfg.precision);
  PadicContext hi(cfg.p, ram, cfg.precision + 32);
  auto eval = [&](const PadicContext& c) {
    FMat m = query_matrix(c, q);
    TestFunctionS f = query_function(c, q);
    return q.lie ? orb_lie(m, f) : orb_S(m, f);
  };
  OrbitalSeries s_lo = eval(lo);
  OrbitalSeries s_hi = eval(hi);
  FMat m = query_matrix(lo, q);
  std::vector<std::string> certs = {"series=" + s_lo.to_string(),
                                    "transfer_factor=" + transfer_factor(m, q.lie).to_string(),
                                    "side=" + str(q.lie ? side_lie(m) : side(m))};
  Report rep;
  LogValue lhs = derivative ? s_lo.derivative_at_0() : log_value(s_lo.value_at_0());
  LogValue rhs = derivative ? s_hi.derivative_at_0() : log_value(s_hi.value_at_0());
  rep.records.push_back(make_record(derivative ? "dorb" : "orb", {cfg.p}, query_params(cfg, q, ram), lhs, rhs,
                                    certs));
  return rep;
}

}  // namespace

// ---- RunConfig ---------------------------------------------------------------

void RunConfig::validate() const {
  if (p < 3 || !is_prime(p)) throw ConfigError("p must be an odd prime");
  if (precision < 16) throw ConfigError("precision must be at least 16");
  const int guard = 8;
  if (std::max(std::abs(vmin), std::abs(vmax)) > precision - guard)
    throw ConfigError("valuation window exceeds precision minus guard digits");
  if (samples < 0) throw ConfigError("samples must be non-negative");
  if (jobs < 1) throw ConfigError("jobs must be positive");
  if (k < 1 || k > 8) throw ConfigError("k must lie in [1, 8]");
  if (n < 0) throw ConfigError("n must be non-negative");
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "p") {
    cfg.p = parse_number<long>(key, value);
  } else if (key == "precision") {
    cfg.precision = parse_number<int>(key, value);
  } else if (key == "setting") {
    try {
      cfg.setting = parse_setting(value);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "samples") {
    cfg.samples = parse_number<int>(key, value);
  } else if (key == "vmin") {
    cfg.vmin = parse_number<int>(key, value);
  } else if (key == "vmax") {
    cfg.vmax = parse_number<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    cfg.jobs = parse_number<int>(key, value);
  } else if (key == "n") {
    cfg.n = parse_number<int>(key, value);
  } else if (key == "k") {
    cfg.k = parse_number<int>(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + str(lineno) + ": expected key = value");
    apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

// ---- records -----------------------------------------------------------------

CheckRecord make_record(std::string check, std::vector<long> key,
                        std::vector<std::pair<std::string, std::string>> params, const LogValue& lhs,
                        const LogValue& rhs, std::vector<std::string> certificates, bool negative_control) {
  CheckRecord r;
  r.check = std::move(check);
  r.key = std::move(key);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.pass = lhs == rhs;
  r.negative_control = negative_control;
  r.certificates = std::move(certificates);
  return r;
}

LogValue log_value(const GaussQ& r0) { return LogValue(r0, GaussQ(0)); }
LogValue log_value(bool b) { return LogValue(GaussQ(b ? 1 : 0), GaussQ(0)); }

void Report::append(Report other) {
  for (auto& r : other.records) records.push_back(std::move(r));
}

void Report::sort() {
  std::stable_sort(records.begin(), records.end(), [](const CheckRecord& a, const CheckRecord& b) {
    if (a.check != b.check) return a.check < b.check;
    return a.key < b.key;
  });
}

bool Report::ok() const {
  return std::all_of(records.begin(), records.end(),
                     [](const CheckRecord& r) { return r.negative_control || r.pass; });
}

int Report::count(const std::string& check_prefix) const {
  return static_cast<int>(std::count_if(records.begin(), records.end(), [&](const CheckRecord& r) {
    return r.check.compare(0, check_prefix.size(), check_prefix) == 0;
  }));
}

int Report::failures() const {
  return static_cast<int>(
      std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.negative_control && !r.pass; }));
}

int Report::negative_controls() const {
  return static_cast<int>(
      std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return r.negative_control; }));
}

std::string Report::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = params;
    j["lhs"] = log_json(r.lhs);
    j["rhs"] = log_json(r.rhs);
    j["pass"] = r.pass;
    j["negative_control"] = r.negative_control;
    j["certificates"] = r.certificates;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---- commands ----------------------------------------------------------------

Report cmd_fl_check(const RunConfig& cfg) {
  cfg.validate();
  std::vector<Setting> settings = {Setting::UnramSelfDual, Setting::UnramAlmostSelfDual};
  if (cfg.setting) {
    if (setting_ramified(*cfg.setting)) throw PreconditionViolated("fl-check needs an unramified setting");
    settings = {*cfg.setting};
  }
  PadicContext c(cfg.p, false, cfg.precision);
  Report rep;
  for (Setting s : settings) fl_setting(rep, cfg, c, s);
  rep.sort();
  return rep;
}

Report cmd_at_check(const RunConfig& cfg) {
  cfg.validate();
  std::vector<Setting> settings = {Setting::RamEven, Setting::RamSelfDual0, Setting::RamSelfDual1};
  if (cfg.setting) {
    if (!setting_ramified(*cfg.setting)) throw PreconditionViolated("at-check needs a ramified setting");
    settings = {*cfg.setting};
  }
  PadicContext c(cfg.p, true, cfg.precision);
  Report rep;
  std::set<int> sigmas;
  for (Setting s : settings) {
    at_irregular(rep, cfg, c, s);
    at_int(rep, cfg, c, s);
    sigmas.insert(presentation_side(s) == 0 ? 1 : -1);
  }
  if (cfg.samples > 0) at_germ(rep, cfg, c, sigmas);
  rep.sort();
  return rep;
}

Report cmd_reduction_check(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.setting && setting_ramified(*cfg.setting))
    throw PreconditionViolated("reduction-check needs an unramified setting");
  PadicContext c(cfg.p, false, cfg.precision);
  Report rep;
  reduction_theta(rep, cfg, c);
  reduction_cayley(rep, cfg, c);
  reduction_star(rep, cfg, c);
  reduction_index(rep);
  reduction_lifting(rep, cfg, c);
  reduction_cayley_order(rep, cfg, c);
  rep.sort();
  return rep;
}

Report cmd_localmodel(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.n != 0 && cfg.n != 2 && cfg.n != 4) throw PreconditionViolated("localmodel supports n = 2 and n = 4");
  Report rep;
  if (cfg.n == 0 || cfg.n == 2) localmodel_n2(rep, cfg);
  if (cfg.n == 0 || cfg.n == 4) localmodel_n4(rep, cfg);
  rep.sort();
  return rep;
}

Report cmd_substrate(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  substrate_for(rep, cfg, false);
  substrate_for(rep, cfg, true);
  rep.sort();
  return rep;
}

ElementSpec parse_element(const std::string& text) {
  ElementSpec e;
  size_t colon = text.find(':');
  e.x0 = trim(colon == std::string::npos ? text : text.substr(0, colon));
  e.x1 = colon == std::string::npos ? "0" : trim(text.substr(colon + 1));
  for (const std::string* s : {&e.x0, &e.x1}) {
    mpq_class v;
    if (s->empty() || v.set_str(*s, 10) != 0) throw ConfigError("bad element '" + text + "'");
  }
  return e;
}

Report cmd_orb(const RunConfig& cfg, const ElementQuery& q) { return orbital_query(cfg, q, false); }

Report cmd_dorb(const RunConfig& cfg, const ElementQuery& q) { return orbital_query(cfg, q, true); }

Report cmd_int(const RunConfig& cfg, const ElementQuery& q) {
  cfg.validate();
  if (!cfg.setting || !setting_ramified(*cfg.setting)) throw PreconditionViolated("int needs a ramified setting");
  Setting s = *cfg.setting;
  PadicContext c(cfg.p, true, cfg.precision);
  FMat m = query_matrix(c, q);
  long closed, oracle;
  if (q.lie) {
    LiePresentation pres = match_presentation_lie(s, m);
    closed = int_closed_form_lie(s, pres);
    oracle = s == Setting::RamEven ? int_oracle_ram_even_lie(pres) : int_oracle_selfdual_lie(s, pres);
  } else {
    GroupPresentation pres = match_presentation(s, m);
    closed = int_closed_form(s, pres);
    oracle = s == Setting::RamEven ? int_oracle_ram_even(pres) : int_oracle_selfdual(s, pres);
  }
  Params params = {{"p", str(cfg.p)}, {"setting", to_string(s)}, {"lie", str(q.lie)}, {"a", spec_string(q.a)},
                   {"b", spec_string(q.b)}};
  if (q.lie) {
    params.emplace_back("c", spec_string(q.c));
    params.emplace_back("d", spec_string(q.d));
  }
  Report rep;
  rep.records.push_back(
      make_record("int", {cfg.p}, params, log_value(GaussQ(closed)), log_value(GaussQ(oracle)), {"closed-form vs lifting oracle"}));
  return rep;
}

Report cmd_lattice(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  std::vector<long> ns;
  if (cfg.n > 0) {
    ns = {cfg.n};
  } else {
    ns = {1, 2, 3};
  }
  for (long n : ns)
    rep.records.push_back(make_record("lattice.line-count", {n, cfg.p}, {{"n", str(n)}, {"q", str(cfg.p)}},
                                      log_value(GaussQ(enumerate_lines(n, cfg.p))),
                                      log_value(GaussQ(line_count_index(n, cfg.p)))));
  return rep;
}

Report cmd_germ(const RunConfig& cfg, const GermQuery& q) {
  cfg.validate();
  PadicContext c(cfg.p, true, cfg.precision);
  FElem a0 = element(c, q.a0), d0 = element(c, q.d0);
  TestFunctionS f = TestFunctionS::ball(off_center(a0, d0, 1, q.upper), q.level);
  GermOptions opt;
  opt.seed = cfg.seed;
  GermFit fit = germ_fit(f, a0, d0, opt);
  Params params = {{"p", str(cfg.p)}, {"a0", spec_string(q.a0)}, {"d0", spec_string(q.d0)},
                   {"ball", std::string(q.upper ? "upper" : "lower") + "-level" + str(q.level)}};
  Report rep;
  rep.records.push_back(germ_fit_record(f, fit, params, {cfg.p}, cfg.seed + 1000));
  return rep;
}

long enumerate_lines(long n, long q) {
  if (n < 1 || q < 2) throw PreconditionViolated("enumerate_lines needs n >= 1 and q >= 2");
  long total = 1;
  for (long i = 0; i < n; ++i) total *= q;
  long count = 0;
  for (long code = 1; code < total; ++code) {
    // Digits in base q; the leading nonzero digit (most significant) must be 1.
    long t = code;
    long lead = 0;
    while (t > 0) {
      if (t % q != 0) lead = t % q;
      t /= q;
    }
    if (lead == 1) ++count;
  }
  return count;
}

}  // namespace afl
