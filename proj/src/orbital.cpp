#include "afl/orbital.hpp"

#include <algorithm>
#include <random>

#include "afl/measure.hpp"

namespace afl {

namespace {

const PadicContext& mctx(const FMat& m) { return m(0, 0).ctx(); }

void require_2x2(const FMat& m, const char* what) {
  if (m.rows() != 2 || m.cols() != 2) throw PreconditionViolated(what);
}

/// v_F(x - center) >= t, with t in F-valuation units.
bool entry_close(const FElem& x, const FElem& center, long t) {
  FElem d = x - center;
  if (d.is_exact_zero()) return true;
  return d.val_at_least(t);
}

long vf_or_inf(const FElem& x) { return x.is_exact_zero() ? kInfVal : x.valuation(); }

FMat conjugate_by_x(const FMat& m, const F0Elem& x) {
  FMat r = m;
  FElem xf(x);
  r(0, 1) = m(0, 1) / xf;
  r(1, 0) = m(1, 0) * xf;
  return r;
}

FMat conjugate_by_h(const FMat& g, const FElem& h) {
  FMat r = g;
  r(0, 1) = g(0, 1) / h;
  r(1, 0) = g(1, 0) * h;
  return r;
}

/// Solution set in Z_p^x of one off-diagonal box condition on a shell:
/// empty, everything, or the class u = r0 mod p^j (j >= 1).
struct UnitClass {
  enum class Kind { Never, Always, Congruence } kind = Kind::Always;
  F0Elem r0;
  long j = 0;
};

/// {u : v_F(u - r) >= t} for r a unit of F.
UnitClass unit_ball(const FElem& r, long t) {
  const PadicContext& c = r.ctx();
  UnitClass out;
  if (t <= 0) return out;
  if (!entry_close(FElem(F0Elem::zero(c), r.x1()), FElem::zero(c), t)) {
    out.kind = UnitClass::Kind::Never;
    return out;
  }
  out.j = ceil_div(t, c.e());
  if (!r.x0().is_unit()) {
    out.kind = UnitClass::Kind::Never;
    return out;
  }
  out.kind = UnitClass::Kind::Congruence;
  out.r0 = r.x0();
  return out;
}

/// {u : v_F(u^s beta - center) >= t} for s = -1 (top-right entry b / (p^k u))
/// or s = +1 (bottom-left entry p^k u c).
UnitClass entry_condition(const FElem& beta, const FElem& center, long t, bool inverse_u) {
  UnitClass out;
  long vb = beta.valuation();
  if (center.is_exact_zero() || center.valuation() != vb) {
    long v = center.is_exact_zero() ? vb : std::min(vb, center.valuation());
    if (v < t) out.kind = UnitClass::Kind::Never;
    return out;
  }
  FElem r = inverse_u ? beta / center : center / beta;
  return unit_ball(r, t - vb);
}

UnitClass intersect(const UnitClass& a, const UnitClass& b) {
  using K = UnitClass::Kind;
  if (a.kind == K::Never || b.kind == K::Never) return UnitClass{K::Never, {}, 0};
  if (a.kind == K::Always) return b;
  if (b.kind == K::Always) return a;
  long j = std::min(a.j, b.j);
  if (a.r0.residue_mod(j) != b.r0.residue_mod(j)) return UnitClass{K::Never, {}, 0};
  return a.j >= b.j ? a : b;
}

struct ShellResult {
  GaussQ eta_integral;
  bool hit = false;
};

/// Integral over u in Z_p^x of [box contains [[a, b/(p^k u)], [p^k u c, d]]] eta(p^k u).
ShellResult box_shell(const FMat& m, const CongruenceBox& box, long k) {
  const PadicContext& c = mctx(m);
  const long e = c.e();
  ShellResult r;
  if (!entry_close(m(0, 0), box.center(0, 0), e * box.level[0])) return r;
  if (!entry_close(m(1, 1), box.center(1, 1), e * box.level[3])) return r;
  F0Elem pk = F0Elem::p_power(c, k);
  UnitClass top = entry_condition(m(0, 1) / FElem(pk), box.center(0, 1), e * box.level[1], true);
  UnitClass bottom = entry_condition(m(1, 0) * FElem(pk), box.center(1, 0), e * box.level[2], false);
  UnitClass u = intersect(top, bottom);
  switch (u.kind) {
    case UnitClass::Kind::Never:
      return r;
    case UnitClass::Kind::Always:
      r.hit = true;
      // eta is trivial on units in the unramified case and averages to 0 otherwise.
      r.eta_integral = c.ramified() ? GaussQ(0) : GaussQ(k % 2 == 0 ? 1 : -1);
      return r;
    case UnitClass::Kind::Congruence: {
      r.hit = true;
      mpz_class classes = (c.p() - 1) * c.ppow(u.j - 1);
      r.eta_integral = GaussQ(mpq_class(eta(pk * u.r0), classes));
      return r;
    }
  }
  return r;
}

void require_rs_offdiag(const FMat& m) {
  require_2x2(m, "orbital integrals are implemented for n = 2");
  if (!m(0, 1).is_nonzero() || !m(1, 0).is_nonzero())
    throw NotRegularSemisimple("off-diagonal entries must be nonzero");
}

// Exact Gaussian elimination over Q(i).  Returns false if rank-deficient.
bool solve_exact(std::vector<std::vector<GaussQ>> rows, std::vector<GaussQ> rhs, size_t n,
                 std::vector<GaussQ>& out) {
  const size_t m = rows.size();
  std::vector<size_t> pivot_col;
  size_t r = 0;
  for (size_t col = 0; col < n && r < m; ++col) {
    size_t piv = r;
    while (piv < m && rows[piv][col].is_zero()) ++piv;
    if (piv == m) continue;
    std::swap(rows[piv], rows[r]);
    std::swap(rhs[piv], rhs[r]);
    GaussQ inv = GaussQ(1) / rows[r][col];
    for (size_t j = col; j < n; ++j) rows[r][j] *= inv;
    rhs[r] *= inv;
    for (size_t i = 0; i < m; ++i) {
      if (i == r || rows[i][col].is_zero()) continue;
      GaussQ f = rows[i][col];
      for (size_t j = col; j < n; ++j) rows[i][j] -= f * rows[r][j];
      rhs[i] -= f * rhs[r];
    }
    pivot_col.push_back(col);
    ++r;
  }
  for (size_t i = r; i < m; ++i)
    if (!rhs[i].is_zero()) throw GermDoesNotStabilize("germ model is inconsistent with the fitting samples");
  if (r < n) return false;
  out.assign(n, GaussQ(0));
  for (size_t i = 0; i < r; ++i) out[pivot_col[i]] = rhs[i];
  return true;
}

}  // namespace

// ---- test functions on S ---------------------------------------------------

bool CongruenceBox::contains(const FMat& m) const {
  const long e = mctx(m).e();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!entry_close(m(i, j), center(i, j), e * level[static_cast<size_t>(2 * i + j)])) return false;
  return true;
}

TestFunctionS TestFunctionS::one_S_O(const PadicContext& c) {
  return TestFunctionS("1_S(O)", false, {CongruenceBox{fmat_zero(c, 2, 2), {0, 0, 0, 0}, GaussQ(1)}});
}

TestFunctionS TestFunctionS::one_Kprime(const PadicContext& c) {
  return TestFunctionS("1_K'", false, {CongruenceBox{fmat_zero(c, 2, 2), {0, 1, 0, 0}, GaussQ(1)}});
}

TestFunctionS TestFunctionS::one_frak_S_O(const PadicContext& c) {
  return TestFunctionS("1_s(O)", true, {CongruenceBox{fmat_zero(c, 2, 2), {0, 0, 0, 0}, GaussQ(1)}});
}

TestFunctionS TestFunctionS::one_frak_Kprime(const PadicContext& c) {
  return TestFunctionS("1_k'", true, {CongruenceBox{fmat_zero(c, 2, 2), {0, 1, 0, 0}, GaussQ(1)}});
}

TestFunctionS TestFunctionS::ball(const FMat& center, long m, bool lie) {
  require_2x2(center, "ball center must be 2 x 2");
  return TestFunctionS("ball(" + std::to_string(m) + ")", lie, {CongruenceBox{center, {m, m, m, m}, GaussQ(1)}});
}

GaussQ TestFunctionS::value(const FMat& m) const {
  GaussQ v(0);
  for (const auto& b : boxes_)
    if (b.contains(m)) v += b.coeff;
  return v;
}

long TestFunctionS::max_level() const {
  long r = 0;
  for (const auto& b : boxes_)
    for (long l : b.level) r = std::max(r, std::abs(l));
  return r;
}

TestFunctionS TestFunctionS::scaled(const GaussQ& c) const {
  TestFunctionS r = *this;
  for (auto& b : r.boxes_) b.coeff = c * b.coeff;
  return r;
}

TestFunctionS TestFunctionS::starred() const {
  TestFunctionS r = *this;
  r.name_ = "*" + name_;
  for (auto& b : r.boxes_) {
    b.center = star_involution(b.center);
    long l01 = b.level[1];
    b.level[1] = b.level[2] + 1;
    b.level[2] = l01 - 1;
  }
  return r;
}

TestFunctionS operator+(const TestFunctionS& a, const TestFunctionS& b) {
  if (a.lie() != b.lie()) throw PreconditionViolated("cannot add group and Lie test functions");
  std::vector<CongruenceBox> boxes = a.boxes();
  boxes.insert(boxes.end(), b.boxes().begin(), b.boxes().end());
  return TestFunctionS("(" + a.name() + " + " + b.name() + ")", a.lie(), std::move(boxes));
}

TestFunctionS operator-(const TestFunctionS& a, const TestFunctionS& b) {
  TestFunctionS r = a + b.scaled(GaussQ(-1));
  return TestFunctionS("(" + a.name() + " - " + b.name() + ")", r.lie(), r.boxes());
}

// ---- orbital integrals on S ------------------------------------------------

ShellWindow shell_window(const FMat& m, const CongruenceBox& box) {
  require_rs_offdiag(m);
  const long e = mctx(m).e();
  long vb = m(0, 1).valuation();
  long vc = m(1, 0).valuation();
  long t01 = std::min(e * box.level[1], vf_or_inf(box.center(0, 1)));
  long t10 = std::min(e * box.level[2], vf_or_inf(box.center(1, 0)));
  return ShellWindow{ceil_div(t10 - vc, e), floor_div(vb - t01, e)};
}

OrbitalSeries orbital_series(const FMat& m, const TestFunctionS& f) {
  require_rs_offdiag(m);
  OrbitalSeries out;
  for (const auto& box : f.boxes()) {
    ShellWindow w = shell_window(m, box);
    if (w.empty()) continue;
    for (long k = w.k_min - 2; k <= w.k_max + 2; ++k) {
      ShellResult r = box_shell(m, box, k);
      if (k < w.k_min || k > w.k_max) {
        if (r.hit) throw PreconditionViolated("orbital integrand is supported outside the analytic window");
        continue;
      }
      if (!r.eta_integral.is_zero()) out.add_term(k, box.coeff * r.eta_integral);
    }
  }
  return out;
}

OrbitalSeries orb_S(const FMat& gamma, const TestFunctionS& f) {
  if (!in_S(gamma)) throw PreconditionViolated("orb_S needs gamma in S_2");
  return orbital_series(gamma, f);
}

OrbitalSeries orb_lie(const FMat& y, const TestFunctionS& f) {
  if (!in_s(y)) throw PreconditionViolated("orb_lie needs y in s_2");
  return orbital_series(y, f);
}

LogValue del_orb(const FMat& m, const TestFunctionS& f) { return orbital_series(m, f).derivative_at_0(); }

int side_sign(const FMat& m, bool lie) { return (lie ? side_lie(m) : side(m)) == 0 ? 1 : -1; }

GaussQ transfer_factor(const FMat& m, bool lie) { return lie ? transfer_factor_lie(m) : transfer_factor_S(m); }

// ---- unitary side ------------------------------------------------------------

namespace {

long lattice_level(const Lattice& l) {
  long a = min_valuation(l.basis());
  long b = min_valuation(inverse(l.basis()));
  return std::max({0L, -a, -b});
}

bool in_stabilizer(const FMat& g, const Lattice& l, TestFunctionU::Kind kind) {
  return kind == TestFunctionU::Kind::LieStabilizer ? preserves(g, l) : stabilizes(g, l);
}

/// Level of F^1 representatives at which membership of h^{-1} g h (resp.
/// k^{-1} g) is determined; entries below -2 * lattice level exclude g outright.
long search_level(long lvl, long minval) {
  long neg = std::max(0L, -minval);
  return std::max(1L, 2 * lvl + std::min(2 * lvl, neg)) + 1;
}

}  // namespace

bool TestFunctionU::contains(const FMat& g) const {
  if (kind != Kind::FlatTimesStabilizer) return in_stabilizer(g, lattice, kind);
  const PadicContext& c = mctx(g);
  long lvl = lattice_level(lattice);
  long row_min = std::min(vf_or_inf(g(0, 0)), vf_or_inf(g(0, 1)));
  long m = search_level(lvl, row_min);
  for (const auto& k : norm_one_representatives(c, m)) {
    FMat t = g;
    FElem ki = k.inverse();
    t(0, 0) = ki * g(0, 0);
    t(0, 1) = ki * g(0, 1);
    if (stabilizes(t, lattice)) return true;
  }
  return false;
}

TestFunctionU unitary_test_function(const PadicContext& c, Setting s, const std::string& name) {
  using K = TestFunctionU::Kind;
  auto standard = [&](int side_index, K kind) {
    return TestFunctionU{name, kind, Lattice::standard(unitary_space(c, s, side_index)), GaussQ(1)};
  };
  switch (s) {
    case Setting::RamEven:
      if (name == "K0flatK0+") return {name, K::FlatTimesStabilizer, lambda_pm(c, 1), GaussQ(1)};
      if (name == "K0flatK0-") return {name, K::FlatTimesStabilizer, lambda_pm(c, -1), GaussQ(1)};
      if (name == "k0+") return {name, K::LieStabilizer, lambda_pm(c, 1), GaussQ(1)};
      if (name == "k0-") return {name, K::LieStabilizer, lambda_pm(c, -1), GaussQ(1)};
      break;
    case Setting::RamSelfDual0:
      if (name == "K1~") return standard(1, K::Stabilizer);
      if (name == "k1~") return standard(1, K::LieStabilizer);
      break;
    case Setting::RamSelfDual1:
      if (name == "K0~") return standard(0, K::Stabilizer);
      if (name == "k0~") return standard(0, K::LieStabilizer);
      break;
    case Setting::UnramSelfDual:
      if (name == "K0") return standard(0, K::Stabilizer);
      if (name == "k0") return standard(0, K::LieStabilizer);
      break;
    case Setting::UnramAlmostSelfDual:
      if (name == "K1") return standard(1, K::Stabilizer);
      if (name == "k1") return standard(1, K::LieStabilizer);
      break;
  }
  throw PreconditionViolated("unknown unitary test function '" + name + "' for " + to_string(s));
}

std::vector<std::string> unitary_test_function_names(Setting s) {
  switch (s) {
    case Setting::RamEven:
      return {"K0flatK0+", "K0flatK0-", "k0+", "k0-"};
    case Setting::RamSelfDual0:
      return {"K1~", "k1~"};
    case Setting::RamSelfDual1:
      return {"K0~", "k0~"};
    case Setting::UnramSelfDual:
      return {"K0", "k0"};
    case Setting::UnramAlmostSelfDual:
      return {"K1", "k1"};
  }
  return {};
}

mpq_class orb_unitary(const FMat& g, const TestFunctionU& f) {
  require_2x2(g, "orb_unitary is implemented for n = 2");
  const PadicContext& c = mctx(g);
  mpq_class coeff = f.coeff.re;
  if (!f.coeff.is_real()) throw PreconditionViolated("unitary test functions carry real coefficients");
  if (g(0, 1).is_exact_zero() && g(1, 0).is_exact_zero()) return f.contains(g) ? coeff : mpq_class(0);
  long lvl = lattice_level(f.lattice);
  long m = search_level(lvl, std::min(vf_or_inf(g(0, 1)), vf_or_inf(g(1, 0))));
  mpq_class vol = f1_measure(c, m, [&](const FElem& h) { return f.contains(conjugate_by_h(g, h)); });
  return coeff * vol;
}

// ---- germ expansions ---------------------------------------------------------

namespace {

struct SampleData {
  OrbitalSeries target;  // D * omega * Orb
  long kb = 0;
  long kc = 0;
  int sigma = 1;
};

OrbitalSeries germ_denominator(const PadicContext& c) {
  OrbitalSeries d = OrbitalSeries::constant(GaussQ(1));
  if (!c.ramified()) d.add_term(1, GaussQ(1));
  return d;
}

SampleData sample_data(const FMat& m, const TestFunctionS& f, const OrbitalSeries& denom, long r_b, long r_c) {
  const long e = mctx(m).e();
  SampleData s;
  long vb = m(0, 1).valuation();
  long vc = m(1, 0).valuation();
  if (floor_div(vb, e) * e + r_b != vb || floor_div(vc, e) * e + r_c != vc)
    throw PreconditionViolated("germ sample outside the valuation parity class of the neighborhood");
  s.kb = (vb - r_b) / e;
  s.kc = (vc - r_c) / e;
  s.sigma = side_sign(m, f.lie());
  s.target = denom * (transfer_factor(m, f.lie()) * orbital_series(m, f));
  return s;
}

OrbitalSeries model_numerator(const GermFit& fit, const SampleData& s) {
  return fit.p_plus.shifted(s.kb) + GaussQ(s.sigma) * fit.p_minus.shifted(-s.kc);
}

long residue_mod(long v, long e) { return v - floor_div(v, e) * e; }

FElem random_unit_f0(std::mt19937_64& rng, const PadicContext& c) {
  std::uniform_int_distribution<long> d(1, 10000);
  long u = d(rng);
  while (u % c.p() == 0) u = d(rng);
  if (rng() & 1) u = -u;
  return FElem(F0Elem::from_int(c, u));
}

FElem random_integral(std::mt19937_64& rng, const PadicContext& c) {
  std::uniform_int_distribution<long> d(-10000, 10000);
  return FElem(F0Elem::from_int(c, d(rng)), F0Elem::from_int(c, d(rng)));
}

}  // namespace

GaussQ GermFit::phi_plus_at_0() const { return p_plus.value_at_0() / denominator.value_at_0(); }

GaussQ GermFit::phi_minus_at_0() const { return p_minus.value_at_0() / denominator.value_at_0(); }

OrbitalSeries GermFit::residual(const FMat& m, const TestFunctionS& f) const {
  SampleData s = sample_data(m, f, denominator, r_b, r_c);
  return s.target - model_numerator(*this, s);
}

std::vector<FMat> germ_samples_S(const FElem& a0, const FElem& d0, long m, int count, std::uint64_t seed) {
  const PadicContext& c = a0.ctx();
  if (!a0.is_norm_one() || !d0.is_norm_one()) throw PreconditionViolated("germ centers need a0, d0 in F^1");
  const long e = c.e();
  std::mt19937_64 rng(seed);
  FElem mu = -(a0 * d0);
  FElem z = FElem::from_int(c, 1) + mu;
  if (z.is_exact_zero() || z.is_indeterminate()) z = FElem::gen(c);
  z = z * FElem(F0Elem::p_power(c, -floor_div(z.valuation(), e)));
  long vz = z.valuation();
  std::uniform_int_distribution<long> spread(0, 3);
  std::vector<FMat> out;
  while (static_cast<int>(out.size()) < count) {
    long j = m + spread(rng);
    FElem pert = FElem::from_int(c, 1) + FElem::pi_power(c, e * m) * random_integral(rng, c);
    FElem b = z * FElem(F0Elem::p_power(c, j)) * random_unit_f0(rng, c) * pert;
    long vb_f0 = ceil_div(vz + e * j, e);
    long v = vb_f0 + m + spread(rng);
    FElem h = norm_one_from(FElem::from_int(c, 1) + FElem::pi_power(c, e * m) * random_integral(rng, c));
    FElem r = FElem::from_int(c, 1) + FElem(F0Elem::p_power(c, v)) * random_unit_f0(rng, c);
    FElem a = a0 * h * r;
    out.push_back(gamma_ab(a, b));
  }
  return out;
}

std::vector<FMat> germ_samples_lie(const FElem& a0, const FElem& d0, long m, int count, std::uint64_t seed) {
  const PadicContext& c = a0.ctx();
  if (!a0.x0().is_exact_zero() || !d0.x0().is_exact_zero())
    throw PreconditionViolated("Lie germ centers need trace-zero a0, d0");
  std::mt19937_64 rng(seed);
  FElem w = FElem::gen(c);
  std::uniform_int_distribution<long> spread(0, 3);
  auto small = [&](long extra) { return w * FElem(F0Elem::p_power(c, m + extra)) * random_unit_f0(rng, c); };
  std::vector<FMat> out;
  while (static_cast<int>(out.size()) < count) {
    FElem a = a0 + small(spread(rng));
    FElem d = d0 + small(spread(rng));
    FElem b = small(spread(rng));
    FElem cc = small(spread(rng));
    out.push_back(lie_y(a, b, cc, d));
  }
  return out;
}

GermFit germ_fit(const TestFunctionS& f, const FElem& a0, const FElem& d0, const GermOptions& opt) {
  const PadicContext& c = a0.ctx();
  const long e = c.e();
  long lo = opt.min_level > 0 ? opt.min_level : f.max_level() + 1;
  long hi = opt.max_level > 0 ? opt.max_level : lo + 3;
  std::string last_failure = "no level tried";
  for (long level = lo; level <= hi; ++level) {
    auto draw = [&](int n, std::uint64_t seed) {
      return f.lie() ? germ_samples_lie(a0, d0, level, n, seed) : germ_samples_S(a0, d0, level, n, seed);
    };
    std::vector<FMat> fit_set = draw(opt.fit_samples, opt.seed * 7919 + static_cast<std::uint64_t>(level));
    std::vector<FMat> held = draw(opt.heldout_samples, opt.seed * 104729 + static_cast<std::uint64_t>(level));
    GermFit fit;
    fit.a0 = a0;
    fit.d0 = d0;
    fit.lie = f.lie();
    fit.level = level;
    fit.r_b = residue_mod(fit_set.front()(0, 1).valuation(), e);
    fit.r_c = residue_mod(fit_set.front()(1, 0).valuation(), e);
    fit.denominator = germ_denominator(c);
    fit.fit_samples = opt.fit_samples;
    fit.heldout_samples = opt.heldout_samples;

    std::vector<SampleData> data;
    for (const auto& m : fit_set) data.push_back(sample_data(m, f, fit.denominator, fit.r_b, fit.r_c));
    long ja_lo = kInfVal, ja_hi = -kInfVal, jb_lo = kInfVal, jb_hi = -kInfVal;
    for (const auto& s : data) {
      if (s.target.is_zero()) continue;
      long tlo = s.target.coefficients().begin()->first;
      long thi = s.target.coefficients().rbegin()->first;
      ja_lo = std::min(ja_lo, tlo - s.kb);
      ja_hi = std::max(ja_hi, thi - s.kb);
      jb_lo = std::min(jb_lo, tlo + s.kc);
      jb_hi = std::max(jb_hi, thi + s.kc);
    }
    if (ja_lo <= ja_hi) {
      const size_t na = static_cast<size_t>(ja_hi - ja_lo + 1);
      const size_t nb = static_cast<size_t>(jb_hi - jb_lo + 1);
      std::vector<std::vector<GaussQ>> rows;
      std::vector<GaussQ> rhs;
      for (const auto& s : data) {
        long klo = std::min(ja_lo + s.kb, jb_lo - s.kc);
        long khi = std::max(ja_hi + s.kb, jb_hi - s.kc);
        for (long k = klo; k <= khi; ++k) {
          std::vector<GaussQ> row(na + nb, GaussQ(0));
          long ja = k - s.kb;
          long jb = k + s.kc;
          if (ja >= ja_lo && ja <= ja_hi) row[static_cast<size_t>(ja - ja_lo)] = GaussQ(1);
          if (jb >= jb_lo && jb <= jb_hi) row[na + static_cast<size_t>(jb - jb_lo)] = GaussQ(s.sigma);
          rows.push_back(std::move(row));
          rhs.push_back(s.target.coefficient(k));
        }
      }
      std::vector<GaussQ> sol;
      try {
        if (!solve_exact(rows, rhs, na + nb, sol)) {
          last_failure = "fitting samples do not determine the germ at level " + std::to_string(level);
          continue;
        }
      } catch (const GermDoesNotStabilize& ex) {
        last_failure = ex.what();
        continue;
      }
      for (size_t i = 0; i < na; ++i)
        if (!sol[i].is_zero()) fit.p_plus.add_term(ja_lo + static_cast<long>(i), sol[i]);
      for (size_t i = 0; i < nb; ++i)
        if (!sol[na + i].is_zero()) fit.p_minus.add_term(jb_lo + static_cast<long>(i), sol[na + i]);
    }
    bool ok = true;
    for (const auto& m : held) {
      if (!fit.residual(m, f).is_zero()) {
        ok = false;
        break;
      }
    }
    if (ok) return fit;
    last_failure = "held-out residual nonzero at level " + std::to_string(level);
  }
  throw GermDoesNotStabilize(last_failure);
}

LogValue germ_constant_quantity(const GermFit& fit, const FMat& m, const TestFunctionS& f) {
  const long e = mctx(m).e();
  GaussQ omega = transfer_factor(m, f.lie());
  LogValue d = del_orb(m, f);
  long v_bc = (m(0, 1) * m(1, 0)).valuation() / e;
  int sigma = side_sign(m, f.lie());
  GaussQ slope = GaussQ(2 * sigma) * fit.phi_minus_at_0() * GaussQ(v_bc);
  return GaussQ(2) * (omega * d) - LogValue(GaussQ(0), slope);
}

TestFunctionS one_sided_combination(const TestFunctionS& f, const GermFit& fit_f, const TestFunctionS& g,
                                    const GermFit& fit_g, int sigma) {
  GaussQ sf = fit_f.phi_plus_at_0() + GaussQ(sigma) * fit_f.phi_minus_at_0();
  GaussQ sg = fit_g.phi_plus_at_0() + GaussQ(sigma) * fit_g.phi_minus_at_0();
  if (sg.is_zero()) throw PreconditionViolated("second test function has a vanishing germ on this side");
  return f + g.scaled(-(sf / sg));
}

}  // namespace afl
