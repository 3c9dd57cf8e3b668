#include <gtest/gtest.h>

#include "afl/errors.hpp"
#include "afl/local_model.hpp"
#include "test_util.hpp"

using namespace afl;
using afl::testing_util::kIterations;

namespace {

const std::vector<Condition> kAll = {Condition::Naive, Condition::Kottwitz, Condition::Wedge, Condition::Spin,
                                     Condition::RankSpin};
const std::vector<Condition> kNaiveKottwitzWedge = {Condition::Naive, Condition::Kottwitz, Condition::Wedge};

struct Config {
  int n;
  int r;
  int s;
};
const Config kConfigs[] = {{2, 1, 1}, {4, 3, 1}};

Mat<mpq_class> antidiag(int k) {
  Mat<mpq_class> h(k, k, 0);
  for (int i = 0; i < k; ++i) h(i, k - 1 - i) = 1;
  return h;
}

// [[0, 0, H_m], [0, -H_n, 0], [H_m, 0, 0]] with blocks of sizes m, n, m.
Mat<mpq_class> expected_symmetric_form(int n) {
  int m = n / 2;
  Mat<mpq_class> out(2 * n, 2 * n, 0);
  out.set_block(0, m + n, antidiag(m));
  out.set_block(m, m, Mat<mpq_class>(-antidiag(n)));
  out.set_block(m + n, 0, antidiag(m));
  return out;
}

// The inclusion Lambda_{m-1} -> Lambda_m written out entrywise (1-based positions).
Mat<mpq_class> expected_u(int n, long p) {
  int m = n / 2;
  Mat<mpq_class> u(2 * n, 2 * n, 0);
  for (int k = 1; k <= m - 1; ++k) u(k - 1, k - 1) = 1;
  u(m - 1, n + m - 1) = p;
  for (int k = 0; k < n - 1; ++k) u(m + k, m + k) = 1;
  u(n + m - 1, m - 1) = 1;
  for (int k = 1; k <= m; ++k) u(n + m + k - 1, n + m + k - 1) = 1;
  return u;
}

bool p_unit(const mpq_class& v, long p) {
  if (v == 0) return false;
  return mpz_divisible_ui_p(v.get_num_mpz_t(), static_cast<unsigned long>(p)) == 0 &&
         mpz_divisible_ui_p(v.get_den_mpz_t(), static_cast<unsigned long>(p)) == 0;
}

bool p_integral(const Mat<mpq_class>& m, long p) {
  return m.all_of([p](const mpq_class& v) { return mpz_divisible_ui_p(v.get_den_mpz_t(), static_cast<unsigned long>(p)) == 0; });
}

RElem random_r(std::mt19937_64& rng, const ResidueRing& r) {
  std::uniform_int_distribution<long> d0(0, r.mod0() - 1), d1(0, r.mod1() - 1);
  return RElem(r, d0(rng), d1(rng));
}

Mat<RElem> random_r_matrix(std::mt19937_64& rng, const ResidueRing& r, int rows, int cols) {
  Mat<RElem> m(rows, cols, RElem(r, 0));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_r(rng, r);
  return m;
}

FElem random_integral(std::mt19937_64& rng, const PadicContext& c) {
  std::uniform_int_distribution<long> d(-200, 200);
  return FElem::from_coords(c, d(rng), d(rng));
}

struct FlatPair {
  ChainPoint low;
  ChainPoint high;
};

// An O_F-point of the flat closure at indices m - 1 and m, reduced mod pi^k.
FlatPair flat_pair(const ChainContext& ctx, const PadicContext& pc, const ResidueRing& r, std::mt19937_64& rng) {
  GenericChainPoint g = eigen_split_point(ctx, pc, ctx.m() - 1, rng);
  return {reduce_point(r, g), reduce_point(r, transport(ctx, g, ctx.m()))};
}

std::string failures(const ConditionReport& rep) {
  std::string s;
  for (const auto& r : rep.results)
    if (r.applicable && !r.pass) s += to_string(r.which) + ": " + r.witness + "; ";
  return s;
}

}  // namespace

TEST(ResidueRing, AgreesWithReductionFromF) {
  std::mt19937_64 rng(901);
  for (long p : {3L, 5L, 7L}) {
    PadicContext c(p, true);
    for (int k : {1, 2, 5, 8}) {
      ResidueRing r(p, k);
      for (int it = 0; it < kIterations; ++it) {
        FElem a = random_integral(rng, c), b = random_integral(rng, c);
        RElem ra = RElem::from_f(r, a), rb = RElem::from_f(r, b);
        ASSERT_EQ(ra + rb, RElem::from_f(r, a + b));
        ASSERT_EQ(ra - rb, RElem::from_f(r, a - b));
        ASSERT_EQ(ra * rb, RElem::from_f(r, a * b));
        if (ra.is_unit()) {
          ASSERT_TRUE(a.is_unit());
          ASSERT_EQ(ra.inverse(), RElem::from_f(r, a.inverse()));
        }
        if (!a.is_exact_zero() && a.valuation() < k) {
          ASSERT_EQ(ra.valuation(), a.valuation());
        }
      }
    }
  }
}

TEST(ResidueRing, Examples) {
  ResidueRing r(3, 6);
  RElem pi = RElem::pi(r);
  EXPECT_EQ(pi * pi, RElem(r, 3));
  EXPECT_EQ(pi.valuation(), 1);
  EXPECT_TRUE((pi * pi * pi * pi * pi * pi).is_zero());
  EXPECT_EQ(RElem(r, 2).inverse() * RElem(r, 2), RElem(r, 1));
  EXPECT_THROW(pi.inverse(), PreconditionViolated);
  EXPECT_THROW(ResidueRing(3, 9), PreconditionViolated);
  EXPECT_THROW(RElem::from_rational(r, mpq_class(1, 3)), NonIntegral);
}

TEST(LinearAlgebra, CharPolyEvaluatesToDeterminant) {
  std::mt19937_64 rng(902);
  ResidueRing r(5, 6);
  for (int it = 0; it < kIterations; ++it) {
    Mat<RElem> m = random_r_matrix(rng, r, 3, 3);
    RElem t = random_r(rng, r);
    std::vector<RElem> cp = char_poly(m);
    RElem value(r, 0), power(r, 1);
    for (const RElem& c : cp) {
      value += c * power;
      power *= t;
    }
    Mat<RElem> shifted = Mat<RElem>::identity(3, RElem(r, 0), t) - m;
    ASSERT_EQ(value, determinant(shifted));
  }
}

TEST(LinearAlgebra, KernelIsAnnihilatedSummand) {
  std::mt19937_64 rng(903);
  ResidueRing r(3, 4);
  for (int it = 0; it < kIterations; ++it) {
    Mat<RElem> a = random_r_matrix(rng, r, 2, 5);
    if (summand_pivots(Mat<RElem>(a.transpose())).empty()) {
      EXPECT_THROW(kernel(a), PreconditionViolated);
      continue;
    }
    Mat<RElem> k = kernel(a);
    ASSERT_EQ(k.cols(), 3);
    ASSERT_FALSE(summand_pivots(k).empty());
    Mat<RElem> prod = a * k;
    ASSERT_TRUE(prod.all_of([](const RElem& x) { return x.is_zero(); }));
  }
}

TEST(ChainContext, SymmetricFormMatchesBlockMatrix) {
  for (long p : {3L, 5L}) {
    for (int n : {2, 4, 6}) {
      ChainContext ctx(p, n, n - 1, 1);
      Mat<mpq_class> s = ctx.symmetric_form();
      EXPECT_EQ(s, expected_symmetric_form(n)) << "n=" << n;
      EXPECT_EQ(s, s.transpose());
    }
  }
}

TEST(ChainContext, InclusionMatchesExplicitMatrix) {
  for (long p : {3L, 7L})
    for (int n : {2, 4, 6}) {
      ChainContext ctx(p, n, n - 1, 1);
      EXPECT_EQ(ctx.transition(ctx.m() - 1), expected_u(n, p)) << "n=" << n;
    }
}

TEST(ChainContext, PairingsArePerfectAndAlternating) {
  for (long p : {3L, 5L})
    for (int n : {2, 4}) {
      ChainContext ctx(p, n, n - 1, 1);
      for (int i = -2 * n; i <= 2 * n; ++i) {
        Mat<mpq_class> a = ctx.pairing(i);
        EXPECT_TRUE(p_integral(a, p)) << "i=" << i;
        EXPECT_TRUE(p_unit(determinant(a), p)) << "i=" << i;
        EXPECT_EQ(ctx.pairing(-i), Mat<mpq_class>(-a.transpose())) << "i=" << i;
        EXPECT_EQ(ctx.pi_action(), ctx.chain_map(i - n, i) * ctx.pi_transport(i)) << "i=" << i;
      }
    }
}

TEST(ChainContext, Adjunction) {
  std::mt19937_64 rng(904);
  for (long p : {3L, 5L})
    for (int n : {2, 4}) {
      ChainContext ctx(p, n, n - 1, 1);
      for (int i = -2 * n; i <= 2 * n; ++i) {
        Mat<mpq_class> lhs = ctx.pairing(i) * ctx.transition(-i - 1);
        Mat<mpq_class> rhs = ctx.transition(i).transpose() * ctx.pairing(i + 1);
        ASSERT_EQ(lhs, rhs) << "i=" << i;
      }
      ResidueRing r(p, 6);
      for (int it = 0; it < kIterations; ++it) {
        std::uniform_int_distribution<int> pick(-n, n);
        int i = pick(rng);
        Mat<RElem> u = random_r_matrix(rng, r, 2 * n, 1), v = random_r_matrix(rng, r, 2 * n, 1);
        RElem left = (u.transpose() * to_ring<RElem>(ctx.pairing(i), r) * to_ring<RElem>(ctx.transition(-i - 1), r) * v)(0, 0);
        RElem right = ((to_ring<RElem>(ctx.transition(i), r) * u).transpose() * to_ring<RElem>(ctx.pairing(i + 1), r) * v)(0, 0);
        ASSERT_EQ(left, right);
      }
    }
}

TEST(Gamma0Chart, LagrangianKottwitzChartIsTheHyperbola) {
  for (long p : {3L, 5L}) {
    ChainContext ctx(p, 2, 1, 1);
    ResidueRing r(p, 2);
    std::vector<RElem> elems;
    for (long a = 0; a < r.mod0(); ++a)
      for (long b = 0; b < r.mod1(); ++b) elems.emplace_back(r, a, b);
    const RElem varpi(r, p), zero(r, 0);
    long on_chart = 0;
    for (const auto& x11 : elems)
      for (const auto& x12 : elems)
        for (const auto& x21 : elems)
          for (const auto& x22 : elems) {
            Mat<RElem> x(2, 2, x11);
            x(0, 1) = x12;
            x(1, 0) = x21;
            x(1, 1) = x22;
            ChainPoint pt = chart_point(0, x);
            bool in_model = check_conditions(ctx, pt, {Condition::Naive, Condition::Kottwitz}).all_pass();
            bool hyperbola = x11 == zero && x22 == zero && x12 * x21 == varpi;
            ASSERT_EQ(in_model, hyperbola) << x.to_string();
            if (hyperbola) {
              ++on_chart;
              ASSERT_TRUE(gamma0_conditions(x12, x21));
              ASSERT_TRUE(same_span(gamma0_image(x12, x21).gens, pt.gens));
            }
          }
    EXPECT_GT(on_chart, 0);
  }
}

TEST(Gamma0Chart, ImageOfFlatPointsAndNu) {
  std::mt19937_64 rng(905);
  for (long p : {3L, 5L}) {
    PadicContext c(p, true);
    ChainContext ctx(p, 2, 1, 1);
    ResidueRing r(p, 6);
    for (int it = 0; it < kIterations / 5; ++it) {
      // x y = varpi in O_F with v(x) in {0, 1, 2}.
      std::uniform_int_distribution<int> val(0, 2);
      FElem unit = random_integral(rng, c);
      if (!unit.is_unit()) continue;
      FElem xf = FElem::pi_power(c, val(rng)) * unit;
      FElem yf = FElem::from_int(c, p) / xf;
      RElem x = RElem::from_f(r, xf), y = RElem::from_f(r, yf);
      ASSERT_TRUE(gamma0_conditions(x, y));
      ASSERT_FALSE(gamma0_conditions(x, y + RElem(r, 1)));
      ChainPoint pt = gamma0_image(x, y);
      ConditionReport rep = check_conditions(ctx, pt, kNaiveKottwitzWedge);
      ASSERT_TRUE(rep.all_pass()) << failures(rep);
      NuResult nu = nu_map(ctx, pt);
      ASSERT_TRUE(nu.contains_image && nu.lagrangian && nu.pi_stable && nu.maps_into_next);
      ConditionReport up = check_conditions(ctx, nu.point, kAll);
      ASSERT_TRUE(up.all_pass()) << failures(up);
      ASSERT_FALSE(check_conditions(ctx, gamma0_image(x, y + RElem(r, 1)), kNaiveKottwitzWedge).all_pass());
    }
  }
}

TEST(Gamma0Chart, Example) {
  ChainContext ctx(3, 2, 1, 1);
  ResidueRing r(3, 6);
  RElem one(r, 1), varpi(r, 3), zero(r, 0), pi = RElem::pi(r);
  for (auto [x12, x21] : {std::pair{one, varpi}, std::pair{pi, pi}, std::pair{varpi, one}}) {
    Mat<RElem> x(2, 2, zero);
    x(0, 1) = x12;
    x(1, 0) = x21;
    ChainPoint pt = chart_point(0, x);
    EXPECT_TRUE(check_conditions(ctx, pt, kNaiveKottwitzWedge).all_pass());
    NuResult nu = nu_map(ctx, pt);
    EXPECT_TRUE(check_conditions(ctx, nu.point, kAll).all_pass());
    EXPECT_NE(nu.branch_ranks[0] % 2, nu.branch_ranks[1] % 2);
  }
}

TEST(Conditions, GenericEigenSplitPointsPassAll) {
  std::mt19937_64 rng(906);
  for (long p : {3L, 5L}) {
    PadicContext c(p, true);
    for (const Config& cfg : kConfigs) {
      ChainContext ctx(p, cfg.n, cfg.r, cfg.s);
      for (int index : {ctx.m() - 1, ctx.m()}) {
        for (int it = 0; it < 10; ++it) {
          GenericChainPoint g = eigen_split_point(ctx, c, index, rng);
          ConditionReport rep = check_conditions(ctx, g, kAll);
          ASSERT_TRUE(rep.all_pass()) << failures(rep);
          ASSERT_EQ(spin_rank(ctx, g), cfg.s);
        }
      }
    }
  }
}

TEST(Conditions, WorstPointOverResidueFieldFailsRankSpin) {
  for (long p : {3L, 5L, 7L}) {
    ChainContext ctx(p, 4, 3, 1);
    ResidueRing k(p, 1);
    ChainPoint pt = worst_point(ctx, k, ctx.m());
    ConditionReport rep = check_conditions(ctx, pt, kAll);
    EXPECT_TRUE(rep.get(Condition::Naive).pass);
    EXPECT_TRUE(rep.get(Condition::Kottwitz).pass);
    EXPECT_TRUE(rep.get(Condition::Wedge).pass);
    EXPECT_FALSE(rep.get(Condition::RankSpin).pass);
    EXPECT_FALSE(rep.get(Condition::Spin).pass);
    EXPECT_EQ(spin_rank(ctx, pt), 0);
  }
}

TEST(Conditions, SpinNotEvaluatedAwayFromM) {
  ChainContext ctx(3, 4, 3, 1);
  ResidueRing r(3, 2);
  ConditionReport rep = check_conditions(ctx, worst_point(ctx, r, 1), kAll);
  EXPECT_FALSE(rep.get(Condition::Spin).applicable);
  EXPECT_FALSE(rep.get(Condition::RankSpin).applicable);
}

TEST(Nu, RecoversTheFlatClosure) {
  std::mt19937_64 rng(907);
  for (long p : {3L, 5L}) {
    PadicContext c(p, true);
    for (const Config& cfg : kConfigs) {
      ChainContext ctx(p, cfg.n, cfg.r, cfg.s);
      for (int k : {2, 4, 6}) {
        ResidueRing r(p, k);
        for (int it = 0; it < 50; ++it) {
          FlatPair fp = flat_pair(ctx, c, r, rng);
          ConditionReport low = check_conditions(ctx, fp.low, kNaiveKottwitzWedge);
          ASSERT_TRUE(low.all_pass()) << failures(low);
          NuResult nu = nu_map(ctx, fp.low);
          ASSERT_TRUE(nu.contains_image);
          ASSERT_TRUE(nu.lagrangian);
          ASSERT_TRUE(nu.pi_stable);
          ASSERT_TRUE(nu.maps_into_next);
          ASSERT_EQ(nu.passing_branches, 1);
          ASSERT_NE(nu.branch_ranks[0] % 2, nu.branch_ranks[1] % 2);
          ASSERT_TRUE(same_span(nu.point.gens, fp.high.gens));
          ConditionReport high = check_conditions(ctx, nu.point, kAll);
          ASSERT_TRUE(high.all_pass()) << failures(high);
        }
      }
    }
  }
}

TEST(Nu, RejectsWrongIndex) {
  ChainContext ctx(3, 4, 3, 1);
  ResidueRing r(3, 2);
  EXPECT_THROW(nu_map(ctx, worst_point(ctx, r, ctx.m())), PreconditionViolated);
}

TEST(Chart, FlatPointsSatisfyRelationsAndClosedForm) {
  std::mt19937_64 rng(908);
  for (long p : {3L, 5L}) {
    PadicContext c(p, true);
    ChainContext ctx(p, 4, 3, 1);
    Mat<mpq_class> u = ctx.transition(ctx.m() - 1);
    for (int k : {4, 6}) {
      ResidueRing r(p, k);
      int in_chart = 0;
      for (int it = 0; it < 60; ++it) {
        FlatPair fp = flat_pair(ctx, c, r, rng);
        std::optional<Mat<RElem>> x = chart_coordinates(fp.low);
        if (!x) continue;
        ++in_chart;
        RelationReport rel = verify_want_relations(ctx, *x);
        ASSERT_TRUE(rel.pass()) << rel.failures.front();
        ChainPoint closed = nu_closed_form(ctx, *x);
        ChainPoint chart = chart_point(ctx.m() - 1, *x);
        ASSERT_TRUE(same_span(closed.gens, nu_map(ctx, chart).point.gens));
        ASSERT_TRUE(same_span(closed.gens, fp.high.gens));
        Mat<RElem> image = to_ring<RElem>(u, r) * chart.gens;
        for (int j = 0; j < ctx.n(); ++j) {
          if (j == ctx.m() - 1) continue;
          ASSERT_EQ(image.column(j), closed.gens.column(j)) << "column " << j;
        }
      }
      EXPECT_GT(in_chart, 10);
    }
  }
}

TEST(Chart, WorstPointNegativeControl) {
  for (long p : {3L, 5L}) {
    ChainContext ctx(p, 4, 3, 1);
    ResidueRing r(p, 2);
    Mat<RElem> zero(4, 4, RElem(r, 0));
    RelationReport rel = verify_want_relations(ctx, zero);
    EXPECT_FALSE(rel.pass());
    ChainPoint pt = worst_point(ctx, r, ctx.m() - 1);
    ConditionReport rep = check_conditions(ctx, pt, kNaiveKottwitzWedge);
    EXPECT_TRUE(rep.get(Condition::Naive).pass);
    // For odd p the characteristic does not divide n - 2, so Kottwitz fails as well.
    EXPECT_FALSE(rep.get(Condition::Kottwitz).pass);
    NuResult nu = nu_map(ctx, pt);
    // span{e_1, ..., e_{m-1}, e_{m+1}, pi e_{m+1}, ..., pi e_n} in the basis of Lambda_m.
    const int n = 4, m = 2;
    Mat<RElem> expected(2 * n, n, RElem(r, 0));
    int col = 0;
    for (int k = 1; k <= m - 1; ++k) expected(n + k - 1, col++) = RElem(r, 1);
    expected(m, col++) = RElem(r, 1);
    for (int k = m + 1; k <= n; ++k) expected(n + k - 1, col++) = RElem(r, 1);
    EXPECT_TRUE(same_span(nu.point.gens, expected));
    EXPECT_FALSE(check_conditions(ctx, nu.point, {Condition::Wedge}).all_pass());
  }
}

TEST(Chart, PerturbedFlatPointsFailRelations) {
  std::mt19937_64 rng(909);
  PadicContext c(3, true);
  ChainContext ctx(3, 4, 3, 1);
  ResidueRing r(3, 4);
  int tested = 0;
  for (int it = 0; it < 40; ++it) {
    FlatPair fp = flat_pair(ctx, c, r, rng);
    std::optional<Mat<RElem>> x = chart_coordinates(fp.low);
    if (!x) continue;
    Mat<RElem> bad = *x;
    bad(0, 0) += RElem(r, 1);
    EXPECT_FALSE(verify_want_relations(ctx, bad).pass());
    ++tested;
  }
  EXPECT_GT(tested, 0);
}
