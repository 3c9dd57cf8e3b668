#include <gtest/gtest.h>

#include "afl/fmat.hpp"
#include "afl/intersection.hpp"
#include "test_util.hpp"

using namespace afl;
using afl::testing_util::kIterations;

namespace {

const long kPrimes[] = {3, 5, 7};
const Setting kRamified[] = {Setting::RamEven, Setting::RamSelfDual0, Setting::RamSelfDual1};

FElem I(const PadicContext& c, long v) { return FElem::from_int(c, v); }

QuatElem Q(const FElem& a, const FElem& b) { return QuatElem(a, b); }

struct GroupSample {
  FMat gamma;
  GroupPresentation pres;
};

GroupSample sample_group(std::mt19937_64& rng, const PadicContext& c, Setting s) {
  for (;;) {
    FMat gamma = testing_util::random_S2(rng, c);
    if (side(gamma) == presentation_side(s)) return {gamma, match_presentation(s, gamma)};
  }
}

LiePresentation sample_lie(std::mt19937_64& rng, const PadicContext& c, Setting s) {
  for (;;) {
    FMat y = testing_util::random_s2(rng, c);
    if (is_regular_semisimple(y) && side_lie(y) == presentation_side(s)) return match_presentation_lie(s, y);
  }
}

/// Largest l <= 60 with x in O_F + pi^l O_D, by direct membership.
long conductor_by_membership(const QuatElem& x) {
  long l = 0;
  while (l < 60 && in_order_conductor(x, l + 1)) ++l;
  return l;
}

FElem half(const PadicContext& c) { return FElem::from_rational(c, mpq_class(1, 2)); }

}  // namespace

TEST(GrossLength, Examples) {
  PadicContext c(5, true);
  FElem pi = FElem::pi(c);
  EXPECT_EQ(gross_length(Q(I(c, 1), I(c, 1))), 1);
  EXPECT_EQ(gross_length(Q(I(c, 1), pi)), 2);
  EXPECT_THROW(gross_length(Q(I(c, 3), FElem::zero(c))), InfiniteLength);
  EXPECT_THROW(gross_length(Q(I(c, 1), pi.inverse())), NonIntegral);
  EXPECT_THROW(gross_length(Q(pi.inverse(), I(c, 1))), NonIntegral);
}

TEST(GrossLength, MatchesMembershipOracle) {
  std::mt19937_64 rng(401);
  for (long p : kPrimes) {
    PadicContext c(p, true);
    for (int it = 0; it < kIterations; ++it) {
      QuatElem x = Q(testing_util::random_integral_f(rng, c), testing_util::random_f(rng, c, 0, 6));
      if (x.b().is_exact_zero()) continue;
      long l = conductor_by_membership(x);
      ASSERT_EQ(gross_length(x), l + 1) << x.to_string();
      ASSERT_FALSE(in_order_conductor(x, l + 1));
    }
  }
}

TEST(GrossLength, InvariantUnderUnitsOfFAndZeta) {
  std::mt19937_64 rng(402);
  for (long p : kPrimes) {
    PadicContext c(p, true);
    QuatElem zeta = QuatElem::zeta(c);
    for (int it = 0; it < kIterations; ++it) {
      QuatElem x = Q(testing_util::random_integral_f(rng, c), testing_util::random_f(rng, c, 0, 5));
      if (x.b().is_exact_zero()) continue;
      FElem u = testing_util::random_integral_f(rng, c, 0);
      if (!u.is_unit()) continue;
      QuatElem qu(u);
      long l = gross_length(x);
      ASSERT_EQ(gross_length(qu * x * qu.inverse()), l);
      ASSERT_EQ(gross_length(zeta * x * zeta.inverse()), l);
    }
  }
}

TEST(GrossLength, NormValuationIsZetaCoordinateValuation) {
  std::mt19937_64 rng(403);
  for (long p : kPrimes) {
    PadicContext c(p, true);
    for (int it = 0; it < kIterations; ++it) {
      FElem beta = testing_util::random_f(rng, c, -3, 4);
      QuatElem b(FElem::zero(c), beta);
      ASSERT_EQ(b.reduced_norm(), norm_b_prime(beta));
      ASSERT_EQ(norm_b_prime(beta).valuation(), beta.valuation());
      if (beta.is_integral()) ASSERT_EQ(gross_length(b) - 1, norm_b_prime(beta).valuation());
    }
  }
}

TEST(IntClosedForm, Examples) {
  bool ram_even_seen = false;
  for (long p : {3L, 5L, 7L, 11L, 13L}) {
    PadicContext c(p, true);
    FElem one = I(c, 1);
    F0Elem eps = F0Elem::from_int(c, c.epsilon());
    // b' = zeta: N a = 1 + eps.
    try {
      FElem a = norm_preimage(F0Elem::from_int(c, 1) + eps);
      GroupPresentation g{a, one, one};
      EXPECT_EQ(int_closed_form(Setting::RamEven, g), 2);
      EXPECT_EQ(int_oracle_ram_even(g), 2);
      ram_even_seen = true;
    } catch (const NotInDomain&) {
    }
    FElem pi = FElem::pi(c);
    LiePresentation x{pi.inverse(), one, pi};
    EXPECT_EQ(int_closed_form_lie(Setting::RamEven, x), 0);
    EXPECT_EQ(int_oracle_ram_even_lie(x), 0);
    // selfdual-1 with b' = pi zeta: v(N b') = 1.
    FElem a1 = norm_preimage(F0Elem::from_int(c, 1) - norm_b_prime(pi));
    GroupPresentation g1{a1, pi, one};
    ASSERT_EQ(a1.norm() + norm_b_prime(pi), F0Elem::from_int(c, 1));
    EXPECT_EQ(norm_b_prime(pi).valuation(), 1);
    EXPECT_EQ(int_closed_form(Setting::RamSelfDual1, g1), 2);
    EXPECT_EQ(int_oracle_selfdual(Setting::RamSelfDual1, g1), 2);
    EXPECT_THROW(int_closed_form(Setting::RamEven, GroupPresentation{one, FElem::zero(c), one}),
                 NotRegularSemisimple);
  }
  EXPECT_TRUE(ram_even_seen);
  PadicContext u(5, false);
  EXPECT_THROW(int_closed_form(Setting::UnramSelfDual, GroupPresentation{I(u, 1), I(u, 1), I(u, 1)}),
               PreconditionViolated);
}

TEST(IntClosedForm, ConjugatedMatricesHaveStatedForm) {
  std::mt19937_64 rng(404);
  for (long p : kPrimes) {
    PadicContext c(p, true);
    QuatElem pi(FElem::pi(c));
    QuatElem pinv(FElem::pi(c).inverse());
    QuatElem h(half(c));
    QuatElem one = QuatElem::one(c);
    for (int it = 0; it < kIterations / 3; ++it) {
      GroupPresentation g = sample_group(rng, c, Setting::RamEven).pres;
      QuatElem a(g.a), alpha(g.alpha), b(FElem::zero(c), g.beta);
      ConjugatedPair m = ram_even_conjugates(quat_presentation(Setting::RamEven, g));
      QuatElem s = a + b, d = a - b;
      ASSERT_EQ(m.conj, quat_matrix(h * (one + alpha) * s, h * pi * (one - alpha) * s, h * pinv * (one - alpha) * s,
                                    h * (one + alpha) * s));
      ASSERT_EQ(m.conj_kappa, quat_matrix(h * (one - alpha) * d, h * pi * (one + alpha) * d,
                                          h * pinv * (one + alpha) * d, h * (one - alpha) * d));

      LiePresentation x = sample_lie(rng, c, Setting::RamEven);
      QuatElem xa(x.a), xd(x.d), xb(FElem::zero(c), x.beta);
      QuatElem two(I(c, 2));
      ConjugatedPair n = ram_even_conjugates(quat_presentation_lie(Setting::RamEven, x));
      ASSERT_EQ(n.conj, quat_matrix(h * (xa + xd + two * xb), h * pi * (xa - xd), h * pinv * (xa - xd),
                                    h * (xa + xd + two * xb)));
      ASSERT_EQ(n.conj_kappa, quat_matrix(h * (xa - xd), h * pi * (xa + xd - two * xb),
                                          h * pinv * (xa + xd - two * xb), h * (xa - xd)));
    }
  }
}

TEST(IntClosedForm, RamEvenBranchFollowsAlphaModPi) {
  std::mt19937_64 rng(405);
  for (long p : kPrimes) {
    PadicContext c(p, true);
    FElem one = I(c, 1);
    int plus = 0, minus = 0;
    for (int it = 0; it < kIterations / 2; ++it) {
      GroupPresentation g = sample_group(rng, c, Setting::RamEven).pres;
      ConjugatedPair m = ram_even_conjugates(quat_presentation(Setting::RamEven, g));
      bool congruent_one = (g.alpha - one).val_at_least(1);
      ASSERT_NE(congruent_one, (g.alpha + one).val_at_least(1));
      ASSERT_EQ(is_integral(m.conj), congruent_one);
      ASSERT_EQ(is_integral(m.conj_kappa), !congruent_one);
      QuatElem b(FElem::zero(c), g.beta);
      QuatElem surviving = congruent_one ? QuatElem(g.a) + b : QuatElem(g.a) - b;
      ASSERT_EQ(int_oracle_ram_even(g), 2 * gross_length(surviving));
      (congruent_one ? plus : minus)++;
    }
    EXPECT_GT(plus, 0);
    EXPECT_GT(minus, 0);
  }
}

TEST(IntClosedForm, GroupAgreesWithOracle) {
  std::mt19937_64 rng(406);
  for (Setting s : kRamified)
    for (long p : kPrimes) {
      PadicContext c(p, true);
      int zeros = 0;
      for (int it = 0; it < 200; ++it) {
        GroupPresentation g = sample_group(rng, c, s).pres;
        long closed = int_closed_form(s, g);
        long oracle = s == Setting::RamEven ? int_oracle_ram_even(g) : int_oracle_selfdual(s, g);
        ASSERT_EQ(closed, oracle) << to_string(s) << " p=" << p;
        if (closed == 0) ++zeros;
      }
      if (s == Setting::RamSelfDual0) {
        EXPECT_GT(zeros, 0);
      } else {
        EXPECT_EQ(zeros, 0);
      }
    }
}

TEST(IntClosedForm, LieAgreesWithOracle) {
  std::mt19937_64 rng(407);
  for (Setting s : kRamified)
    for (long p : kPrimes) {
      PadicContext c(p, true);
      int zeros = 0, nonzero = 0;
      for (int it = 0; it < 200; ++it) {
        LiePresentation x = sample_lie(rng, c, s);
        long closed = int_closed_form_lie(s, x);
        long oracle = s == Setting::RamEven ? int_oracle_ram_even_lie(x) : int_oracle_selfdual_lie(s, x);
        ASSERT_EQ(closed, oracle) << to_string(s) << " p=" << p;
        (closed == 0 ? zeros : nonzero)++;
      }
      EXPECT_GT(zeros, 0);
      EXPECT_GT(nonzero, 0);
    }
}

TEST(IntClosedForm, InvariantUnderHConjugation) {
  std::mt19937_64 rng(408);
  for (Setting s : kRamified)
    for (long p : kPrimes) {
      PadicContext c(p, true);
      for (int it = 0; it < 200; ++it) {
        GroupPresentation g = sample_group(rng, c, s).pres;
        FElem h = testing_util::random_norm_one(rng, c);
        FMat hm = fmat_diag({h, I(c, 1)});
        FMat conj = inverse(hm) * from_presentation(s, g) * hm;
        GroupPresentation g2 = to_presentation(s, conj);
        ASSERT_EQ(int_closed_form(s, g2), int_closed_form(s, g));
        long oracle = s == Setting::RamEven ? int_oracle_ram_even(g2) : int_oracle_selfdual(s, g2);
        ASSERT_EQ(oracle, int_closed_form(s, g));

        LiePresentation x = sample_lie(rng, c, s);
        FMat xc = inverse(hm) * from_presentation_lie(s, x) * hm;
        ASSERT_EQ(int_closed_form_lie(s, to_presentation_lie(s, xc)), int_closed_form_lie(s, x));
      }
    }
}

TEST(IntClosedForm, MatchingDeterminesNormValuation) {
  std::mt19937_64 rng(409);
  for (Setting s : kRamified)
    for (long p : kPrimes) {
      PadicContext c(p, true);
      F0Elem one = F0Elem::from_int(c, 1);
      F0Elem eps = F0Elem::from_int(c, c.epsilon());
      for (int it = 0; it < 200; ++it) {
        GroupSample sm = sample_group(rng, c, s);
        F0Elem rest = one - sm.gamma(0, 0).norm();
        ASSERT_EQ(norm_b_prime(sm.pres.beta).valuation(), rest.valuation());
        F0Elem nb = s == Setting::RamSelfDual0 ? eps * rest : rest;
        ASSERT_EQ(norm_b_prime(sm.pres.beta), nb);
      }
    }
}

TEST(ThetaReduction, LiftingEquivalence) {
  std::mt19937_64 rng(410);
  for (long p : kPrimes) {
    PadicContext c(p, false);
    FElem varpi = FElem::pi(c);
    int lifts = 0, fails = 0;
    for (int it = 0; it < kIterations; ++it) {
      FElem cc = testing_util::random_f(rng, c, -1, 2);
      FMat x = fmat(c, {{testing_util::random_imag(rng, c, -1, 2), -(varpi * cc.conj())},
                        {cc, testing_util::random_imag(rng, c, -1, 2)}});
      ASSERT_TRUE(theta_lifting_equivalent(x));
      (lifts_to_product(x) ? lifts : fails)++;
    }
    EXPECT_GT(lifts, 0);
    EXPECT_GT(fails, 0);
  }
}

TEST(ThetaReduction, RequiresLieAlgebraElement) {
  PadicContext c(5, false);
  FMat x = fmat(c, {{FElem::zero(c), I(c, 1)}, {I(c, 1), FElem::zero(c)}});
  EXPECT_TRUE(lifts_to_product(x));
  EXPECT_FALSE(lifts_to_product(theta(x)));
  EXPECT_THROW(theta_lifting_equivalent(x), PreconditionViolated);
  PadicContext r(5, true);
  EXPECT_THROW(theta_lifting_equivalent(fmat(r, {{I(r, 0), I(r, 1)}, {I(r, 1), I(r, 0)}})), PreconditionViolated);
}

TEST(CayleyOrder, StronglyIntegralElementsGenerateTheSameOrder) {
  std::mt19937_64 rng(411);
  for (long p : kPrimes) {
    PadicContext c(p, false);
    int positive = 0, negative = 0;
    for (int it = 0; it < kIterations; ++it) {
      FElem xi = testing_util::random_norm_one(rng, c);
      FMat x = fmat(c, {{testing_util::random_integral_f(rng, c, 2), testing_util::random_integral_f(rng, c, 2)},
                        {testing_util::random_integral_f(rng, c, 2), testing_util::random_integral_f(rng, c, 2)}});
      FElem d = det(fmat_identity(c, 2) - x);
      if (!d.is_nonzero()) continue;
      if (d.is_unit()) {
        ASSERT_TRUE(cayley_order_equal(xi, x)) << x.to_string();
        ++positive;
      } else {
        ASSERT_FALSE(cayley_order_equal(xi, x)) << x.to_string();
        ++negative;
      }
    }
    EXPECT_GT(positive, kIterations / 4);
    EXPECT_GT(negative, 0);
  }
}

TEST(CayleyOrder, GeneratedOrderMembership) {
  PadicContext c(5, false);
  FMat x = fmat(c, {{I(c, 1), I(c, 5)}, {I(c, 0), I(c, 2)}});
  FMat y = fmat_identity(c, 2) + x * x;
  EXPECT_TRUE(in_generated_order(y, x));
  FMat z = fmat(c, {{I(c, 1), I(c, 0)}, {I(c, 1), I(c, 2)}});
  EXPECT_FALSE(in_generated_order(z, x));
  FMat w = fmat(c, {{I(c, 1), I(c, 1)}, {I(c, 0), FElem::from_rational(c, mpq_class(6, 5))}});
  EXPECT_FALSE(in_generated_order(w, x));
  EXPECT_THROW(in_generated_order(y, fmat_identity(c, 2)), NotRegularSemisimple);
}
