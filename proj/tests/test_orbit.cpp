#include <gtest/gtest.h>

#include "afl/orbit.hpp"
#include "test_util.hpp"

using namespace afl;
using afl::testing_util::kIterations;

using afl::testing_util::random_imag;
using afl::testing_util::random_S2;
using afl::testing_util::random_s2;

namespace {

const long kPrimes[] = {3, 5, 7};

FElem I(const PadicContext& c, long v) { return FElem::from_int(c, v); }

FMat random_gl(std::mt19937_64& rng, const PadicContext& c, int n, int kmin = 0, int kmax = 2) {
  for (;;) {
    FMat g = fmat_zero(c, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = testing_util::random_f(rng, c, kmin, kmax);
    FElem d = det(g);
    if (!d.is_exact_zero() && (d.x0().is_regular() || d.x1().is_regular())) return g;
  }
}

/// diag(x, 1) for x in F0^x.
FMat h_diag(const F0Elem& x) {
  const PadicContext& c = x.ctx();
  return fmat_diag({FElem(x), I(c, 1)});
}

/// Direct congruence test for K' = S(O_F0) n K_0(varpi) at n = 2.
bool in_kprime_oracle(const FMat& g) {
  if (!in_S(g) || !is_integral(g)) return false;
  return g(0, 1).val_at_least(g(0, 0).ctx().e());
}

bool rs_or_throw_free(const FMat& x) {
  try {
    return is_regular_semisimple(x);
  } catch (const InsufficientPrecision&) {
    return false;
  }
}

}  // namespace

TEST(RegularSemisimple, Examples) {
  PadicContext c(5, true);
  EXPECT_FALSE(is_regular_semisimple(fmat_diag({I(c, 2), I(c, 3)})));
  EXPECT_TRUE(is_regular_semisimple(gamma_ab(I(c, 2), I(c, 1))));
  FElem pi = FElem::pi(c);
  FMat y = lie_y(pi, pi, pi, pi);
  EXPECT_TRUE(in_s(y));
  EXPECT_TRUE(is_regular_semisimple(y));
  EXPECT_THROW(gamma_ab(I(c, 2), FElem::zero(c)), NotRegularSemisimple);
}

TEST(RegularSemisimple, ThreeByThree) {
  PadicContext c(3, false);
  FMat d = fmat_diag({I(c, 1), I(c, 2), I(c, 4)});
  EXPECT_FALSE(is_regular_semisimple(d));
  FMat m = d;
  m(0, 2) = I(c, 1);
  m(1, 2) = I(c, 1);
  // e is cyclic for m but e^T generates only the last row space.
  EXPECT_FALSE(is_regular_semisimple(m));
  m(2, 0) = I(c, 1);
  m(2, 1) = I(c, 1);
  EXPECT_TRUE(is_regular_semisimple(m));
}


TEST(RegularSemisimple, InvariantUnderHConjugation) {
  std::mt19937_64 rng(31);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int it = 0; it < kIterations / 5; ++it) {
        FMat g = symmetrization(random_gl(rng, c, 3));
        ASSERT_TRUE(in_S(g));
        FMat h = fmat_identity(c, 3);
        FMat hb = random_gl(rng, c, 2);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) h(i, j) = FElem(hb(i, j).x0());
        if (!det(h).is_nonzero()) continue;
        ASSERT_EQ(rs_or_throw_free(inverse(h) * g * h), rs_or_throw_free(g));
      }
    }
}

TEST(Side, Examples) {
  PadicContext c(5, true);
  EXPECT_EQ(side(gamma_ab(I(c, 2), I(c, 1))), 1);
  EXPECT_EQ(side(gamma_ab(FElem::pi(c), I(c, 1))), 0);
  for (long p : kPrimes) {
    PadicContext r(p, true);
    FElem pi = FElem::pi(r);
    // bc = u^2 varpi, so eta(bc) = eta(varpi) = Legendre(-1).
    for (long u : {1L, 2L}) {
      FMat y = lie_y(pi, pi, I(r, u * u) * pi, pi);
      int expected = (p % 4 == 1) ? 0 : 1;
      EXPECT_EQ(side_lie(y), expected) << p;
    }
  }
  EXPECT_THROW(side(fmat_diag({I(c, 2), I(c, 3)})), NotRegularSemisimple);
}

TEST(Side, InvariantUnderConjugation) {
  std::mt19937_64 rng(32);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int it = 0; it < kIterations; ++it) {
        FMat g = random_S2(rng, c);
        FMat y = random_s2(rng, c);
        FMat h = h_diag(testing_util::random_f0(rng, c));
        FMat hi = inverse(h);
        ASSERT_EQ(side(hi * g * h), side(g));
        if (is_regular_semisimple(y)) ASSERT_EQ(side_lie(hi * y * h), side_lie(y));
      }
    }
}

TEST(Matching, PresentationExamples) {
  PadicContext c(5, true);
  FMat g = gamma_ab(I(c, 2), I(c, 1));
  F0Elem nb = F0Elem::from_int(c, -3);
  EXPECT_TRUE(match_check_presentation(Setting::RamEven, g, I(c, 2), I(c, -1), nb));
  EXPECT_FALSE(match_check_presentation(Setting::RamEven, g, I(c, 2), I(c, 1), nb));
  PadicContext c3(3, true);
  FElem pi = FElem::pi(c3);
  FMat y = lie_y(pi, pi, pi, pi);
  EXPECT_TRUE(match_check_presentation_lie(Setting::RamEven, y, pi, -pi, -F0Elem::p_power(c3, 1)));
  EXPECT_FALSE(match_check_presentation_lie(Setting::RamEven, y, pi, pi, -F0Elem::p_power(c3, 1)));
}

TEST(Matching, ConstructedUnitaryMatches) {
  std::mt19937_64 rng(33);
  for (Setting s : all_settings())
    for (long p : kPrimes) {
      PadicContext c(p, setting_ramified(s));
      for (int it = 0; it < kIterations / 3; ++it) {
        FMat gamma = random_S2(rng, c);
        FMat g = match_group(s, gamma);
        ASSERT_TRUE(is_unitary(g, unitary_space(c, s, side(gamma)))) << to_string(s);
        ASSERT_TRUE(match_check(gamma, g));
        ASSERT_EQ(char_poly(gamma), char_poly(g));
        ASSERT_FALSE(is_unitary(g, unitary_space(c, s, 1 - side(gamma))));
        FMat y = random_s2(rng, c);
        if (!is_regular_semisimple(y)) continue;
        FMat x = match_lie(s, y);
        ASSERT_TRUE(is_lie_unitary(x, unitary_space(c, s, side_lie(y)))) << to_string(s);
        ASSERT_TRUE(match_check_lie(y, x));
        ASSERT_EQ(char_poly(y), char_poly(x));
      }
    }
}

TEST(Matching, PresentationsAreUnitaryAndMatch) {
  std::mt19937_64 rng(34);
  for (Setting s : {Setting::RamEven, Setting::RamSelfDual0, Setting::RamSelfDual1})
    for (long p : kPrimes) {
      PadicContext c(p, true);
      HermitianSpace w = unitary_space(c, s, presentation_side(s));
      int done = 0;
      while (done < kIterations / 3) {
        FMat gamma = random_S2(rng, c);
        FMat y = random_s2(rng, c);
        if (side(gamma) == presentation_side(s)) {
          GroupPresentation pr = match_presentation(s, gamma);
          FMat g = from_presentation(s, pr);
          ASSERT_TRUE(is_unitary(g, w));
          ASSERT_TRUE(match_check(gamma, g));
          ASSERT_TRUE(match_check_presentation(s, gamma, pr.a, pr.alpha, norm_b_prime(pr.beta)));
          ASSERT_FALSE(match_check_presentation(s, gamma, pr.a, -pr.alpha, norm_b_prime(pr.beta)));
          GroupPresentation back = to_presentation(s, g);
          ASSERT_EQ(back.alpha, pr.alpha);
          ++done;
        } else {
          ASSERT_THROW(match_presentation(s, gamma), PreconditionViolated);
        }
        if (is_regular_semisimple(y) && side_lie(y) == presentation_side(s)) {
          LiePresentation pr = match_presentation_lie(s, y);
          FMat x = from_presentation_lie(s, pr);
          ASSERT_TRUE(is_lie_unitary(x, w));
          ASSERT_TRUE(match_check_lie(y, x));
          ASSERT_TRUE(match_check_presentation_lie(s, y, pr.a, pr.d, norm_b_prime(pr.beta)));
        }
      }
    }
}

TEST(Matching, WellDefinedOnOrbits) {
  std::mt19937_64 rng(35);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      Setting s = ram ? Setting::RamEven : Setting::UnramSelfDual;
      for (int it = 0; it < kIterations; ++it) {
        FMat gamma = random_S2(rng, c);
        FMat other = random_S2(rng, c);
        FMat g = match_group(s, gamma);
        FMat h = h_diag(testing_util::random_f0(rng, c));
        FMat conj_gamma = h * gamma * inverse(h);
        ASSERT_EQ(match_check(conj_gamma, g), match_check(gamma, g));
        ASSERT_TRUE(match_check(conj_gamma, g));
        ASSERT_EQ(match_check(other, g), other(0, 0) == gamma(0, 0) && det(other) == det(gamma));
      }
    }
}

TEST(NormPreimage, SolvesNormEquation) {
  std::mt19937_64 rng(36);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int it = 0; it < kIterations; ++it) {
        F0Elem t = testing_util::random_f0(rng, c);
        if (eta(t) == 1) {
          ASSERT_EQ(norm_preimage(t).norm(), t);
        } else {
          ASSERT_THROW(norm_preimage(t), NotInDomain);
        }
      }
    }
}

TEST(TransferFactor, Examples) {
  for (long p : kPrimes) {
    PadicContext c(p, true);
    FElem pi = FElem::pi(c);
    EXPECT_EQ(transfer_factor_S(gamma_ab(I(c, 2), I(c, 1))), GaussQ(1));
    GaussQ expected = c.eta_tilde_pi() * eta_tilde(I(c, -1));
    EXPECT_EQ(transfer_factor_S(gamma_ab(I(c, 2), pi)), expected);
    EXPECT_EQ(transfer_factor_S(gamma_ab(FElem::zero(c), pi)), expected);
    PadicContext u(p, false);
    EXPECT_EQ(transfer_factor_S(gamma_ab(I(u, 2), I(u, p * p))), GaussQ(1));
    EXPECT_EQ(transfer_factor_S(gamma_ab(I(u, 2), I(u, p))), GaussQ(-1));
  }
}

TEST(TransferFactor, TwoByTwoSpecializations) {
  std::mt19937_64 rng(37);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int it = 0; it < kIterations; ++it) {
        FMat g = random_S2(rng, c);
        ASSERT_EQ(transfer_factor_S(g), eta_tilde(g(0, 1).conj()));
        FMat y = random_s2(rng, c);
        if (!is_regular_semisimple(y)) continue;
        ASSERT_EQ(transfer_factor_lie(y), eta_tilde(-y(0, 1)));
        ASSERT_EQ(transfer_factor_lie(y), eta_tilde(y(0, 1).conj()));
      }
    }
}

TEST(TransferFactor, EquivarianceUnderH) {
  std::mt19937_64 rng(38);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int it = 0; it < kIterations; ++it) {
        FMat g = random_S2(rng, c);
        F0Elem x = testing_util::random_f0(rng, c);
        FMat h = h_diag(x);
        GaussQ e(eta(x));
        ASSERT_EQ(transfer_factor_S(inverse(h) * g * h), e * transfer_factor_S(g));
        FMat y = random_s2(rng, c);
        if (!is_regular_semisimple(y)) continue;
        ASSERT_EQ(transfer_factor_lie(inverse(h) * y * h), e * transfer_factor_lie(y));
      }
    }
}

TEST(TransferFactor, ThreeByThreeEquivariance) {
  std::mt19937_64 rng(39);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int it = 0; it < 100; ++it) {
        FMat g = symmetrization(random_gl(rng, c, 3));
        if (!rs_or_throw_free(g)) continue;
        FMat h = fmat_identity(c, 3);
        FMat hb = random_gl(rng, c, 2);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) h(i, j) = FElem(hb(i, j).x0());
        if (!det(h).is_nonzero()) continue;
        GaussQ e(eta(det(h).x0()));
        ASSERT_EQ(transfer_factor_S(inverse(h) * g * h), e * transfer_factor_S(g));
      }
    }
}

TEST(TransferFactor, GprimeEquivariance) {
  std::mt19937_64 rng(40);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      for (int n : {2, 3}) {
        for (int it = 0; it < 60; ++it) {
          FMat g1 = random_gl(rng, c, n - 1);
          FMat g2 = random_gl(rng, c, n);
          FMat e1 = fmat_identity(c, n);
          e1.set_block(0, 0, inverse(g1));
          if (!rs_or_throw_free(symmetrization(e1 * g2))) continue;
          FMat h1 = random_gl(rng, c, n - 1);
          FMat h21 = random_gl(rng, c, n - 1).map([](const FElem& z) { return FElem(z.x0()); });
          FMat h22 = random_gl(rng, c, n).map([](const FElem& z) { return FElem(z.x0()); });
          if (!det(h21).is_nonzero() || !det(h22).is_nonzero()) continue;
          FMat h1e = fmat_identity(c, n);
          h1e.set_block(0, 0, h1);
          FMat g1n = inverse(h1) * g1 * h21;
          FMat g2n = inverse(h1e) * g2 * h22;
          int e = (n % 2 == 0) ? eta(det(h22).x0()) : eta(det(h21).x0());
          ASSERT_EQ(transfer_factor_Gprime(g1n, g2n), GaussQ(e) * transfer_factor_Gprime(g1, g2)) << n;
        }
      }
    }
}

TEST(Cayley, Examples) {
  std::mt19937_64 rng(41);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      FElem xi = testing_util::random_norm_one(rng, c);
      EXPECT_EQ(cayley(xi, fmat_zero(c, 2, 2)), xi * fmat_identity(c, 2));
      EXPECT_THROW(cayley(xi, fmat_identity(c, 2)), NotInDomain);
      EXPECT_THROW(cayley_inv(xi, -xi * fmat_identity(c, 2)), NotInDomain);
    }
}

TEST(Cayley, InverseAndIntegrality) {
  std::mt19937_64 rng(42);
  for (long p : kPrimes)
    for (bool ram : {true, false}) {
      PadicContext c(p, ram);
      int done = 0;
      while (done < 100) {
        FMat y = random_s2(rng, c, 0, 2);
        if (!is_strongly_integral(y)) continue;
        FElem xi = testing_util::random_norm_one(rng, c);
        FMat g = cayley(xi, y);
        ASSERT_TRUE(in_S(g));
        ASSERT_EQ(cayley_inv(xi, g), y);
        ASSERT_TRUE(is_xi_strongly_integral(g, xi));
        if (is_regular_semisimple(y)) {
          ASSERT_TRUE(is_regular_semisimple(g));
          ASSERT_EQ(side(g), side_lie(y));
          if (!ram) ASSERT_EQ(transfer_factor_S(g), transfer_factor_lie(y));
        }
        ++done;
      }
    }
}

TEST(Cayley, PreservesMatching) {
  std::mt19937_64 rng(43);
  for (Setting s : all_settings())
    for (long p : kPrimes) {
      PadicContext c(p, setting_ramified(s));
      int done = 0;
      while (done < 60) {
        FMat y = random_s2(rng, c, 0, 2);
        if (!is_regular_semisimple(y) || !is_strongly_integral(y)) continue;
        FMat x;
        try {
          x = match_lie(s, y);
        } catch (const NotInDomain&) {
          FAIL() << "no match for an rs element";
        }
        if (!is_strongly_integral(x)) continue;
        FElem xi = testing_util::random_norm_one(rng, c);
        FMat gy = cayley(xi, y);
        FMat gx = cayley(xi, x);
        ASSERT_TRUE(is_unitary(gx, unitary_space(c, s, side_lie(y))));
        ASSERT_TRUE(match_check(gy, gx));
        ++done;
      }
    }
}

TEST(Theta, KPrimeToIntegralAndSign) {
  std::mt19937_64 rng(44);
  for (long p : kPrimes) {
    PadicContext c(p, false);
    for (int it = 0; it < kIterations; ++it) {
      FMat y = random_s2(rng, c, 0, 2);
      ASSERT_EQ(theta(theta_inv(y)), y);
      ASSERT_EQ(theta_inv(theta(y)), y);
      ASSERT_TRUE(in_s(theta(y)));
      bool in_kprime = is_integral(y) && y(0, 1).val_at_least(1);
      ASSERT_EQ(in_kprime, is_integral(theta(y)));
      if (!is_regular_semisimple(y)) continue;
      ASSERT_TRUE(is_regular_semisimple(theta(y)));
      ASSERT_EQ(transfer_factor_lie(y), GaussQ(-1) * transfer_factor_lie(theta(y)));
    }
  }
}

TEST(Theta, ThreeByThreeSignAndEquivariance) {
  std::mt19937_64 rng(45);
  for (long p : kPrimes) {
    PadicContext c(p, false);
    for (int it = 0; it < 100; ++it) {
      FMat y = fmat_zero(c, 3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y(i, j) = random_imag(rng, c, 0, 2);
      FMat h = fmat_identity(c, 3);
      FMat hb = random_gl(rng, c, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) h(i, j) = FElem(hb(i, j).x0());
      if (!det(h).is_nonzero()) continue;
      ASSERT_EQ(theta(inverse(h) * y * h), inverse(h) * theta(y) * h);
      if (!rs_or_throw_free(y)) continue;
      ASSERT_EQ(transfer_factor_lie(y), transfer_factor_lie(theta(y)));
    }
  }
}

TEST(StarInvolution, Examples) {
  PadicContext c(5, false);
  FMat d = fmat_diag({I(c, 2), I(c, 7)});
  EXPECT_EQ(star_involution(d), d);
  FMat m = fmat(c, {{I(c, 1), I(c, 5)}, {I(c, 3), I(c, 4)}});
  FMat expected = fmat(c, {{I(c, 1), I(c, 15)}, {I(c, 1), I(c, 4)}});
  EXPECT_EQ(star_involution(m), expected);
}

TEST(StarInvolution, InvolutionAndKPrimeStable) {
  std::mt19937_64 rng(46);
  for (long p : kPrimes) {
    PadicContext c(p, false);
    long in_count = 0;
    for (int it = 0; it < kIterations; ++it) {
      FMat g0 = random_gl(rng, c, 2, 0, 2);
      if (rng() & 1) g0(0, 1) = I(c, p) * g0(0, 1);
      FMat g = (rng() % 3 == 0) ? random_S2(rng, c) : symmetrization(g0);
      ASSERT_EQ(star_involution(star_involution(g)), g);
      ASSERT_TRUE(in_S(star_involution(g)));
      bool in = in_kprime_oracle(g);
      in_count += in;
      ASSERT_EQ(in_kprime_oracle(star_involution(g)), in);
    }
    EXPECT_GT(in_count, 20);
  }
}
