#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "afl/errors.hpp"
#include "afl/fmat.hpp"
#include "afl/lattice.hpp"
#include "afl/orbit.hpp"
#include "afl/padic.hpp"
#include "afl/quaternion.hpp"
#include "afl/series.hpp"

namespace afl::sampling {

/// Deterministic generator for one sample of one check.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t tag, long p, long index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

inline mpz_class p_pow(long p, int k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k < 0 ? -k : k));
  return r;
}

/// Random rational p^k * (n / d) with n, d prime to p, k in [kmin, kmax].
inline mpq_class random_rational(std::mt19937_64& rng, long p, int kmin, int kmax) {
  std::uniform_int_distribution<int> kd(kmin, kmax);
  std::uniform_int_distribution<long> nd(1, 400);
  long n = nd(rng);
  while (n % p == 0) n = nd(rng);
  long d = nd(rng);
  while (d % p == 0) d = nd(rng);
  if (rng() & 1) n = -n;
  mpq_class r(n, d);
  int k = kd(rng);
  if (k >= 0)
    r *= p_pow(p, k);
  else
    r /= p_pow(p, k);
  r.canonicalize();
  return r;
}

inline F0Elem random_f0(std::mt19937_64& rng, const PadicContext& c, int kmin = -2, int kmax = 3) {
  return F0Elem::from_rational(c, random_rational(rng, c.p(), kmin, kmax));
}

/// Random nonzero element of F; each coordinate is zero with probability 1/5.
inline FElem random_f(std::mt19937_64& rng, const PadicContext& c, int kmin = -2, int kmax = 3) {
  std::uniform_int_distribution<int> z(0, 4);
  F0Elem a = z(rng) == 0 ? F0Elem::zero(c) : random_f0(rng, c, kmin, kmax);
  F0Elem b = (z(rng) == 0 && !a.is_exact_zero()) ? F0Elem::zero(c) : random_f0(rng, c, kmin, kmax);
  return FElem(a, b);
}

inline FElem random_integral_f(std::mt19937_64& rng, const PadicContext& c, int kmax = 3) {
  return random_f(rng, c, 0, kmax);
}

inline QuatElem random_quat(std::mt19937_64& rng, const PadicContext& c, int kmin = -2, int kmax = 3) {
  std::uniform_int_distribution<int> z(0, 4);
  FElem a = z(rng) == 0 ? FElem::zero(c) : random_f(rng, c, kmin, kmax);
  FElem b = (z(rng) == 0 && !a.is_exact_zero()) ? FElem::zero(c) : random_f(rng, c, kmin, kmax);
  return QuatElem(a, b);
}

/// Random element of F^1 built as z / conj(z).
inline FElem random_norm_one(std::mt19937_64& rng, const PadicContext& c) {
  return norm_one_from(random_f(rng, c, -2, 2));
}

/// Random element of F with trace zero: w * x for w = pi or delta.
inline FElem random_imag(std::mt19937_64& rng, const PadicContext& c, int kmin = -1, int kmax = 2) {
  return FElem(F0Elem::zero(c), random_f0(rng, c, kmin, kmax));
}

/// Random regular semisimple gamma(a, b).
inline FMat random_S2(std::mt19937_64& rng, const PadicContext& c, int kmin = -1, int kmax = 2) {
  for (;;) {
    FElem a = (rng() % 4 == 0) ? FElem::zero(c) : random_f(rng, c, kmin, kmax);
    FElem b = random_f(rng, c, kmin, kmax);
    FElem t = FElem(a.norm()) - FElem::from_int(c, 1);
    if (t.is_exact_zero() || t.is_indeterminate()) continue;
    return gamma_ab(a, b);
  }
}

inline FMat random_s2(std::mt19937_64& rng, const PadicContext& c, int kmin = -1, int kmax = 2) {
  return lie_y(random_imag(rng, c, kmin, kmax), random_imag(rng, c, kmin, kmax), random_imag(rng, c, kmin, kmax),
               random_imag(rng, c, kmin, kmax));
}

/// Random unit of F.
inline FElem random_unit_f(std::mt19937_64& rng, const PadicContext& c) {
  for (;;) {
    FElem u = random_f(rng, c, 0, 1);
    if (u.is_unit()) return u;
  }
}

/// Element of F0 with valuation exactly k.
inline F0Elem random_f0_of_valuation(std::mt19937_64& rng, const PadicContext& c, int k) {
  return random_f0(rng, c, k, k);
}

/// Stratum (v_F(b), v_F0(1 - Na)) of a sample gamma(a, b).
struct Stratum {
  int vb = 0;
  int vt = 0;
};

/// Strata of a window [vmin, vmax]^2 that contain elements: in the unramified
/// case 1 - Na with negative valuation is a norm, so its valuation is even.
inline std::vector<Stratum> group_strata(const PadicContext& c, int vmin, int vmax) {
  std::vector<Stratum> out;
  for (int vb = vmin; vb <= vmax; ++vb)
    for (int vt = vmin; vt <= vmax; ++vt) {
      if (!c.ramified() && vt < 0 && vt % 2 != 0) continue;
      out.push_back({vb, vt});
    }
  return out;
}

/// gamma(a, b) with v_F(b) = vb and v_F0(1 - Na) = vt, or nothing after a
/// bounded number of attempts.
inline std::optional<FMat> stratified_S2(std::mt19937_64& rng, const PadicContext& c, const Stratum& st) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    F0Elem t = random_f0_of_valuation(rng, c, st.vt);
    F0Elem na = F0Elem::from_int(c, 1) - t;
    if (!na.is_regular()) continue;
    FElem a;
    try {
      a = norm_preimage(na) * random_norm_one(rng, c);
    } catch (const NotInDomain&) {
      continue;
    }
    FElem b = FElem::pi_power(c, st.vb) * random_unit_f(rng, c);
    FElem rest = FElem::from_int(c, 1) - FElem(a.norm());
    if (!rest.x0().is_regular() || rest.x0().valuation() != st.vt) continue;
    return gamma_ab(a, b);
  }
  return std::nullopt;
}

/// Regular semisimple y(a, b, c, d) in s_2 whose off-diagonal entries have
/// trace-zero coordinates of valuation kb and kc.
inline std::optional<FMat> stratified_s2(std::mt19937_64& rng, const PadicContext& c, int kb, int kc) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    FMat y = lie_y(random_imag(rng, c, -1, 2), random_imag(rng, c, kb, kb), random_imag(rng, c, kc, kc),
                   random_imag(rng, c, -1, 2));
    if (is_regular_semisimple(y)) return y;
  }
  return std::nullopt;
}

/// Random invertible n x n matrix over F (certified nonzero determinant).
inline FMat random_basis(std::mt19937_64& rng, const PadicContext& c, int n) {
  for (;;) {
    FMat b = fmat_zero(c, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rng() % 3) b(i, j) = random_f(rng, c, -1, 2);
    FElem d = det(b);
    if (!d.is_exact_zero() && (d.x0().is_regular() || d.x1().is_regular())) return b;
  }
}

inline HermitianSpace random_space(std::mt19937_64& rng, const PadicContext& c, int n) {
  std::vector<F0Elem> d;
  for (int i = 0; i < n; ++i) d.push_back(random_f0(rng, c, 0, 1));
  return diagonal_space(d);
}

inline OrbitalSeries random_series(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> kd(-4, 4);
  std::uniform_int_distribution<long> cd(-9, 9);
  OrbitalSeries s;
  int terms = static_cast<int>(rng() % 4);
  for (int i = 0; i < terms; ++i) s.add_term(kd(rng), GaussQ(mpq_class(cd(rng), 1 + rng() % 5), cd(rng)));
  return s;
}

}  // namespace afl::sampling
