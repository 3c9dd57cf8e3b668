#pragma once

#include <gmpxx.h>

#include <climits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "afl/errors.hpp"
#include "afl/series.hpp"

namespace afl {

inline constexpr long kInfVal = LONG_MAX / 4;

long floor_div(long a, long b);
long ceil_div(long a, long b);

enum class EtaTildeBranch { Standard, Alternate };

/// Ambient arithmetic: F0 = Q_p with uniformizer varpi = p, and a quadratic
/// extension F.  Ramified: F = F0(pi), pi^2 = p.  Unramified: F = F0(delta),
/// delta^2 = epsilon, uniformizer pi = p.
class PadicContext {
 public:
  PadicContext(long p, bool ramified, int precision = 64,
               EtaTildeBranch branch = EtaTildeBranch::Standard);
  ~PadicContext();
  PadicContext(const PadicContext&) = delete;
  PadicContext& operator=(const PadicContext&) = delete;

  long p() const { return p_; }
  long q() const { return p_; }
  int precision() const { return N_; }
  int guard() const { return 8; }
  bool ramified() const { return ramified_; }
  /// Smallest positive quadratic non-residue mod p.
  long epsilon() const { return epsilon_; }
  /// Ramification index of F/F0.
  long e() const { return ramified_ ? 2 : 1; }
  /// Chosen value of eta~(pi) in the ramified case.
  const GaussQ& eta_tilde_pi() const { return eta_tilde_pi_; }
  EtaTildeBranch branch() const { return branch_; }
  /// Legendre symbol of x mod p (x prime to p).
  int legendre(const mpz_class& x) const;
  const mpz_class& ppow(long k) const;

  /// Memo tables owned by the context (thread-safe).
  struct Cache;
  Cache& cache() const { return *cache_; }

 private:
  long p_;
  bool ramified_;
  int N_;
  long epsilon_;
  EtaTildeBranch branch_;
  GaussQ eta_tilde_pi_;
  std::vector<mpz_class> pow_;
  std::unique_ptr<Cache> cache_;
};

using Ctx = std::shared_ptr<const PadicContext>;
Ctx make_context(long p, bool ramified, int precision = 64,
                 EtaTildeBranch branch = EtaTildeBranch::Standard);

enum class Tri { No, Yes, Unknown };

/// Element of Q_p known to a fixed number of p-adic digits.
///
/// Three states: exact zero; a regular value p^val * unit with the unit known
/// modulo p^prec (prec >= 1); or an indeterminate value, known only to lie in
/// p^val Z_p (produced by cancellation).  Queries that would need digits of an
/// indeterminate value throw InsufficientPrecision.
class F0Elem {
 public:
  F0Elem() = default;

  static F0Elem zero(const PadicContext& c);
  static F0Elem from_int(const PadicContext& c, long v);
  static F0Elem from_mpz(const PadicContext& c, const mpz_class& v);
  static F0Elem from_rational(const PadicContext& c, const mpq_class& v);
  static F0Elem from_unit(const PadicContext& c, long val, const mpz_class& unit, int prec);
  static F0Elem indeterminate(const PadicContext& c, long abs_prec);
  /// p^k exactly.
  static F0Elem p_power(const PadicContext& c, long k);

  const PadicContext& ctx() const { return *ctx_; }
  bool valid() const { return ctx_ != nullptr; }
  bool is_exact_zero() const { return zero_; }
  bool is_indeterminate() const { return !zero_ && prec_ == 0; }
  bool is_regular() const { return !zero_ && prec_ > 0; }

  /// Exact valuation; kInfVal for exact zero; throws if indeterminate.
  long valuation() const;
  /// Valuation if regular, otherwise a lower bound (kInfVal for exact zero).
  long valuation_lower_bound() const { return zero_ ? kInfVal : val_; }
  const mpz_class& unit() const;
  int relative_precision() const { return prec_; }
  /// Absolute precision: the value is known modulo p^abs_precision().
  long absolute_precision() const { return zero_ ? kInfVal : val_ + prec_; }

  Tri val_at_least_tri(long m) const;
  /// v(x) >= m, throwing when undecidable.
  bool val_at_least(long m) const;
  bool is_integral() const { return val_at_least(0); }
  bool is_unit() const;
  /// Nonzero and certified.
  bool is_nonzero() const;
  /// Residue of the unit part mod p.
  long unit_residue() const;
  /// Representative in [0, p^m) of x mod p^m (x integral).
  mpz_class residue_mod(long m) const;

  F0Elem operator-() const;
  F0Elem& operator+=(const F0Elem& o);
  F0Elem& operator-=(const F0Elem& o);
  F0Elem& operator*=(const F0Elem& o);
  F0Elem inverse() const;
  F0Elem& operator/=(const F0Elem& o) { return *this *= o.inverse(); }
  F0Elem pow(long k) const;
  /// Multiply by p^k.
  F0Elem shift(long k) const;
  /// Square root when the unit part is a quadratic residue and val is even.
  std::optional<F0Elem> sqrt() const;

  std::string to_string() const;

 private:
  const PadicContext* ctx_ = nullptr;
  bool zero_ = false;
  long val_ = 0;
  mpz_class unit_;
  int prec_ = 0;

  void normalize_from(const mpz_class& s, long base_val, long abs_prec);
};

F0Elem operator+(F0Elem a, const F0Elem& b);
F0Elem operator-(F0Elem a, const F0Elem& b);
F0Elem operator*(F0Elem a, const F0Elem& b);
F0Elem operator/(F0Elem a, const F0Elem& b);
/// Equality to the common certified precision.
bool operator==(const F0Elem& a, const F0Elem& b);
inline bool operator!=(const F0Elem& a, const F0Elem& b) { return !(a == b); }

/// Element x0 + x1*w of F with w = pi (ramified) or delta (unramified).
class FElem {
 public:
  FElem() = default;
  FElem(F0Elem x0, F0Elem x1) : x0_(std::move(x0)), x1_(std::move(x1)) {}
  explicit FElem(const F0Elem& x);

  static FElem zero(const PadicContext& c);
  static FElem from_int(const PadicContext& c, long v);
  static FElem from_rational(const PadicContext& c, const mpq_class& v);
  static FElem from_coords(const PadicContext& c, const mpq_class& x0, const mpq_class& x1);
  /// The chosen uniformizer of F.
  static FElem pi(const PadicContext& c);
  /// pi^k exactly.
  static FElem pi_power(const PadicContext& c, long k);
  /// Generator w of F/F0: pi or delta.
  static FElem gen(const PadicContext& c);

  const PadicContext& ctx() const { return x0_.ctx(); }
  const F0Elem& x0() const { return x0_; }
  const F0Elem& x1() const { return x1_; }

  bool is_exact_zero() const { return x0_.is_exact_zero() && x1_.is_exact_zero(); }
  /// Both coordinates have lost all digits (value unknown).
  bool is_indeterminate() const;
  bool is_nonzero() const;
  bool in_F0() const { return x1_.is_exact_zero(); }

  FElem conj() const;
  F0Elem norm() const;
  F0Elem trace() const;
  /// Normalized valuation of F (v_F(pi) = 1).
  long valuation() const;
  Tri val_at_least_tri(long m) const;
  bool val_at_least(long m) const;
  bool is_integral() const { return val_at_least(0); }
  bool is_unit() const { return is_nonzero() && valuation() == 0; }
  /// Ramified only: residue mod pi of x / pi^{v_F(x)}, as an integer in [0, p).
  long unit_residue() const;
  /// Norm-one check to certified precision.
  bool is_norm_one() const;

  FElem operator-() const { return FElem(-x0_, -x1_); }
  FElem& operator+=(const FElem& o);
  FElem& operator-=(const FElem& o);
  FElem& operator*=(const FElem& o);
  FElem inverse() const;
  FElem& operator/=(const FElem& o) { return *this *= o.inverse(); }
  FElem operator*(const F0Elem& s) const { return FElem(x0_ * s, x1_ * s); }
  FElem pow(long k) const;

  std::string to_string() const;

 private:
  F0Elem x0_;
  F0Elem x1_;
};

FElem operator+(FElem a, const FElem& b);
FElem operator-(FElem a, const FElem& b);
FElem operator*(FElem a, const FElem& b);
FElem operator/(FElem a, const FElem& b);
bool operator==(const FElem& a, const FElem& b);
inline bool operator!=(const FElem& a, const FElem& b) { return !(a == b); }

/// Quadratic character of F/F0 on F0^x.
int eta(const F0Elem& x);
/// Extension of eta to F^x (a fourth root of unity in the ramified case).
GaussQ eta_tilde(const FElem& x);
/// eta~(pi)^k.
GaussQ eta_tilde_pi_power(const PadicContext& c, long k);

/// z / conj(z): a norm-one element (Hilbert 90).
FElem norm_one_from(const FElem& z);

}  // namespace afl
