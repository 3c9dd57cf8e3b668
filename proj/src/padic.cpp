#include "afl/padic.hpp"

#include <sstream>

#include "context_cache.hpp"

namespace afl {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

long mpz_pvaluation(mpz_class& s, long p) {
  long t = 0;
  if (s == 0) return kInfVal;
  while (mpz_divisible_ui_p(s.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(s.get_mpz_t(), s.get_mpz_t(), static_cast<unsigned long>(p));
    ++t;
  }
  return t;
}

void mod_into(mpz_class& r, const mpz_class& m) {
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
}

}  // namespace

PadicContext::PadicContext(long p, bool ramified, int precision, EtaTildeBranch branch)
    : p_(p), ramified_(ramified), N_(precision), epsilon_(0), branch_(branch),
      cache_(std::make_unique<Cache>()) {
  if (p <= 2 || !is_prime(p)) throw PreconditionViolated("p must be an odd prime");
  if (precision < 16) throw PreconditionViolated("precision must be at least 16");
  for (long e = 2; e < p; ++e) {
    if (legendre(mpz_class(e)) == -1) {
      epsilon_ = e;
      break;
    }
  }
  pow_.reserve(static_cast<size_t>(4 * N_ + 17));
  mpz_class v = 1;
  for (int k = 0; k <= 4 * N_ + 16; ++k) {
    pow_.push_back(v);
    v *= p_;
  }
  if (ramified_) {
    eta_tilde_pi_ = (p_ % 4 == 1) ? GaussQ(1) : GaussQ::i_unit();
    if (branch_ == EtaTildeBranch::Alternate) eta_tilde_pi_ = -eta_tilde_pi_;
  } else {
    eta_tilde_pi_ = GaussQ(-1);
  }
}

PadicContext::~PadicContext() = default;

int PadicContext::legendre(const mpz_class& x) const {
  mpz_class r = x;
  mpz_class pp = p_;
  mod_into(r, pp);
  if (r == 0) throw ZeroInput("Legendre symbol of a multiple of p");
  return mpz_legendre(r.get_mpz_t(), pp.get_mpz_t());
}

const mpz_class& PadicContext::ppow(long k) const {
  if (k < 0) throw PreconditionViolated("negative power of p");
  if (k < static_cast<long>(pow_.size())) return pow_[static_cast<size_t>(k)];
  thread_local mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(k));
  return big;
}

Ctx make_context(long p, bool ramified, int precision, EtaTildeBranch branch) {
  return std::make_shared<const PadicContext>(p, ramified, precision, branch);
}

// ---------------------------------------------------------------- F0Elem

F0Elem F0Elem::zero(const PadicContext& c) {
  F0Elem r;
  r.ctx_ = &c;
  r.zero_ = true;
  return r;
}

F0Elem F0Elem::from_int(const PadicContext& c, long v) { return from_mpz(c, mpz_class(v)); }

F0Elem F0Elem::from_mpz(const PadicContext& c, const mpz_class& v) {
  if (v == 0) return zero(c);
  mpz_class s = v;
  long t = mpz_pvaluation(s, c.p());
  return from_unit(c, t, s, c.precision());
}

F0Elem F0Elem::from_rational(const PadicContext& c, const mpq_class& v) {
  if (v == 0) return zero(c);
  mpz_class num = v.get_num();
  mpz_class den = v.get_den();
  long vn = mpz_pvaluation(num, c.p());
  long vd = mpz_pvaluation(den, c.p());
  const mpz_class& m = c.ppow(c.precision());
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
  return from_unit(c, vn - vd, num * inv, c.precision());
}

F0Elem F0Elem::from_unit(const PadicContext& c, long val, const mpz_class& unit, int prec) {
  if (prec <= 0) throw PreconditionViolated("unit precision must be positive");
  F0Elem r;
  r.ctx_ = &c;
  r.val_ = val;
  r.prec_ = prec;
  r.unit_ = unit;
  mod_into(r.unit_, c.ppow(prec));
  if (mpz_divisible_ui_p(r.unit_.get_mpz_t(), static_cast<unsigned long>(c.p())))
    throw PreconditionViolated("unit part divisible by p");
  return r;
}

F0Elem F0Elem::indeterminate(const PadicContext& c, long abs_prec) {
  F0Elem r;
  r.ctx_ = &c;
  r.val_ = abs_prec;
  r.prec_ = 0;
  return r;
}

F0Elem F0Elem::p_power(const PadicContext& c, long k) { return from_unit(c, k, 1, c.precision()); }

long F0Elem::valuation() const {
  if (zero_) return kInfVal;
  if (prec_ == 0) throw InsufficientPrecision("valuation of a value known only mod p^" + std::to_string(val_));
  return val_;
}

const mpz_class& F0Elem::unit() const {
  if (zero_ || prec_ == 0) throw InsufficientPrecision("unit part unavailable");
  return unit_;
}

Tri F0Elem::val_at_least_tri(long m) const {
  if (zero_) return Tri::Yes;
  if (prec_ > 0) return val_ >= m ? Tri::Yes : Tri::No;
  return val_ >= m ? Tri::Yes : Tri::Unknown;
}

bool F0Elem::val_at_least(long m) const {
  Tri t = val_at_least_tri(m);
  if (t == Tri::Unknown)
    throw InsufficientPrecision("cannot decide v >= " + std::to_string(m) + " from digits mod p^" +
                                std::to_string(val_));
  return t == Tri::Yes;
}

bool F0Elem::is_unit() const { return is_nonzero() && val_ == 0; }

bool F0Elem::is_nonzero() const {
  if (zero_) return false;
  if (prec_ == 0) throw InsufficientPrecision("zero test of an indeterminate value");
  return true;
}

long F0Elem::unit_residue() const {
  const mpz_class& u = unit();
  return static_cast<long>(mpz_fdiv_ui(u.get_mpz_t(), static_cast<unsigned long>(ctx_->p())));
}

mpz_class F0Elem::residue_mod(long m) const {
  if (m <= 0) return 0;
  if (zero_) return 0;
  if (val_ >= m) return 0;
  if (prec_ == 0 || val_ + prec_ < m)
    throw InsufficientPrecision("residue mod p^" + std::to_string(m));
  if (val_ < 0) throw NonIntegral("residue of a non-integral value");
  mpz_class r = unit_ * ctx_->ppow(val_);
  mod_into(r, ctx_->ppow(m));
  return r;
}

F0Elem F0Elem::operator-() const {
  if (zero_ || prec_ == 0) return *this;
  F0Elem r = *this;
  r.unit_ = ctx_->ppow(prec_) - unit_;
  return r;
}

void F0Elem::normalize_from(const mpz_class& s_in, long base_val, long abs_prec) {
  zero_ = false;
  long span = abs_prec - base_val;
  if (span <= 0) {
    val_ = abs_prec;
    prec_ = 0;
    unit_ = 0;
    return;
  }
  mpz_class s = s_in;
  mod_into(s, ctx_->ppow(span));
  if (s == 0) {
    val_ = abs_prec;
    prec_ = 0;
    unit_ = 0;
    return;
  }
  long t = mpz_pvaluation(s, ctx_->p());
  val_ = base_val + t;
  prec_ = static_cast<int>(abs_prec - val_);
  if (prec_ > ctx_->precision()) prec_ = ctx_->precision();
  unit_ = s;
  mod_into(unit_, ctx_->ppow(prec_));
}

F0Elem& F0Elem::operator+=(const F0Elem& o) {
  if (o.zero_) return *this;
  if (zero_) {
    *this = o;
    return *this;
  }
  long ap = std::min(absolute_precision(), o.absolute_precision());
  long vmin = std::min(val_, o.val_);
  if (vmin >= ap) {
    val_ = ap;
    prec_ = 0;
    unit_ = 0;
    return *this;
  }
  long span = ap - vmin;
  mpz_class s = 0;
  if (prec_ > 0 && val_ - vmin < span) s += unit_ * ctx_->ppow(val_ - vmin);
  if (o.prec_ > 0 && o.val_ - vmin < span) s += o.unit_ * ctx_->ppow(o.val_ - vmin);
  normalize_from(s, vmin, ap);
  return *this;
}

F0Elem& F0Elem::operator-=(const F0Elem& o) { return *this += -o; }

F0Elem& F0Elem::operator*=(const F0Elem& o) {
  if (zero_) return *this;
  if (o.zero_) {
    *this = o;
    return *this;
  }
  if (prec_ == 0 || o.prec_ == 0) {
    long lo = val_ + o.val_;
    val_ = lo;
    prec_ = 0;
    unit_ = 0;
    return *this;
  }
  val_ += o.val_;
  prec_ = std::min(prec_, o.prec_);
  unit_ *= o.unit_;
  mod_into(unit_, ctx_->ppow(prec_));
  return *this;
}

F0Elem F0Elem::inverse() const {
  if (zero_) throw ZeroInput("inverse of zero");
  if (prec_ == 0) throw InsufficientPrecision("inverse of an indeterminate value");
  F0Elem r = *this;
  r.val_ = -val_;
  mpz_invert(r.unit_.get_mpz_t(), unit_.get_mpz_t(), ctx_->ppow(prec_).get_mpz_t());
  return r;
}

F0Elem F0Elem::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  F0Elem r = from_int(*ctx_, 1);
  F0Elem b = *this;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

F0Elem F0Elem::shift(long k) const {
  if (zero_) return *this;
  F0Elem r = *this;
  r.val_ += k;
  return r;
}

std::optional<F0Elem> F0Elem::sqrt() const {
  if (zero_) return *this;
  if (prec_ == 0) throw InsufficientPrecision("square root of an indeterminate value");
  if (val_ % 2 != 0) return std::nullopt;
  long p = ctx_->p();
  long u0 = unit_residue();
  long r0 = -1;
  for (long r = 1; r < p; ++r) {
    if ((r * r) % p == u0) {
      r0 = r;
      break;
    }
  }
  if (r0 < 0) return std::nullopt;
  const mpz_class& mod = ctx_->ppow(prec_);
  mpz_class r = r0;
  long k = 1;
  while (k < prec_) {
    k *= 2;
    mpz_class num = r * r - unit_;
    mpz_class den = 2 * r;
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
    r -= num * inv;
    mod_into(r, mod);
  }
  return from_unit(*ctx_, val_ / 2, r, prec_);
}

std::string F0Elem::to_string() const {
  if (!ctx_) return "<invalid>";
  if (zero_) return "0";
  if (prec_ == 0) return "O(" + std::to_string(ctx_->p()) + "^" + std::to_string(val_) + ")";
  std::ostringstream os;
  int shown = std::min(prec_, 6);
  mpz_class u = unit_;
  mod_into(u, ctx_->ppow(shown));
  os << u.get_str();
  if (val_ != 0) os << "*" << ctx_->p() << "^" << val_;
  os << "+O(" << ctx_->p() << "^" << val_ + shown << ")";
  return os.str();
}

F0Elem operator+(F0Elem a, const F0Elem& b) { return a += b; }
F0Elem operator-(F0Elem a, const F0Elem& b) { return a -= b; }
F0Elem operator*(F0Elem a, const F0Elem& b) { return a *= b; }
F0Elem operator/(F0Elem a, const F0Elem& b) { return a /= b; }

bool operator==(const F0Elem& a, const F0Elem& b) {
  F0Elem d = a - b;
  return d.is_exact_zero() || d.is_indeterminate();
}

// ---------------------------------------------------------------- FElem

namespace {

F0Elem gen_square(const PadicContext& c) {
  return c.ramified() ? F0Elem::p_power(c, 1) : F0Elem::from_int(c, c.epsilon());
}

}  // namespace

FElem::FElem(const F0Elem& x) : x0_(x), x1_(F0Elem::zero(x.ctx())) {}

FElem FElem::zero(const PadicContext& c) { return FElem(F0Elem::zero(c), F0Elem::zero(c)); }

FElem FElem::from_int(const PadicContext& c, long v) { return FElem(F0Elem::from_int(c, v)); }

FElem FElem::from_rational(const PadicContext& c, const mpq_class& v) {
  return FElem(F0Elem::from_rational(c, v));
}

FElem FElem::from_coords(const PadicContext& c, const mpq_class& x0, const mpq_class& x1) {
  return FElem(F0Elem::from_rational(c, x0), F0Elem::from_rational(c, x1));
}

FElem FElem::pi(const PadicContext& c) {
  if (c.ramified()) return FElem(F0Elem::zero(c), F0Elem::from_int(c, 1));
  return FElem(F0Elem::p_power(c, 1));
}

FElem FElem::pi_power(const PadicContext& c, long k) {
  if (!c.ramified()) return FElem(F0Elem::p_power(c, k));
  long h = floor_div(k, 2);
  if (k - 2 * h == 0) return FElem(F0Elem::p_power(c, h));
  return FElem(F0Elem::zero(c), F0Elem::p_power(c, h));
}

FElem FElem::gen(const PadicContext& c) { return FElem(F0Elem::zero(c), F0Elem::from_int(c, 1)); }

bool FElem::is_indeterminate() const {
  return !is_exact_zero() && !x0_.is_regular() && !x1_.is_regular();
}

bool FElem::is_nonzero() const {
  if (x0_.is_regular() || x1_.is_regular()) return true;
  if (is_exact_zero()) return false;
  throw InsufficientPrecision("zero test of an indeterminate element of F");
}

FElem FElem::conj() const { return FElem(x0_, -x1_); }

F0Elem FElem::norm() const {
  const PadicContext& c = ctx();
  return x0_ * x0_ - gen_square(c) * x1_ * x1_;
}

F0Elem FElem::trace() const { return x0_ + x0_; }

long FElem::valuation() const {
  if (is_exact_zero()) return kInfVal;
  const bool ram = ctx().ramified();
  auto cand = [&](const F0Elem& x, int which) -> std::pair<long, bool> {
    if (x.is_exact_zero()) return {kInfVal, false};
    long v = x.valuation_lower_bound();
    long c = ram ? (which == 0 ? 2 * v : 2 * v + 1) : v;
    return {c, x.is_regular()};
  };
  auto [c0, e0] = cand(x0_, 0);
  auto [c1, e1] = cand(x1_, 1);
  long best = kInfVal;
  if (e0) best = std::min(best, c0);
  if (e1) best = std::min(best, c1);
  if (best == kInfVal) throw InsufficientPrecision("valuation of an indeterminate element of F");
  if ((!e0 && c0 < best) || (!e1 && c1 < best))
    throw InsufficientPrecision("valuation undecidable at working precision");
  return best;
}

Tri FElem::val_at_least_tri(long m) const {
  Tri t0, t1;
  if (ctx().ramified()) {
    t0 = x0_.val_at_least_tri(ceil_div(m, 2));
    t1 = x1_.val_at_least_tri(ceil_div(m - 1, 2));
  } else {
    t0 = x0_.val_at_least_tri(m);
    t1 = x1_.val_at_least_tri(m);
  }
  if (t0 == Tri::No || t1 == Tri::No) return Tri::No;
  if (t0 == Tri::Yes && t1 == Tri::Yes) return Tri::Yes;
  return Tri::Unknown;
}

bool FElem::val_at_least(long m) const {
  Tri t = val_at_least_tri(m);
  if (t == Tri::Unknown) throw InsufficientPrecision("cannot decide v_F >= " + std::to_string(m));
  return t == Tri::Yes;
}

long FElem::unit_residue() const {
  if (!ctx().ramified()) throw PreconditionViolated("unit_residue is defined for ramified F");
  long v = valuation();
  if (v == kInfVal) throw ZeroInput("unit residue of zero");
  return (v % 2 == 0) ? x0_.unit_residue() : x1_.unit_residue();
}

bool FElem::is_norm_one() const { return norm() == F0Elem::from_int(ctx(), 1); }

FElem& FElem::operator+=(const FElem& o) {
  x0_ += o.x0_;
  x1_ += o.x1_;
  return *this;
}

FElem& FElem::operator-=(const FElem& o) {
  x0_ -= o.x0_;
  x1_ -= o.x1_;
  return *this;
}

FElem& FElem::operator*=(const FElem& o) {
  if (is_exact_zero() || o.is_exact_zero()) {
    *this = zero(ctx());
    return *this;
  }
  F0Elem w2 = gen_square(ctx());
  F0Elem a = x0_ * o.x0_ + w2 * x1_ * o.x1_;
  F0Elem b = x0_ * o.x1_ + x1_ * o.x0_;
  x0_ = std::move(a);
  x1_ = std::move(b);
  return *this;
}

FElem FElem::inverse() const {
  F0Elem n = norm();
  if (n.is_exact_zero()) throw ZeroInput("inverse of zero in F");
  return conj() * n.inverse();
}

FElem FElem::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  FElem r = from_int(ctx(), 1);
  FElem b = *this;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

std::string FElem::to_string() const {
  const char* w = ctx().ramified() ? "pi" : "delta";
  return "(" + x0_.to_string() + ") + (" + x1_.to_string() + ")*" + w;
}

FElem operator+(FElem a, const FElem& b) { return a += b; }
FElem operator-(FElem a, const FElem& b) { return a -= b; }
FElem operator*(FElem a, const FElem& b) { return a *= b; }
FElem operator/(FElem a, const FElem& b) { return a /= b; }
bool operator==(const FElem& a, const FElem& b) { return a.x0() == b.x0() && a.x1() == b.x1(); }

// ---------------------------------------------------------------- characters

int eta(const F0Elem& x) {
  if (x.is_exact_zero()) throw ZeroInput("eta(0)");
  long v = x.valuation();
  const PadicContext& c = x.ctx();
  if (!c.ramified()) return (v % 2 == 0) ? 1 : -1;
  long u = x.unit_residue();
  if (v % 2 != 0) u = c.p() - u;
  return c.legendre(mpz_class(u));
}

GaussQ eta_tilde_pi_power(const PadicContext& c, long k) {
  if (!c.ramified()) return GaussQ((k % 2 == 0) ? 1 : -1);
  GaussQ base = c.eta_tilde_pi();
  if (k < 0) {
    base = base.conj();
    k = -k;
  }
  GaussQ r(1);
  for (long i = 0; i < (k % 4); ++i) r *= base;
  return r;
}

GaussQ eta_tilde(const FElem& x) {
  if (x.is_exact_zero()) throw ZeroInput("eta~(0)");
  const PadicContext& c = x.ctx();
  long v = x.valuation();
  GaussQ r = eta_tilde_pi_power(c, v);
  if (c.ramified()) r *= GaussQ(c.legendre(mpz_class(x.unit_residue())));
  return r;
}

FElem norm_one_from(const FElem& z) { return z / z.conj(); }

}  // namespace afl
