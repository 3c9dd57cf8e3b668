#include "afl/orbit.hpp"

#include <map>

namespace afl {

namespace {

FElem one(const PadicContext& c) { return FElem::from_int(c, 1); }

F0Elem eps0(const PadicContext& c) { return F0Elem::from_int(c, c.epsilon()); }

const PadicContext& mctx(const FMat& m) { return m(0, 0).ctx(); }

/// Zero at working precision: exact zero, or every digit up to the context
/// precision cancelled.  Partial cancellation below that throws.
bool vanishes(const FElem& x) {
  if (x.is_exact_zero()) return true;
  if (!x.is_indeterminate()) return false;
  const long n = x.ctx().precision();
  if (x.x0().absolute_precision() >= n && x.x1().absolute_precision() >= n) return true;
  throw InsufficientPrecision("cannot decide whether a cancelled value vanishes");
}

void require_square(const FMat& m, int n, const char* what) {
  if (m.rows() != m.cols() || (n > 0 && m.rows() != n)) throw PreconditionViolated(what);
}

void require_rs2(const FMat& m) {
  require_square(m, 2, "expected a 2 x 2 matrix");
  if (!is_regular_semisimple(m)) throw NotRegularSemisimple("bc = 0");
}

void require_ramified(Setting s) {
  if (!setting_ramified(s)) throw PreconditionViolated("setting has no quaternionic presentation");
}

/// -N b' / eps is a norm from F (so b' = beta zeta exists).
bool nb_prime_realized(const F0Elem& nb) {
  if (!nb.is_nonzero()) return false;
  return eta(-nb / eps0(nb.ctx())) == 1;
}

}  // namespace

std::string to_string(Setting s) {
  switch (s) {
    case Setting::UnramSelfDual: return "unram-selfdual";
    case Setting::UnramAlmostSelfDual: return "unram-almost-selfdual";
    case Setting::RamEven: return "ram-even-n2";
    case Setting::RamSelfDual0: return "ram-selfdual-0";
    case Setting::RamSelfDual1: return "ram-selfdual-1";
  }
  return "";
}

Setting parse_setting(const std::string& name) {
  static const std::map<std::string, Setting> names = {
      {"unram-selfdual", Setting::UnramSelfDual},
      {"selfdual", Setting::UnramSelfDual},
      {"unram-almost-selfdual", Setting::UnramAlmostSelfDual},
      {"almost-selfdual", Setting::UnramAlmostSelfDual},
      {"ram-even-n2", Setting::RamEven},
      {"ram-even", Setting::RamEven},
      {"ram-selfdual-0", Setting::RamSelfDual0},
      {"selfdual-0", Setting::RamSelfDual0},
      {"ram-selfdual-1", Setting::RamSelfDual1},
      {"selfdual-1", Setting::RamSelfDual1},
  };
  auto it = names.find(name);
  if (it == names.end()) throw PreconditionViolated("unknown setting '" + name + "'");
  return it->second;
}

bool setting_ramified(Setting s) { return s != Setting::UnramSelfDual && s != Setting::UnramAlmostSelfDual; }

const std::vector<Setting>& all_settings() {
  static const std::vector<Setting> v = {Setting::UnramSelfDual, Setting::UnramAlmostSelfDual, Setting::RamEven,
                                         Setting::RamSelfDual0, Setting::RamSelfDual1};
  return v;
}

HermitianSpace unitary_space(const PadicContext& c, Setting s, int side) {
  if (side != 0 && side != 1) throw PreconditionViolated("side must be 0 or 1");
  if (c.ramified() != setting_ramified(s)) throw PreconditionViolated("context does not fit the setting");
  F0Elem o = F0Elem::from_int(c, 1);
  F0Elem w = F0Elem::p_power(c, 1);
  F0Elem e = eps0(c);
  switch (s) {
    case Setting::UnramSelfDual: return side == 0 ? diagonal_space({o, o}) : diagonal_space({w, o});
    case Setting::UnramAlmostSelfDual: return side == 0 ? diagonal_space({w, w}) : diagonal_space({o, w});
    case Setting::RamEven:
    case Setting::RamSelfDual1: return side == 0 ? diagonal_space({o, -o}) : diagonal_space({o, -e.inverse()});
    case Setting::RamSelfDual0: return side == 0 ? diagonal_space({o, -o}) : diagonal_space({o, -e});
  }
  throw PreconditionViolated("unknown setting");
}

FMat gamma_ab(const FElem& a, const FElem& b) {
  const PadicContext& c = a.ctx();
  if (vanishes(b)) throw NotRegularSemisimple("b = 0");
  FElem bb = b.conj();
  FElem lower = (one(c) - FElem(a.norm())) / bb;
  return fmat(c, {{a, b}, {lower, -(a.conj() * b) / bb}});
}

FMat lie_y(const FElem& a, const FElem& b, const FElem& c, const FElem& d) {
  return fmat(a.ctx(), {{a, b}, {c, d}});
}

bool in_S(const FMat& g) {
  require_square(g, 0, "in_S needs a square matrix");
  return g * conj(g) == fmat_identity(mctx(g), g.rows());
}

bool in_s(const FMat& y) {
  require_square(y, 0, "in_s needs a square matrix");
  return y + conj(y) == fmat_zero(mctx(y), y.rows(), y.cols());
}

FElem krylov_det(const FMat& x) {
  require_square(x, 0, "krylov_det needs a square matrix");
  const int n = x.rows();
  const PadicContext& c = mctx(x);
  FMat v = fmat_zero(c, n, 1);
  v(n - 1, 0) = one(c);
  FMat k = v;
  for (int i = 1; i < n; ++i) {
    v = x * v;
    k = k.hcat(v);
  }
  return det(k);
}

bool is_regular_semisimple(const FMat& x) {
  require_square(x, 0, "is_regular_semisimple needs a square matrix");
  if (x.rows() > 3) throw PreconditionViolated("is_regular_semisimple is implemented for n <= 3");
  if (!krylov_det(x).is_nonzero()) return false;
  return krylov_det(x.transpose()).is_nonzero();
}

int side(const FMat& gamma) {
  require_rs2(gamma);
  F0Elem t = gamma(0, 0).norm() - F0Elem::from_int(mctx(gamma), 1);
  return eta(t) == 1 ? 0 : 1;
}

int side_lie(const FMat& y) {
  require_rs2(y);
  return eta((y(0, 1) * y(1, 0)).x0()) == 1 ? 0 : 1;
}

GaussQ transfer_factor_S(const FMat& gamma) {
  require_square(gamma, 0, "transfer_factor_S needs a square matrix");
  if (!is_regular_semisimple(gamma)) throw NotRegularSemisimple("transfer_factor_S");
  const long k = gamma.rows() / 2;
  return eta_tilde(det(gamma).pow(-k) * krylov_det(gamma));
}

GaussQ transfer_factor_lie(const FMat& y) {
  require_square(y, 0, "transfer_factor_lie needs a square matrix");
  if (!is_regular_semisimple(y)) throw NotRegularSemisimple("transfer_factor_lie");
  return eta_tilde(krylov_det(y));
}

FMat symmetrization(const FMat& g) { return g * inverse(conj(g)); }

GaussQ transfer_factor_Gprime(const FMat& gamma1, const FMat& gamma2) {
  require_square(gamma2, 0, "gamma_2 must be square");
  const int n = gamma2.rows();
  require_square(gamma1, n - 1, "gamma_1 must be (n-1) x (n-1)");
  const PadicContext& c = mctx(gamma2);
  FMat e1 = fmat_identity(c, n);
  e1.set_block(0, 0, inverse(gamma1));
  FMat g = e1 * gamma2;
  GaussQ w = transfer_factor_S(symmetrization(g));
  if (n % 2 == 0) w = eta_tilde(det(g)) * w;
  return w;
}

MatchInvariants match_invariants(const FMat& g) {
  require_rs2(g);
  return {g(0, 0), det(g)};
}

LieMatchInvariants lie_match_invariants(const FMat& x) {
  require_rs2(x);
  return {x(0, 0), x(1, 1), x(0, 1) * x(1, 0)};
}

bool match_check(const FMat& gamma, const FMat& g) {
  MatchInvariants a = match_invariants(gamma);
  MatchInvariants b = match_invariants(g);
  return a.a == b.a && a.det == b.det;
}

bool match_check_lie(const FMat& y, const FMat& x) {
  LieMatchInvariants a = lie_match_invariants(y);
  LieMatchInvariants b = lie_match_invariants(x);
  return a.a == b.a && a.d == b.d && a.bc == b.bc;
}

FElem norm_preimage(const F0Elem& t) {
  const PadicContext& c = t.ctx();
  if (!t.is_nonzero()) throw NotInDomain("norm_preimage of zero");
  if (eta(t) != 1) throw NotInDomain("not a norm from F");
  const long v = t.valuation();
  F0Elem u = t.shift(-v);
  if (c.ramified()) {
    // N(pi^v s) = (-p)^v s^2.
    F0Elem r = (v % 2) ? -u : u;
    auto s = r.sqrt();
    if (!s) throw NotInDomain("norm_preimage: no square root");
    return FElem::pi_power(c, v) * FElem(*s);
  }
  // N(x0 + x1 delta) = x0^2 - eps x1^2 with v(t) even.
  const long p = c.p();
  F0Elem e = eps0(c);
  for (long x1 = 0; x1 < p; ++x1) {
    F0Elem y1 = F0Elem::from_int(c, x1);
    F0Elem r = u + e * y1 * y1;
    if (!r.is_unit()) continue;
    auto s = r.sqrt();
    if (!s) continue;
    return FElem::pi_power(c, v / 2) * FElem(*s, y1);
  }
  throw NotInDomain("norm_preimage: no unit solution");
}

FMat match_group(Setting s, const FMat& gamma) {
  require_rs2(gamma);
  const PadicContext& c = mctx(gamma);
  HermitianSpace w = unitary_space(c, s, side(gamma));
  const F0Elem l1 = w.gram()(0, 0).x0();
  const F0Elem l2 = w.gram()(1, 1).x0();
  const FElem& a = gamma(0, 0);
  FElem cp = norm_preimage(l1 * (F0Elem::from_int(c, 1) - a.norm()) / l2);
  FElem bp = gamma(0, 1) * gamma(1, 0) / cp;
  return fmat(c, {{a, bp}, {cp, gamma(1, 1)}});
}

FMat match_lie(Setting s, const FMat& y) {
  require_rs2(y);
  const PadicContext& c = mctx(y);
  HermitianSpace w = unitary_space(c, s, side_lie(y));
  const F0Elem l1 = w.gram()(0, 0).x0();
  const F0Elem l2 = w.gram()(1, 1).x0();
  FElem bc = y(0, 1) * y(1, 0);
  FElem cp = norm_preimage(-(l1 * bc.x0()) / l2);
  return fmat(c, {{y(0, 0), bc / cp}, {cp, y(1, 1)}});
}

bool is_unitary(const FMat& g, const HermitianSpace& w) { return conj_transpose(g) * w.gram() * g == w.gram(); }

bool is_lie_unitary(const FMat& x, const HermitianSpace& w) {
  return conj_transpose(x) * w.gram() + w.gram() * x == fmat_zero(w.ctx(), w.dim(), w.dim());
}

int presentation_side(Setting s) {
  require_ramified(s);
  return s == Setting::RamSelfDual0 ? 0 : 1;
}

F0Elem norm_b_prime(const FElem& beta) { return -(eps0(beta.ctx()) * beta.norm()); }

FMat from_presentation(Setting s, const GroupPresentation& g) {
  require_ramified(s);
  const PadicContext& c = g.a.ctx();
  FElem ab = g.alpha.conj();
  FElem lower = ab * g.beta.conj();
  if (s != Setting::RamSelfDual0) lower = FElem(eps0(c)) * lower;
  return fmat(c, {{g.a, g.beta}, {lower, ab * g.a.conj()}});
}

FMat from_presentation_lie(Setting s, const LiePresentation& x) {
  require_ramified(s);
  const PadicContext& c = x.a.ctx();
  FElem lower = x.beta.conj();
  if (s != Setting::RamSelfDual0) lower = FElem(eps0(c)) * lower;
  return fmat(c, {{x.a, x.beta}, {lower, -x.d}});
}

GroupPresentation to_presentation(Setting s, const FMat& g) {
  require_ramified(s);
  require_square(g, 2, "expected a 2 x 2 matrix");
  GroupPresentation out{g(0, 0), g(0, 1), det(g).conj()};
  if (from_presentation(s, out) != g) throw PreconditionViolated("matrix is not in presented form");
  return out;
}

LiePresentation to_presentation_lie(Setting s, const FMat& x) {
  require_ramified(s);
  require_square(x, 2, "expected a 2 x 2 matrix");
  LiePresentation out{x(0, 0), x(0, 1), -x(1, 1)};
  if (from_presentation_lie(s, out) != x) throw PreconditionViolated("matrix is not in presented form");
  return out;
}

bool match_check_presentation(Setting s, const FMat& gamma, const FElem& a_prime, const FElem& alpha,
                              const F0Elem& nb_prime) {
  require_ramified(s);
  require_rs2(gamma);
  const PadicContext& c = mctx(gamma);
  if (!alpha.is_norm_one() || !nb_prime_realized(nb_prime)) return false;
  F0Elem rel = (s == Setting::RamSelfDual0) ? nb_prime / eps0(c) : nb_prime;
  if (a_prime.norm() + rel != F0Elem::from_int(c, 1)) return false;
  return gamma(0, 0) == a_prime && det(gamma) == alpha.conj();
}

bool match_check_presentation_lie(Setting s, const FMat& y, const FElem& a_prime, const FElem& d_prime,
                                  const F0Elem& nb_prime) {
  require_ramified(s);
  require_rs2(y);
  const PadicContext& c = mctx(y);
  if (!nb_prime_realized(nb_prime)) return false;
  F0Elem target = (s == Setting::RamSelfDual0) ? -nb_prime / eps0(c) : -nb_prime;
  return y(0, 0) == a_prime && y(1, 1) == -d_prime && FElem(target) == y(0, 1) * y(1, 0);
}

GroupPresentation match_presentation(Setting s, const FMat& gamma) {
  require_ramified(s);
  require_rs2(gamma);
  if (side(gamma) != presentation_side(s)) throw PreconditionViolated("gamma lies on the other side");
  const PadicContext& c = mctx(gamma);
  const FElem& a = gamma(0, 0);
  F0Elem nbeta = a.norm() - F0Elem::from_int(c, 1);
  if (s != Setting::RamSelfDual0) nbeta = nbeta / eps0(c);
  return {a, norm_preimage(nbeta), det(gamma).conj()};
}

LiePresentation match_presentation_lie(Setting s, const FMat& y) {
  require_ramified(s);
  require_rs2(y);
  if (side_lie(y) != presentation_side(s)) throw PreconditionViolated("y lies on the other side");
  const PadicContext& c = mctx(y);
  F0Elem nbeta = (y(0, 1) * y(1, 0)).x0();
  if (s != Setting::RamSelfDual0) nbeta = nbeta / eps0(c);
  return {y(0, 0), norm_preimage(nbeta), -y(1, 1)};
}

FMat cayley(const FElem& xi, const FMat& y) {
  require_square(y, 0, "cayley needs a square matrix");
  FMat id = fmat_identity(mctx(y), y.rows());
  FMat m = id - y;
  if (vanishes(det(m))) throw NotInDomain("det(1 - y) = 0");
  return xi * ((id + y) * inverse(m));
}

FMat cayley_inv(const FElem& xi, const FMat& gamma) {
  require_square(gamma, 0, "cayley_inv needs a square matrix");
  FMat x = xi * fmat_identity(mctx(gamma), gamma.rows());
  FMat m = gamma + x;
  if (vanishes(det(m))) throw NotInDomain("det(gamma + xi) = 0");
  return (gamma - x) * inverse(m);
}

std::vector<FElem> char_poly(const FMat& x) {
  require_square(x, 0, "char_poly needs a square matrix");
  const int n = x.rows();
  const PadicContext& c = mctx(x);
  std::vector<FElem> out(static_cast<size_t>(n), FElem::zero(c));
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    FMat minor = fmat_zero(c, k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) minor(i, j) = x(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    out[static_cast<size_t>(k - 1)] += det(minor);
  }
  return out;
}

bool is_integral_element(const FMat& x) {
  for (const auto& coeff : char_poly(x))
    if (!coeff.is_integral()) return false;
  return true;
}

bool is_strongly_integral(const FMat& y) {
  if (!is_integral_element(y)) return false;
  return det(fmat_identity(mctx(y), y.rows()) - y).is_unit();
}

bool is_xi_strongly_integral(const FMat& gamma, const FElem& xi) {
  if (!is_integral_element(gamma)) return false;
  return det(gamma + xi * fmat_identity(mctx(gamma), gamma.rows())).is_unit();
}

namespace {

FMat scale_top_right(const FMat& y, long k) {
  require_square(y, 0, "theta needs a square matrix");
  const int n = y.rows();
  FMat out = y;
  F0Elem s = F0Elem::p_power(mctx(y), k);
  for (int i = 0; i + 1 < n; ++i) out(i, n - 1) = y(i, n - 1) * s;
  return out;
}

}  // namespace

FMat theta(const FMat& y) { return scale_top_right(y, -1); }

FMat theta_inv(const FMat& y) { return scale_top_right(y, 1); }

FMat star_involution(const FMat& y) {
  require_square(y, 0, "star_involution needs a square matrix");
  const int n = y.rows();
  FMat out = y.transpose();
  const PadicContext& c = mctx(y);
  F0Elem w = F0Elem::p_power(c, 1);
  F0Elem wi = F0Elem::p_power(c, -1);
  for (int j = 0; j + 1 < n; ++j) out(n - 1, j) = out(n - 1, j) * wi;
  for (int i = 0; i + 1 < n; ++i) out(i, n - 1) = out(i, n - 1) * w;
  return out;
}

}  // namespace afl
