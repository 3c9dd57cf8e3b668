#include "afl/intersection.hpp"

#include <algorithm>

#include "afl/fmat.hpp"

namespace afl {

namespace {

void require_ramified_setting(Setting s) {
  if (!setting_ramified(s)) throw PreconditionViolated("intersection numbers need a ramified setting");
}

QuatElem qf(const FElem& x) { return QuatElem(x); }

F0Elem eps0(const PadicContext& c) { return F0Elem::from_int(c, c.epsilon()); }

QuatElem b_prime(const FElem& beta) {
  if (beta.is_exact_zero()) throw NotRegularSemisimple("b' = 0");
  return QuatElem(FElem::zero(beta.ctx()), beta);
}

// Lower bound for v_F(x) when x may have cancelled.
long valuation_lower_bound(const FElem& x) {
  long v0 = x.x0().valuation_lower_bound();
  long v1 = x.x1().valuation_lower_bound();
  long e = x.ctx().e();
  long b0 = v0 >= kInfVal ? kInfVal : e * v0;
  long b1 = v1 >= kInfVal ? kInfVal : e * v1 + (e - 1);
  return std::min(b0, b1);
}

// Nonzero with certified digits; cancelled values count as zero.
bool certified_nonzero(const FElem& x) { return x.x0().is_regular() || x.x1().is_regular(); }

bool in_pi_O_F0(const FElem& x) {
  if (x.x0().is_regular()) throw PreconditionViolated("expected an element of pi F0");
  return x.val_at_least(1);
}

}  // namespace

QuatMatrix quat_matrix(const QuatElem& a, const QuatElem& b, const QuatElem& c, const QuatElem& d) {
  QuatMatrix m(2, 2, a);
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

QuatMatrix to_quat_matrix(const FMat& m) { return m.map([](const FElem& x) { return QuatElem(x); }); }

bool is_integral(const QuatMatrix& m) {
  return m.all_of([](const QuatElem& x) { return x.is_integral(); });
}

bool in_order_conductor(const QuatElem& x, long l) { return x.a().is_integral() && x.b().val_at_least(l); }

long gross_length(const QuatElem& x) {
  if (!x.is_integral()) throw NonIntegral("element is not in O_D");
  if (x.b().is_exact_zero()) throw InfiniteLength("element lies in F");
  return x.b().valuation() + 1;
}

LiftLength lift_length(const QuatElem& x) {
  Tri a_int = x.a().val_at_least_tri(0);
  Tri b_int = x.b().val_at_least_tri(0);
  if (a_int == Tri::No || b_int == Tri::No) return {0, true};
  if (a_int == Tri::Unknown || b_int == Tri::Unknown) throw InsufficientPrecision("integrality of a D entry");
  if (x.b().is_exact_zero()) return {kInfVal, true};
  try {
    return {gross_length(x), true};
  } catch (const InsufficientPrecision&) {
    return {valuation_lower_bound(x.b()) + 1, false};
  }
}

long matrix_lift_length(const QuatMatrix& m) {
  long exact = kInfVal;
  long bound = kInfVal;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      LiftLength l = lift_length(m(i, j));
      long& slot = l.certified ? exact : bound;
      slot = std::min(slot, l.value);
    }
  if (bound < exact) throw InsufficientPrecision("lifting length decided by a cancelled entry");
  return exact;
}

long int_closed_form(Setting s, const GroupPresentation& g) {
  require_ramified_setting(s);
  if (g.beta.is_exact_zero()) throw NotRegularSemisimple("b' = 0");
  long v = norm_b_prime(g.beta).valuation();
  switch (s) {
    case Setting::RamEven:
      return 2 * v + 2;
    case Setting::RamSelfDual0:
      return (g.a.is_integral() && g.beta.is_integral()) ? v + 1 : 0;
    default:
      return v + 1;
  }
}

long int_closed_form_lie(Setting s, const LiePresentation& x) {
  require_ramified_setting(s);
  if (x.beta.is_exact_zero()) throw NotRegularSemisimple("b' = 0");
  if (!in_pi_O_F0(x.a) || !in_pi_O_F0(x.d) || !x.beta.is_integral()) return 0;
  long v = norm_b_prime(x.beta).valuation();
  return s == Setting::RamEven ? 2 * v + 2 : v + 1;
}

QuatMatrix quat_presentation(Setting s, const GroupPresentation& g) {
  require_ramified_setting(s);
  const PadicContext& c = g.a.ctx();
  QuatElem b = b_prime(g.beta);
  QuatElem lower = s == Setting::RamSelfDual0 ? QuatElem(FElem(eps0(c).inverse())) * b : b;
  QuatElem alpha = qf(g.alpha);
  return quat_matrix(qf(g.a), b, alpha * lower, alpha * qf(g.a));
}

QuatMatrix quat_presentation_lie(Setting s, const LiePresentation& x) {
  require_ramified_setting(s);
  const PadicContext& c = x.a.ctx();
  QuatElem b = b_prime(x.beta);
  QuatElem lower = s == Setting::RamSelfDual0 ? QuatElem(FElem(eps0(c).inverse())) * b : b;
  return quat_matrix(qf(x.a), b, lower, qf(x.d));
}

QuatMatrix phi0(const PadicContext& c) {
  QuatElem one = QuatElem::one(c);
  QuatElem pi = qf(FElem::pi(c));
  return quat_matrix(one, pi, one, -pi);
}

QuatMatrix phi0_inverse(const PadicContext& c) {
  QuatElem half = qf(FElem::from_rational(c, mpq_class(1, 2)));
  QuatElem pinv = qf(FElem::pi(c).inverse());
  return quat_matrix(half, half, half * pinv, -(half * pinv));
}

QuatMatrix kappa0(const PadicContext& c) {
  QuatElem zero = QuatElem::zero(c);
  return quat_matrix(zero, qf(FElem::pi(c)), qf(FElem::pi(c).inverse()), zero);
}

ConjugatedPair ram_even_conjugates(const QuatMatrix& m) {
  const PadicContext& c = m(0, 0).ctx();
  QuatMatrix conj = phi0_inverse(c) * m * phi0(c);
  QuatMatrix conj_kappa = conj * kappa0(c);
  return {conj, conj_kappa};
}

long int_oracle_ram_even(const GroupPresentation& g) {
  ConjugatedPair pair = ram_even_conjugates(quat_presentation(Setting::RamEven, g));
  bool first = is_integral(pair.conj);
  bool second = is_integral(pair.conj_kappa);
  if (first && second) throw PreconditionViolated("both conjugated matrices are integral");
  if (!first && !second) throw PreconditionViolated("neither conjugated matrix is integral");
  return 2 * matrix_lift_length(first ? pair.conj : pair.conj_kappa);
}

long int_oracle_ram_even_lie(const LiePresentation& x) {
  ConjugatedPair pair = ram_even_conjugates(quat_presentation_lie(Setting::RamEven, x));
  long l1 = is_integral(pair.conj) ? matrix_lift_length(pair.conj) : 0;
  long l2 = is_integral(pair.conj_kappa) ? matrix_lift_length(pair.conj_kappa) : 0;
  return 2 * std::max(l1, l2);
}

long int_oracle_selfdual(Setting s, const GroupPresentation& g) {
  if (s != Setting::RamSelfDual0 && s != Setting::RamSelfDual1)
    throw PreconditionViolated("expected a self-dual ramified setting");
  return matrix_lift_length(quat_presentation(s, g));
}

long int_oracle_selfdual_lie(Setting s, const LiePresentation& x) {
  if (s != Setting::RamSelfDual0 && s != Setting::RamSelfDual1)
    throw PreconditionViolated("expected a self-dual ramified setting");
  return matrix_lift_length(quat_presentation_lie(s, x));
}

bool lifts_to_product(const FMat& x) { return is_integral(x); }

bool theta_lifting_equivalent(const FMat& x) {
  const PadicContext& c = x(0, 0).ctx();
  if (c.ramified()) throw PreconditionViolated("theta reduction is an unramified statement");
  if (!is_lie_unitary(x, unitary_space(c, Setting::UnramAlmostSelfDual, 1)))
    throw PreconditionViolated("x is not in the Lie algebra of W_1");
  FMat t = theta(x);
  if (!is_lie_unitary(t, unitary_space(c, Setting::UnramSelfDual, 0)))
    throw PreconditionViolated("theta(x) left the Lie algebra of W_0");
  return lifts_to_product(x) == lifts_to_product(t);
}

bool in_generated_order(const FMat& y, const FMat& x) {
  if (x.rows() != 2 || x.cols() != 2 || y.rows() != 2 || y.cols() != 2)
    throw PreconditionViolated("expected 2 x 2 matrices");
  FElem v;
  if (certified_nonzero(x(0, 1))) {
    v = y(0, 1) / x(0, 1);
  } else if (certified_nonzero(x(1, 0))) {
    v = y(1, 0) / x(1, 0);
  } else if (certified_nonzero(x(0, 0) - x(1, 1))) {
    v = (y(0, 0) - y(1, 1)) / (x(0, 0) - x(1, 1));
  } else {
    throw NotRegularSemisimple("scalar matrix generates no order of rank 2");
  }
  FElem u = y(0, 0) - v * x(0, 0);
  const PadicContext& c = x(0, 0).ctx();
  QuatMatrix span = qf(u) * QuatMatrix::identity(2, QuatElem::zero(c), QuatElem::one(c)) + qf(v) * to_quat_matrix(x);
  if (span != to_quat_matrix(y)) return false;
  return u.is_integral() && v.is_integral();
}

bool cayley_order_equal(const FElem& xi, const FMat& x) {
  FMat g = cayley(xi, x);
  return in_generated_order(g, x) && in_generated_order(x, g);
}

}  // namespace afl
