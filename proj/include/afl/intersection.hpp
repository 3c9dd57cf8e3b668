#pragma once

#include "afl/matrix.hpp"
#include "afl/orbit.hpp"
#include "afl/quaternion.hpp"

namespace afl {

/// 2 x 2 matrices over D (quasi-endomorphisms of a product of two copies of
/// the framing object in the ramified settings).
using QuatMatrix = Mat<QuatElem>;

QuatMatrix quat_matrix(const QuatElem& a, const QuatElem& b, const QuatElem& c, const QuatElem& d);
/// Entrywise embedding M_2(F) -> M_2(D).
QuatMatrix to_quat_matrix(const FMat& m);
bool is_integral(const QuatMatrix& m);

/// l(x) + 1 where x lies in O_F + pi^l O_D but not in O_F + pi^{l+1} O_D;
/// for x = a + b zeta this is v_F(b) + 1.  Throws InfiniteLength for x in F and
/// NonIntegral for x outside O_D.
long gross_length(const QuatElem& x);
/// x in O_F + pi^l O_D, read coordinate-wise.
bool in_order_conductor(const QuatElem& x, long l);

/// Length of the locus on which x lifts to the canonical lifting: 0 off O_D,
/// unbounded (kInfVal) on O_F, gross_length otherwise.  `certified` is false
/// when the zeta coordinate has cancelled and only a lower bound is known.
struct LiftLength {
  long value = 0;
  bool certified = true;
};
LiftLength lift_length(const QuatElem& x);
/// Length of the locus where every entry lifts (minimum over entries);
/// throws InsufficientPrecision if the minimum is only a lower bound.
long matrix_lift_length(const QuatMatrix& m);

/// Closed forms in presentation coordinates.  Group:
///   ram-even:     2 v(N b') + 2;
///   selfdual-0:   v(N b') + 1 if a and beta are integral, else 0;
///   selfdual-1:   v(N b') + 1.
/// Lie: 2 v(N b') + 2 (ram-even) or v(N b') + 1 (self-dual) if a', d' lie in
/// pi O_F0 and beta is integral, else 0.  Throws NotRegularSemisimple for
/// beta = 0 and PreconditionViolated outside the ramified settings.
long int_closed_form(Setting s, const GroupPresentation& g);
long int_closed_form_lie(Setting s, const LiePresentation& x);

/// The presented element as a matrix over D: diag(1, alpha) [[a, b'], [b', a]]
/// (ram-even, selfdual-1) or diag(1, alpha) [[a, b'], [eps^{-1} b', a]]
/// (selfdual-0), with b' = beta zeta.
QuatMatrix quat_presentation(Setting s, const GroupPresentation& g);
/// [[a', b'], [b', d']] or [[a', b'], [eps^{-1} b', d']] (selfdual-0).
QuatMatrix quat_presentation_lie(Setting s, const LiePresentation& x);

/// phi_0 = [[1, pi], [1, -pi]] and kappa_0 = [[0, pi], [pi^{-1}, 0]].
QuatMatrix phi0(const PadicContext& c);
QuatMatrix phi0_inverse(const PadicContext& c);
QuatMatrix kappa0(const PadicContext& c);

/// phi_0^{-1} m phi_0 and phi_0^{-1} m phi_0 kappa_0.
struct ConjugatedPair {
  QuatMatrix conj;
  QuatMatrix conj_kappa;
};
ConjugatedPair ram_even_conjugates(const QuatMatrix& m);

/// Int(g) in the ram-even setting re-derived from the conjugated matrices:
/// exactly one of them is integral and the result is twice the length of the
/// locus where its entries lift.  Throws PreconditionViolated if both or
/// neither branch is integral.
long int_oracle_ram_even(const GroupPresentation& g);
/// l-Int(x) in the ram-even setting: twice the larger of the two lifting
/// lengths (0 for a non-integral branch).
long int_oracle_ram_even_lie(const LiePresentation& x);
/// Self-dual settings: length of the locus where all entries of the
/// presented matrix lift.
long int_oracle_selfdual(Setting s, const GroupPresentation& g);
long int_oracle_selfdual_lie(Setting s, const LiePresentation& x);

// ---- unramified reduction checks -------------------------------------------

/// All entries integral: the matrix lifts to an endomorphism of the product.
bool lifts_to_product(const FMat& x);
/// For x in the Lie algebra of the unram-almost-selfdual W_1, theta(x) lies in
/// that of the unram-selfdual W_0 and x lifts iff theta(x) does.  Returns the
/// equivalence; throws PreconditionViolated if x is not in the Lie algebra.
bool theta_lifting_equivalent(const FMat& x);
/// y in O_F + O_F x inside M_2(D); x must not be scalar.
bool in_generated_order(const FMat& y, const FMat& x);
/// O_F[x] = O_F[c_xi(x)] as subalgebras of M_2(D).
bool cayley_order_equal(const FElem& xi, const FMat& x);

}  // namespace afl
