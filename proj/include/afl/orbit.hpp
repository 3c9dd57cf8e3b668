#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afl/fmat.hpp"
#include "afl/lattice.hpp"

namespace afl {

/// The five n = 2 situations.  Each fixes the extension type and the pair of
/// hermitian spaces W_0 (split) and W_1 (non-split) with their special vectors.
enum class Setting { UnramSelfDual, UnramAlmostSelfDual, RamEven, RamSelfDual0, RamSelfDual1 };

std::string to_string(Setting s);
/// Accepts the canonical names and the short forms "selfdual", "almost-selfdual",
/// "ram-even", "selfdual-0", "selfdual-1".
Setting parse_setting(const std::string& name);
bool setting_ramified(Setting s);
const std::vector<Setting>& all_settings();

/// Diagonal Gram matrix diag(lambda_1, lambda_2) of W_i used for matrices in
/// the setting; the second basis vector is the special vector.
HermitianSpace unitary_space(const PadicContext& c, Setting s, int side);

// ---- S_n and its Lie algebra -------------------------------------------

/// gamma(a, b) = [[a, b], [(1 - Na)/conj(b), -conj(a) b / conj(b)]].
FMat gamma_ab(const FElem& a, const FElem& b);
/// [[a, b], [c, d]].
FMat lie_y(const FElem& a, const FElem& b, const FElem& c, const FElem& d);

/// gamma * conj(gamma) = 1.
bool in_S(const FMat& g);
/// y + conj(y) = 0.
bool in_s(const FMat& y);

/// Cyclicity test with e the last basis vector (n <= 3): det(x^i e) and
/// det(e^T x^i) both nonzero.
bool is_regular_semisimple(const FMat& x);
/// det(x^i e)_{0 <= i < n} with e the last basis vector.
FElem krylov_det(const FMat& x);

/// i with eta(Na - 1) = (-1)^i for gamma in S_2 regular semisimple.
int side(const FMat& gamma);
/// i with eta(bc) = (-1)^i for y in s_2 regular semisimple.
int side_lie(const FMat& y);

/// omega_S(gamma) = eta~(det(gamma)^{-floor(n/2)} det(gamma^i e)).
GaussQ transfer_factor_S(const FMat& gamma);
/// omega_s(y) = eta~(det(y^i e)).
GaussQ transfer_factor_lie(const FMat& y);
/// r(g) = g conj(g)^{-1}.
FMat symmetrization(const FMat& g);
/// Transfer factor on G' = GL_{n-1}(F) x GL_n(F), via r(gamma_1^{-1} gamma_2)
/// with gamma_1 embedded as diag(gamma_1, 1).
GaussQ transfer_factor_Gprime(const FMat& gamma1, const FMat& gamma2);

// ---- matching ------------------------------------------------------------

struct MatchInvariants {
  FElem a;
  FElem det;
};
struct LieMatchInvariants {
  FElem a;
  FElem d;
  FElem bc;
};

MatchInvariants match_invariants(const FMat& g);
LieMatchInvariants lie_match_invariants(const FMat& x);
/// Equal upper-left entries and equal determinants (both regular semisimple).
bool match_check(const FMat& gamma, const FMat& g);
/// Equal diagonals and equal products of off-diagonal entries.
bool match_check_lie(const FMat& y, const FMat& x);

/// Some x in F with N x = t; throws NotInDomain when eta(t) = -1.
FElem norm_preimage(const F0Elem& t);

/// A unitary matrix for unitary_space(s, side(gamma)) matching gamma.
FMat match_group(Setting s, const FMat& gamma);
/// A Lie-unitary matrix for unitary_space(s, side_lie(y)) matching y.
FMat match_lie(Setting s, const FMat& y);
/// g^* G g = G.
bool is_unitary(const FMat& g, const HermitianSpace& w);
/// x^* G + G x = 0.
bool is_lie_unitary(const FMat& x, const HermitianSpace& w);

/// Side carrying the quaternionic presentation in a ramified setting:
/// ram-even and selfdual-1 use W_1, selfdual-0 uses W_0.
int presentation_side(Setting s);

/// Group presentation with b' = beta zeta in D^-:
///   ram-even, selfdual-1:  [[a, beta], [eps conj(alpha) conj(beta), conj(alpha a)]],  Na + N b' = 1;
///   selfdual-0:            [[a, beta], [conj(alpha) conj(beta), conj(alpha a)]],      Na + eps^{-1} N b' = 1;
/// where N b' = -eps N beta and alpha is in F^1.
struct GroupPresentation {
  FElem a;
  FElem beta;
  FElem alpha;
};
/// Lie presentation [[a', beta], [eps conj(beta), -d']] (ram-even, selfdual-1)
/// or [[a', beta], [conj(beta), -d']] (selfdual-0), with a', d' in pi F0.
struct LiePresentation {
  FElem a;
  FElem beta;
  FElem d;
};

FMat from_presentation(Setting s, const GroupPresentation& g);
FMat from_presentation_lie(Setting s, const LiePresentation& x);
GroupPresentation to_presentation(Setting s, const FMat& g);
LiePresentation to_presentation_lie(Setting s, const FMat& x);
/// N b' = -eps N beta.
F0Elem norm_b_prime(const FElem& beta);

/// gamma matches the presented element with invariants (a', alpha, N b'):
/// a = a', det gamma = conj(alpha), the norm relation of the setting holds and
/// N b' is the norm of an element of D^-.
bool match_check_presentation(Setting s, const FMat& gamma, const FElem& a_prime, const FElem& alpha,
                              const F0Elem& nb_prime);
/// y matches (a', d', N b'): a = a', d = -d', bc = -N b' (ram-even, selfdual-1)
/// or bc = -eps^{-1} N b' (selfdual-0), with N b' realized in D^-.
bool match_check_presentation_lie(Setting s, const FMat& y, const FElem& a_prime, const FElem& d_prime,
                                  const F0Elem& nb_prime);

/// Matching presented element for gamma on the presentation side; throws
/// PreconditionViolated if side(gamma) differs.
GroupPresentation match_presentation(Setting s, const FMat& gamma);
LiePresentation match_presentation_lie(Setting s, const FMat& y);

// ---- Cayley transform, theta and the star involution -----------------------

/// xi (1 + y)(1 - y)^{-1}; throws NotInDomain if det(1 - y) = 0.
FMat cayley(const FElem& xi, const FMat& y);
/// (gamma - xi)(gamma + xi)^{-1}; throws NotInDomain if det(gamma + xi) = 0.
FMat cayley_inv(const FElem& xi, const FMat& gamma);
/// Coefficients of the characteristic polynomial, c_k = sum of principal k-minors.
std::vector<FElem> char_poly(const FMat& x);
/// Characteristic polynomial with coefficients in O_F.
bool is_integral_element(const FMat& x);
/// Integral with det(1 - y) a unit.
bool is_strongly_integral(const FMat& y);
/// Integral with det(gamma + xi) a unit.
bool is_xi_strongly_integral(const FMat& gamma, const FElem& xi);

/// Scales the top-right (n-1) x 1 block by varpi^{-1}.
FMat theta(const FMat& y);
FMat theta_inv(const FMat& y);
/// diag(1, ..., 1, varpi^{-1}) y^T diag(1, ..., 1, varpi).
FMat star_involution(const FMat& y);

}  // namespace afl
