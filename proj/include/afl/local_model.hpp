#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "afl/matrix.hpp"
#include "afl/padic.hpp"

namespace afl {

/// O_F / pi^k for ramified F = Q_p(pi), pi^2 = p, with 1 <= k <= 8.
class ResidueRing {
 public:
  ResidueRing(long p, int k);

  long p() const { return p_; }
  int k() const { return k_; }
  /// Moduli of the two coordinates of c0 + c1 pi.
  long mod0() const { return mod0_; }
  long mod1() const { return mod1_; }

 private:
  long p_;
  int k_;
  long mod0_;
  long mod1_;
};

/// Element c0 + c1 pi of O_F / pi^k.
class RElem {
 public:
  RElem() = default;
  RElem(const ResidueRing& r, long c0, long c1 = 0);

  static RElem from_rational(const ResidueRing& r, const mpq_class& v);
  static RElem pi(const ResidueRing& r) { return RElem(r, 0, 1); }
  /// Reduction of an integral element of F.
  static RElem from_f(const ResidueRing& r, const FElem& x);

  const ResidueRing& ring() const { return *ring_; }
  long c0() const { return c0_; }
  long c1() const { return c1_; }

  bool is_zero() const { return c0_ == 0 && c1_ == 0; }
  bool is_unit() const { return c0_ % ring_->p() != 0; }
  /// pi-adic valuation; k for zero.
  int valuation() const;
  /// Image in the residue field F_p.
  long residue() const { return c0_ % ring_->p(); }
  RElem inverse() const;

  RElem operator-() const { return RElem(*ring_, -c0_, -c1_); }
  RElem& operator+=(const RElem& o);
  RElem& operator-=(const RElem& o);
  RElem& operator*=(const RElem& o);

  std::string to_string() const;

 private:
  const ResidueRing* ring_ = nullptr;
  long c0_ = 0;
  long c1_ = 0;
};

RElem operator+(RElem a, const RElem& b);
RElem operator-(RElem a, const RElem& b);
RElem operator*(RElem a, const RElem& b);
bool operator==(const RElem& a, const RElem& b);
inline bool operator!=(const RElem& a, const RElem& b) { return !(a == b); }

/// Base rings for chain points: O_F / pi^k (RElem) and F itself (FElem).
template <class T>
struct RingTraits;

template <>
struct RingTraits<RElem> {
  using Ring = ResidueRing;
  static const Ring& ring_of(const RElem& x) { return x.ring(); }
  static RElem from_rational(const Ring& r, const mpq_class& v) { return RElem::from_rational(r, v); }
  static RElem pi(const Ring& r) { return RElem::pi(r); }
  static bool is_zero(const RElem& x) { return x.is_zero(); }
  static bool is_unit(const RElem& x) { return x.is_unit(); }
  static RElem inverse(const RElem& x) { return x.inverse(); }
  /// Rank at the closed point.
  static int point_rank(const Mat<RElem>& m);
};

template <>
struct RingTraits<FElem> {
  using Ring = PadicContext;
  static const Ring& ring_of(const FElem& x) { return x.ctx(); }
  static FElem from_rational(const Ring& r, const mpq_class& v) { return FElem::from_rational(r, v); }
  static FElem pi(const Ring& r) { return FElem::pi(r); }
  /// Cancelled values count as zero.
  static bool is_zero(const FElem& x) { return !x.x0().is_regular() && !x.x1().is_regular(); }
  static bool is_unit(const FElem& x) { return !is_zero(x); }
  static FElem inverse(const FElem& x) { return x.inverse(); }
  static int point_rank(const Mat<FElem>& m);
};

/// The standard lattice chain Lambda_i in F^n (n even, ramified F) with the
/// split hermitian form h(e_i, e_j) = delta_{i, n+1-j}, the alternating form
/// <x, y> = tr(pi^{-1} h(x, y)) / 2 and signature (r, s).
///
/// The O_F0-basis of Lambda_i (i = b n + c, 0 <= c < n) is
///   u_j = pi^{-b-1} e_j (j <= c) or pi^{-b} e_j (j > c),  then  pi u_1, ..., pi u_n,
/// which for 0 <= i <= n agrees with the usual ordered basis.
class ChainContext {
 public:
  ChainContext(long p, int n, int r, int s);

  long p() const { return p_; }
  int n() const { return n_; }
  int m() const { return n_ / 2; }
  int r() const { return r_; }
  int s() const { return s_; }

  /// Basis of Lambda_i as pairs (j, t) meaning pi^t e_j (j is 1-based).
  std::vector<std::pair<int, int>> basis(int i) const;
  /// <pi^a e_i, pi^b e_j>.
  mpq_class pair_monomials(int a, int i, int b, int j) const;
  /// Coordinates of pi^t e_j in the basis of Lambda_i; throws NotInDomain if
  /// the vector is not in Lambda_i.
  std::vector<mpq_class> coordinates(int i, int j, int t) const;

  /// <b_k(i), b_l(-i)>: the perfect pairing Lambda_i x Lambda_{-i} -> O_F0.
  Mat<mpq_class> pairing(int i) const;
  /// <b_k(i), b_l(i)>, rational; used on the generic fiber.
  Mat<mpq_class> self_pairing(int i) const;
  /// The natural map Lambda_i -> Lambda_j (i <= j).
  Mat<mpq_class> chain_map(int i, int j) const;
  /// T_i = chain_map(i, i + 1).
  Mat<mpq_class> transition(int i) const { return chain_map(i, i + 1); }
  /// pi (x) 1 on Lambda_i (the same matrix for every i).
  Mat<mpq_class> pi_action() const;
  /// pi (x) 1 : Lambda_i -> Lambda_{i-n}.
  Mat<mpq_class> pi_transport(int i) const;
  /// (x, y)_m = <x, pi y>_m on Lambda_m.
  Mat<mpq_class> symmetric_form() const;

 private:
  long p_;
  int n_;
  int r_;
  int s_;
};

/// F_i inside Lambda_i (x) R as the column span of gens (2n x n).
template <class T>
struct ChainPointT {
  int index = 0;
  Mat<T> gens;
};
using ChainPoint = ChainPointT<RElem>;
using GenericChainPoint = ChainPointT<FElem>;

template <class T>
Mat<T> to_ring(const Mat<mpq_class>& m, const typename RingTraits<T>::Ring& r);

/// Rows of an invertible maximal minor (empty if the columns do not span a
/// direct summand).
template <class T>
std::vector<int> summand_pivots(const Mat<T>& g);
/// Every column of h lies in the column span of the summand g.
template <class T>
bool span_contains(const Mat<T>& g, const Mat<T>& h);
template <class T>
bool same_span(const Mat<T>& g, const Mat<T>& h);
/// Kernel of a (rows x cols) matrix with an invertible maximal minor, as a
/// cols x (cols - rows) matrix; throws PreconditionViolated otherwise.
template <class T>
Mat<T> kernel(const Mat<T>& a);
/// Coefficients c_0, ..., c_n of det(T - m) (c_n = 1).
template <class T>
std::vector<T> char_poly(const Mat<T>& m);

enum class Condition { Naive, Kottwitz, Wedge, Spin, RankSpin };
std::string to_string(Condition c);

struct ConditionResult {
  Condition which = Condition::Naive;
  bool applicable = true;
  bool pass = false;
  std::string witness;
};

struct ConditionReport {
  std::vector<ConditionResult> results;
  const ConditionResult& get(Condition c) const;
  /// All applicable requested conditions pass.
  bool all_pass() const;
};

/// Naive: direct summand of rank n, O_F-stable, and the functoriality /
/// periodicity / duality conditions of the chain determined by I = {index}.
/// Kottwitz: char(pi (x) 1 | F) = (T - pi)^r (T + pi)^s.  Wedge: the (s+1)- and
/// (r+1)-minors of pi (x) 1 -/+ 1 (x) pi vanish.  Spin: at index m, the rank of
/// pi (x) 1 - 1 (x) pi at the closed point has the parity of r.  RankSpin: at
/// index m with s = 1, that rank is 1.
template <class T>
ConditionReport check_conditions(const ChainContext& ctx, const ChainPointT<T>& pt,
                                 const std::vector<Condition>& which);

/// The rank of pi (x) 1 - 1 (x) pi on F at the closed point.
template <class T>
int spin_rank(const ChainContext& ctx, const ChainPointT<T>& pt);

struct NuResult {
  ChainPoint point;
  bool contains_image = false;
  bool lagrangian = false;
  bool pi_stable = false;
  bool maps_into_next = false;
  /// Spin ranks of the two Lagrangian extensions.
  std::array<int, 2> branch_ranks{};
  int passing_branches = 0;
};

/// nu(F_{m-1}): the Lagrangian for (,)_m containing T_{m-1}(F_{m-1}) that
/// satisfies the spin condition.  Throws PreconditionViolated for a point not
/// at index m - 1 or whose image has rank below n - 1, and NoSplitComplement
/// if the rank-2 quotient has no isotropic basis.
NuResult nu_map(const ChainContext& ctx, const ChainPoint& pt);

// ---- charts ----------------------------------------------------------------

/// Column span of [[X], [1_n]].
ChainPoint chart_point(int index, const Mat<RElem>& x);
/// X with F = colspan [[X], [1_n]] if the lower block is invertible.
std::optional<Mat<RElem>> chart_coordinates(const ChainPoint& pt);
/// The point F = (pi (x) 1)(Lambda_index (x) R), i.e. X = 0.
ChainPoint worst_point(const ChainContext& ctx, const ResidueRing& r, int index);

/// n = 4, (r, s) = (3, 1): the closed-form description of nu on the chart
/// around the worst point, with columns built from A, B, C, D, R_1, R_2 and
/// R_i^ad = H t(R_i).
ChainPoint nu_closed_form(const ChainContext& ctx, const Mat<RElem>& x);

struct RelationReport {
  int checked = 0;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

/// The polynomial relations on a chart point X (n = 4 chart at index m - 1):
/// the column relations making every column of (pi (x) 1 - 1 (x) pi) nu(X) a
/// multiple of the m-th, the (m+1)-column relations, the orthogonality
/// relations, and the two quadratic wedge relations.
RelationReport verify_want_relations(const ChainContext& ctx, const Mat<RElem>& x);

// ---- n = 2 and the Gamma_0(varpi) local model --------------------------------

/// F_0 = span{f_1 + x f_2}, F_1 = span{y varpi^{-1} f_1 + f_2}: Phi(F_0) c F_1 and
/// Phi'(F_1) c F_0 (both lines are direct summands by construction).
bool gamma0_conditions(const RElem& x, const RElem& y);
/// F_0 (+) F_1 inside Lambda_0 = lambda_0 (+) lambda_1, with f_2 -> e_1 and
/// varpi^{-1} f_1 -> e_2; in the basis e_1, e_2, pi e_1, pi e_2.
ChainPoint gamma0_image(const RElem& x, const RElem& y);

// ---- flat sample points ------------------------------------------------------

/// W_+ (+) W_- with W_+ a random r-dimensional subspace of the pi-eigenspace
/// and W_- its annihilator in the (-pi)-eigenspace: a point of the generic
/// fiber at the given index.
GenericChainPoint eigen_split_point(const ChainContext& ctx, const PadicContext& pc, int index,
                                    std::mt19937_64& rng);
/// The same subspace expressed in the basis of Lambda_j (j >= index).
GenericChainPoint transport(const ChainContext& ctx, const GenericChainPoint& pt, int j);
/// Basis of colspan(g) n (Lambda (x) O_F): the O_F-point of the flat closure.
Mat<FElem> saturate(const Mat<FElem>& g);
/// Reduction of the saturation modulo pi^k.
ChainPoint reduce_point(const ResidueRing& r, const GenericChainPoint& pt);

}  // namespace afl
