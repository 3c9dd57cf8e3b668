#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "afl/lattice.hpp"
#include "afl/orbit.hpp"
#include "afl/series.hpp"

namespace afl {

/// {m in M_2(F) : v_F(m_ij - center_ij) >= e * level_ij}, weighted by coeff.
/// Levels are in units of varpi and may be negative.
struct CongruenceBox {
  FMat center;
  std::array<long, 4> level{};  // (0,0), (0,1), (1,0), (1,1)
  GaussQ coeff{1};

  bool contains(const FMat& m) const;
};

/// Finite signed combination of congruence boxes, restricted to S_2 (group)
/// or s_2 (Lie algebra).
class TestFunctionS {
 public:
  TestFunctionS() = default;
  TestFunctionS(std::string name, bool lie, std::vector<CongruenceBox> boxes)
      : name_(std::move(name)), lie_(lie), boxes_(std::move(boxes)) {}

  /// 1_{S(O_F0)}.
  static TestFunctionS one_S_O(const PadicContext& c);
  /// 1_{K'} with K' = S(O_F0) n K_0(varpi): top-right entry in varpi O_F.
  static TestFunctionS one_Kprime(const PadicContext& c);
  /// 1_{s(O_F0)}.
  static TestFunctionS one_frak_S_O(const PadicContext& c);
  /// 1_{k'}.
  static TestFunctionS one_frak_Kprime(const PadicContext& c);
  /// Single box around center with uniform level m.
  static TestFunctionS ball(const FMat& center, long m, bool lie = false);

  const std::string& name() const { return name_; }
  bool lie() const { return lie_; }
  const std::vector<CongruenceBox>& boxes() const { return boxes_; }

  GaussQ value(const FMat& m) const;
  /// Largest |level| among the boxes.
  long max_level() const;

  TestFunctionS scaled(const GaussQ& c) const;
  /// The function m -> f(*m) (star involution of the argument).
  TestFunctionS starred() const;

 private:
  std::string name_;
  bool lie_ = false;
  std::vector<CongruenceBox> boxes_;
};

TestFunctionS operator+(const TestFunctionS& a, const TestFunctionS& b);
TestFunctionS operator-(const TestFunctionS& a, const TestFunctionS& b);

/// Shells [k_min, k_max] outside of which a box cannot contain the conjugate
/// [[a, b/x], [x c, d]] with v(x) = k.
struct ShellWindow {
  long k_min = 0;
  long k_max = -1;
  bool empty() const { return k_min > k_max; }
};
ShellWindow shell_window(const FMat& m, const CongruenceBox& box);

/// Orb(m, f, s) = int_{F0^x} f([[a, b/x], [x c, d]]) eta(x) |x|^s dx with
/// vol(O_F0^x) = 1; the conjugation action of diag(x, 1) for m in S or s.
/// Each shell v(x) = k contributes c_k q^{-k s}.  Shells two beyond the
/// analytic window are evaluated and must vanish.
OrbitalSeries orbital_series(const FMat& m, const TestFunctionS& f);
OrbitalSeries orb_S(const FMat& gamma, const TestFunctionS& f);
OrbitalSeries orb_lie(const FMat& y, const TestFunctionS& f);
/// d/ds at s = 0.
LogValue del_orb(const FMat& m, const TestFunctionS& f);

// ---- unitary side ------------------------------------------------------

/// Indicator of a lattice stabilizer (group: g L = L; Lie: x L c L) or of a
/// product K^flat K, scaled by coeff.
struct TestFunctionU {
  enum class Kind { Stabilizer, LieStabilizer, FlatTimesStabilizer };
  std::string name;
  Kind kind = Kind::Stabilizer;
  Lattice lattice;
  GaussQ coeff{1};

  bool contains(const FMat& g) const;
};

/// Named unitary test functions.
///   ram-even:           "K0flatK0+", "K0flatK0-", "k0+", "k0-"   (W_0, Lambda^pm)
///   ram-selfdual-0:     "K1~", "k1~"                            (W_1, O_F^2)
///   ram-selfdual-1:     "K0~", "k0~"                            (W_0, O_F^2)
///   unram-selfdual:     "K0", "k0"                              (W_0, O_F^2)
///   unram-almost-selfdual: "K1", "k1"                          (W_1, O_F^2)
TestFunctionU unitary_test_function(const PadicContext& c, Setting s, const std::string& name);
std::vector<std::string> unitary_test_function_names(Setting s);

/// Orb(g, f) = int_{F^1} f(h^{-1} g h) dh with h = diag(h, 1), vol(F^1) = 1.
/// Evaluated with norm-one representatives at two consecutive levels.
mpq_class orb_unitary(const FMat& g, const TestFunctionU& f);

// ---- germ expansions ---------------------------------------------------

/// Exact fit near gamma_0 = diag(a0, d0) of
///   D(s) omega(m) Orb(m, f, s) = P+(s) X^{kb} + sigma(m) P-(s) X^{-kc},
/// X = q^{-s}, kb = (v_F(b) - r_b)/e, kc = (v_F(c) - r_c)/e, sigma = eta(Na - 1)
/// (group) or eta(bc) (Lie), D = 1 + X (unramified) or 1 (ramified).  The
/// germ coefficients are phi_pm = P_pm / D up to the fixed factor
/// X^{r/e} absorbed from |b|^s and |c|^{-s}.
struct GermFit {
  FElem a0;
  FElem d0;
  bool lie = false;
  long level = 0;  // neighborhood: entries within varpi^level of the center
  long r_b = 0;
  long r_c = 0;
  OrbitalSeries denominator;
  OrbitalSeries p_plus;
  OrbitalSeries p_minus;
  int fit_samples = 0;
  int heldout_samples = 0;

  GaussQ phi_plus_at_0() const;
  GaussQ phi_minus_at_0() const;
  /// Model value D^{-1}(P+ X^{kb} + sigma P- X^{-kc}) evaluated as a series
  /// identity: returns D * omega * Orb - model numerator (zero when it fits).
  OrbitalSeries residual(const FMat& m, const TestFunctionS& f) const;
};

struct GermOptions {
  std::uint64_t seed = 1;
  int fit_samples = 24;
  int heldout_samples = 30;
  long min_level = 0;  // 0 means max_level(f) + 1
  long max_level = 0;  // 0 means precision budget
};

/// Random regular semisimple samples in the level-m neighborhood of
/// diag(a0, d0): gamma(a, b) with a = a0 (1 + w), v(w) >= m, and b with
/// v(b) >= m and b / conj(b) = -a0 d0 (1 + O(pi^{e m})).
std::vector<FMat> germ_samples_S(const FElem& a0, const FElem& d0, long m, int count, std::uint64_t seed);
/// y(a, b, c, d) with a - a0, d - d0, b, c in varpi^m (trace-zero entries).
std::vector<FMat> germ_samples_lie(const FElem& a0, const FElem& d0, long m, int count, std::uint64_t seed);

/// Fits the model at the first neighborhood level whose held-out residuals
/// all vanish; throws GermDoesNotStabilize if none up to the budget does.
GermFit germ_fit(const TestFunctionS& f, const FElem& a0, const FElem& d0, const GermOptions& opt = {});

/// 2 omega dOrb(m, f) - 2 sigma(m) phi_-(0) v(bc) log q, which is constant on
/// the side where phi_+(0) + sigma phi_-(0) = 0.  For m in S, v(bc) = v(1 - Na).
LogValue germ_constant_quantity(const GermFit& fit, const FMat& m, const TestFunctionS& f);

/// f + kappa g with kappa chosen so that phi_+(0) + sigma phi_-(0) vanishes for
/// the combination (given fits of f and g at the same center); throws
/// PreconditionViolated if g cannot cancel f.
TestFunctionS one_sided_combination(const TestFunctionS& f, const GermFit& fit_f, const TestFunctionS& g,
                                    const GermFit& fit_g, int sigma);

/// sigma(m): eta(Na - 1) for the group, eta(bc) for the Lie algebra.
int side_sign(const FMat& m, bool lie);
/// omega_S or omega_s.
GaussQ transfer_factor(const FMat& m, bool lie);

}  // namespace afl
