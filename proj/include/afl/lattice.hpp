#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afl/fmat.hpp"

namespace afl {

/// Hermitian space F^n with h(x, y) = conj(x)^T G y.
class HermitianSpace {
 public:
  explicit HermitianSpace(FMat gram);

  const PadicContext& ctx() const { return gram_(0, 0).ctx(); }
  int dim() const { return gram_.rows(); }
  const FMat& gram() const { return gram_; }
  FElem form(const FMat& x, const FMat& y) const;
  /// det G, an element of F0.
  F0Elem discriminant() const;
  /// eta((-1)^{n(n-1)/2} det G) = +1.
  bool is_split() const;

 private:
  FMat gram_;
};

/// O_F-lattice spanned by the columns of a nonsingular basis matrix.
class Lattice {
 public:
  Lattice(HermitianSpace space, FMat basis);
  static Lattice standard(const HermitianSpace& space);

  const HermitianSpace& space() const { return space_; }
  const FMat& basis() const { return basis_; }
  const PadicContext& ctx() const { return space_.ctx(); }
  int dim() const { return space_.dim(); }

  Lattice dual() const;
  Lattice scaled(const FElem& s) const;
  Lattice transformed(const FMat& g) const;

  bool contains_vector(const FMat& v) const;
  /// other is a sublattice of this.
  bool contains(const Lattice& other) const;
  /// Length of the O_F-module this / other (requires other inside this).
  long colength(const Lattice& other) const;
  /// Gram matrix of the basis: B^* G B.
  FMat gram_of_basis() const;

  std::string to_string() const;

 private:
  HermitianSpace space_;
  FMat basis_;
};

bool operator==(const Lattice& a, const Lattice& b);
inline bool operator!=(const Lattice& a, const Lattice& b) { return !(a == b); }

/// Lattice spanned by the columns of gens (an n x m matrix, m >= n), via
/// column echelon reduction over O_F.
Lattice lattice_span(const HermitianSpace& space, const FMat& gens);
/// Intersection of two lattices in the same space.
Lattice intersection(const Lattice& a, const Lattice& b);

/// Smith form M = left * diag(pi^{d_1}, ..., pi^{d_n}) * right with left,
/// right in GL_n(O_F) and d_i nondecreasing.  Only left and its inverse are kept.
struct SmithForm {
  FMat left;
  FMat left_inv;
  std::vector<long> exponents;
};

/// Smith form of an integral nonsingular square matrix over O_F.
SmithForm smith_form(const FMat& m);

struct VertexType {
  long r = 0;
  std::string name;  // "self-dual", "almost self-dual", "pi-modular", "almost pi-modular" or ""
};

/// The r with L c^r L^dual c pi^{-1} L; throws NotAVertexLattice otherwise.
VertexType vertex_type(const Lattice& l);

/// Hermitian form reduced mod pi on L / pi L^dual, valid when pi L^dual c L.
/// Returns an adapted basis of L (the last dim columns span the quotient) and
/// the residue Gram matrix of those columns as integers mod p.
struct ResidueForm {
  FMat basis;                           // adapted basis of L
  std::vector<int> quotient_columns;    // columns spanning L / pi L^dual
  std::vector<std::vector<long>> gram;  // residue Gram matrix (symmetric mod p)
};
ResidueForm residue_form(const Lattice& l);

/// pi-modular lattices M with pi L^dual c M c L for L of vertex type n-2
/// (ramified, n even).  Either empty or exactly two lattices.
std::vector<Lattice> pi_modular_sublattices(const Lattice& l);

/// Hermitian space with diagonal Gram matrix.
HermitianSpace diagonal_space(const std::vector<F0Elem>& d);
/// pi L + O_F v for a vector v of L.
Lattice extend_by_vector(const Lattice& l, const FMat& v);
/// Lambda^pm = pi O_F^2 + O_F (u0 +- u_flat) in the space diag(1, -1) with
/// basis (u_flat, u0); sign = +1 or -1.
Lattice lambda_pm(const PadicContext& c, int sign);

/// (q^n - 1)/(q - 1): number of lines in k^n.
long line_count_index(long n, long q);

/// g L = L.
bool stabilizes(const FMat& g, const Lattice& l);
/// g L c L (Lie algebra variant).
bool preserves(const FMat& g, const Lattice& l);

}  // namespace afl
