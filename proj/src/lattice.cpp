#include "afl/lattice.hpp"

#include <algorithm>

namespace afl {

namespace {

/// Valuation when it is certified; nullopt for zero or values lost to
/// cancellation.
std::optional<long> certified_val(const FElem& x) {
  if (x.is_exact_zero()) return std::nullopt;
  if (!x.x0().is_regular() && !x.x1().is_regular()) return std::nullopt;
  try {
    return x.valuation();
  } catch (const InsufficientPrecision&) {
    return std::nullopt;
  }
}

/// Unit part x / pi^{v_F(x)}.
FElem unit_part(const FElem& x, long v) { return x * FElem::pi_power(x.ctx(), -v); }

long mod_p(const F0Elem& x) {
  if (!x.val_at_least(0)) throw NonIntegral("residue of a non-integral value");
  return x.residue_mod(1).get_si();
}

}  // namespace

HermitianSpace::HermitianSpace(FMat gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols() || gram_.rows() == 0)
    throw PreconditionViolated("Gram matrix must be square and nonempty");
  if (conj_transpose(gram_) != gram_) throw PreconditionViolated("Gram matrix is not hermitian");
}

FElem HermitianSpace::form(const FMat& x, const FMat& y) const { return (conj_transpose(x) * gram_ * y)(0, 0); }

F0Elem HermitianSpace::discriminant() const { return det(gram_).x0(); }

bool HermitianSpace::is_split() const {
  const long n = dim();
  F0Elem d = discriminant();
  if ((n * (n - 1) / 2) % 2) d = -d;
  return eta(d) == 1;
}

Lattice::Lattice(HermitianSpace space, FMat basis) : space_(std::move(space)), basis_(std::move(basis)) {
  if (basis_.rows() != space_.dim() || basis_.cols() != space_.dim())
    throw PreconditionViolated("lattice basis must be n x n");
  if (!det(basis_).is_nonzero()) throw PreconditionViolated("lattice basis is singular");
}

Lattice Lattice::standard(const HermitianSpace& space) {
  return Lattice(space, fmat_identity(space.ctx(), space.dim()));
}

Lattice Lattice::dual() const { return Lattice(space_, inverse(conj_transpose(basis_) * space_.gram())); }

Lattice Lattice::scaled(const FElem& s) const { return Lattice(space_, s * basis_); }

Lattice Lattice::transformed(const FMat& g) const { return Lattice(space_, g * basis_); }

bool Lattice::contains_vector(const FMat& v) const { return is_integral(inverse(basis_) * v); }

bool Lattice::contains(const Lattice& other) const { return is_integral(inverse(basis_) * other.basis_); }

long Lattice::colength(const Lattice& other) const {
  FMat t = inverse(basis_) * other.basis_;
  if (!is_integral(t)) throw PreconditionViolated("colength of a lattice that is not a sublattice");
  return det(t).valuation();
}

FMat Lattice::gram_of_basis() const { return conj_transpose(basis_) * space_.gram() * basis_; }

std::string Lattice::to_string() const { return basis_.to_string(); }

bool operator==(const Lattice& a, const Lattice& b) { return a.contains(b) && b.contains(a); }

Lattice lattice_span(const HermitianSpace& space, const FMat& gens) {
  const int n = space.dim();
  if (gens.rows() != n || gens.cols() < n) throw PreconditionViolated("lattice_span needs at least n generators");
  FMat a = gens;
  const int m = a.cols();
  for (int i = 0; i < n; ++i) {
    int piv = -1;
    long best = kInfVal;
    for (int j = i; j < m; ++j) {
      auto v = certified_val(a(i, j));
      if (v && *v < best) {
        best = *v;
        piv = j;
      }
    }
    if (piv < 0) throw InsufficientPrecision("generators do not span a full-rank lattice at working precision");
    a.swap_cols(i, piv);
    FElem inv = a(i, i).inverse();
    for (int j = i + 1; j < m; ++j) {
      if (!certified_val(a(i, j))) {
        a(i, j) = FElem::zero(space.ctx());
        continue;
      }
      FElem f = a(i, j) * inv;
      for (int r = 0; r < n; ++r) a(r, j) -= f * a(r, i);
      a(i, j) = FElem::zero(space.ctx());
    }
  }
  return Lattice(space, a.block(0, 0, n, n));
}

Lattice intersection(const Lattice& a, const Lattice& b) {
  return lattice_span(a.space(), a.dual().basis().hcat(b.dual().basis())).dual();
}

SmithForm smith_form(const FMat& m) {
  const int n = m.rows();
  if (n != m.cols()) throw PreconditionViolated("smith_form needs a square matrix");
  if (!is_integral(m)) throw NonIntegral("smith_form needs an integral matrix");
  const PadicContext& c = m(0, 0).ctx();
  FMat a = m;
  SmithForm out{fmat_identity(c, n), fmat_identity(c, n), {}};
  for (int k = 0; k < n; ++k) {
    int pi = -1, pj = -1;
    long best = kInfVal;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        auto v = certified_val(a(i, j));
        if (v && *v < best) {
          best = *v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) throw InsufficientPrecision("matrix is singular at working precision");
    a.swap_rows(k, pi);
    out.left_inv.swap_rows(k, pi);
    out.left.swap_cols(k, pi);
    a.swap_cols(k, pj);
    // Normalize the pivot to pi^best with a row scaling by a unit.
    FElem u = unit_part(a(k, k), best);
    FElem ui = u.inverse();
    for (int j = 0; j < n; ++j) {
      a(k, j) = ui * a(k, j);
      out.left_inv(k, j) = ui * out.left_inv(k, j);
    }
    for (int i = 0; i < n; ++i) out.left(i, k) = out.left(i, k) * u;
    FElem pinv = FElem::pi_power(c, -best);
    for (int i = k + 1; i < n; ++i) {
      if (!certified_val(a(i, k))) {
        a(i, k) = FElem::zero(c);
        continue;
      }
      FElem f = a(i, k) * pinv;
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        out.left_inv(i, j) -= f * out.left_inv(k, j);
      }
      for (int r = 0; r < n; ++r) out.left(r, k) += out.left(r, i) * f;
      a(i, k) = FElem::zero(c);
    }
    for (int j = k + 1; j < n; ++j) a(k, j) = FElem::zero(c);
    out.exponents.push_back(best);
  }
  return out;
}

VertexType vertex_type(const Lattice& l) {
  Lattice d = l.dual();
  if (!d.contains(l)) throw NotAVertexLattice("L is not contained in its dual");
  const FElem pi_inv = FElem::pi_power(l.ctx(), -1);
  if (!l.scaled(pi_inv).contains(d)) throw NotAVertexLattice("dual is not contained in pi^{-1} L");
  VertexType t;
  t.r = d.colength(l);
  const long n = l.dim();
  if (t.r == 0)
    t.name = "self-dual";
  else if (t.r == n)
    t.name = "pi-modular";
  else if (t.r == 1)
    t.name = "almost self-dual";
  else if (t.r == n - 1)
    t.name = "almost pi-modular";
  return t;
}

ResidueForm residue_form(const Lattice& l) {
  const PadicContext& c = l.ctx();
  if (!c.ramified()) throw PreconditionViolated("residue_form needs a ramified context");
  Lattice d = l.dual();
  if (!d.contains(l)) throw PreconditionViolated("residue_form needs L inside its dual");
  Lattice pd = d.scaled(FElem::pi(c));
  FMat rel = inverse(l.basis()) * pd.basis();
  SmithForm s = smith_form(rel);
  ResidueForm out;
  out.basis = l.basis() * s.left;
  const int n = l.dim();
  for (int i = 0; i < n; ++i)
    if (s.exponents[static_cast<size_t>(i)] > 0) out.quotient_columns.push_back(i);
  const size_t k = out.quotient_columns.size();
  out.gram.assign(k, std::vector<long>(k, 0));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) {
      FElem h = l.space().form(out.basis.column(out.quotient_columns[i]), out.basis.column(out.quotient_columns[j]));
      out.gram[i][j] = mod_p(h.x0());
    }
  return out;
}

std::vector<Lattice> pi_modular_sublattices(const Lattice& l) {
  const PadicContext& c = l.ctx();
  const int n = l.dim();
  if (!c.ramified() || n % 2) throw PreconditionViolated("pi_modular_sublattices needs ramified F and even n");
  ResidueForm rf = residue_form(l);
  if (rf.quotient_columns.size() != 2)
    throw PreconditionViolated("L / pi L^dual must be two-dimensional");
  const long p = c.p();
  const auto& g = rf.gram;
  std::vector<Lattice> out;
  const int ia = rf.quotient_columns[0];
  const int ib = rf.quotient_columns[1];
  auto isotropic = [&](long x, long y) {
    long v = (x * x % p * g[0][0] + 2 * x * y % p * g[0][1] + y * y % p * g[1][1]) % p;
    return ((v % p) + p) % p == 0;
  };
  // Lines [1 : t] and [0 : 1].
  for (long t = 0; t <= p; ++t) {
    long x = (t < p) ? 1 : 0;
    long y = (t < p) ? t : 1;
    if (!isotropic(x, y)) continue;
    FMat b = rf.basis;
    FMat v = FElem::from_int(c, x) * rf.basis.column(ia) + FElem::from_int(c, y) * rf.basis.column(ib);
    FMat w = (x != 0) ? rf.basis.column(ib) : rf.basis.column(ia);
    b.set_block(0, ia, v);
    b.set_block(0, ib, FElem::pi(c) * w);
    out.emplace_back(l.space(), b);
  }
  return out;
}

HermitianSpace diagonal_space(const std::vector<F0Elem>& d) {
  std::vector<FElem> f;
  for (const auto& x : d) f.emplace_back(x);
  return HermitianSpace(fmat_diag(f));
}

Lattice extend_by_vector(const Lattice& l, const FMat& v) {
  FMat gens = (FElem::pi(l.ctx()) * l.basis()).hcat(v);
  return lattice_span(l.space(), gens);
}

Lattice lambda_pm(const PadicContext& c, int sign) {
  HermitianSpace w = diagonal_space({F0Elem::from_int(c, 1), F0Elem::from_int(c, -1)});
  FMat v = fmat(c, {{FElem::from_int(c, sign)}, {FElem::from_int(c, 1)}});
  return extend_by_vector(Lattice::standard(w), v);
}

long line_count_index(long n, long q) {
  if (n < 1 || q < 2) throw PreconditionViolated("line_count_index needs n >= 1 and q >= 2");
  long qn = 1;
  for (long i = 0; i < n; ++i) qn *= q;
  return (qn - 1) / (q - 1);
}

bool stabilizes(const FMat& g, const Lattice& l) {
  FMat t = inverse(l.basis()) * g * l.basis();
  return is_integral(t) && det(t).is_unit();
}

bool preserves(const FMat& g, const Lattice& l) { return is_integral(inverse(l.basis()) * g * l.basis()); }

}  // namespace afl
