#include "afl/fmat.hpp"

namespace afl {

FMat fmat_zero(const PadicContext& c, int rows, int cols) { return FMat(rows, cols, FElem::zero(c)); }

FMat fmat_identity(const PadicContext& c, int n) {
  return FMat::identity(n, FElem::zero(c), FElem::from_int(c, 1));
}

FMat fmat_diag(const std::vector<FElem>& d) {
  const int n = static_cast<int>(d.size());
  FMat m = fmat_zero(d.at(0).ctx(), n, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[static_cast<size_t>(i)];
  return m;
}

FMat fmat(const PadicContext& c, std::initializer_list<std::initializer_list<FElem>> rows) {
  const int r = static_cast<int>(rows.size());
  const int cols = static_cast<int>(rows.begin()->size());
  FMat m = fmat_zero(c, r, cols);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != cols) throw PreconditionViolated("ragged matrix literal");
    int j = 0;
    for (const auto& x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

FMat conj(const FMat& m) {
  return m.map([](const FElem& x) { return x.conj(); });
}

FMat conj_transpose(const FMat& m) { return conj(m).transpose(); }

FElem det(const FMat& m) { return determinant(m); }

FMat inverse(const FMat& m) {
  if (m.rows() != m.cols()) throw PreconditionViolated("inverse of a non-square matrix");
  FElem d = det(m);
  if (!d.is_nonzero()) throw ZeroInput("singular matrix");
  FElem di = d.inverse();
  if (m.rows() == 1) return fmat(m(0, 0).ctx(), {{di}});
  return di * adjugate(m);
}

bool is_integral(const FMat& m) {
  return m.all_of([](const FElem& x) { return x.is_integral(); });
}

bool is_unimodular(const FMat& m) { return is_integral(m) && det(m).is_unit(); }

long min_valuation(const FMat& m) {
  long best = kInfVal;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) best = std::min(best, m(i, j).valuation());
  return best;
}

bool congruent(const FMat& m, const FMat& n, long k) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!(m(i, j) - n(i, j)).val_at_least(k)) return false;
  return true;
}

}  // namespace afl
