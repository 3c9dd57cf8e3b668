#pragma once

#include <initializer_list>
#include <vector>

#include "afl/matrix.hpp"
#include "afl/padic.hpp"

namespace afl {

using FMat = Mat<FElem>;

FMat fmat_zero(const PadicContext& c, int rows, int cols);
FMat fmat_identity(const PadicContext& c, int n);
FMat fmat_diag(const std::vector<FElem>& d);
FMat fmat(const PadicContext& c, std::initializer_list<std::initializer_list<FElem>> rows);

FMat conj(const FMat& m);
/// conj(m)^T
FMat conj_transpose(const FMat& m);
FElem det(const FMat& m);
FMat inverse(const FMat& m);

bool is_integral(const FMat& m);
/// Integral with unit determinant.
bool is_unimodular(const FMat& m);
/// Minimum of v_F over entries (kInfVal for the zero matrix).
long min_valuation(const FMat& m);
/// Entrywise v_F(m_ij - n_ij) >= k.
bool congruent(const FMat& m, const FMat& n, long k);

}  // namespace afl
