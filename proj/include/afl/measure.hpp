#pragma once

#include <functional>
#include <vector>

#include "afl/padic.hpp"

namespace afl {

/// Norm-one elements of F, one for each class of F^1 modulo pi^m.
/// Each representative has norm exactly 1 to working precision.
const std::vector<FElem>& norm_one_representatives(const PadicContext& c, long m);

/// Number of classes of F^1 modulo pi^m.
long norm_one_class_count(const PadicContext& c, long m);

using F1Condition = std::function<bool(const FElem&)>;
using UnitCondition = std::function<bool(const F0Elem&)>;

/// Haar measure (total mass 1) of {x in F^1 : cond(x)} where cond depends only
/// on x mod pi^m.  Evaluated at levels m and m+1; a mismatch throws.
mpq_class f1_measure(const PadicContext& c, long m, const F1Condition& cond);

/// Same count at a single level, without the stabilization certificate.
mpq_class f1_measure_at_level(const PadicContext& c, long m, const F1Condition& cond);

/// Units of Z_p, one per class mod p^m (m >= 1), as integers in [1, p^m).
std::vector<F0Elem> unit_representatives(const PadicContext& c, long m);

/// Measure of {u in Z_p^x : cond(u)}, total mass 1, cond depending on u mod
/// p^m.  Certified by comparing levels m and m+1.
mpq_class shell_measure(const PadicContext& c, long m, const UnitCondition& cond);

/// Integral of eta(p^k u) over {u in Z_p^x : cond(u)}, cond depending on u mod
/// p^m; no certificate (callers choose m from the condition).
GaussQ shell_eta_integral(const PadicContext& c, long k, long m, const UnitCondition& cond);

}  // namespace afl
