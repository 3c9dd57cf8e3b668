#include "afl/measure.hpp"

#include "context_cache.hpp"

namespace afl {

namespace {

std::vector<FElem> build_norm_one_reps(const PadicContext& c, long m) {
  std::vector<FElem> reps;
  const long p = c.p();
  if (m <= 0) {
    reps.push_back(FElem::from_int(c, 1));
    return reps;
  }
  F0Elem one = F0Elem::from_int(c, 1);
  if (c.ramified()) {
    long h = m / 2;
    long count = 1;
    for (long i = 0; i < h; ++i) count *= p;
    for (long x1 = 0; x1 < count; ++x1) {
      F0Elem y = F0Elem::from_int(c, x1);
      F0Elem t = one + F0Elem::p_power(c, 1) * y * y;
      auto r = t.sqrt();
      if (!r) throw PreconditionViolated("norm-one square root failed");
      reps.emplace_back(*r, y);
      reps.emplace_back(-*r, y);
    }
    return reps;
  }
  F0Elem eps = F0Elem::from_int(c, c.epsilon());
  long pm = 1;
  for (long i = 0; i < m; ++i) pm *= p;
  for (long x1 = 0; x1 < pm; ++x1) {
    F0Elem y = F0Elem::from_int(c, x1);
    F0Elem t = one + eps * y * y;
    if (!t.is_unit()) continue;
    auto r = t.sqrt();
    if (!r) continue;
    reps.emplace_back(*r, y);
    reps.emplace_back(-*r, y);
  }
  for (long j = 0; j < pm / p; ++j) {
    F0Elem x0 = F0Elem::from_int(c, j * p);
    F0Elem s = (x0 * x0 - one) / eps;
    auto r = s.sqrt();
    if (!r) continue;
    reps.emplace_back(x0, *r);
    reps.emplace_back(x0, -*r);
  }
  return reps;
}

}  // namespace

long norm_one_class_count(const PadicContext& c, long m) {
  if (m <= 0) return 1;
  long p = c.p();
  long r = 1;
  if (c.ramified()) {
    for (long i = 0; i < m / 2; ++i) r *= p;
    return 2 * r;
  }
  for (long i = 0; i < m - 1; ++i) r *= p;
  return (p + 1) * r;
}

const std::vector<FElem>& norm_one_representatives(const PadicContext& c, long m) {
  auto& cache = c.cache();
  std::lock_guard<std::mutex> lock(cache.mu);
  auto it = cache.norm_one_reps.find(m);
  if (it != cache.norm_one_reps.end()) return it->second;
  std::vector<FElem> reps = build_norm_one_reps(c, m);
  if (static_cast<long>(reps.size()) != norm_one_class_count(c, m))
    throw PreconditionViolated("norm-one enumeration produced an unexpected class count");
  return cache.norm_one_reps.emplace(m, std::move(reps)).first->second;
}

mpq_class f1_measure_at_level(const PadicContext& c, long m, const F1Condition& cond) {
  const auto& reps = norm_one_representatives(c, m);
  long hits = 0;
  for (const auto& x : reps)
    if (cond(x)) ++hits;
  mpq_class r(hits, static_cast<long>(reps.size()));
  r.canonicalize();
  return r;
}

mpq_class f1_measure(const PadicContext& c, long m, const F1Condition& cond) {
  if (m > c.precision() - c.guard()) throw InsufficientPrecision("measure level exceeds precision budget");
  mpq_class a = f1_measure_at_level(c, m, cond);
  mpq_class b = f1_measure_at_level(c, m + 1, cond);
  if (a != b) throw InsufficientPrecision("F^1 measure did not stabilize between levels");
  return a;
}

std::vector<F0Elem> unit_representatives(const PadicContext& c, long m) {
  if (m < 1) m = 1;
  std::vector<F0Elem> out;
  const mpz_class& pm = c.ppow(m);
  long n = pm.get_si();
  out.reserve(static_cast<size_t>(n - n / c.p()));
  for (long u = 1; u < n; ++u)
    if (u % c.p() != 0) out.push_back(F0Elem::from_int(c, u));
  return out;
}

namespace {

mpq_class shell_measure_at(const PadicContext& c, long m, const UnitCondition& cond) {
  auto reps = unit_representatives(c, m);
  long hits = 0;
  for (const auto& u : reps)
    if (cond(u)) ++hits;
  mpq_class r(hits, static_cast<long>(reps.size()));
  r.canonicalize();
  return r;
}

}  // namespace

mpq_class shell_measure(const PadicContext& c, long m, const UnitCondition& cond) {
  if (m > c.precision() - c.guard()) throw InsufficientPrecision("measure level exceeds precision budget");
  mpq_class a = shell_measure_at(c, m, cond);
  mpq_class b = shell_measure_at(c, m + 1, cond);
  if (a != b) throw InsufficientPrecision("shell measure did not stabilize between levels");
  return a;
}

GaussQ shell_eta_integral(const PadicContext& c, long k, long m, const UnitCondition& cond) {
  auto reps = unit_representatives(c, m);
  mpq_class total = 0;
  F0Elem pk = F0Elem::p_power(c, k);
  for (const auto& u : reps)
    if (cond(u)) total += eta(pk * u);
  total /= static_cast<long>(reps.size());
  return GaussQ(total);
}

}  // namespace afl
