#include "afl/local_model.hpp"

#include <algorithm>
#include <climits>

#include "afl/errors.hpp"

namespace afl {

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

long pmod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

long inv_mod(long a, long m) {
  if (m == 1) return 0;
  long r0 = m, r1 = pmod(a, m), s0 = 0, s1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    long t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (r0 != 1) throw PreconditionViolated("residue is not invertible");
  return pmod(s0, m);
}

int vp(long c, long p) {
  int v = 0;
  while (c % p == 0) {
    c /= p;
    ++v;
  }
  return v;
}

long mpz_mod(const mpz_class& v, long m) { return static_cast<long>(mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(m))); }

// Rank over F_p of an integer matrix.
int rank_mod_p(std::vector<std::vector<long>> a, long p) {
  const int rows = static_cast<int>(a.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(a[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (pmod(a[i][c], p) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    long inv = inv_mod(a[rank][c], p);
    for (int i = 0; i < rows; ++i) {
      if (i == rank) continue;
      long f = pmod(a[i][c] * inv, p);
      if (f == 0) continue;
      for (int k = 0; k < cols; ++k) a[i][k] = pmod(a[i][k] - f * a[rank][k], p);
    }
    ++rank;
  }
  return rank;
}

// A nonzero vector c over F_p with a c = 0, or empty if the columns are independent.
std::vector<long> column_dependency_mod_p(const std::vector<std::vector<long>>& a, long p) {
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  std::vector<std::vector<long>> w = a;
  std::vector<int> pivot_col;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (pmod(w[i][c], p) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(w[piv], w[rank]);
    long inv = inv_mod(w[rank][c], p);
    for (int k = 0; k < cols; ++k) w[rank][k] = pmod(w[rank][k] * inv, p);
    for (int i = 0; i < rows; ++i) {
      if (i == rank) continue;
      long f = pmod(w[i][c], p);
      if (f == 0) continue;
      for (int k = 0; k < cols; ++k) w[i][k] = pmod(w[i][k] - f * w[rank][k], p);
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (int f = 0; f < cols; ++f) {
    if (std::find(pivot_col.begin(), pivot_col.end(), f) != pivot_col.end()) continue;
    std::vector<long> c(static_cast<size_t>(cols), 0);
    c[f] = 1;
    for (int k = 0; k < rank; ++k) c[pivot_col[k]] = pmod(-w[k][f], p);
    return c;
  }
  return {};
}

template <class T>
using RT = RingTraits<T>;

long pivot_score(const RElem& x) { return x.is_unit() ? 0 : LONG_MAX; }

long pivot_score(const FElem& x) {
  long s = LONG_MAX;
  if (x.x0().is_regular()) s = std::min(s, 2 * x.x0().valuation());
  if (x.x1().is_regular()) s = std::min(s, 2 * x.x1().valuation() + 1);
  return s;
}

template <class T>
T ring_zero(const T& like) {
  return RT<T>::from_rational(RT<T>::ring_of(like), 0);
}

template <class T>
T ring_one(const T& like) {
  return RT<T>::from_rational(RT<T>::ring_of(like), 1);
}

template <class T>
Mat<T> rows_of(const Mat<T>& g, const std::vector<int>& rows) {
  Mat<T> s(static_cast<int>(rows.size()), g.cols(), g(0, 0));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (int j = 0; j < g.cols(); ++j) s(i, j) = g(rows[i], j);
  return s;
}

template <class T>
Mat<T> cols_of(const Mat<T>& g, const std::vector<int>& cols) {
  Mat<T> s(g.rows(), static_cast<int>(cols.size()), g(0, 0));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) s(i, j) = g(i, cols[j]);
  return s;
}

template <class T>
Mat<T> invert(const Mat<T>& a) {
  T d = determinant(a);
  if (!RT<T>::is_unit(d)) throw PreconditionViolated("matrix is not invertible");
  T di = RT<T>::inverse(d);
  if (a.rows() == 1) return Mat<T>(1, 1, di);
  return di * adjugate(a);
}

template <class T>
Mat<T> identity_like(int n, const T& like) {
  return Mat<T>::identity(n, ring_zero(like), ring_one(like));
}

template <class T>
bool is_zero_matrix(const Mat<T>& m) {
  return m.all_of([](const T& x) { return RT<T>::is_zero(x); });
}

// Coefficients c with g c = v (g a direct summand).
template <class T>
Mat<T> coefficients(const Mat<T>& g, const Mat<T>& v) {
  std::vector<int> piv = summand_pivots(g);
  if (piv.empty()) throw PreconditionViolated("columns do not span a direct summand");
  return invert(rows_of(g, piv)) * rows_of(v, piv);
}

template <class T>
using Poly = std::vector<T>;

template <class T>
Poly<T> poly_mul(const Poly<T>& a, const Poly<T>& b) {
  Poly<T> r(a.size() + b.size() - 1, ring_zero(a[0]));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

template <class T>
Poly<T> poly_add(Poly<T> a, const Poly<T>& b, bool subtract) {
  if (a.size() < b.size()) a.resize(b.size(), ring_zero(b[0]));
  for (size_t i = 0; i < b.size(); ++i) {
    if (subtract)
      a[i] -= b[i];
    else
      a[i] += b[i];
  }
  return a;
}

template <class T>
Poly<T> poly_det(const std::vector<std::vector<Poly<T>>>& m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly<T> acc{ring_zero(m[0][0][0])};
  for (size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Poly<T>>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Poly<T>> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(row);
    }
    acc = poly_add(acc, poly_mul(m[0][j], poly_det(minor)), j % 2 == 1);
  }
  return acc;
}

template <class T>
bool poly_equal(Poly<T> a, Poly<T> b) {
  size_t n = std::max(a.size(), b.size());
  a.resize(n, ring_zero(a[0]));
  b.resize(n, ring_zero(b[0]));
  for (size_t i = 0; i < n; ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.push_back(i);
    out.push_back(s);
  }
  return out;
}

template <class T>
bool all_minors_vanish(const Mat<T>& m, int k) {
  if (k > m.rows() || k > m.cols()) return true;
  for (const auto& rs : subsets(m.rows(), k))
    for (const auto& cs : subsets(m.cols(), k))
      if (!RT<T>::is_zero(determinant(cols_of(rows_of(m, rs), cs)))) return false;
  return true;
}

template <class T>
Mat<T> op_minus_pi(const ChainContext& ctx, const T& like) {
  const auto& ring = RT<T>::ring_of(like);
  Mat<T> p = to_ring<T>(ctx.pi_action(), ring);
  return p - RT<T>::pi(ring) * identity_like(2 * ctx.n(), like);
}

// F_{-j} as the annihilator of F_j under <,>_j, in the basis of Lambda_{-j}.
template <class T>
Mat<T> dual_point(const ChainContext& ctx, int j, const Mat<T>& g) {
  const auto& ring = RT<T>::ring_of(g(0, 0));
  return kernel(Mat<T>(g.transpose() * to_ring<T>(ctx.pairing(j), ring)));
}

template <class T>
ConditionResult naive_chain(const ChainContext& ctx, int jj, const Mat<T>& g) {
  ConditionResult res{Condition::Naive, true, true, ""};
  const auto& ring = RT<T>::ring_of(g(0, 0));
  const int n = ctx.n();
  if (jj == 0 || jj == ctx.m()) {
    Mat<mpq_class> form = jj == 0 ? ctx.pairing(0) : ctx.symmetric_form();
    if (!is_zero_matrix(Mat<T>(g.transpose() * to_ring<T>(form, ring) * g))) {
      res.pass = false;
      res.witness = "F is not Lagrangian for the index-" + std::to_string(jj) + " form";
    }
    return res;
  }
  Mat<T> dual = dual_point(ctx, jj, g);
  std::vector<int> idx;
  for (int i = -n; i <= n; ++i)
    if (pmod(i - jj, n) == 0 || pmod(i + jj, n) == 0) idx.push_back(i);
  for (size_t k = 0; k + 1 < idx.size(); ++k) {
    int a = idx[k], b = idx[k + 1];
    const Mat<T>& fa = pmod(a - jj, n) == 0 ? g : dual;
    const Mat<T>& fb = pmod(b - jj, n) == 0 ? g : dual;
    if (!span_contains(fb, Mat<T>(to_ring<T>(ctx.chain_map(a, b), ring) * fa))) {
      res.pass = false;
      res.witness = "Lambda_" + std::to_string(a) + " -> Lambda_" + std::to_string(b) + " does not carry F into F";
      return res;
    }
  }
  return res;
}

// Square root of a unit of O_F/pi^k: residue search, then Newton iteration.
std::optional<RElem> unit_sqrt(const RElem& d) {
  const ResidueRing& r = d.ring();
  long p = r.p();
  long target = d.residue();
  for (long x = 1; x < p; ++x) {
    if (pmod(x * x - target, p) != 0) continue;
    RElem y(r, x);
    RElem two(r, 2);
    for (int it = 0; it <= r.k(); ++it) y = y - (y * y - d) * (two * y).inverse();
    if (y * y == d) return y;
  }
  return std::nullopt;
}

RElem form_value(const Mat<RElem>& s, const Mat<RElem>& u, const Mat<RElem>& v) {
  return (u.transpose() * s * v)(0, 0);
}

}  // namespace

// ---- ResidueRing / RElem ------------------------------------------------------

ResidueRing::ResidueRing(long p, int k) : p_(p), k_(k) {
  if (k < 1 || k > 8) throw PreconditionViolated("O_F/pi^k needs 1 <= k <= 8");
  if (p < 3) throw PreconditionViolated("residue rings need an odd prime");
  mod0_ = ipow(p, (k + 1) / 2);
  mod1_ = ipow(p, k / 2);
}

RElem::RElem(const ResidueRing& r, long c0, long c1)
    : ring_(&r), c0_(pmod(c0, r.mod0())), c1_(r.mod1() == 1 ? 0 : pmod(c1, r.mod1())) {}

RElem RElem::from_rational(const ResidueRing& r, const mpq_class& v) {
  long den = mpz_mod(v.get_den(), r.mod0());
  if (den % r.p() == 0) throw NonIntegral("rational with p in the denominator");
  return RElem(r, mpz_mod(v.get_num(), r.mod0()) * inv_mod(den, r.mod0()));
}

RElem RElem::from_f(const ResidueRing& r, const FElem& x) {
  if (!x.ctx().ramified() || x.ctx().p() != r.p()) throw PreconditionViolated("expected the ramified field with the same p");
  long c0 = x.x0().residue_mod((r.k() + 1) / 2).get_si();
  long c1 = x.x1().residue_mod(r.k() / 2).get_si();
  return RElem(r, c0, c1);
}

int RElem::valuation() const {
  if (is_zero()) return ring_->k();
  int v = INT_MAX;
  if (c0_ != 0) v = 2 * vp(c0_, ring_->p());
  if (c1_ != 0) v = std::min(v, 2 * vp(c1_, ring_->p()) + 1);
  return std::min(v, ring_->k());
}

RElem RElem::inverse() const {
  if (!is_unit()) throw PreconditionViolated("inverse of a non-unit in O_F/pi^k");
  long m0 = ring_->mod0();
  long norm = pmod(c0_ * c0_ - ring_->p() * pmod(c1_ * c1_, m0), m0);
  long ninv = inv_mod(norm, m0);
  return RElem(*ring_, c0_ * ninv, -c1_ * ninv);
}

RElem& RElem::operator+=(const RElem& o) {
  *this = RElem(*ring_, c0_ + o.c0_, c1_ + o.c1_);
  return *this;
}

RElem& RElem::operator-=(const RElem& o) {
  *this = RElem(*ring_, c0_ - o.c0_, c1_ - o.c1_);
  return *this;
}

RElem& RElem::operator*=(const RElem& o) {
  long m0 = ring_->mod0();
  long n0 = pmod(c0_ * o.c0_ + ring_->p() * pmod(c1_ * o.c1_, m0), m0);
  long n1 = c0_ * o.c1_ + c1_ * o.c0_;
  *this = RElem(*ring_, n0, n1);
  return *this;
}

std::string RElem::to_string() const { return std::to_string(c0_) + "+" + std::to_string(c1_) + "pi"; }

RElem operator+(RElem a, const RElem& b) { return a += b; }
RElem operator-(RElem a, const RElem& b) { return a -= b; }
RElem operator*(RElem a, const RElem& b) { return a *= b; }
bool operator==(const RElem& a, const RElem& b) { return a.c0() == b.c0() && a.c1() == b.c1(); }

int RingTraits<RElem>::point_rank(const Mat<RElem>& m) {
  std::vector<std::vector<long>> a(static_cast<size_t>(m.rows()), std::vector<long>(static_cast<size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a[i][j] = m(i, j).residue();
  return rank_mod_p(a, m(0, 0).ring().p());
}

int RingTraits<FElem>::point_rank(const Mat<FElem>& m) {
  Mat<FElem> w = m;
  const int rows = w.rows(), cols = w.cols();
  std::vector<bool> used(static_cast<size_t>(rows), false);
  int rank = 0;
  for (int c = 0; c < cols; ++c) {
    int best = -1;
    long score = LONG_MAX;
    for (int i = 0; i < rows; ++i)
      if (!used[i] && is_unit(w(i, c)) && pivot_score(w(i, c)) < score) {
        score = pivot_score(w(i, c));
        best = i;
      }
    if (best < 0) continue;
    used[best] = true;
    ++rank;
    FElem inv = w(best, c).inverse();
    for (int c2 = c + 1; c2 < cols; ++c2) {
      FElem f = w(best, c2) * inv;
      if (is_zero(f)) continue;
      for (int i = 0; i < rows; ++i) w(i, c2) -= f * w(i, c);
    }
  }
  return rank;
}

// ---- generic linear algebra ---------------------------------------------------

template <class T>
Mat<T> to_ring(const Mat<mpq_class>& m, const typename RingTraits<T>::Ring& r) {
  Mat<T> out(m.rows(), m.cols(), RT<T>::from_rational(r, 0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = RT<T>::from_rational(r, m(i, j));
  return out;
}

template <class T>
std::vector<int> summand_pivots(const Mat<T>& g) {
  Mat<T> w = g;
  const int rows = w.rows(), cols = w.cols();
  std::vector<bool> used(static_cast<size_t>(rows), false);
  std::vector<int> piv;
  for (int c = 0; c < cols; ++c) {
    int best = -1;
    long score = LONG_MAX;
    for (int i = 0; i < rows; ++i)
      if (!used[i] && RT<T>::is_unit(w(i, c)) && pivot_score(w(i, c)) < score) {
        score = pivot_score(w(i, c));
        best = i;
      }
    if (best < 0) return {};
    used[best] = true;
    piv.push_back(best);
    T inv = RT<T>::inverse(w(best, c));
    for (int c2 = c + 1; c2 < cols; ++c2) {
      T f = w(best, c2) * inv;
      if (RT<T>::is_zero(f)) continue;
      for (int i = 0; i < rows; ++i) w(i, c2) -= f * w(i, c);
    }
  }
  return piv;
}

template <class T>
bool span_contains(const Mat<T>& g, const Mat<T>& h) {
  return g * coefficients(g, h) == h;
}

template <class T>
bool same_span(const Mat<T>& g, const Mat<T>& h) {
  if (g.rows() != h.rows() || g.cols() != h.cols()) return false;
  if (summand_pivots(g).empty() || summand_pivots(h).empty()) return false;
  return span_contains(g, h) && span_contains(h, g);
}

template <class T>
Mat<T> kernel(const Mat<T>& a) {
  const int r = a.rows(), n = a.cols();
  std::vector<int> piv = summand_pivots(Mat<T>(a.transpose()));
  if (static_cast<int>(piv.size()) != r) throw PreconditionViolated("kernel needs an invertible maximal minor");
  std::vector<int> free;
  for (int j = 0; j < n; ++j)
    if (std::find(piv.begin(), piv.end(), j) == piv.end()) free.push_back(j);
  Mat<T> inv = invert(cols_of(a, piv));
  Mat<T> out(n, static_cast<int>(free.size()), ring_zero(a(0, 0)));
  for (int f = 0; f < static_cast<int>(free.size()); ++f) {
    out(free[f], f) = ring_one(a(0, 0));
    Mat<T> x = inv * a.column(free[f]);
    for (int k = 0; k < r; ++k) out(piv[k], f) = -x(k, 0);
  }
  return out;
}

template <class T>
std::vector<T> char_poly(const Mat<T>& m) {
  const int n = m.rows();
  T zero = ring_zero(m(0, 0));
  T one = ring_one(m(0, 0));
  std::vector<std::vector<Poly<T>>> pm(static_cast<size_t>(n), std::vector<Poly<T>>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pm[i][j] = i == j ? Poly<T>{-m(i, j), one} : Poly<T>{-m(i, j)};
  Poly<T> d = poly_det(pm);
  d.resize(static_cast<size_t>(n + 1), zero);
  return d;
}

// ---- ChainContext ---------------------------------------------------------------

ChainContext::ChainContext(long p, int n, int r, int s) : p_(p), n_(n), r_(r), s_(s) {
  if (n < 2 || n % 2 != 0) throw PreconditionViolated("lattice chains need even n >= 2");
  if (r < 0 || s < 0 || r + s != n) throw PreconditionViolated("signature must satisfy r + s = n");
  if (p < 3) throw PreconditionViolated("local models need an odd prime");
}

std::vector<std::pair<int, int>> ChainContext::basis(int i) const {
  long b = floor_div(i, n_);
  int c = static_cast<int>(i - b * n_);
  std::vector<std::pair<int, int>> out;
  for (int j = 1; j <= n_; ++j) out.emplace_back(j, static_cast<int>(j <= c ? -b - 1 : -b));
  for (int j = 1; j <= n_; ++j) out.emplace_back(j, out[j - 1].second + 1);
  return out;
}

mpq_class ChainContext::pair_monomials(int a, int i, int b, int j) const {
  if (i + j != n_ + 1) return 0;
  int k = a + b - 1;
  if (pmod(k, 2) != 0) return 0;
  int e = k / 2;
  mpq_class v = 1;
  mpz_class pe;
  mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(e < 0 ? -e : e));
  v = e < 0 ? mpq_class(1, pe) : mpq_class(pe);
  return pmod(b, 2) ? mpq_class(-v) : v;
}

std::vector<mpq_class> ChainContext::coordinates(int i, int j, int t) const {
  int s = basis(i)[static_cast<size_t>(j - 1)].second;
  int d = t - s;
  if (d < 0) throw NotInDomain("vector outside Lambda_" + std::to_string(i));
  std::vector<mpq_class> v(static_cast<size_t>(2 * n_), 0);
  if (d % 2 == 0)
    v[static_cast<size_t>(j - 1)] = ipow(p_, d / 2);
  else
    v[static_cast<size_t>(n_ + j - 1)] = ipow(p_, (d - 1) / 2);
  return v;
}

Mat<mpq_class> ChainContext::pairing(int i) const {
  auto bi = basis(i), bd = basis(-i);
  Mat<mpq_class> m(2 * n_, 2 * n_, 0);
  for (int k = 0; k < 2 * n_; ++k)
    for (int l = 0; l < 2 * n_; ++l) m(k, l) = pair_monomials(bi[k].second, bi[k].first, bd[l].second, bd[l].first);
  return m;
}

Mat<mpq_class> ChainContext::self_pairing(int i) const {
  auto bi = basis(i);
  Mat<mpq_class> m(2 * n_, 2 * n_, 0);
  for (int k = 0; k < 2 * n_; ++k)
    for (int l = 0; l < 2 * n_; ++l) m(k, l) = pair_monomials(bi[k].second, bi[k].first, bi[l].second, bi[l].first);
  return m;
}

Mat<mpq_class> ChainContext::chain_map(int i, int j) const {
  if (j < i) throw PreconditionViolated("chain maps go from Lambda_i to Lambda_j with i <= j");
  auto bi = basis(i);
  Mat<mpq_class> m(2 * n_, 2 * n_, 0);
  for (int k = 0; k < 2 * n_; ++k) {
    auto v = coordinates(j, bi[k].first, bi[k].second);
    for (int l = 0; l < 2 * n_; ++l) m(l, k) = v[l];
  }
  return m;
}

Mat<mpq_class> ChainContext::pi_action() const {
  auto b0 = basis(0);
  Mat<mpq_class> m(2 * n_, 2 * n_, 0);
  for (int k = 0; k < 2 * n_; ++k) {
    auto v = coordinates(0, b0[k].first, b0[k].second + 1);
    for (int l = 0; l < 2 * n_; ++l) m(l, k) = v[l];
  }
  return m;
}

Mat<mpq_class> ChainContext::pi_transport(int i) const {
  auto bi = basis(i);
  Mat<mpq_class> m(2 * n_, 2 * n_, 0);
  for (int k = 0; k < 2 * n_; ++k) {
    auto v = coordinates(i - n_, bi[k].first, bi[k].second + 1);
    for (int l = 0; l < 2 * n_; ++l) m(l, k) = v[l];
  }
  return m;
}

Mat<mpq_class> ChainContext::symmetric_form() const { return pairing(m()) * pi_transport(m()); }

// ---- conditions ---------------------------------------------------------------------

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Naive:
      return "naive";
    case Condition::Kottwitz:
      return "kottwitz";
    case Condition::Wedge:
      return "wedge";
    case Condition::Spin:
      return "spin";
    case Condition::RankSpin:
      return "rank-spin";
  }
  return "?";
}

const ConditionResult& ConditionReport::get(Condition c) const {
  for (const auto& r : results)
    if (r.which == c) return r;
  throw PreconditionViolated("condition " + to_string(c) + " was not evaluated");
}

bool ConditionReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const ConditionResult& r) { return !r.applicable || r.pass; });
}

template <class T>
int spin_rank(const ChainContext& ctx, const ChainPointT<T>& pt) {
  return RT<T>::point_rank(Mat<T>(op_minus_pi(ctx, pt.gens(0, 0)) * pt.gens));
}

template <class T>
ConditionReport check_conditions(const ChainContext& ctx, const ChainPointT<T>& pt,
                                 const std::vector<Condition>& which) {
  const int n = ctx.n();
  const Mat<T>& g = pt.gens;
  if (g.rows() != 2 * n || g.cols() != n) throw PreconditionViolated("a chain point has a 2n x n generator matrix");
  const auto& ring = RT<T>::ring_of(g(0, 0));
  const T pi = RT<T>::pi(ring);
  const int jj = static_cast<int>(pmod(pt.index, n));
  Mat<T> p = to_ring<T>(ctx.pi_action(), ring);
  const bool summand = !summand_pivots(g).empty();
  bool stable = false;
  Mat<T> action;
  if (summand) {
    action = coefficients(g, Mat<T>(p * g));
    stable = g * action == p * g;
  }

  ConditionReport report;
  for (Condition c : which) {
    ConditionResult res{c, true, false, ""};
    const bool structured = summand && stable;
    if (!structured && c != Condition::Spin && c != Condition::RankSpin) {
      res.witness = summand ? "F is not O_F-stable" : "F is not a direct summand of rank n";
      report.results.push_back(res);
      continue;
    }
    switch (c) {
      case Condition::Naive:
        res = naive_chain(ctx, jj, g);
        break;
      case Condition::Kottwitz: {
        Poly<T> target{ring_one(pi)};
        for (int k = 0; k < ctx.r(); ++k) target = poly_mul(target, Poly<T>{-pi, ring_one(pi)});
        for (int k = 0; k < ctx.s(); ++k) target = poly_mul(target, Poly<T>{pi, ring_one(pi)});
        res.pass = poly_equal(char_poly(action), target);
        if (!res.pass) res.witness = "characteristic polynomial of pi differs from (T-pi)^r (T+pi)^s";
        break;
      }
      case Condition::Wedge: {
        Mat<T> id = identity_like(n, pi);
        bool minus = all_minors_vanish(Mat<T>(action - pi * id), ctx.s() + 1);
        bool plus = all_minors_vanish(Mat<T>(action + pi * id), ctx.r() + 1);
        res.pass = minus && plus;
        if (!minus) res.witness = "an (s+1)-minor of pi(x)1 - 1(x)pi is nonzero";
        if (minus && !plus) res.witness = "an (r+1)-minor of pi(x)1 + 1(x)pi is nonzero";
        break;
      }
      case Condition::Spin:
      case Condition::RankSpin: {
        res.applicable = jj == ctx.m() && (c == Condition::Spin || ctx.s() == 1);
        if (!res.applicable) {
          res.witness = "not evaluated at this index";
          break;
        }
        int rank = spin_rank(ctx, pt);
        res.pass = c == Condition::Spin ? rank % 2 == ctx.r() % 2 : rank == 1;
        res.witness = "rank " + std::to_string(rank);
        break;
      }
    }
    report.results.push_back(res);
  }
  return report;
}

// ---- nu -----------------------------------------------------------------------------

NuResult nu_map(const ChainContext& ctx, const ChainPoint& pt) {
  const int n = ctx.n(), m = ctx.m();
  if (pmod(pt.index, n) != m - 1) throw PreconditionViolated("nu takes a point at index m - 1");
  const ResidueRing& ring = pt.gens(0, 0).ring();
  Mat<RElem> tmap = to_ring<RElem>(ctx.transition(m - 1), ring);
  Mat<RElem> sform = to_ring<RElem>(ctx.symmetric_form(), ring);
  Mat<RElem> pmat = to_ring<RElem>(ctx.pi_action(), ring);
  Mat<RElem> image = tmap * pt.gens;

  // Column-reduce the image with unit pivots; the pivot columns span a summand.
  Mat<RElem> work = image;
  std::vector<bool> used(static_cast<size_t>(2 * n), false);
  int rank = 0;
  for (int c = 0; c < n; ++c) {
    int prow = -1, pcol = -1;
    for (int j = c; j < n && prow < 0; ++j)
      for (int i = 0; i < 2 * n; ++i)
        if (!used[i] && work(i, j).is_unit()) {
          prow = i;
          pcol = j;
          break;
        }
    if (prow < 0) break;
    work.swap_cols(c, pcol);
    used[prow] = true;
    RElem inv = work(prow, c).inverse();
    for (int c2 = c + 1; c2 < n; ++c2) {
      RElem f = work(prow, c2) * inv;
      for (int i = 0; i < 2 * n; ++i) work(i, c2) -= f * work(i, c);
    }
    ++rank;
  }
  if (rank < n - 1) throw PreconditionViolated("T_{m-1}(F_{m-1}) has rank below n - 1 at the closed point");
  Mat<RElem> core = work.block(0, 0, 2 * n, n - 1);
  if (!is_zero_matrix(Mat<RElem>(core.transpose() * sform * core)))
    throw PreconditionViolated("T_{m-1}(F_{m-1}) is not totally isotropic");

  // Two vectors completing the core to a basis of its orthogonal.
  Mat<RElem> perp = kernel(Mat<RElem>(core.transpose() * sform));
  Mat<RElem> span = core;
  std::vector<Mat<RElem>> extra;
  for (int k = 0; k < perp.cols() && extra.size() < 2; ++k) {
    Mat<RElem> cand = span.hcat(perp.column(k));
    if (summand_pivots(cand).empty()) continue;
    span = cand;
    extra.push_back(perp.column(k));
  }
  if (extra.size() < 2) throw PreconditionViolated("orthogonal of T_{m-1}(F_{m-1}) has the wrong rank");
  Mat<RElem> w1 = extra[0], w2 = extra[1];
  auto q = [&](const Mat<RElem>& u, const Mat<RElem>& v) { return form_value(sform, u, v); };
  if (!q(w1, w1).is_unit() && !q(w2, w2).is_unit()) w1 = w1 + w2;
  if (!q(w1, w1).is_unit()) std::swap(w1, w2);
  RElem a = q(w1, w1), b = q(w1, w2), c = q(w2, w2);
  RElem disc = b * b - a * c;
  if (!disc.is_unit()) throw NoSplitComplement("degenerate rank-2 quotient");
  std::optional<RElem> root = unit_sqrt(disc);
  if (!root) throw NoSplitComplement("rank-2 quotient has no isotropic vector");
  RElem ainv = a.inverse();
  std::array<Mat<RElem>, 2> branch;
  branch[0] = core.hcat(Mat<RElem>(((-b + *root) * ainv) * w1 + w2));
  branch[1] = core.hcat(Mat<RElem>(((-b - *root) * ainv) * w1 + w2));

  NuResult res;
  int chosen = -1;
  for (int k = 0; k < 2; ++k) {
    res.branch_ranks[k] = spin_rank(ctx, ChainPoint{m, branch[k]});
    if (res.branch_ranks[k] % 2 == ctx.r() % 2) {
      ++res.passing_branches;
      chosen = k;
    }
  }
  if (res.passing_branches != 1) throw PreconditionViolated("spin does not single out one Lagrangian extension");
  const Mat<RElem>& lag = branch[chosen];
  res.point = ChainPoint{pt.index + 1, lag};
  res.contains_image = span_contains(lag, image);
  res.lagrangian = is_zero_matrix(Mat<RElem>(lag.transpose() * sform * lag));
  res.pi_stable = span_contains(lag, Mat<RElem>(pmat * lag));
  Mat<RElem> next = dual_point(ctx, m - 1, pt.gens);
  res.maps_into_next = span_contains(next, Mat<RElem>(to_ring<RElem>(ctx.transition(m), ring) * lag));
  return res;
}

// ---- charts ---------------------------------------------------------------------------

ChainPoint chart_point(int index, const Mat<RElem>& x) {
  const int n = x.rows();
  return ChainPoint{index, x.vcat(identity_like(n, x(0, 0)))};
}

std::optional<Mat<RElem>> chart_coordinates(const ChainPoint& pt) {
  const int n = pt.gens.cols();
  Mat<RElem> lower = pt.gens.block(n, 0, n, n);
  if (!determinant(lower).is_unit()) return std::nullopt;
  return pt.gens.block(0, 0, n, n) * invert(lower);
}

ChainPoint worst_point(const ChainContext& ctx, const ResidueRing& r, int index) {
  return chart_point(index, Mat<RElem>(ctx.n(), ctx.n(), RElem(r, 0)));
}

ChainPoint nu_closed_form(const ChainContext& ctx, const Mat<RElem>& x) {
  const int n = ctx.n(), m = ctx.m();
  if (n < 4 || ctx.s() != 1) throw PreconditionViolated("closed form needs n >= 4 and signature (n-1, 1)");
  const RElem zero = ring_zero(x(0, 0)), one = ring_one(x(0, 0));
  Mat<RElem> out(2 * n, n, zero);
  const int mid = m - 1;
  // R_1 = x(m-1, 0..m-2), R_2 = x(m-1, m..n-1) (0-based).
  auto r1ad = [&](int k) { return x(m - 1, m - 2 - k); };
  auto r2ad = [&](int k) { return x(m - 1, n - 1 - k); };
  for (int i = 0; i < m - 1; ++i) {
    for (int j = 0; j < m - 1; ++j) out(i, j) = x(i, j);
    for (int j = m; j < n; ++j) out(i, j) = x(i, j);
  }
  for (int k = 0; k < m; ++k) out(k, mid) = r2ad(k);
  for (int i = m; i < n; ++i) {
    for (int j = 0; j < m - 1; ++j) out(i, j) = x(i, j);
    for (int j = m; j < n; ++j) out(i, j) = x(i, j);
  }
  out(m, mid) = one;
  for (int k = 0; k < m - 1; ++k) out(m + 1 + k, mid) = -r1ad(k);
  for (int k = 0; k < m - 1; ++k) out(n + k, k) = one;
  for (int j = 0; j < m - 1; ++j) out(n + m - 1, j) = x(m - 1, j);
  for (int j = m; j < n; ++j) out(n + m - 1, j) = x(m - 1, j);
  for (int k = 0; k < m; ++k) out(n + m + k, m + k) = one;
  return ChainPoint{m, out};
}

RelationReport verify_want_relations(const ChainContext& ctx, const Mat<RElem>& xm) {
  const int n = ctx.n(), m = ctx.m();
  if (n < 4 || xm.rows() != n || xm.cols() != n) throw PreconditionViolated("relations need an n x n chart point, n >= 4");
  const RElem pi = RElem::pi(xm(0, 0).ring());
  auto x = [&](int i, int j) { return xm(i - 1, j - 1); };
  auto vee = [&](int i) { return n + 1 - i; };
  RelationReport rep;
  auto check = [&](const RElem& lhs, const RElem& rhs, const std::string& label, int i, int j) {
    ++rep.checked;
    if (!(lhs == rhs)) rep.failures.push_back(label + "(" + std::to_string(i) + "," + std::to_string(j) + ")");
  };
  auto outside = [&](int i) { return i != m && i != m + 1; };
  for (int j = 1; j <= n; ++j) {
    if (!outside(j)) continue;
    for (int i = 1; i <= n; ++i) {
      if (i == j) continue;
      if (i < m) check(x(i, j), x(m + 1, j) * x(m, vee(i)), "want-1", i, j);
      if (i > m + 1) check(x(i, j), -(x(m + 1, j) * x(m, vee(i))), "want-5", i, j);
    }
    if (j < m) check(x(j, j) - pi, x(m + 1, j) * x(m, vee(j)), "want-2", j, j);
    check(-(pi * x(m, j)), x(m + 1, j) * x(m, m + 1), "want-3", m, j);
    if (j > m + 1) check(x(j, j) - pi, -(x(m + 1, j) * x(m, vee(j))), "want-4", j, j);
  }
  RElem t = x(m + 1, m + 1) - pi;
  for (int i = 1; i <= n; ++i) {
    if (i < m) check(x(i, m + 1), t * x(m, vee(i)), "m+1-1", i, m + 1);
    if (i > m + 1) check(x(i, m + 1), -(t * x(m, vee(i))), "m+1-3", i, m + 1);
  }
  check(-(pi * x(m, m + 1)), t * x(m, m + 1), "m+1-2", m, m + 1);
  RElem zero(xm(0, 0).ring(), 0);
  for (int i = 1; i <= n; ++i) {
    if (!outside(i)) continue;
    for (int j = 1; j <= n; ++j) {
      if (!outside(j)) continue;
      if (i < m && j < m)
        check(x(m + 1, i) * x(m, j) + x(vee(j), i) + x(vee(i), j) + x(m, i) * x(m + 1, j), zero, "orthog-1", i, j);
      if (i < m && j > m + 1)
        check(x(vee(j), i) - x(m + 1, i) * x(m, j) - x(vee(i), j) - x(m, i) * x(m + 1, j), zero, "orthog-2", i, j);
      if (i > m + 1 && j > m + 1)
        check(x(vee(j), i) - x(m + 1, i) * x(m, j) - x(m, i) * x(m + 1, j) + x(vee(i), j), zero, "orthog-3", i, j);
      check(x(m, i) * x(m + 1, j), x(m + 1, i) * x(m, j), "wedge-2", i, j);
    }
    if (i < m) check(x(m + 1, i) * x(m, m + 1) + x(vee(i), m + 1) + x(m, i) * x(m + 1, m + 1), zero, "orthog-col", i, m + 1);
    if (i > m + 1)
      check(-(x(m + 1, i) * x(m, m + 1)) - x(m, i) * x(m + 1, m + 1) + x(vee(i), m + 1), zero, "orthog-col", i, m + 1);
    check(x(m, i) * x(m + 1, m + 1) - x(m + 1, i) * x(m, m + 1), pi * x(m, i), "wedge-2'", m, i);
  }
  check(x(m + 1, m + 1) * x(m, m + 1), zero, "orthog-self", m + 1, m + 1);
  return rep;
}

// ---- n = 2 ----------------------------------------------------------------------------

bool gamma0_conditions(const RElem& x, const RElem& y) {
  const ResidueRing& r = x.ring();
  RElem zero(r, 0), one(r, 1), varpi(r, r.p());
  auto col = [&](const RElem& a, const RElem& b) {
    Mat<RElem> v(2, 1, a);
    v(1, 0) = b;
    return v;
  };
  // lambda_0 basis f_1, f_2; lambda_1 basis varpi^{-1} f_1, f_2.
  Mat<RElem> f0 = col(one, x), f1 = col(y, one);
  Mat<RElem> phi(2, 2, zero), phi_prime(2, 2, zero);
  phi(0, 0) = varpi;
  phi(1, 1) = one;
  phi_prime(0, 0) = one;
  phi_prime(1, 1) = varpi;
  return span_contains(f1, Mat<RElem>(phi * f0)) && span_contains(f0, Mat<RElem>(phi_prime * f1));
}

ChainPoint gamma0_image(const RElem& x, const RElem& y) {
  const ResidueRing& r = x.ring();
  RElem zero(r, 0), one(r, 1);
  // f_1 = pi e_2, f_2 = e_1 in lambda_0; varpi^{-1} f_1 = e_2, f_2 = pi e_1 in lambda_1.
  Mat<RElem> g(4, 2, zero);
  g(1, 0) = y;
  g(2, 0) = one;
  g(0, 1) = x;
  g(3, 1) = one;
  return ChainPoint{0, g};
}

// ---- flat sample points ---------------------------------------------------------------

GenericChainPoint eigen_split_point(const ChainContext& ctx, const PadicContext& pc, int index,
                                    std::mt19937_64& rng) {
  if (!pc.ramified() || pc.p() != ctx.p()) throw PreconditionViolated("generic points live over the ramified F");
  const int n = ctx.n(), r = ctx.r();
  std::uniform_int_distribution<long> coeff(-9, 9);
  auto random_f = [&]() { return FElem::from_coords(pc, coeff(rng), coeff(rng)); };
  const FElem pi = FElem::pi(pc);
  const FElem zero = FElem::zero(pc);
  Mat<FElem> self = to_ring<FElem>(ctx.self_pairing(index), pc);
  for (int attempt = 0; attempt < 100; ++attempt) {
    // W_+ = {(pi l; l)} and W_- = {(-pi l; l)} in upper/lower coordinates.
    Mat<FElem> wplus(2 * n, r, zero);
    for (int c = 0; c < r; ++c)
      for (int j = 0; j < n; ++j) {
        FElem l = random_f();
        wplus(j, c) = pi * l;
        wplus(n + j, c) = l;
      }
    Mat<FElem> embed(2 * n, n, zero);
    for (int j = 0; j < n; ++j) {
      embed(j, j) = -pi;
      embed(n + j, j) = FElem::from_int(pc, 1);
    }
    Mat<FElem> g = wplus;
    if (r < n) {
      Mat<FElem> cond = wplus.transpose() * self * embed;
      if (summand_pivots(Mat<FElem>(cond.transpose())).size() != static_cast<size_t>(r)) continue;
      Mat<FElem> lminus = r == 0 ? identity_like(n, pi) : kernel(cond);
      g = r == 0 ? Mat<FElem>(embed * lminus) : wplus.hcat(Mat<FElem>(embed * lminus));
    }
    if (RingTraits<FElem>::point_rank(g) == n) return GenericChainPoint{index, g};
  }
  throw PreconditionViolated("could not sample a generic point of full rank");
}

GenericChainPoint transport(const ChainContext& ctx, const GenericChainPoint& pt, int j) {
  const PadicContext& pc = pt.gens(0, 0).ctx();
  return GenericChainPoint{j, to_ring<FElem>(ctx.chain_map(pt.index, j), pc) * pt.gens};
}

Mat<FElem> saturate(const Mat<FElem>& g0) {
  const PadicContext& pc = g0(0, 0).ctx();
  if (!pc.ramified()) throw PreconditionViolated("saturation is implemented for the ramified F");
  Mat<FElem> g = g0;
  const int rows = g.rows(), cols = g.cols();
  const long p = pc.p();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (RingTraits<FElem>::is_zero(g(i, j))) g(i, j) = FElem::zero(pc);
  auto normalize = [&](int j) {
    long v = LONG_MAX;
    for (int i = 0; i < rows; ++i)
      if (!g(i, j).is_exact_zero()) v = std::min(v, g(i, j).valuation());
    if (v == LONG_MAX) throw PreconditionViolated("zero column in saturation");
    if (v == 0) return;
    FElem s = FElem::pi_power(pc, -v);
    for (int i = 0; i < rows; ++i) g(i, j) = s * g(i, j);
  };
  for (int j = 0; j < cols; ++j) normalize(j);
  for (int guard = 0; guard < 1000; ++guard) {
    std::vector<std::vector<long>> res(static_cast<size_t>(rows), std::vector<long>(static_cast<size_t>(cols)));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) res[i][j] = mpz_mod(g(i, j).x0().residue_mod(1), p);
    std::vector<long> dep = column_dependency_mod_p(res, p);
    if (dep.empty()) return g;
    int jpiv = 0;
    while (dep[jpiv] == 0) ++jpiv;
    Mat<FElem> combo(rows, 1, FElem::zero(pc));
    for (int j = 0; j < cols; ++j)
      if (dep[j] != 0) combo = combo + FElem::from_int(pc, dep[j]) * g.column(j);
    FElem pinv = FElem::pi_power(pc, -1);
    for (int i = 0; i < rows; ++i) {
      FElem v = pinv * combo(i, 0);
      g(i, jpiv) = RingTraits<FElem>::is_zero(v) ? FElem::zero(pc) : v;
    }
    normalize(jpiv);
  }
  throw InsufficientPrecision("saturation did not terminate");
}

ChainPoint reduce_point(const ResidueRing& r, const GenericChainPoint& pt) {
  Mat<FElem> sat = saturate(pt.gens);
  Mat<RElem> out(sat.rows(), sat.cols(), RElem(r, 0));
  for (int i = 0; i < sat.rows(); ++i)
    for (int j = 0; j < sat.cols(); ++j) out(i, j) = RElem::from_f(r, sat(i, j));
  return ChainPoint{pt.index, out};
}

// ---- instantiations ---------------------------------------------------------------------

template Mat<RElem> to_ring<RElem>(const Mat<mpq_class>&, const ResidueRing&);
template Mat<FElem> to_ring<FElem>(const Mat<mpq_class>&, const PadicContext&);
template std::vector<int> summand_pivots<RElem>(const Mat<RElem>&);
template std::vector<int> summand_pivots<FElem>(const Mat<FElem>&);
template bool span_contains<RElem>(const Mat<RElem>&, const Mat<RElem>&);
template bool span_contains<FElem>(const Mat<FElem>&, const Mat<FElem>&);
template bool same_span<RElem>(const Mat<RElem>&, const Mat<RElem>&);
template bool same_span<FElem>(const Mat<FElem>&, const Mat<FElem>&);
template Mat<RElem> kernel<RElem>(const Mat<RElem>&);
template Mat<FElem> kernel<FElem>(const Mat<FElem>&);
template std::vector<RElem> char_poly<RElem>(const Mat<RElem>&);
template std::vector<FElem> char_poly<FElem>(const Mat<FElem>&);
template ConditionReport check_conditions<RElem>(const ChainContext&, const ChainPoint&, const std::vector<Condition>&);
template ConditionReport check_conditions<FElem>(const ChainContext&, const GenericChainPoint&,
                                                 const std::vector<Condition>&);
template int spin_rank<RElem>(const ChainContext&, const ChainPoint&);
template int spin_rank<FElem>(const ChainContext&, const GenericChainPoint&);

}  // namespace afl
