#pragma once

#include <functional>
#include <string>
#include <vector>

#include "afl/errors.hpp"

namespace afl {

/// Small dense matrix over a ring of element type T (row-major).
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, const T& fill)
      : r_(rows), c_(cols), a_(static_cast<size_t>(rows * cols), fill) {}

  static Mat identity(int n, const T& zero, const T& one) {
    Mat m(n, n, zero);
    for (int i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  T& operator()(int i, int j) { return a_[static_cast<size_t>(i * c_ + j)]; }
  const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i * c_ + j)]; }

  Mat transpose() const {
    Mat t(c_, r_, a_.empty() ? T() : a_[0]);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class F>
  auto map(F f) const -> Mat<decltype(f(std::declval<T>()))> {
    using U = decltype(f(std::declval<T>()));
    Mat<U> m(r_, c_, f(a_[0]));
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(i, j) = f((*this)(i, j));
    return m;
  }

  Mat column(int j) const {
    Mat v(r_, 1, (*this)(0, j));
    for (int i = 0; i < r_; ++i) v(i, 0) = (*this)(i, j);
    return v;
  }

  Mat block(int i0, int j0, int nr, int nc) const {
    Mat b(nr, nc, (*this)(i0, j0));
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
  }

  void set_block(int i0, int j0, const Mat& b) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
  }

  /// Horizontal concatenation.
  Mat hcat(const Mat& o) const {
    if (o.r_ != r_) throw PreconditionViolated("hcat row mismatch");
    Mat m(r_, c_ + o.c_, a_[0]);
    m.set_block(0, 0, *this);
    m.set_block(0, c_, o);
    return m;
  }

  /// Vertical concatenation.
  Mat vcat(const Mat& o) const {
    if (o.c_ != c_) throw PreconditionViolated("vcat column mismatch");
    Mat m(r_ + o.r_, c_, a_[0]);
    m.set_block(0, 0, *this);
    m.set_block(r_, 0, o);
    return m;
  }

  void swap_cols(int i, int j) {
    for (int k = 0; k < r_; ++k) std::swap((*this)(k, i), (*this)(k, j));
  }
  void swap_rows(int i, int j) {
    for (int k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }

  Mat& operator+=(const Mat& o) {
    check_same(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator-(const Mat& a) {
    Mat m = a;
    for (auto& x : m.a_) x = -x;
    return m;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.c_ != b.r_) throw PreconditionViolated("matrix product dimension mismatch");
    Mat m(a.r_, b.c_, a.a_[0]);
    for (int i = 0; i < a.r_; ++i)
      for (int j = 0; j < b.c_; ++j) {
        T s = a(i, 0) * b(0, j);
        for (int k = 1; k < a.c_; ++k) s += a(i, k) * b(k, j);
        m(i, j) = s;
      }
    return m;
  }

  friend Mat operator*(const T& s, const Mat& b) {
    Mat m = b;
    for (auto& x : m.a_) x = s * x;
    return m;
  }

  friend bool operator==(const Mat& a, const Mat& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) return false;
    for (size_t k = 0; k < a.a_.size(); ++k)
      if (!(a.a_[k] == b.a_[k])) return false;
    return true;
  }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

  bool all_of(const std::function<bool(const T&)>& pred) const {
    for (const auto& x : a_)
      if (!pred(x)) return false;
    return true;
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < r_; ++i) {
      s += (i ? "; " : "");
      for (int j = 0; j < c_; ++j) s += (j ? ", " : "") + (*this)(i, j).to_string();
    }
    return s + "]";
  }

 private:
  int r_ = 0;
  int c_ = 0;
  std::vector<T> a_;

  void check_same(const Mat& o) const {
    if (o.r_ != r_ || o.c_ != c_) throw PreconditionViolated("matrix shape mismatch");
  }
};

/// Determinant by cofactor expansion.  Exact zeros propagate, so structurally
/// singular matrices give an exact zero rather than a cancellation artifact.
template <class T>
T determinant(const Mat<T>& m) {
  const int n = m.rows();
  if (n != m.cols()) throw PreconditionViolated("determinant of a non-square matrix");
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  T acc = m(0, 0);
  bool first = true;
  for (int j = 0; j < n; ++j) {
    Mat<T> minor(n - 1, n - 1, m(0, 0));
    for (int i = 1; i < n; ++i) {
      int cc = 0;
      for (int k = 0; k < n; ++k)
        if (k != j) minor(i - 1, cc++) = m(i, k);
    }
    T term = m(0, j) * determinant(minor);
    if (j % 2) term = -term;
    if (first) {
      acc = term;
      first = false;
    } else {
      acc += term;
    }
  }
  return acc;
}

/// Adjugate (transpose of the cofactor matrix).
template <class T>
Mat<T> adjugate(const Mat<T>& m) {
  const int n = m.rows();
  Mat<T> adj(n, n, m(0, 0));
  if (n < 2) throw PreconditionViolated("adjugate needs n >= 2");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat<T> minor(n - 1, n - 1, m(0, 0));
      int rr = 0;
      for (int a = 0; a < n; ++a) {
        if (a == i) continue;
        int cc = 0;
        for (int b = 0; b < n; ++b)
          if (b != j) minor(rr, cc++) = m(a, b);
        ++rr;
      }
      T d = determinant(minor);
      adj(j, i) = ((i + j) % 2) ? -d : d;
    }
  return adj;
}

}  // namespace afl
