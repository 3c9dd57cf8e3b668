#pragma once

#include <string>

#include "afl/padic.hpp"

namespace afl {

/// zeta^2 in D = F + F zeta: epsilon for ramified F, p for unramified F.
F0Elem zeta_square(const PadicContext& c);

/// Element a + b*zeta of the quaternion division algebra D over F0, with
/// zeta * x = conj(x) * zeta for x in F.  O_D = O_F + O_F zeta.
class QuatElem {
 public:
  QuatElem() = default;
  QuatElem(FElem a, FElem b) : a_(std::move(a)), b_(std::move(b)) {}
  explicit QuatElem(const FElem& a);

  static QuatElem zero(const PadicContext& c);
  static QuatElem one(const PadicContext& c);
  static QuatElem zeta(const PadicContext& c);

  const PadicContext& ctx() const { return a_.ctx(); }
  const FElem& a() const { return a_; }
  const FElem& b() const { return b_; }

  bool in_F() const { return b_.is_exact_zero(); }
  bool in_Dminus() const { return a_.is_exact_zero(); }
  bool is_exact_zero() const { return a_.is_exact_zero() && b_.is_exact_zero(); }

  /// Main involution.
  QuatElem conj() const { return QuatElem(a_.conj(), -b_); }
  F0Elem reduced_norm() const;
  F0Elem reduced_trace() const { return a_.trace(); }
  bool is_integral() const { return a_.is_integral() && b_.is_integral(); }

  QuatElem operator-() const { return QuatElem(-a_, -b_); }
  QuatElem& operator+=(const QuatElem& o);
  QuatElem& operator-=(const QuatElem& o);
  QuatElem& operator*=(const QuatElem& o);
  QuatElem inverse() const;

  std::string to_string() const;

 private:
  FElem a_;
  FElem b_;
};

QuatElem operator+(QuatElem x, const QuatElem& y);
QuatElem operator-(QuatElem x, const QuatElem& y);
QuatElem operator*(QuatElem x, const QuatElem& y);
bool operator==(const QuatElem& x, const QuatElem& y);
inline bool operator!=(const QuatElem& x, const QuatElem& y) { return !(x == y); }

}  // namespace afl
