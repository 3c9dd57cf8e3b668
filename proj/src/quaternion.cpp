#include "afl/quaternion.hpp"

namespace afl {

F0Elem zeta_square(const PadicContext& c) {
  return c.ramified() ? F0Elem::from_int(c, c.epsilon()) : F0Elem::p_power(c, 1);
}

QuatElem::QuatElem(const FElem& a) : a_(a), b_(FElem::zero(a.ctx())) {}

QuatElem QuatElem::zero(const PadicContext& c) { return QuatElem(FElem::zero(c), FElem::zero(c)); }

QuatElem QuatElem::one(const PadicContext& c) { return QuatElem(FElem::from_int(c, 1), FElem::zero(c)); }

QuatElem QuatElem::zeta(const PadicContext& c) { return QuatElem(FElem::zero(c), FElem::from_int(c, 1)); }

F0Elem QuatElem::reduced_norm() const { return a_.norm() - zeta_square(ctx()) * b_.norm(); }

QuatElem& QuatElem::operator+=(const QuatElem& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuatElem& QuatElem::operator-=(const QuatElem& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

// (a + b z)(c + d z) = (ac + z^2 b conj(d)) + (ad + b conj(c)) z
QuatElem& QuatElem::operator*=(const QuatElem& o) {
  FElem na = a_ * o.a_ + b_ * o.b_.conj() * zeta_square(ctx());
  FElem nb = a_ * o.b_ + b_ * o.a_.conj();
  a_ = std::move(na);
  b_ = std::move(nb);
  return *this;
}

QuatElem QuatElem::inverse() const {
  F0Elem n = reduced_norm();
  if (n.is_exact_zero()) throw ZeroInput("inverse of zero in D");
  F0Elem ni = n.inverse();
  QuatElem c = conj();
  return QuatElem(c.a_ * ni, c.b_ * ni);
}

std::string QuatElem::to_string() const { return "[" + a_.to_string() + "] + [" + b_.to_string() + "]*zeta"; }

QuatElem operator+(QuatElem x, const QuatElem& y) { return x += y; }
QuatElem operator-(QuatElem x, const QuatElem& y) { return x -= y; }
QuatElem operator*(QuatElem x, const QuatElem& y) { return x *= y; }
bool operator==(const QuatElem& x, const QuatElem& y) { return x.a() == y.a() && x.b() == y.b(); }

}  // namespace afl
