#include "afl/series.hpp"

#include <sstream>

namespace afl {

GaussQ& GaussQ::operator+=(const GaussQ& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussQ& GaussQ::operator-=(const GaussQ& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussQ& GaussQ::operator*=(const GaussQ& o) {
  mpq_class r = re * o.re - im * o.im;
  mpq_class i = re * o.im + im * o.re;
  re = r;
  im = i;
  return *this;
}

std::string GaussQ::to_string() const {
  if (im == 0) return re.get_str();
  std::ostringstream os;
  os << re.get_str() << (im < 0 ? "-" : "+") << mpq_class(abs(im)).get_str() << "i";
  return os.str();
}

GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
GaussQ operator-(const GaussQ& a) { return GaussQ(-a.re, -a.im); }
GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }

GaussQ operator/(const GaussQ& a, const GaussQ& b) {
  mpq_class n = b.re * b.re + b.im * b.im;
  GaussQ r = a * b.conj();
  return GaussQ(r.re / n, r.im / n);
}

bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }

LogValue& LogValue::operator+=(const LogValue& o) {
  r0 += o.r0;
  r1 += o.r1;
  return *this;
}

std::string LogValue::to_string() const { return r0.to_string() + " + (" + r1.to_string() + ")*log q"; }

LogValue operator+(LogValue a, const LogValue& b) { return a += b; }
LogValue operator-(LogValue a, const LogValue& b) {
  a.r0 -= b.r0;
  a.r1 -= b.r1;
  return a;
}
LogValue operator*(const GaussQ& c, const LogValue& v) { return LogValue(c * v.r0, c * v.r1); }
bool operator==(const LogValue& a, const LogValue& b) { return a.r0 == b.r0 && a.r1 == b.r1; }

OrbitalSeries OrbitalSeries::constant(const GaussQ& c) { return monomial(0, c); }

OrbitalSeries OrbitalSeries::monomial(long k, const GaussQ& c) {
  OrbitalSeries s;
  s.add_term(k, c);
  return s;
}

GaussQ OrbitalSeries::coefficient(long k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? GaussQ(0) : it->second;
}

void OrbitalSeries::add_term(long k, const GaussQ& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = coeffs_.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

OrbitalSeries OrbitalSeries::shifted(long k) const {
  OrbitalSeries r;
  for (const auto& [e, c] : coeffs_) r.coeffs_.emplace(e + k, c);
  return r;
}

GaussQ OrbitalSeries::value_at_0() const {
  GaussQ v;
  for (const auto& [k, c] : coeffs_) v += c;
  return v;
}

LogValue OrbitalSeries::derivative_at_0() const {
  GaussQ d;
  for (const auto& [k, c] : coeffs_) d += GaussQ(-k) * c;
  return LogValue(GaussQ(0), d);
}

OrbitalSeries& OrbitalSeries::operator+=(const OrbitalSeries& o) {
  for (const auto& [k, c] : o.coeffs_) add_term(k, c);
  return *this;
}

OrbitalSeries& OrbitalSeries::operator-=(const OrbitalSeries& o) {
  for (const auto& [k, c] : o.coeffs_) add_term(k, -c);
  return *this;
}

std::string OrbitalSeries::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")";
    if (k != 0) os << "*q^(" << -k << "s)";
  }
  return os.str();
}

OrbitalSeries operator+(OrbitalSeries a, const OrbitalSeries& b) { return a += b; }
OrbitalSeries operator-(OrbitalSeries a, const OrbitalSeries& b) { return a -= b; }

OrbitalSeries operator*(const GaussQ& c, const OrbitalSeries& s) {
  OrbitalSeries r;
  for (const auto& [k, v] : s.coefficients()) r.add_term(k, c * v);
  return r;
}

OrbitalSeries operator*(const OrbitalSeries& a, const OrbitalSeries& b) {
  OrbitalSeries r;
  for (const auto& [k1, c1] : a.coefficients())
    for (const auto& [k2, c2] : b.coefficients()) r.add_term(k1 + k2, c1 * c2);
  return r;
}

bool operator==(const OrbitalSeries& a, const OrbitalSeries& b) {
  return a.coefficients() == b.coefficients();
}

LogValue series_derivative_at_0(const OrbitalSeries& s) { return s.derivative_at_0(); }

std::ostream& operator<<(std::ostream& os, const GaussQ& x) { return os << x.to_string(); }
std::ostream& operator<<(std::ostream& os, const LogValue& x) { return os << x.to_string(); }
std::ostream& operator<<(std::ostream& os, const OrbitalSeries& x) { return os << x.to_string(); }

}  // namespace afl
