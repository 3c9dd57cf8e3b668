#pragma once

#include <gmpxx.h>

#include <map>
#include <ostream>
#include <string>

namespace afl {

/// Exact element of Q(i).
struct GaussQ {
  mpq_class re;
  mpq_class im;

  GaussQ() = default;
  GaussQ(long r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  GaussQ(const mpq_class& r, const mpq_class& i = 0) : re(r), im(i) {  // NOLINT
    re.canonicalize();
    im.canonicalize();
  }

  static GaussQ i_unit() { return GaussQ(0, 1); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  GaussQ conj() const { return GaussQ(re, -im); }

  GaussQ& operator+=(const GaussQ& o);
  GaussQ& operator-=(const GaussQ& o);
  GaussQ& operator*=(const GaussQ& o);

  std::string to_string() const;
};

GaussQ operator+(GaussQ a, const GaussQ& b);
GaussQ operator-(GaussQ a, const GaussQ& b);
GaussQ operator-(const GaussQ& a);
GaussQ operator*(GaussQ a, const GaussQ& b);
GaussQ operator/(const GaussQ& a, const GaussQ& b);
bool operator==(const GaussQ& a, const GaussQ& b);
inline bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }

/// r0 + r1 * log q.
struct LogValue {
  GaussQ r0;
  GaussQ r1;

  LogValue() = default;
  LogValue(GaussQ a, GaussQ b) : r0(std::move(a)), r1(std::move(b)) {}

  LogValue& operator+=(const LogValue& o);
  std::string to_string() const;
};

LogValue operator+(LogValue a, const LogValue& b);
LogValue operator-(LogValue a, const LogValue& b);
LogValue operator*(const GaussQ& c, const LogValue& v);
bool operator==(const LogValue& a, const LogValue& b);
inline bool operator!=(const LogValue& a, const LogValue& b) { return !(a == b); }

/// Finite sum  sum_k c_k q^{-k s}.
class OrbitalSeries {
 public:
  OrbitalSeries() = default;
  static OrbitalSeries constant(const GaussQ& c);
  /// c * q^{-k s}
  static OrbitalSeries monomial(long k, const GaussQ& c = GaussQ(1));

  const std::map<long, GaussQ>& coefficients() const { return coeffs_; }
  GaussQ coefficient(long k) const;
  void add_term(long k, const GaussQ& c);
  bool is_zero() const { return coeffs_.empty(); }

  /// Multiply by q^{-k s}.
  OrbitalSeries shifted(long k) const;

  GaussQ value_at_0() const;
  LogValue derivative_at_0() const;

  OrbitalSeries& operator+=(const OrbitalSeries& o);
  OrbitalSeries& operator-=(const OrbitalSeries& o);
  std::string to_string() const;

 private:
  std::map<long, GaussQ> coeffs_;
};

OrbitalSeries operator+(OrbitalSeries a, const OrbitalSeries& b);
OrbitalSeries operator-(OrbitalSeries a, const OrbitalSeries& b);
OrbitalSeries operator*(const GaussQ& c, const OrbitalSeries& s);
OrbitalSeries operator*(const OrbitalSeries& a, const OrbitalSeries& b);
bool operator==(const OrbitalSeries& a, const OrbitalSeries& b);
inline bool operator!=(const OrbitalSeries& a, const OrbitalSeries& b) { return !(a == b); }

LogValue series_derivative_at_0(const OrbitalSeries& s);

std::ostream& operator<<(std::ostream& os, const GaussQ& x);
std::ostream& operator<<(std::ostream& os, const LogValue& x);
std::ostream& operator<<(std::ostream& os, const OrbitalSeries& x);

}  // namespace afl
