#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>

namespace mcwd {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

struct NumConfig {
  unsigned sig_bits = 128;   // P_sig
  unsigned ang_bits = 4096;  // P_ang
  unsigned guard = 256;
};

// Installs the configuration, sets the Real working precision to sig_bits and
// widens the MPFR exponent range so offsets like 2^-(2^40) stay representable.
void configure(const NumConfig& c);
const NumConfig& num_config();

unsigned working_bits();

// Temporarily raises the precision of newly created Real values.
class WorkingBits {
 public:
  explicit WorkingBits(unsigned bits);
  ~WorkingBits();
  WorkingBits(const WorkingBits&) = delete;
  WorkingBits& operator=(const WorkingBits&) = delete;

 private:
  unsigned saved_;
};

// Fractional bits used when a Real is rounded into fixed point.
unsigned fix_bits();

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Real real_pi();
Real real_ln2();
Real to_real(const BigInt& v);
Real ldexp_big(const Real& x, const BigInt& e);  // requires e to fit a long
BigInt floor_to_int(const Real& x);
BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt floor_shift(const BigInt& a, unsigned long bits);  // floor(a / 2^bits)
bool is_pow2(const BigInt& n);
unsigned long log2_exact(const BigInt& n);  // n must be a power of two
std::string real_str(const Real& x, int digits = 20);

// Exact dyadic rational v / 2^s. Holds log2 magnitudes: the integer part never
// rounds and multiplication by integers is exact.
class Log2Real {
 public:
  Log2Real() = default;
  Log2Real(long v) : m_(v) {}
  static Log2Real from_int(const BigInt& v);
  static Log2Real from_real(const Real& x);
  static Log2Real from_ratio(const BigInt& p, const BigInt& q);
  static Log2Real from_raw(const BigInt& m, unsigned long s);

  BigInt floor() const;
  BigInt ceil() const;
  Real frac() const;     // in [0,1)
  Real to_real() const;  // only sensible when |value| < 2^60
  double to_double() const;
  bool is_zero() const { return m_ == 0; }
  int sign() const;
  const BigInt& mant() const { return m_; }
  unsigned long scale() const { return s_; }

  Log2Real operator-() const;
  Log2Real operator+(const Log2Real& o) const;
  Log2Real operator-(const Log2Real& o) const;
  Log2Real mul(const BigInt& n) const;
  Log2Real div(const BigInt& n) const;  // exact when n is a power of two
  Log2Real rounded(unsigned long bits) const;

  int cmp(const Log2Real& o) const;
  bool operator==(const Log2Real& o) const { return cmp(o) == 0; }
  bool operator<(const Log2Real& o) const { return cmp(o) < 0; }
  bool operator<=(const Log2Real& o) const { return cmp(o) <= 0; }
  bool operator>(const Log2Real& o) const { return cmp(o) > 0; }
  bool operator>=(const Log2Real& o) const { return cmp(o) >= 0; }

  std::string str(int digits = 20) const;

 private:
  BigInt m_;
  unsigned long s_ = 0;
  void normalize();
};

// Fraction of a full turn, kept as an exact dyadic in [0,1).
class Angle {
 public:
  Angle() = default;
  static Angle from_real(const Real& turns);
  static Angle from_ratio(const BigInt& p, const BigInt& q);
  static Angle from_raw(const BigInt& m, unsigned long s);

  Angle operator+(const Angle& o) const;
  Angle operator-(const Angle& o) const;
  Angle operator-() const;
  Angle mul(const BigInt& n) const;
  Angle root(const BigInt& n, const BigInt& branch) const;

  Real to_real() const;        // [0,1)
  Real centered() const;       // [-1/2,1/2)
  Log2Real centered_exact() const;
  double to_double() const;
  bool is_zero() const { return m_ == 0; }
  bool operator==(const Angle& o) const { return s_ == o.s_ && m_ == o.m_; }
  const BigInt& mant() const { return m_; }
  unsigned long scale() const { return s_; }

 private:
  BigInt m_;
  unsigned long s_ = 0;
  void normalize();
};

struct Cx {
  Real re, im;
  Cx() : re(0), im(0) {}
  Cx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
};
Cx operator+(const Cx& a, const Cx& b);
Cx operator-(const Cx& a, const Cx& b);
Cx operator*(const Cx& a, const Cx& b);
Cx operator/(const Cx& a, const Cx& b);
Cx cx_scale(const Cx& a, const Real& s);
Real cx_abs(const Cx& a);
bool cx_is_zero(const Cx& a);
Cx cx_sqrt(const Cx& a);     // principal branch
Cx cx_log1p(const Cx& u);    // accurate for tiny u
Cx cx_expm1(const Cx& x);    // accurate for tiny x
Cx cis(const Angle& a);      // e^{2 pi i a} with exact octant reduction

// sign * significand * 2^exponent, significand in [1,2).
class DyadicReal {
 public:
  DyadicReal() = default;
  static DyadicReal pow2(const BigInt& e);
  static DyadicReal from_real(const Real& x);
  static DyadicReal from_double(double x) { return from_real(Real(x)); }
  static DyadicReal from_log2(const Log2Real& l);

  int sign() const { return sign_; }
  const Real& significand() const { return sig_; }
  const BigInt& exponent() const { return exp_; }
  bool exact_pow2() const { return sign_ != 0 && sig_ == 1; }

  DyadicReal mul(const DyadicReal& b) const;
  DyadicReal div(const DyadicReal& b) const;
  DyadicReal pow_int(const BigInt& n) const;
  DyadicReal add(const DyadicReal& b) const;
  DyadicReal neg() const;
  int cmp(const DyadicReal& b) const;

  Log2Real log2_abs() const;
  Real to_real() const;  // exponent must fit a long
  double to_double() const;
  std::string str(int digits = 20) const;  // "m×2^e"

 private:
  int sign_ = 0;
  Real sig_ = 0;
  BigInt exp_;
  void normalize();
};

inline DyadicReal operator*(const DyadicReal& a, const DyadicReal& b) { return a.mul(b); }
inline DyadicReal operator/(const DyadicReal& a, const DyadicReal& b) { return a.div(b); }
inline bool operator<(const DyadicReal& a, const DyadicReal& b) { return a.cmp(b) < 0; }
inline bool operator>(const DyadicReal& a, const DyadicReal& b) { return a.cmp(b) > 0; }
inline bool operator==(const DyadicReal& a, const DyadicReal& b) { return a.cmp(b) == 0; }

// z = 2^rho * e^{2 pi i theta} * (1 + delta). delta is a small relative
// offset used for points inside petals and near polynomial zeros.
struct LogPolar {
  Log2Real rho;
  Angle theta;
  bool is_zero = false;
  Cx delta;
  bool has_delta = false;

  static LogPolar zero();
  static LogPolar polar(const Log2Real& rho, const Angle& theta);
  static LogPolar from_cx(const Cx& z);
  static LogPolar from_double(double re, double im);
  static LogPolar from_dyadic(const DyadicReal& d);

  Cx to_cx() const;
  Log2Real log2_abs() const;  // includes delta
  LogPolar folded() const;    // delta absorbed into rho/theta
  std::string str(int digits = 20) const;
};

LogPolar lp_mul(const LogPolar& a, const LogPolar& b);
LogPolar lp_div(const LogPolar& a, const LogPolar& b);
LogPolar lp_pow(const LogPolar& z, const BigInt& n);
LogPolar lp_root(const LogPolar& z, const BigInt& n, const BigInt& branch);
LogPolar lp_neg(const LogPolar& z);
LogPolar lp_scale(const LogPolar& z, const Log2Real& dl);  // z * 2^dl
LogPolar lp_with_delta(const LogPolar& anchor, const Cx& u);

enum class AddStatus { ok, negligible, cancellation };
struct AddResult {
  LogPolar value;
  AddStatus status = AddStatus::ok;
};
AddResult lp_add(const LogPolar& z, const LogPolar& w, unsigned guard);
AddResult lp_add(const LogPolar& z, const LogPolar& w);
AddResult lp_sub(const LogPolar& z, const LogPolar& w);
// t - 1 without cancellation loss when t is near 1.
AddResult lp_minus_one(const LogPolar& t);
// log2 |z - w|, or -inf for coincident points.
double lp_log2_dist(const LogPolar& z, const LogPolar& w);

}  // namespace mcwd
