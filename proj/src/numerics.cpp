#include "mcwd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mcwd {

namespace {

NumConfig g_cfg;
unsigned g_work = 0;

unsigned digits10_for(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 2;
}

void apply_work(unsigned bits) {
  g_work = bits;
  Real::default_precision(digits10_for(bits));
}

void ensure_init() {
  if (g_work == 0) {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    apply_work(g_cfg.sig_bits);
  }
}

struct Init {
  Init() { ensure_init(); }
} g_init;

mpfr_ptr raw(Real& x) { return x.backend().data(); }
mpfr_srcptr raw(const Real& x) { return x.backend().data(); }
mpz_ptr raw(BigInt& x) { return x.backend().data(); }
mpz_srcptr raw(const BigInt& x) { return x.backend().data(); }

Real fresh_like(const Real& x) {
  Real r;
  if (x.precision() > r.precision()) r.precision(x.precision());
  return r;
}

template <class F>
Real unary(const Real& x, F f) {
  Real r = fresh_like(x);
  f(raw(r), raw(x), MPFR_RNDN);
  return r;
}

Real r_log1p(const Real& x) { return unary(x, mpfr_log1p); }
Real r_expm1(const Real& x) { return unary(x, mpfr_expm1); }
Real r_exp(const Real& x) { return unary(x, mpfr_exp); }
Real r_exp2(const Real& x) { return unary(x, mpfr_exp2); }
Real r_log2(const Real& x) { return unary(x, mpfr_log2); }
Real r_sin(const Real& x) { return unary(x, mpfr_sin); }
Real r_cos(const Real& x) { return unary(x, mpfr_cos); }
Real r_sqrt(const Real& x) { return unary(x, mpfr_sqrt); }

Real r_atan2(const Real& y, const Real& x) {
  Real r = fresh_like(y.precision() > x.precision() ? y : x);
  mpfr_atan2(raw(r), raw(y), raw(x), MPFR_RNDN);
  return r;
}

Real r_hypot(const Real& a, const Real& b) {
  Real r = fresh_like(a.precision() > b.precision() ? a : b);
  mpfr_hypot(raw(r), raw(a), raw(b), MPFR_RNDN);
  return r;
}

BigInt pow2_int(unsigned long k) {
  BigInt r;
  mpz_setbit(raw(r), k);
  return r;
}

BigInt round_shift(const BigInt& m, unsigned long k) {
  if (k == 0) return m;
  return floor_shift(m + pow2_int(k - 1), k);
}

BigInt mod_pow2(const BigInt& m, unsigned long s) {
  BigInt r;
  mpz_fdiv_r_2exp(raw(r), raw(m), s);
  return r;
}

// round(m / n) for n > 0
BigInt round_div(const BigInt& m, const BigInt& n) {
  return floor_div(2 * m + n, 2 * n);
}

BigInt shifted(const BigInt& m, unsigned long k) {
  BigInt r;
  mpz_mul_2exp(raw(r), raw(m), k);
  return r;
}

constexpr unsigned long kScaleSlack = 16384;

}  // namespace

void configure(const NumConfig& c) {
  g_cfg = c;
  mpfr_set_emin(mpfr_get_emin_min());
  mpfr_set_emax(mpfr_get_emax_max());
  apply_work(c.sig_bits);
}

const NumConfig& num_config() { return g_cfg; }

unsigned working_bits() {
  ensure_init();
  return g_work;
}

WorkingBits::WorkingBits(unsigned bits) : saved_(working_bits()) {
  if (bits > saved_) apply_work(bits);
}

WorkingBits::~WorkingBits() {
  if (g_work != saved_) apply_work(saved_);
}

unsigned fix_bits() { return std::max(g_cfg.ang_bits, working_bits() + 64); }

Real real_pi() {
  thread_local unsigned bits = 0;
  thread_local Real v;
  if (bits != working_bits()) {
    v = Real();
    mpfr_const_pi(raw(v), MPFR_RNDN);
    bits = working_bits();
  }
  return v;
}

Real real_ln2() {
  thread_local unsigned bits = 0;
  thread_local Real v;
  if (bits != working_bits()) {
    v = Real();
    mpfr_const_log2(raw(v), MPFR_RNDN);
    bits = working_bits();
  }
  return v;
}

Real to_real(const BigInt& v) {
  Real r;
  mpfr_set_z(raw(r), raw(v), MPFR_RNDN);
  return r;
}

Real ldexp_big(const Real& x, const BigInt& e) {
  if (mpz_fits_slong_p(raw(e))) {
    Real r = fresh_like(x);
    mpfr_mul_2si(raw(r), raw(x), mpz_get_si(raw(e)), MPFR_RNDN);
    return r;
  }
  throw resource_error("exponent " + e.str() + " does not fit the working float range");
}

BigInt floor_to_int(const Real& x) {
  BigInt r;
  mpfr_get_z(raw(r), raw(x), MPFR_RNDD);
  return r;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_fdiv_q(raw(r), raw(a), raw(b));
  return r;
}

BigInt floor_shift(const BigInt& a, unsigned long bits) {
  BigInt r;
  mpz_fdiv_q_2exp(raw(r), raw(a), bits);
  return r;
}

bool is_pow2(const BigInt& n) { return n > 0 && mpz_popcount(raw(n)) == 1; }

unsigned long log2_exact(const BigInt& n) {
  if (!is_pow2(n)) throw std::invalid_argument("not a power of two: " + n.str());
  return mpz_scan1(raw(n), 0);
}

std::string real_str(const Real& x, int digits) {
  return x.str(digits, std::ios_base::fmtflags(0));
}

// ---------------------------------------------------------------- Log2Real

void Log2Real::normalize() {
  if (m_ == 0) {
    s_ = 0;
    return;
  }
  unsigned long tz = mpz_scan1(raw(m_), 0);
  unsigned long k = std::min(tz, s_);
  if (k) {
    mpz_tdiv_q_2exp(raw(m_), raw(m_), k);
    s_ -= k;
  }
}

Log2Real Log2Real::from_int(const BigInt& v) {
  Log2Real r;
  r.m_ = v;
  return r;
}

Log2Real Log2Real::from_raw(const BigInt& m, unsigned long s) {
  Log2Real r;
  r.m_ = m;
  r.s_ = s;
  r.normalize();
  return r;
}

Log2Real Log2Real::from_real(const Real& x) {
  if (!mpfr_number_p(raw(x))) throw domain_error("non-finite value in Log2Real");
  unsigned long s = fix_bits();
  Real y = fresh_like(x);
  mpfr_mul_2ui(raw(y), raw(x), s, MPFR_RNDN);
  BigInt m;
  mpfr_get_z(raw(m), raw(y), MPFR_RNDN);
  return from_raw(m, s);
}

Log2Real Log2Real::from_ratio(const BigInt& p, const BigInt& q) {
  if (q == 0) throw domain_error("zero denominator");
  BigInt pp = q < 0 ? BigInt(-p) : p;
  BigInt qq = q < 0 ? BigInt(-q) : q;
  unsigned long s = fix_bits();
  return from_raw(round_div(shifted(pp, s), qq), s);
}

BigInt Log2Real::floor() const { return floor_shift(m_, s_); }

BigInt Log2Real::ceil() const { return -(-*this).floor(); }

Real Log2Real::frac() const {
  BigInt r = mod_pow2(m_, s_);
  Real x = mcwd::to_real(r);
  mpfr_div_2ui(raw(x), raw(x), s_, MPFR_RNDN);
  return x;
}

Real Log2Real::to_real() const {
  Real x;
  mpfr_set_z(raw(x), raw(m_), MPFR_RNDN);
  mpfr_div_2ui(raw(x), raw(x), s_, MPFR_RNDN);
  return x;
}

double Log2Real::to_double() const { return to_real().convert_to<double>(); }

int Log2Real::sign() const { return mpz_sgn(raw(m_)); }

Log2Real Log2Real::operator-() const { return from_raw(-m_, s_); }

Log2Real Log2Real::operator+(const Log2Real& o) const {
  unsigned long s = std::max(s_, o.s_);
  return from_raw(shifted(m_, s - s_) + shifted(o.m_, s - o.s_), s);
}

Log2Real Log2Real::operator-(const Log2Real& o) const { return *this + (-o); }

Log2Real Log2Real::mul(const BigInt& n) const { return from_raw(m_ * n, s_); }

Log2Real Log2Real::div(const BigInt& n) const {
  if (n == 0) throw domain_error("Log2Real division by zero");
  if (n < 0) return (-*this).div(-n);
  if (is_pow2(n)) {
    Log2Real r = from_raw(m_, s_ + log2_exact(n));
    if (r.s_ > fix_bits() + kScaleSlack) r = r.rounded(fix_bits() + kScaleSlack);
    return r;
  }
  unsigned long s = std::max<unsigned long>(s_, fix_bits());
  return from_raw(round_div(shifted(m_, s - s_), n), s);
}

Log2Real Log2Real::rounded(unsigned long bits) const {
  if (s_ <= bits) return *this;
  return from_raw(round_shift(m_, s_ - bits), bits);
}

int Log2Real::cmp(const Log2Real& o) const {
  unsigned long s = std::max(s_, o.s_);
  int c = mpz_cmp(raw(shifted(m_, s - s_)), raw(shifted(o.m_, s - o.s_)));
  return (c > 0) - (c < 0);
}

std::string Log2Real::str(int digits) const {
  if (sign() < 0) return "-" + (-*this).str(digits);
  BigInt ip = floor();
  if (msb(ip + 1) < 60) {
    WorkingBits wb(static_cast<unsigned>(digits * 3.33) + 80);
    return real_str(to_real(), digits);
  }
  BigInt r = mod_pow2(m_, s_);
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  BigInt d = floor_shift(r * scale, s_);
  std::string ds = d.str();
  if (static_cast<int>(ds.size()) < digits) ds = std::string(digits - ds.size(), '0') + ds;
  while (ds.size() > 1 && ds.back() == '0') ds.pop_back();
  return ip.str() + "." + ds;
}

// ------------------------------------------------------------------- Angle

void Angle::normalize() {
  m_ = mod_pow2(m_, s_);
  if (m_ == 0) {
    s_ = 0;
    return;
  }
  unsigned long tz = mpz_scan1(raw(m_), 0);
  unsigned long k = std::min(tz, s_);
  if (k) {
    mpz_tdiv_q_2exp(raw(m_), raw(m_), k);
    s_ -= k;
  }
}

Angle Angle::from_raw(const BigInt& m, unsigned long s) {
  Angle a;
  a.m_ = m;
  a.s_ = s;
  a.normalize();
  return a;
}

Angle Angle::from_real(const Real& turns) {
  if (!mpfr_number_p(raw(turns))) throw domain_error("non-finite angle");
  unsigned long s = fix_bits();
  Real y = fresh_like(turns);
  mpfr_mul_2ui(raw(y), raw(turns), s, MPFR_RNDN);
  BigInt m;
  mpfr_get_z(raw(m), raw(y), MPFR_RNDN);
  return from_raw(m, s);
}

Angle Angle::from_ratio(const BigInt& p, const BigInt& q) {
  if (q == 0) throw domain_error("zero denominator");
  BigInt pp = q < 0 ? BigInt(-p) : p;
  BigInt qq = q < 0 ? BigInt(-q) : q;
  BigInt g;
  mpz_gcd(raw(g), raw(pp), raw(qq));
  if (g != 0) {
    pp /= g;
    qq /= g;
  }
  if (is_pow2(qq)) return from_raw(pp, log2_exact(qq));
  unsigned long s = fix_bits();
  return from_raw(round_div(shifted(pp, s), qq), s);
}

Angle Angle::operator+(const Angle& o) const {
  unsigned long s = std::max(s_, o.s_);
  return from_raw(shifted(m_, s - s_) + shifted(o.m_, s - o.s_), s);
}

Angle Angle::operator-() const { return from_raw(-m_, s_); }

Angle Angle::operator-(const Angle& o) const { return *this + (-o); }

Angle Angle::mul(const BigInt& n) const { return from_raw(m_ * n, s_); }

Angle Angle::root(const BigInt& n, const BigInt& branch) const {
  if (n < 1 || branch < 0 || branch >= n)
    throw std::invalid_argument("root branch out of range");
  BigInt num = m_ + shifted(branch, s_);
  if (is_pow2(n)) {
    Angle a = from_raw(num, s_ + log2_exact(n));
    unsigned long cap = fix_bits() + kScaleSlack;
    if (a.s_ > cap) a = from_raw(round_shift(a.m_, a.s_ - cap), cap);
    return a;
  }
  unsigned long s = std::max<unsigned long>(s_, fix_bits());
  return from_raw(round_div(shifted(num, s - s_), n), s);
}

Real Angle::to_real() const {
  Real x = mcwd::to_real(m_);
  mpfr_div_2ui(raw(x), raw(x), s_, MPFR_RNDN);
  return x;
}

Log2Real Angle::centered_exact() const {
  if (s_ > 0 && mpz_tstbit(raw(m_), s_ - 1)) return Log2Real::from_raw(m_ - pow2_int(s_), s_);
  return Log2Real::from_raw(m_, s_);
}

Real Angle::centered() const { return centered_exact().to_real(); }

double Angle::to_double() const { return to_real().convert_to<double>(); }

// ---------------------------------------------------------------------- Cx

Cx operator+(const Cx& a, const Cx& b) { return Cx(a.re + b.re, a.im + b.im); }
Cx operator-(const Cx& a, const Cx& b) { return Cx(a.re - b.re, a.im - b.im); }
Cx operator*(const Cx& a, const Cx& b) {
  return Cx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
Cx operator/(const Cx& a, const Cx& b) {
  Real d = b.re * b.re + b.im * b.im;
  if (d == 0) throw domain_error("complex division by zero");
  return Cx((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
}
Cx cx_scale(const Cx& a, const Real& s) { return Cx(a.re * s, a.im * s); }
Real cx_abs(const Cx& a) { return r_hypot(a.re, a.im); }
bool cx_is_zero(const Cx& a) { return a.re == 0 && a.im == 0; }

Cx cx_sqrt(const Cx& a) {
  if (cx_is_zero(a)) return Cx();
  Real r = cx_abs(a);
  if (a.re >= 0) {
    Real x = r_sqrt((r + a.re) / 2);
    return Cx(x, a.im / (2 * x));
  }
  Real y = r_sqrt((r - a.re) / 2);
  if (a.im < 0) y = -y;
  return Cx(a.im / (2 * y), y);
}

Cx cx_log1p(const Cx& u) {
  Real t = 2 * u.re + u.re * u.re + u.im * u.im;
  return Cx(r_log1p(t) / 2, r_atan2(u.im, 1 + u.re));
}

Cx cx_expm1(const Cx& x) {
  Real c = r_cos(x.im);
  Real sh = r_sin(x.im / 2);
  Real re = r_expm1(x.re) * c - 2 * sh * sh;
  Real im = r_exp(x.re) * r_sin(x.im);
  return Cx(re, im);
}

Cx cis(const Angle& a) {
  if (a.is_zero()) return Cx(Real(1), Real(0));
  unsigned long s = a.scale();
  BigInt four_m = 4 * a.mant();
  BigInt q = floor_shift(four_m + pow2_int(s - 1), s);
  BigInt rnum = four_m - shifted(q, s);  // r = rnum / 2^(s+2)
  Real r = to_real(rnum);
  mpfr_div_2ui(raw(r), raw(r), s + 2, MPFR_RNDN);
  Real ang = 2 * real_pi() * r;
  Real c = r_cos(ang), sn = r_sin(ang);
  long qm = mpz_fdiv_ui(raw(q), 4);
  switch (qm) {
    case 0: return Cx(c, sn);
    case 1: return Cx(-sn, c);
    case 2: return Cx(-c, -sn);
    default: return Cx(sn, -c);
  }
}

// -------------------------------------------------------------- DyadicReal

void DyadicReal::normalize() {
  if (sig_ == 0 || sign_ == 0) {
    sign_ = 0;
    sig_ = 0;
    exp_ = 0;
    return;
  }
  if (sig_ < 0) {
    sign_ = -sign_;
    sig_ = -sig_;
  }
  long e = mpfr_get_exp(raw(sig_));  // sig = f * 2^e, f in [1/2,1)
  mpfr_mul_2si(raw(sig_), raw(sig_), -(e - 1), MPFR_RNDN);
  exp_ += e - 1;
}

DyadicReal DyadicReal::pow2(const BigInt& e) {
  DyadicReal d;
  d.sign_ = 1;
  d.sig_ = 1;
  d.exp_ = e;
  return d;
}

DyadicReal DyadicReal::from_real(const Real& x) {
  DyadicReal d;
  d.sign_ = 1;
  d.sig_ = x;
  d.normalize();
  return d;
}

DyadicReal DyadicReal::from_log2(const Log2Real& l) {
  DyadicReal d;
  d.sign_ = 1;
  d.exp_ = l.floor();
  Real f = l.frac();
  d.sig_ = f == 0 ? Real(1) : r_exp2(f);
  d.normalize();
  return d;
}

DyadicReal DyadicReal::mul(const DyadicReal& b) const {
  if (sign_ == 0 || b.sign_ == 0) return DyadicReal();
  DyadicReal d;
  d.sign_ = sign_ * b.sign_;
  d.sig_ = sig_ * b.sig_;
  d.exp_ = exp_ + b.exp_;
  d.normalize();
  return d;
}

DyadicReal DyadicReal::div(const DyadicReal& b) const {
  if (b.sign_ == 0) throw domain_error("DyadicReal division by zero");
  if (sign_ == 0) return DyadicReal();
  DyadicReal d;
  d.sign_ = sign_ * b.sign_;
  d.sig_ = sig_ / b.sig_;
  d.exp_ = exp_ - b.exp_;
  d.normalize();
  return d;
}

DyadicReal DyadicReal::pow_int(const BigInt& n) const {
  if (sign_ == 0) {
    if (n > 0) return DyadicReal();
    if (n == 0) return pow2(0);
    throw domain_error("zero to a negative power");
  }
  BigInt e = exp_ * n;
  if (msb(abs(e) + 1) > 1000000) throw resource_error("pow_int exceeds the exponent bit budget");
  int sg = (sign_ < 0 && mpz_odd_p(raw(n))) ? -1 : 1;
  if (sig_ == 1) {
    DyadicReal d = pow2(e);
    d.sign_ = sg;
    return d;
  }
  if (abs(n) <= 4096) {
    long k = n.convert_to<long>();
    DyadicReal base = *this;
    base.sign_ = 1;
    if (k < 0) {
      base = pow2(0).div(base);
      k = -k;
    }
    DyadicReal acc = pow2(0);
    while (k) {
      if (k & 1) acc = acc.mul(base);
      base = base.mul(base);
      k >>= 1;
    }
    acc.sign_ = sg;
    return acc;
  }
  DyadicReal d = from_log2(log2_abs().mul(n));
  d.sign_ = sg;
  return d;
}

DyadicReal DyadicReal::add(const DyadicReal& b) const {
  if (sign_ == 0) return b;
  if (b.sign_ == 0) return *this;
  BigInt d = exp_ - b.exp_;
  long lim = static_cast<long>(working_bits()) + 4;
  if (d > lim) return *this;
  if (d < -lim) return b;
  long dl = d.convert_to<long>();
  Real x = sign_ * sig_, y = b.sign_ * b.sig_;
  DyadicReal r;
  r.sign_ = 1;
  if (dl >= 0) {
    mpfr_mul_2si(raw(x), raw(x), dl, MPFR_RNDN);
    r.sig_ = x + y;
    r.exp_ = b.exp_;
  } else {
    mpfr_mul_2si(raw(y), raw(y), -dl, MPFR_RNDN);
    r.sig_ = x + y;
    r.exp_ = exp_;
  }
  r.normalize();
  return r;
}

DyadicReal DyadicReal::neg() const {
  DyadicReal d = *this;
  d.sign_ = -d.sign_;
  return d;
}

int DyadicReal::cmp(const DyadicReal& b) const {
  if (sign_ != b.sign_) return sign_ < b.sign_ ? -1 : 1;
  if (sign_ == 0) return 0;
  int c;
  if (exp_ != b.exp_)
    c = exp_ < b.exp_ ? -1 : 1;
  else
    c = sig_ < b.sig_ ? -1 : (sig_ > b.sig_ ? 1 : 0);
  return sign_ > 0 ? c : -c;
}

Log2Real DyadicReal::log2_abs() const {
  if (sign_ == 0) throw domain_error("log2 of zero");
  Log2Real l = Log2Real::from_int(exp_);
  if (sig_ != 1) l = l + Log2Real::from_real(r_log2(sig_));
  return l;
}

Real DyadicReal::to_real() const {
  if (sign_ == 0) return Real(0);
  return ldexp_big(sign_ * sig_, exp_);
}

double DyadicReal::to_double() const {
  if (sign_ == 0) return 0.0;
  if (exp_ > 1100) return sign_ * std::numeric_limits<double>::infinity();
  if (exp_ < -1100) return 0.0;
  return to_real().convert_to<double>();
}

std::string DyadicReal::str(int digits) const {
  if (sign_ == 0) return "0";
  std::string m = real_str(sign_ * sig_, digits);
  return m + "×2^" + exp_.str();
}

// ---------------------------------------------------------------- LogPolar

LogPolar LogPolar::zero() {
  LogPolar z;
  z.is_zero = true;
  return z;
}

LogPolar LogPolar::polar(const Log2Real& rho, const Angle& theta) {
  LogPolar z;
  z.rho = rho;
  z.theta = theta;
  return z;
}

LogPolar LogPolar::from_cx(const Cx& c) {
  if (cx_is_zero(c)) return zero();
  Real m = cx_abs(c);
  long e = mpfr_get_exp(raw(m));
  Real f = m;
  mpfr_mul_2si(raw(f), raw(m), -e, MPFR_RNDN);
  Log2Real rho = Log2Real::from_int(e) + Log2Real::from_real(r_log2(f));
  Real t = r_atan2(c.im, c.re) / (2 * real_pi());
  return polar(rho, Angle::from_real(t));
}

LogPolar LogPolar::from_double(double re, double im) { return from_cx(Cx(Real(re), Real(im))); }

LogPolar LogPolar::from_dyadic(const DyadicReal& d) {
  if (d.sign() == 0) return zero();
  return polar(d.log2_abs(), d.sign() < 0 ? Angle::from_ratio(1, 2) : Angle());
}

Cx LogPolar::to_cx() const {
  if (is_zero) return Cx();
  BigInt ip = rho.floor();
  if (abs(ip) > (BigInt(1) << 60)) throw resource_error("magnitude outside the float range");
  Real mag = r_exp2(rho.frac());
  mpfr_mul_2si(raw(mag), raw(mag), ip.convert_to<long>(), MPFR_RNDN);
  Cx c = cx_scale(cis(theta), mag);
  if (has_delta) c = c * Cx(1 + delta.re, delta.im);
  return c;
}

Log2Real LogPolar::log2_abs() const {
  if (is_zero) throw domain_error("log2 of zero");
  if (!has_delta) return rho;
  Real t = 2 * delta.re + delta.re * delta.re + delta.im * delta.im;
  return rho + Log2Real::from_real(r_log1p(t) / (2 * real_ln2()));
}

LogPolar LogPolar::folded() const {
  if (is_zero || !has_delta) return *this;
  Cx l = cx_log1p(delta);
  LogPolar z = polar(rho + Log2Real::from_real(l.re / real_ln2()),
                     theta + Angle::from_real(l.im / (2 * real_pi())));
  return z;
}

std::string LogPolar::str(int digits) const {
  if (is_zero) return "0";
  std::ostringstream os;
  os << "2^(" << rho.str(digits) << ")·e(" << real_str(theta.to_real(), digits) << ")";
  if (has_delta) os << "·(1+" << real_str(delta.re, 6) << (delta.im < 0 ? "" : "+")
                    << real_str(delta.im, 6) << "i)";
  return os.str();
}

namespace {

LogPolar set_delta(LogPolar z, const Cx& d) {
  z.delta = d;
  z.has_delta = !cx_is_zero(d);
  if (z.has_delta) {
    Real lim = 1;
    mpfr_div_2ui(raw(lim), raw(lim), 32, MPFR_RNDN);
    if (cx_abs(d) > lim) return z.folded();
  }
  return z;
}

}  // namespace

LogPolar lp_mul(const LogPolar& a, const LogPolar& b) {
  if (a.is_zero || b.is_zero) return LogPolar::zero();
  LogPolar z = LogPolar::polar(a.rho + b.rho, a.theta + b.theta);
  if (a.has_delta || b.has_delta) return set_delta(z, a.delta + b.delta + a.delta * b.delta);
  return z;
}

LogPolar lp_div(const LogPolar& a, const LogPolar& b) {
  if (b.is_zero) throw domain_error("LogPolar division by zero");
  if (a.is_zero) return LogPolar::zero();
  LogPolar z = LogPolar::polar(a.rho - b.rho, a.theta - b.theta);
  if (a.has_delta || b.has_delta)
    return set_delta(z, (a.delta - b.delta) / Cx(1 + b.delta.re, b.delta.im));
  return z;
}

LogPolar lp_pow(const LogPolar& z, const BigInt& n) {
  if (n == 0) return LogPolar::polar(Log2Real(), Angle());
  if (z.is_zero) {
    if (n > 0) return z;
    throw domain_error("zero to a negative power");
  }
  LogPolar r = LogPolar::polar(z.rho.mul(n), z.theta.mul(n));
  if (z.has_delta) return set_delta(r, cx_expm1(cx_scale(cx_log1p(z.delta), to_real(n))));
  return r;
}

LogPolar lp_root(const LogPolar& z, const BigInt& n, const BigInt& branch) {
  if (n < 1 || branch < 0 || branch >= n)
    throw std::invalid_argument("root: need n >= 1 and 0 <= branch < n");
  if (z.is_zero) return z;
  LogPolar r = LogPolar::polar(z.rho.div(n), z.theta.root(n, branch));
  if (z.has_delta) {
    Cx l = cx_log1p(z.delta);
    Real rn = to_real(n);
    return set_delta(r, cx_expm1(Cx(l.re / rn, l.im / rn)));
  }
  return r;
}

LogPolar lp_neg(const LogPolar& z) {
  if (z.is_zero) return z;
  LogPolar r = z;
  r.theta = z.theta + Angle::from_ratio(1, 2);
  return r;
}

LogPolar lp_scale(const LogPolar& z, const Log2Real& dl) {
  if (z.is_zero) return z;
  LogPolar r = z;
  r.rho = z.rho + dl;
  return r;
}

LogPolar lp_with_delta(const LogPolar& anchor, const Cx& u) {
  if (anchor.is_zero) return anchor;
  LogPolar z = anchor;
  Cx d = anchor.has_delta ? anchor.delta + u + anchor.delta * u : u;
  return set_delta(z, d);
}

AddResult lp_add(const LogPolar& z0, const LogPolar& w0, unsigned guard) {
  if (z0.is_zero) return {w0, AddStatus::ok};
  if (w0.is_zero) return {z0, AddStatus::ok};
  LogPolar z = z0.folded(), w = w0.folded();
  Log2Real d = z.rho - w.rho;
  Log2Real g = Log2Real::from_int(guard);
  if (d > g) return {z0, AddStatus::negligible};
  if (d < -g) return {w0, AddStatus::negligible};
  const LogPolar& big = d.sign() >= 0 ? z : w;
  const LogPolar& small = d.sign() >= 0 ? w : z;
  Log2Real ad = d.sign() >= 0 ? d : -d;
  Real scale = r_exp2(-ad.to_real());
  Cx ratio = cx_scale(cis(small.theta - big.theta), scale);
  Cx s(1 + ratio.re, ratio.im);
  Real lim = 1;
  mpfr_div_2ui(raw(lim), raw(lim), working_bits() - 8, MPFR_RNDN);
  if (cx_abs(s) < lim) return {LogPolar::zero(), AddStatus::cancellation};
  return {lp_mul(big, LogPolar::from_cx(s)), AddStatus::ok};
}

AddResult lp_add(const LogPolar& z, const LogPolar& w) { return lp_add(z, w, num_config().guard); }

AddResult lp_sub(const LogPolar& z, const LogPolar& w) {
  if (!z.is_zero && !w.is_zero && z.rho == w.rho && z.theta == w.theta) {
    Cx d = z.delta - w.delta;
    if (cx_is_zero(d)) return {LogPolar::zero(), AddStatus::ok};
    LogPolar anchor = LogPolar::polar(z.rho, z.theta);
    return {lp_mul(anchor, LogPolar::from_cx(d)), AddStatus::ok};
  }
  return lp_add(z, lp_neg(w));
}

AddResult lp_minus_one(const LogPolar& t) {
  LogPolar minus_one = LogPolar::polar(Log2Real(), Angle::from_ratio(1, 2));
  if (t.is_zero) return {minus_one, AddStatus::ok};
  BigInt fl = t.rho.floor();
  long guard = num_config().guard;
  if (fl > guard) return {t, AddStatus::negligible};
  if (fl < -guard) return {minus_one, AddStatus::negligible};
  Cx l(real_ln2() * t.rho.to_real(), 2 * real_pi() * t.theta.centered());
  if (t.has_delta) l = l + cx_log1p(t.delta);
  if (cx_is_zero(l)) return {LogPolar::zero(), AddStatus::ok};
  Cx e = cx_expm1(l);
  if (cx_is_zero(e)) return {LogPolar::zero(), AddStatus::cancellation};
  return {LogPolar::from_cx(e), AddStatus::ok};
}

double lp_log2_dist(const LogPolar& z, const LogPolar& w) {
  AddResult r = lp_sub(z, w);
  if (r.value.is_zero) return -std::numeric_limits<double>::infinity();
  return r.value.log2_abs().to_double();
}

}  // namespace mcwd
