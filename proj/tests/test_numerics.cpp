#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "mcwd/numerics.hpp"

using namespace mcwd;

namespace {

double turns_of(std::complex<double> z) {
  double t = std::arg(z) / (2 * M_PI);
  return t < 0 ? t + 1 : t;
}

LogPolar lp_of(std::complex<double> z) { return LogPolar::from_double(z.real(), z.imag()); }

std::complex<double> cx_of(const LogPolar& z) {
  Cx c = z.to_cx();
  return {c.re.convert_to<double>(), c.im.convert_to<double>()};
}

}  // namespace

TEST_CASE("dyadic exponent arithmetic") {
  DyadicReal a = DyadicReal::pow2(6), b = DyadicReal::pow2(-8);
  DyadicReal p = a * b;
  CHECK(p.exponent() == -2);
  CHECK(p.exact_pow2());

  // r5 from c4 (r4/2)^M4 with an independent hand recurrence for the exponents
  long long e = 4, eps = 0, M = 2;
  for (int j = 1; j < 4; ++j) {
    long long en = eps + M * (e - 1), epn = eps - M * e;
    e = en;
    eps = epn;
    M *= 2;
  }
  CHECK(e == 56);
  CHECK(eps == -128);
  DyadicReal r5 = DyadicReal::pow2(eps) * DyadicReal::pow2(e - 1).pow_int(M);
  CHECK(r5.exponent() == 752);
  CHECK(r5.exact_pow2());

  DyadicReal x = DyadicReal::pow2(752);
  DyadicReal y = DyadicReal::pow2(751) * DyadicReal::from_double(1.999);
  CHECK(x.cmp(y) > 0);
  CHECK(y.cmp(x) < 0);
}

TEST_CASE("dyadic round trip and rendering") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-50, 50);
  for (int i = 0; i < 200; ++i) {
    DyadicReal a = DyadicReal::from_double(std::exp(U(rng))).mul(DyadicReal::pow2(BigInt(1) << 80));
    DyadicReal b = DyadicReal::from_double(std::exp(U(rng)));
    DyadicReal back = a.mul(b).div(b);
    CHECK(back.exponent() == a.exponent());
    Real rel = abs(back.significand() - a.significand());
    CHECK(rel <= ldexp(Real(1), -(int)working_bits() + 1));
  }
  CHECK(DyadicReal::pow2(-128).str().find("×2^-128") != std::string::npos);
  CHECK_THROWS_AS(DyadicReal::pow2(3).div(DyadicReal()), domain_error);
  DyadicReal three = DyadicReal::from_double(3);
  CHECK(three.pow_int(5).to_double() == doctest::Approx(243.0));
  CHECK(three.pow_int(-2).to_double() == doctest::Approx(1.0 / 9));
}

TEST_CASE("log-polar pow and root") {
  LogPolar z = LogPolar::polar(Log2Real::from_ratio(7, 2), Angle::from_ratio(1, 4));
  LogPolar p = lp_pow(z, 2);
  CHECK(p.rho == Log2Real(7));
  CHECK(p.theta == Angle::from_ratio(1, 2));
  LogPolar r = lp_root(p, 2, 1);
  CHECK(r.rho == Log2Real::from_ratio(7, 2));
  CHECK(r.theta == Angle::from_ratio(3, 4));
  CHECK_THROWS(lp_root(p, 2, 2));
  CHECK(lp_root(LogPolar::zero(), 3, 0).is_zero);

  // scalar oracle for 64 * (23008 + log2(2/5))
  LogPolar q = LogPolar::polar(Log2Real(23008) + Log2Real::from_real(log2(Real(2) / 5)), Angle());
  double expect = 64.0 * 23008 + 64.0 * std::log2(0.4);
  CHECK(std::fabs(lp_pow(q, 64).rho.to_double() - expect) < std::ldexp(1.0, -20));
}

TEST_CASE("root then pow is exact") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    long n = 1 + rng() % 1000;
    BigInt b = rng() % n;
    LogPolar z = LogPolar::polar(Log2Real::from_real(Real(double(rng() % 100000) / 7.0)),
                                 Angle::from_real(Real(double(rng() % 100000) / 100001.0)));
    LogPolar back = lp_pow(lp_root(z, n, b), n);
    if (is_pow2(BigInt(n))) {
      CHECK(back.rho == z.rho);
      CHECK(back.theta == z.theta);
    } else {
      Log2Real err = back.rho - z.rho;
      CHECK(abs(err.to_real()) <= ldexp(Real(n), -(int)fix_bits()));
      Real dt = abs((back.theta - z.theta).centered());
      CHECK(dt <= ldexp(Real(n), -(int)fix_bits()));
    }
  }
}

TEST_CASE("lp_add examples") {
  LogPolar big = LogPolar::polar(752, Angle()), small = LogPolar::polar(4, Angle());
  AddResult a = lp_add(big, small);
  CHECK(a.status == AddStatus::negligible);
  CHECK(a.value.rho == Log2Real(752));

  LogPolar u = LogPolar::polar(3, Angle()), v = LogPolar::polar(3, Angle::from_ratio(1, 2));
  AddResult c = lp_add(u, v);
  CHECK(c.status == AddStatus::cancellation);
  CHECK(c.value.is_zero);

  LogPolar w = LogPolar::polar(3, Angle::from_ratio(1, 3));
  AddResult s = lp_add(u, w);
  std::complex<double> oracle = 8.0 + 8.0 * std::polar(1.0, 2 * M_PI / 3);
  CHECK(s.value.rho.to_double() == doctest::Approx(std::log2(std::abs(oracle))).epsilon(1e-14));
  CHECK(s.value.theta.to_double() == doctest::Approx(turns_of(oracle)).epsilon(1e-14));
  CHECK(s.value.rho.to_double() == doctest::Approx(3.0));
  CHECK(s.value.theta.to_double() == doctest::Approx(1.0 / 6));
}

TEST_CASE("lp_add matches double complex and commutes") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> E(-60, 60), T(0, 2 * M_PI);
  for (int i = 0; i < 500; ++i) {
    std::complex<double> a = std::polar(std::exp2(E(rng)), T(rng));
    std::complex<double> b = std::polar(std::exp2(E(rng)), T(rng));
    std::complex<double> sum = a + b;
    AddResult r1 = lp_add(lp_of(a), lp_of(b)), r2 = lp_add(lp_of(b), lp_of(a));
    std::complex<double> g = cx_of(r1.value);
    CHECK(std::abs(g - sum) <= 1e-12 * std::abs(sum));
    CHECK(r1.value.rho == r2.value.rho);
    CHECK(std::fabs((r1.value.theta - r2.value.theta).centered().convert_to<double>()) < 1e-30);
  }
}

TEST_CASE("minus one keeps relative precision near 1") {
  Real tiny = ldexp(Real(1), -5000);
  LogPolar t = lp_with_delta(LogPolar::polar(0, Angle()), Cx(tiny, Real(0)));
  AddResult r = lp_minus_one(t);
  CHECK(r.value.rho.to_double() == doctest::Approx(-5000.0));
  LogPolar one = LogPolar::polar(0, Angle());
  CHECK(lp_minus_one(one).value.is_zero);
  LogPolar far = LogPolar::polar(1000, Angle());
  CHECK(lp_minus_one(far).status == AddStatus::negligible);
}

TEST_CASE("delta survives pow and root") {
  Real tiny = ldexp(Real(1), -3000);
  LogPolar z = lp_with_delta(LogPolar::polar(10, Angle::from_ratio(1, 8)), Cx(tiny, tiny));
  LogPolar p = lp_pow(z, BigInt(1) << 20);
  CHECK(p.has_delta);
  Real ratio = p.delta.re / tiny;
  CHECK(abs(ratio - Real(1 << 20)) < Real(1e-20) * Real(1 << 20));
  LogPolar back = lp_root(p, BigInt(1) << 20, BigInt(1) << 16);
  CHECK(back.rho == z.rho);
  CHECK(abs(back.delta.im / tiny - 1) < Real(1e-30));
}

TEST_CASE("angle arithmetic is exact mod 1") {
  Angle a = Angle::from_ratio(3, 8), b = Angle::from_ratio(7, 8);
  CHECK((a + b) == Angle::from_ratio(1, 4));
  CHECK(a.mul(BigInt(1) << 200) == Angle());
  CHECK(Angle::from_ratio(5, 8).centered() == Real(-3) / 8);
  Cx c = cis(Angle::from_ratio(1, 2));
  CHECK(c.re == -1);
  CHECK(c.im == 0);
}

TEST_CASE("big exponents render") {
  Log2Real big = Log2Real::from_int(BigInt(1) << 200) + Log2Real::from_ratio(1, 4);
  std::string s = big.str(4);
  CHECK(s.find(".25") != std::string::npos);
  CHECK(big.floor() == (BigInt(1) << 200));
}
