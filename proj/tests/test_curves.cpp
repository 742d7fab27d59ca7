#include <cmath>

#include "doctest.h"
#include "mcwd/curves.hpp"

using namespace mcwd;

namespace {

const ModelMap& map5() {
  static ModelMap m(build_params(5, 30));
  return m;
}

DistortionModel synth() { return DistortionModel::synthetic(1.0, 2 * std::sqrt(2.0), 7); }

double rho_d(const Log2Real& r, const BigInt& base) {
  return (r - Log2Real::from_int(base)).to_double();
}

}  // namespace

TEST_CASE("identity depth-1 radii") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  for (long k = 1; k <= 3; ++k) {
    CurveTrace tr = trace_gamma(m, DistortionModel::identity(), k, 1, 256);
    double n = t.n(k + 1).convert_to<double>();
    // (1/2)(1/4)^{1/n} R_{k+1} is an exact dyadic exponent
    Log2Real inner = Log2Real::from_int(t.eR(k + 1)) - Log2Real(1) - Log2Real(2).div(t.n(k + 1));
    for (auto& r : tr.inner_radii) CHECK(r == inner);
    double outer = -1 + std::log2(0.75) / n;
    for (auto& r : tr.outer_radii) CHECK(rho_d(r, t.eR(k + 1)) == doctest::Approx(outer).epsilon(1e-14));
    CHECK(tr.inner_oscillation == 0);
    CHECK(tr.outer_oscillation == 0);
    // width R_{k+1}((3/4)^{1/n} - (1/4)^{1/n})/2 <= R_{k+1}/n_{k+1}
    WidthCheck w = width_check(m, tr);
    long double lw = std::log2(std::pow(0.75L, 1 / (long double)n) - std::pow(0.25L, 1 / (long double)n)) - 1;
    CHECK(w.measured_log2 - t.eR(k + 1).convert_to<double>() == doctest::Approx(double(lw)).epsilon(1e-9));
    CHECK(w.bound_log2 == t.eR(k + 1).convert_to<double>() - std::log2(n));
    CHECK(w.pass);
  }
}

TEST_CASE("identity traces are nested circles with shrinking width") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  CurveTrace prev;
  double prev_bound = 0;
  for (long d = 1; d <= 8; ++d) {
    CurveTrace tr = trace_gamma(m, DistortionModel::identity(), 1, d, 256);
    CHECK(tr.inner_oscillation <= std::ldexp(1.0, -120));
    CHECK(tr.outer_oscillation <= std::ldexp(1.0, -120));
    for (size_t i = 0; i < tr.inner_radii.size(); ++i) {
      CHECK(tr.inner_radii[i] < tr.outer_radii[i]);
      CHECK(rho_d(tr.inner_radii[i], t.eR(2)) > std::log2(0.4));
      CHECK(rho_d(tr.outer_radii[i], t.eR(2)) < std::log2(0.6));
      if (d > 1) {
        CHECK(prev.inner_radii[i] < tr.inner_radii[i]);
        CHECK(tr.outer_radii[i] < prev.outer_radii[i]);
      }
    }
    WidthCheck w = width_check(m, tr);
    CHECK(w.pass);
    if (d > 1) {
      // bound shrinks by n_{1+d}/8
      CHECK(prev_bound - w.bound_log2 == doctest::Approx(t.log2n(1 + d) - 3.0));
    }
    prev = tr;
    prev_bound = w.bound_log2;
  }
}

TEST_CASE("synthetic model satisfies its bounds") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  DistortionModel phi = synth();
  for (long L = 2; L <= 8; ++L) {
    double a = phi.scale_amplitude(t, L);
    long double ls = (t.eR(L).convert_to<long double>() + std::log2(0.6L)) * std::log(2.0L);
    double om = std::pow(0.5L, std::sqrt(std::log(ls)) / phi.p);
    CHECK(a == doctest::Approx(om));
    for (int s = 0; s < 16; ++s) {
      for (double f : {0.41, 0.5, 0.59}) {
        LogPolar z = LogPolar::polar(Log2Real::from_int(t.eR(L)) + Log2Real::from_real(log2(Real(f))),
                                     Angle::from_ratio(s, 16));
        double e = cx_abs(phi.eps(m, z)).convert_to<double>();
        Cx one(1, 0);
        double d = cx_abs(phi.dphi(m, z) - one).convert_to<double>();
        CHECK(e <= a * 7 / 32 + 1e-15);
        CHECK(e > 0);
        CHECK(d <= 10 * a);
        // numerical derivative along the radius against the analytic one
        if (s == 3 && f == 0.5) {
          Real h = ldexp(Real(1), -30);
          LogPolar z2 = lp_with_delta(z, Cx(h, 0));
          // (phi(z(1+h)) - phi(z)) / (z h) = ((1+h)(1+eps(z2)) - (1+eps(z))) / h
          Cx one1(1, 0);
          Cx num = cx_scale((Cx(1 + h, 0) * (one1 + phi.eps(m, z2))) - (one1 + phi.eps(m, z)), 1 / h);
          Cx an = phi.dphi(m, z);
          CHECK(cx_abs(num - an).convert_to<double>() < 1e-6);
        }
      }
    }
  }
  // Identity is exact
  LogPolar z = LogPolar::polar(Log2Real::from_int(t.eR(3)) - Log2Real(1), Angle::from_ratio(1, 3));
  CHECK(cx_is_zero(DistortionModel::identity().eps(m, z)));
}

TEST_CASE("synthetic traces") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  DistortionModel phi = synth();
  for (long d = 1; d <= 4; ++d) {
    CurveTrace tr = trace_gamma(m, phi, 1, d, 256);
    CHECK(tr.inner_oscillation > 0);
    CHECK(tr.inner_oscillation <= tr.oscillation_bound);
    CHECK(tr.outer_oscillation <= tr.oscillation_bound);
    for (size_t i = 0; i < tr.inner_radii.size(); ++i) {
      CHECK(tr.inner_radii[i] < tr.outer_radii[i]);
      CHECK(rho_d(tr.inner_radii[i], t.eR(2)) > std::log2(0.4));
      CHECK(rho_d(tr.outer_radii[i], t.eR(2)) < std::log2(0.6));
    }
    CHECK(width_check(m, tr).pass);
    CHECK(tr.tangent_partials.size() == size_t(d));
  }
  std::string csv = trace_gamma(m, phi, 1, 1, 256).to_csv();
  CHECK(csv.rfind("theta,inner_rho,outer_rho\n", 0) == 0);
}

TEST_CASE("tangent products") {
  const ModelMap& m = map5();
  Angle th0 = Angle::from_ratio(1, 5);
  TangentProducts id = tangent_products(m, DistortionModel::identity(), 1, th0, 8);
  for (auto& p : id.partials) {
    CHECK(p.re == 1);
    CHECK(p.im == 0);
  }
  for (double d : id.diffs) CHECK(d == 0);

  DistortionModel phi = synth();
  TangentProducts tp = tangent_products(m, phi, 1, th0, 8);
  REQUIRE(tp.partials.size() == 8);
  for (size_t i = 0; i < tp.level_log.size(); ++i) CHECK(tp.level_log[i] <= tp.level_bound[i]);
  // |T_b - T_a| <= |T_a| (exp(sum_{a..b-1} bound) - 1)
  for (size_t a = 0; a < 8; ++a)
    for (size_t b = a + 1; b < 8; ++b) {
      double s = 0;
      for (size_t l = a + 1; l <= b; ++l) s += tp.level_bound[l];
      double lhs = cx_abs(tp.partials[b] - tp.partials[a]).convert_to<double>();
      double ta = cx_abs(tp.partials[a]).convert_to<double>();
      CHECK(lhs <= ta * std::expm1(s));
    }
  // sum_{l>=1} 2 2^{-sqrt(l+5)/4} by brute force to 4e6 terms plus the integral tail
  long double s = 0;
  for (long l = 1; l <= 4000000; ++l) s += 2 * std::exp2(-std::sqrt((long double)(l + 5)) / 4);
  long double u = std::sqrt(4000005.0L) / 4, ln2 = std::log(2.0L);
  s += 64 * std::exp2(-u) * (u / ln2 + 1 / (ln2 * ln2));
  CHECK(tp.limit_log_bound == doctest::Approx(double(s)).epsilon(1e-6));
  for (auto& p : tp.partials) CHECK(cx_abs(p).convert_to<double>() >= std::exp(-tp.limit_log_bound));
  // differences shrink with depth
  CHECK(tp.diffs.back() < tp.diffs.front());
}

TEST_CASE("angle check") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  CHECK(angle_check(m, DistortionModel::identity(), 1, 0, 3, 64).max_angle == 0);
  DistortionModel phi = synth();
  AngleCheck a01 = angle_check(m, phi, 1, 0, 1, 128);
  CHECK(a01.max_angle > 0);
  CHECK(a01.max_angle <= std::atan(48 * phi.scale_amplitude(t, 2)));
  AngleCheck a = angle_check(m, phi, 1, 0, 4, 64);
  CHECK(a.max_angle <= a.bound);
  double b = 0;
  for (long L = 2; L <= 5; ++L) b += std::atan(48 * phi.scale_amplitude(t, L));
  CHECK(a.bound == doctest::Approx(b));
  CHECK_THROWS_AS(angle_check(m, phi, 1, 2, 2, 4), std::invalid_argument);
}

TEST_CASE("dilatation integral") {
  ParamTable t = build_params(5, 30);
  double K = 0, Kh = 0;
  long prev_j = 0;
  for (int s = 4; s <= 14; ++s) {
    DyadicReal r = DyadicReal::pow2(-(BigInt(1) << s));
    DilatationIntegral d = dilatation_integral(t, r);
    // oracle: j(r) and the summed terms from the closed form in long double
    long j = 1;
    while (!((long double)(1L << s) < t.e_at(j).convert_to<long double>() + M_PI / (std::ldexp(1.0L, j) * std::log(2.0L)))) ++j;
    CHECK(d.j_r == j);
    CHECK(d.j_r >= prev_j);
    prev_j = d.j_r;
    long double sum = 0, last = 0;
    for (long i = j; i <= t.jmax; ++i) {
      long double e = t.e_at(i).convert_to<long double>();
      long double x = e < 60 ? std::ldexp(1.0L, -(int)e) : 0;
      last = M_PI * std::expm1(2 * M_PI / std::ldexp(1.0L, i) - 2 * std::log1p(-x));
      sum += last;
    }
    sum += last;
    CHECK(d.I_estimate == doctest::Approx(double(sum)).epsilon(1e-12));
    double om = std::exp2(-std::sqrt(s * std::log(2.0) + std::log(std::log(2.0))));
    CHECK(d.omega1 == doctest::Approx(om).epsilon(1e-12));
    K = std::max(K, d.I_estimate / d.omega1);
    Kh = std::max(Kh, d.I_estimate / d.bound_half_pow);
  }
  // summand tends to 2 pi^2 / M_j, so I(r) 2^{j(r)} approaches 4 pi^2 from above
  CHECK(Kh > 4 * M_PI * M_PI);
  CHECK(Kh < 64);
  CHECK(K < 100);
}
