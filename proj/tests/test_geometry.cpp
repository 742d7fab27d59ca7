#include <cmath>
#include <random>

#include "doctest.h"
#include "mcwd/geometry.hpp"

using namespace mcwd;

namespace {

const ModelMap& map5() {
  static ModelMap m(build_params(5, 12));
  return m;
}

}  // namespace

TEST_CASE("classification examples") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  for (long k = 1; k <= 5; ++k) {
    Log2Real eR = Log2Real::from_int(t.eR(k));
    CHECK(classify(m, LogPolar::polar(eR, Angle::from_ratio(1, 3))) == region_A(k));
    CHECK(classify(m, LogPolar::polar(eR + Log2Real(3), Angle())) == region_B(k));
    CHECK(classify(m, LogPolar::polar(eR - Log2Real(1), Angle())) == region_V(k));
    CHECK(classify(m, LogPolar::polar(eR + Log2Real(2), Angle())) == region_B(k));
    CHECK(classify(m, LogPolar::polar(eR - Log2Real(2), Angle())) == region_A(k));
    // within margin of 4R_k
    CHECK(classify(m, LogPolar::polar(eR + Log2Real(2), Angle()), 0.01).tag == RegionTag::Boundary);
    // petal centres and points just inside
    BigInt n = t.n(k);
    for (BigInt j : {BigInt(1), BigInt(n / 2), n}) {
      PetalSpec p = petal_spec(m, k, j);
      CHECK(classify(m, p.center) == region_petal(k, j));
      LogPolar in = lp_with_delta(p.center, Cx(ldexp(Real(1), -int(n.convert_to<long>()) - 2), Real(0)));
      CHECK(classify(m, in) == region_petal(k, j));
      LogPolar out = lp_with_delta(p.center, Cx(Real(0), ldexp(Real(1), -int(n.convert_to<long>()) + 1)));
      CHECK(classify(m, out) == region_A(k));
    }
  }
  CHECK(classify(m, LogPolar::polar(Log2Real(700), Angle())) == region_D());
  CHECK(classify(m, LogPolar::zero()) == region_D());
  CHECK(region_petal(3, 17).str() == "P(3,17)");
  CHECK(region_V(2).str() == "V(2)");
}

TEST_CASE("partition of |z| > R_1/4 alternates A and B") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  std::mt19937_64 rng(4);
  for (long k = 1; k <= 6; ++k) {
    double lo = t.eR(k).convert_to<double>() - 2, hi = t.eR(k + 1).convert_to<double>() - 2;
    std::uniform_real_distribution<double> U(lo, hi);
    for (int i = 0; i < 200; ++i) {
      double r = U(rng);
      Region g = classify(m, LogPolar::polar(Log2Real::from_real(Real(r)), Angle::from_ratio(rng() % 997, 997)));
      CHECK(g.k == k);
      if (r < lo + 4) CHECK(g.in_A());
      else CHECK(g.tag == RegionTag::B);
    }
  }
}

TEST_CASE("petal specs") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  for (long k = 1; k <= t.kmax_stored() - 1; ++k) {
    PetalSpec p = petal_spec(m, k, 1);
    CHECK(p.nested());
    // inside A(3/5 R_k, 5/4 R_k) with room to spare
    double off = (p.center.rho - Log2Real::from_int(t.eR(k))).to_double();
    CHECK(off > std::log2(0.6));
    CHECK(off < std::log2(1.25));
    if (k > 3) continue;  // doubles lose the gap beyond this
    // neighbouring centres are 2 sin(pi/n) |w| apart, far more than two radii
    PetalSpec q = petal_spec(m, k, 2);
    double d = lp_log2_dist(p.center, q.center);
    CHECK(d > (p.radius.log2_abs() + Log2Real(1)).to_double());
  }
}

TEST_CASE("zeros in annulus") {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  for (long k = 1; k <= 3; ++k) {
    ZeroList z = zeros_in_annulus(m, k);
    CHECK(z.count == (BigInt(1) << (5 + k - 1)));
    CHECK(z.zeros.size() == z.count.convert_to<size_t>());
    Angle step = Angle::from_ratio(1, z.count);
    for (size_t i = 0; i < z.zeros.size(); ++i) {
      double off = (z.zeros[i].rho - Log2Real::from_int(t.eR(k))).to_double();
      CHECK(off == doctest::Approx(M_PI / (4 * z.count.convert_to<double>() * std::log(2.0))));
      CHECK(off > std::log2(0.6));
      CHECK(off < std::log2(1.25));
      if (i) CHECK(z.zeros[i].theta - z.zeros[i - 1].theta == step);
      CHECK(eval_model(m, z.zeros[i]).value.is_zero);
    }
  }
}

TEST_CASE("level lines") {
  const ModelMap& m = map5();
  LevelLines l1 = level_lines(m, 1);
  CHECK(l1.count == 32);
  CHECK(l1.components_sampled == 32);
  CHECK(l1.failures == 0);
  CHECK(l1.expansion_check >= 1);
  LevelLines l2 = level_lines(m, 2, 24, 16);
  CHECK(l2.count == 1024);
  CHECK(l2.failures == 0);
  CHECK(l2.expansion_check >= 1);
}
