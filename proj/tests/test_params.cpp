#include <cmath>

#include "doctest.h"
#include "mcwd/params.hpp"

using namespace mcwd;

namespace {

// straight long long recurrence, independent of the BigInt table
struct Small {
  long long e[12], eps[12];
  Small() {
    e[1] = 4;
    eps[1] = 0;
    for (int j = 1; j < 11; ++j) {
      long long M = 1LL << j;
      e[j + 1] = eps[j] + M * (e[j] - 1);
      eps[j + 1] = eps[j] - M * e[j];
      if (j >= 6) break;  // keeps within 64 bits
    }
  }
};

}  // namespace

TEST_CASE("table values") {
  ParamTable t = build_params(5, 8);
  CHECK(t.M(4) == 16);
  CHECK(t.eps_at(4) == -128);
  CHECK(t.e_at(4) == 56);
  CHECK(t.e_at(5) == 752);
  CHECK(t.eps_at(5) == -1024);
  CHECK(t.e_at(6) == 23008);
  Small s;
  for (int j = 1; j <= 7; ++j) {
    CHECK(t.e_at(j) == s.e[j]);
    CHECK(t.eps_at(j) == s.eps[j]);
  }
  CHECK(t.r(5).exponent() == 752);
  CHECK(t.c(4).exact_pow2());
  CHECK(t.n(0) == 16);
  CHECK(t.eR(1) == 752);
}

TEST_CASE("ckrkeq at k=4") {
  ParamTable t = build_params(5, 8);
  CertificateReport rep = verify_inequalities(t);
  bool seen = false;
  for (const auto& c : rep.certs)
    if (c.name == "ckrkeq" && c.index == 4) {
      seen = true;
      CHECK(c.lhs == "768");
      CHECK(c.rhs == "504");
      CHECK(c.pass);
    }
  CHECK(seen);
}

TEST_CASE("all certificates pass") {
  for (int N : {5, 10, 14}) {
    ParamTable t = build_params(N, 64);
    CertificateReport rep = verify_inequalities(t);
    CAPTURE(N);
    CHECK(rep.failures() == 0);
    CHECK(rep.certs.size() > 300);
    bool q = false;
    for (const auto& c : rep.certs) q = q || c.name == "quotient_est_lower";
    CHECK(q == (N >= 10));
    CHECK(rep.summaries["permissible_j1"]["holds"] == false);
    CHECK(rep.summaries["alpha_beta_window"]["holds_for_all_stored_k"] == false);
  }
}

TEST_CASE("k0 and bit budget") {
  ParamTable t = build_params(5, 16);
  CHECK(t.k0 == 3);
  CHECK_THROWS_AS(build_params(5, 100000), resource_error);
  CHECK_THROWS(build_params(4, 10));
}

TEST_CASE("omega examples") {
  double p = 2 * std::sqrt(2.0);
  CHECK(omega_eval(p, DyadicReal::from_real(exp(Real(-1)))) == doctest::Approx(1.0));
  double want = std::pow(0.5, 1.0 / p);
  CHECK(omega_eval(p, DyadicReal::from_real(exp(-exp(Real(1))))) == doctest::Approx(want));
  CHECK_THROWS_AS(omega_eval(p, DyadicReal::from_double(0.5)), domain_error);
  // 2^{-2^40}: ln ln = ln(2^40 ln 2)
  double w = omega_from_log2_inv(p, Log2Real::from_int(BigInt(1) << 40));
  double ll = std::log(std::ldexp(1.0, 40) * std::log(2.0));
  CHECK(w == doctest::Approx(std::pow(0.5, std::sqrt(ll) / p)));
}

TEST_CASE("report json") {
  ParamTable t = build_params(10, 4);
  json j = verify_inequalities(t).to_json();
  CHECK(j.is_array());
  CHECK(j[0].contains("lhs_exponent"));
  json pj = params_json(t, 6);
  CHECK(pj["table"][4]["log2_r"] == "752");
}
