#pragma once

#include <cmath>
#include <vector>

#include "mcwd/numerics.hpp"
#include "mcwd/report.hpp"

namespace mcwd {

// Exponent sequences for r_j = 2^{e_j}, c_j = 2^{eps_j}, M_j = 2^j, plus the
// re-indexed quantities n_k, R_k, C_k for a fixed N.
struct ParamTable {
  int N = 10;
  int kmax = 64;
  int jmax = 0;  // r_j, c_j stored for 1 <= j <= jmax
  double Cprime = 1.0;
  double p = 2 * std::sqrt(2.0);
  double R_phi = 16.0;
  int k0 = -1;
  std::vector<BigInt> e, eps;  // index 0 unused

  BigInt M(long j) const;
  const BigInt& e_at(long j) const;
  const BigInt& eps_at(long j) const;
  DyadicReal r(long j) const { return DyadicReal::pow2(e_at(j)); }
  DyadicReal c(long j) const { return DyadicReal::pow2(eps_at(j)); }

  long j_of(long k) const { return k + N - 1; }
  BigInt n(long k) const { return M(j_of(k)); }  // n_0 = M_{N-1}
  const BigInt& eR(long k) const { return e_at(j_of(k)); }
  const BigInt& eC(long k) const { return eps_at(j_of(k)); }
  DyadicReal R(long k) const { return r(j_of(k)); }
  DyadicReal C(long k) const { return c(j_of(k)); }
  long log2n(long k) const { return j_of(k); }

  double alpha(long k) const;
  double beta(long k) const;
  long kmax_stored() const { return jmax - N + 1; }  // largest k with R_k stored
};

ParamTable build_params(int N, int kmax, double Cprime = 1.0, double p = 2 * std::sqrt(2.0),
                        double R_phi = 16.0);

CertificateReport verify_inequalities(const ParamTable& t);

// (1/2)^{sqrt(ln ln r^-1)/p}
double omega_eval(double p, const DyadicReal& r);
// same with r given through log2(1/r)
double omega_from_log2_inv(double p, const Log2Real& log2_inv_r);

int compute_k0(const ParamTable& t);

json params_json(const ParamTable& t, long jshow);

}  // namespace mcwd
