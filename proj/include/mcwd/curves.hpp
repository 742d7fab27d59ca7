#pragma once

#include <string>
#include <vector>

#include "mcwd/modelmap.hpp"
#include "mcwd/report.hpp"

namespace mcwd {

// phi(z) = z (1 + eps(z)). SyntheticOmega uses, on V_L with s_L = (3/5) R_L,
//   eps(z) = a_L sum_{m=1..3} 2^{-(m+2)} e^{2 pi i psi_m} (z / s_L)^m,  a_L = C' omega_p(1/s_L)
// so |eps| <= (7/32) a_L and |phi' - 1| <= (9/16) a_L there.
struct DistortionModel {
  enum Kind { Identity, SyntheticOmega } kind = Identity;
  double Cprime = 1.0;
  double p = 2.8284271247461903;
  unsigned long phase_seed = 1;

  static DistortionModel identity() { return {}; }
  static DistortionModel synthetic(double Cprime, double p, unsigned long seed);

  double scale_amplitude(const ParamTable& t, long L) const;  // a_L, 0 for Identity
  Cx eps(const ModelMap& m, const LogPolar& z) const;         // zero outside any V_L
  Cx dphi(const ModelMap& m, const LogPolar& z) const;        // phi'(z)
  LogPolar apply(const ModelMap& m, const LogPolar& z) const;
  std::string str() const;
};

struct CurveTrace {
  long k = 1, m = 1;
  DistortionModel phi;
  std::vector<Angle> theta_grid;
  std::vector<Log2Real> inner_radii, outer_radii;  // rho values
  std::vector<Cx> tangent_partials;                 // along the inner chain at theta_grid[0]
  double inner_oscillation = 0, outer_oscillation = 0;  // max - min rho, log2 units
  double oscillation_bound = 0;  // accumulated eps budget in log2 units, 0 for Identity

  json to_json() const;
  std::string to_csv() const;  // theta,inner_rho,outer_rho
};

struct branch_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Boundaries of Gamma_{k,depth}: the circles (1/4)R_{k+1+depth} and (3/4)R_{k+1+depth}
// pulled back depth times by gamma_j(theta) = phi((gamma_{j+1}(n theta) / C)^{1/n}).
CurveTrace trace_gamma(const ModelMap& m, const DistortionModel& phi, long k, long depth, int grid);

struct WidthCheck {
  double measured_log2 = 0, bound_log2 = 0;  // log2 of linear widths
  bool pass = false;
};
WidthCheck width_check(const ModelMap& m, const CurveTrace& tr);

struct TangentProducts {
  std::vector<Cx> partials;          // T_1 .. T_mmax
  std::vector<double> diffs;         // |T_{i+1} - T_i| / |T_i|
  std::vector<double> level_log;     // |log| of the two factors at level i
  std::vector<double> level_bound;   // 2 C' 2^{-sqrt(L+N)/4} with L the annulus of level i
  double tail_from(size_t i) const;  // sum of level_bound from i on, plus the unsummed tail
  double limit_log_bound = 0;        // sum over all levels of 2 C' 2^{-sqrt(L+N)/4}
};
// Products of phi(u)/u and 1/phi'(u) along the pullback orbit of the point of
// Gamma_{k,mmax} at theta0 that starts on the circle (1/2)R_{k+1+mmax}.
TangentProducts tangent_products(const ModelMap& m, const DistortionModel& phi, long k,
                                 const Angle& theta0, long mmax);

struct AngleCheck {
  double max_angle = 0;  // radians
  double bound = 0;      // sum of arctan(48 a_L) over the levels n1..n2-1
  long samples = 0;
};
AngleCheck angle_check(const ModelMap& m, const DistortionModel& phi, long k, long n1, long n2,
                       int samples);

struct DilatationIntegral {
  double I_estimate = 0, omega1 = 0;
  long j_r = 0;
  double bound_half_pow = 0;  // (1/2)^{j(r)}
};
DilatationIntegral dilatation_integral(const ParamTable& t, const DyadicReal& r);

}  // namespace mcwd
