#pragma once

#include <string>
#include <vector>

#include "mcwd/params.hpp"
#include "mcwd/report.hpp"

namespace mcwd {

enum class Verdict { converges, diverges, inconclusive };
std::string verdict_str(Verdict v);

struct DimConstants {
  double Lpp = 10, Pp = 10;  // Koebe distortion constants L'' and P'
  double delta = 0.25, lambda = 0.05;
  json to_json() const;
};

// Sums are kept as log2 values; partial_sum and tail_bound are 2^{log2} and may
// under- or overflow a double.
struct CoverReport {
  std::string name;
  double t = 0;
  double partial_log2 = 0, tail_log2 = 0, first_omitted_log2 = 0;
  double partial_sum = 0, tail_bound = 0;
  double ratio = 0, ratio_log2 = 0;  // geometric ratio used for the tail
  double tail_excess_log2 = 0;       // log2(tail / first omitted term), below 1 when ratio < 1/2
  long cut = 0;                      // kcut / lcut / terms summed
  Verdict verdict = Verdict::inconclusive;
  DimConstants constants;
  json extra = json::object();
  std::string diagnosis;
  double total_log2() const;  // log2(partial + tail)
  json to_json() const;
};

// Origin Cantor set: sum_n (2^N R_1^{-t})^n.
CoverReport origin_dim_bound(const ParamTable& t, double tdim);
Rational origin_critical_exponent(const ParamTable& t);  // N / e_N

// sum_{k>=1} 2^k L_k R_k^{-t}, L_k = n_1 ... n_k.
CoverReport holesum_eval(const ParamTable& t, double tdim, long kcut);

// Two conditions of the buried-point estimate plus the layer total.
CertificateReport layer_checks(const ParamTable& t, double tdim, double Lpp);

// (P')^t R_k^t sum_{j>=lcut} 2^j L_{k+j} 2^{-t n_{k+j}}.
CoverReport z2_tail(const ParamTable& t, long k, double tdim, long lcut, double Pp, double eps = 1e-3);

// Smallest N <= 64 certified by all four reports; -1 when none.
int min_N_for_dimension(double tdim, const DimConstants& c = DimConstants());
// Whether all four reports certify at N.
bool certifies(int N, double tdim, const DimConstants& c, json* why = nullptr);

double hausdorff_sum_log2(const std::vector<DyadicReal>& diams, double tdim);
double hausdorff_sum(const std::vector<DyadicReal>& diams, double tdim);

}  // namespace mcwd
