#pragma once

#include <string>
#include <vector>

#include "mcwd/modelmap.hpp"

namespace mcwd {

enum class RegionTag { A, B, V, Petal, D, L, Boundary };

struct Region {
  RegionTag tag = RegionTag::D;
  long k = 0;    // annulus index; <= 0 only when assigned by dynamics
  BigInt j = 0;  // petal index, 1-based
  long n = 0;    // level-line depth
  double margin = 0;

  std::string str() const;  // "A(k)", "B(k)", "V(k)", "P(k,j)", "D", "L(n)", "boundary"
  bool in_A() const { return tag == RegionTag::A || tag == RegionTag::V || tag == RegionTag::Petal; }
  bool operator==(const Region& o) const;
};

Region region_A(long k);
Region region_B(long k);
Region region_V(long k);
Region region_petal(long k, const BigInt& j);
Region region_D();

// Thresholds in log2 units relative to log2 R_k.
struct AnnulusEdges {
  Log2Real quarter, two_fifths, three_fifths, four;
};
const AnnulusEdges& annulus_edges();

// rho-based classification with an optional margin (log2 units): points within
// margin of any threshold come back as Boundary.
Region classify(const ModelMap& m, const LogPolar& z, double margin = 0);

// Annulus index k >= 1 with (1/4)R_k <= |z| < (1/4)R_{k+1}, or 0 inside D.
long annulus_index(const ModelMap& m, const Log2Real& rho);

struct PetalSpec {
  long k = 0;
  BigInt j = 0;
  LogPolar center;
  DyadicReal radius;             // R_k / 2^{n_k}
  DyadicReal conformal_radius;   // lambda (e^{pi/n_k} - 1) R_k
  bool nested() const { return radius < conformal_radius; }
};
PetalSpec petal_spec(const ModelMap& m, long k, const BigInt& j);

// log2 |z/w - 1| relative to the petal radius; negative inside the petal.
double petal_depth(const ModelMap& m, long k, const LogPolar& z, BigInt* j_out = nullptr);

struct ZeroList {
  BigInt count;  // n_k
  std::vector<LogPolar> zeros;  // first min(count, cap)
};
ZeroList zeros_in_annulus(const ModelMap& m, long k, size_t cap = 4096);

struct LevelLines {
  BigInt count;              // 2^{Nn}
  double expansion_check = 0;  // min over sampled components of diam ratio / R_1
  long components_sampled = 0;
  long failures = 0;           // branches that did not converge
  std::vector<std::string> notes;
};
// Pulls the circle |z| = 4R_1 back n times through q_N branches. words caps the
// number of sampled branch words; samples is points per circle.
LevelLines level_lines(const ModelMap& m, int n, int words = 64, int samples = 32);

}  // namespace mcwd
