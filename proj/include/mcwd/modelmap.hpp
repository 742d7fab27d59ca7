#pragma once

#include <string>
#include <vector>

#include "mcwd/numerics.hpp"
#include "mcwd/params.hpp"

namespace mcwd {

enum class PieceKind { OriginPoly, Bump, Power, Seam };

struct PieceId {
  PieceKind kind = PieceKind::OriginPoly;
  long j = 0;
  std::string str() const;
  bool operator==(const PieceId& o) const { return kind == o.kind && j == o.j; }
};

// h_N with phi = identity:
//   |z| <= r_N - 1               q_N(z) = c_N z^{M_N} + r_N z
//   r_N - 1 <= |z| <= r_N        g_N, the bump blend
//   r_j <= |z| <= r_j e^{pi/M_j}  S_j(z) = c_j z^{M_j}(z^{M_j} - zeta_j^{M_j}) / r_j^{M_j}
//   otherwise                    c_j z^{M_j}
class ModelMap {
 public:
  explicit ModelMap(ParamTable t, double lambda = 0.05, double delta = 0.25);

  const ParamTable& table() const { return t_; }
  int N() const { return t_.N; }
  double lambda = 0.05, delta = 0.25;

  const Log2Real& e(long j) const { return le_.at(j); }
  const Log2Real& seam_width(long j) const { return w_.at(j); }  // log2 e^{pi/M_j}
  Log2Real seam_outer(long j) const { return e(j) + seam_width(j); }
  const Log2Real& bump_inner() const { return bump_in_; }  // log2(r_N - 1)
  bool bump_resolvable() const { return bump_in_ < e(t_.N); }

  LogPolar zeta(long j) const;   // r_j e^{pi/(4M_j)} e^{i pi/M_j}
  LogPolar zetaM(long j) const;  // zeta_j^{M_j}, modulus r_j^{M_j} e^{pi/4}, argument pi
  LogPolar seam_zero(long j, const BigInt& b) const;  // zeta_j e^{2 pi i b/M_j}

  PieceId piece_of(const LogPolar& z) const;
  long jtop() const { return t_.jmax - 1; }  // highest seam index with a power piece above

 private:
  ParamTable t_;
  std::vector<Log2Real> le_, w_;
  Log2Real bump_in_;
};

struct EvalResult {
  LogPolar value;
  PieceId piece;
};

EvalResult eval_model(const ModelMap& m, const LogPolar& z);
// The formula of piece p applied to z, wherever z lies.
LogPolar eval_piece(const ModelMap& m, const LogPolar& z, const PieceId& p);
LogPolar deriv_model(const ModelMap& m, const LogPolar& z);
LogPolar deriv_piece(const ModelMap& m, const LogPolar& z, const PieceId& p);

struct ambiguity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bump profile
Real bump_b(const Real& x);
Real bump_db(const Real& x);

// g_k with |z| = r_k - 1 + s, s in [0,1]; shifted coordinates keep s exact even
// when 1/r_k is far below any fixed-point resolution.
LogPolar eval_bump_gk(const ModelMap& m, long k, const Real& s, const Angle& theta);
LogPolar eval_bump_gk(const ModelMap& m, long k, const LogPolar& z);

struct GkPartials {
  LogPolar gz;       // M c z^{M-1} + r (eta + eta'|z|/2)
  Log2Real log2_gzbar;  // log2 of r |eta'| |z| / 2, meaningful when has_gzbar
  bool has_gzbar = false;
  bool flagged = false;  // cancellation in gz
};
GkPartials gk_partials(const ModelMap& m, long k, const Real& s, const Angle& theta);

struct DilatationSup {
  long k = 0;
  double log2_sup = 0;  // -inf when mu vanishes on the whole grid
  double sup = 0;
  long samples = 0, flagged = 0;
};
DilatationSup dilatation_sup(const ModelMap& m, long k, int grid);

struct KPrime {
  long Kprime = -1;
  std::vector<DilatationSup> sweep;  // K'..K'+8
  bool decreasing = false;
};
KPrime find_Kprime(const ModelMap& m, int grid);

struct SeamMismatch {
  double inner_max_log2_ratio = 0, outer_max_log2_ratio = 0;
  double inner_min_ratio = 0, inner_max_ratio = 0;  // linear ratios on the inner circle
};
SeamMismatch seam_mismatch(const ModelMap& m, long j, int samples);

struct QnLandmarks {
  std::vector<LogPolar> zeros, crit_points, crit_values;
  DyadicReal deriv_at_zero;  // r_N (M_N - 1)
  Log2Real crit_value_log2;  // common modulus of the critical values
};
QnLandmarks qN_landmarks(const ModelMap& m, size_t max_count = 1u << 20);

// Seam stand-in critical points and values. Radius r_j e^{pi/(4M)} 2^{-1/M},
// value modulus (e^{pi/2}/4) c_j r_j^{M_j}.
struct SeamCritical {
  Log2Real point_log2, value_log2;
};
SeamCritical seam_critical(const ModelMap& m, long j);

struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InverseResult {
  LogPolar z;
  int iterations = 0;
};

// (b)-th nonzero zero of q_N, b in [0, M_N - 1): angle (1/2 + b)/(M_N - 1)
LogPolar qN_zero(const ModelMap& m, const BigInt& b);

// Branches of q_N^{-1} near the origin: b = 0 fixes 0, b >= 1 sits at qN_zero(b - 1).
// Targets are expected in B(0, 4R_1); output near a zero is zero * (1 + u).
InverseResult qN_inverse(const ModelMap& m, const LogPolar& T, const BigInt& b);

// Inverse of S_j on the petal at seam_zero(j, b): solves K v (1 + v) = T in closed form.
InverseResult seam_inverse(const ModelMap& m, long j, const BigInt& b, const LogPolar& T);

// Inverse of c_j z^{M_j}, branch b in [0, M_j). For j = N the q_N correction
// r_N z is folded in by fixed-point refinement.
InverseResult power_inverse(const ModelMap& m, long j, const BigInt& b, const LogPolar& T);

}  // namespace mcwd
