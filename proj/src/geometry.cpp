#include "mcwd/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace mcwd {

std::string Region::str() const {
  switch (tag) {
    case RegionTag::A: return "A(" + std::to_string(k) + ")";
    case RegionTag::B: return "B(" + std::to_string(k) + ")";
    case RegionTag::V: return "V(" + std::to_string(k) + ")";
    case RegionTag::Petal: return "P(" + std::to_string(k) + "," + j.str() + ")";
    case RegionTag::D: return "D";
    case RegionTag::L: return "L(" + std::to_string(n) + ")";
    case RegionTag::Boundary: return "boundary";
  }
  return "?";
}

bool Region::operator==(const Region& o) const {
  if (tag != o.tag) return false;
  switch (tag) {
    case RegionTag::A:
    case RegionTag::B:
    case RegionTag::V: return k == o.k;
    case RegionTag::Petal: return k == o.k && j == o.j;
    case RegionTag::L: return n == o.n;
    default: return true;
  }
}

Region region_A(long k) { return {RegionTag::A, k}; }
Region region_B(long k) { return {RegionTag::B, k}; }
Region region_V(long k) { return {RegionTag::V, k}; }
Region region_petal(long k, const BigInt& j) { return {RegionTag::Petal, k, j}; }
Region region_D() { return {RegionTag::D}; }

const AnnulusEdges& annulus_edges() {
  static const AnnulusEdges e = [] {
    AnnulusEdges a;
    a.quarter = Log2Real(-2);
    a.two_fifths = Log2Real::from_real(log2(Real(2) / 5));
    a.three_fifths = Log2Real::from_real(log2(Real(3) / 5));
    a.four = Log2Real(2);
    return a;
  }();
  return e;
}

long annulus_index(const ModelMap& m, const Log2Real& rho) {
  const ParamTable& t = m.table();
  const Log2Real q = annulus_edges().quarter;
  long K = t.kmax_stored();
  if (rho < Log2Real::from_int(t.eR(1)) + q) return 0;
  if (rho >= Log2Real::from_int(t.eR(K)) + q)
    throw resource_error("point beyond the stored annuli (raise kmax)");
  long lo = 1, hi = K;
  while (hi - lo > 1) {
    long mid = (lo + hi) / 2;
    if (Log2Real::from_int(t.eR(mid)) + q <= rho) lo = mid;
    else hi = mid;
  }
  return lo;
}

double petal_depth(const ModelMap& m, long k, const LogPolar& z, BigInt* j_out) {
  const ParamTable& t = m.table();
  long jj = t.j_of(k);
  BigInt n = t.n(k);
  // zero angles are (1/2 + b)/n, so the nearest is b = floor(n theta)
  const Angle& th = z.theta;
  BigInt b = floor_shift(th.mant() * n, th.scale());
  b = b % n;
  if (b < 0) b += n;
  if (j_out) *j_out = b + 1;
  LogPolar w = m.seam_zero(jj, b);
  AddResult u = lp_minus_one(lp_div(z, w));
  if (u.value.is_zero) return -std::numeric_limits<double>::infinity();
  // radius relative to |w|: 2^{-n} e^{-pi/(4n)}
  Log2Real lu = u.value.log2_abs();
  Log2Real rel = Log2Real::from_int(-n) - m.seam_width(jj).div(4);
  Log2Real d = lu - rel;
  if (d > Log2Real(1 << 20)) return double(1 << 20);
  return d.to_double();
}

Region classify(const ModelMap& m, const LogPolar& z, double margin) {
  if (z.is_zero) return region_D();
  const ParamTable& t = m.table();
  const AnnulusEdges& E = annulus_edges();
  Log2Real rho = z.log2_abs();
  Log2Real mg = Log2Real::from_real(Real(margin));
  Region bnd{RegionTag::Boundary};
  bnd.margin = margin;
  auto near = [&](const Log2Real& edge) {
    if (margin <= 0) return false;
    Log2Real d = rho - edge;
    return (d.sign() < 0 ? -d : d) < mg;
  };
  long k = annulus_index(m, rho);
  if (k == 0) {
    if (near(Log2Real::from_int(t.eR(1)) + E.quarter)) return bnd;
    return region_D();
  }
  Log2Real eR = Log2Real::from_int(t.eR(k));
  if (near(eR + E.quarter) || near(eR + E.four) ||
      near(Log2Real::from_int(t.eR(k + 1)) + E.quarter))
    return bnd;
  if (rho >= eR + E.four) {
    Region r = region_B(k);
    return r;
  }
  // petals sit at |z| = R_k e^{pi/(4 n_k)}
  Log2Real shell = rho - eR;
  if (shell > E.three_fifths) {
    BigInt j;
    double d = petal_depth(m, k, z, &j);
    if (margin > 0 && std::fabs(d) < margin) return bnd;
    if (d < 0) return region_petal(k, j);
  }
  if (near(eR + E.two_fifths) || near(eR + E.three_fifths)) return bnd;
  if (shell > E.two_fifths && shell < E.three_fifths) return region_V(k);
  return region_A(k);
}

PetalSpec petal_spec(const ModelMap& m, long k, const BigInt& j) {
  const ParamTable& t = m.table();
  BigInt n = t.n(k);
  if (j < 1 || j > n) throw std::invalid_argument("petal index must be in 1..n_k");
  PetalSpec p;
  p.k = k;
  p.j = j;
  p.center = m.seam_zero(t.j_of(k), j - 1);
  p.radius = DyadicReal::pow2(t.eR(k) - n);
  Real f = Real(m.lambda) * expm1(real_pi() / to_real(n));
  p.conformal_radius = DyadicReal::pow2(t.eR(k)).mul(DyadicReal::from_real(f));
  return p;
}

ZeroList zeros_in_annulus(const ModelMap& m, long k, size_t cap) {
  const ParamTable& t = m.table();
  ZeroList out;
  out.count = t.n(k);
  size_t c = out.count > BigInt(cap) ? cap : out.count.convert_to<size_t>();
  long j = t.j_of(k);
  for (size_t b = 0; b < c; ++b) out.zeros.push_back(m.seam_zero(j, BigInt(b)));
  return out;
}

namespace {

// max pairwise log2 distance of a sample set
double log2_diam(const std::vector<LogPolar>& pts) {
  double best = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b) best = std::max(best, lp_log2_dist(pts[a], pts[b]));
  return best;
}

}  // namespace

LevelLines level_lines(const ModelMap& m, int n, int words, int samples) {
  if (n < 1) throw std::invalid_argument("level_lines needs n >= 1");
  const ParamTable& t = m.table();
  const long N = t.N;
  LevelLines out;
  out.count = BigInt(1) << static_cast<unsigned>(N * n);
  BigInt deg = t.M(N);
  // each pullback through a nonzero branch shrinks relative variation by about R_1
  BigInt eN = t.e_at(N);
  BigInt need = BigInt(192) + BigInt(n) * (eN + 16);
  if (need > BigInt(1) << 16) {
    out.notes.push_back("sample diameters need " + need.str() +
                        " bits; expansion not evaluated at this depth");
    out.expansion_check = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  WorkingBits wb(need.convert_to<unsigned>());

  std::vector<std::vector<long>> ws;
  BigInt total = BigInt(1) << static_cast<unsigned>(N * n);
  if (total <= BigInt(words)) {
    long tot = total.convert_to<long>();
    for (long w = 0; w < tot; ++w) {
      std::vector<long> d;
      long x = w;
      for (int l = 0; l < n; ++l) d.push_back(x % (1L << N)), x >>= N;
      ws.push_back(d);
    }
  } else {
    std::mt19937_64 rng(12345);
    ws.push_back(std::vector<long>(n, 0));
    ws.push_back(std::vector<long>(n, 1));
    while (static_cast<int>(ws.size()) < words) {
      std::vector<long> d;
      for (int l = 0; l < n; ++l) d.push_back(static_cast<long>(rng() % deg.convert_to<unsigned long>()));
      ws.push_back(d);
    }
  }

  double worst = std::numeric_limits<double>::infinity();
  Log2Real gamma_rho = Log2Real::from_int(eN) + Log2Real(2);
  double lR1 = eN.convert_to<double>();
  for (const auto& w : ws) {
    std::vector<std::vector<LogPolar>> lvl(n + 1);
    for (int i = 0; i < samples; ++i) lvl[0].push_back(LogPolar::polar(gamma_rho, Angle::from_ratio(i, samples)));
    bool ok = true;
    for (int l = 1; l <= n && ok; ++l) {
      for (const auto& T : lvl[l - 1]) {
        try {
          lvl[l].push_back(qN_inverse(m, T, BigInt(w[l - 1])).z);
        } catch (const convergence_error&) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      ++out.failures;
      continue;
    }
    double dn = log2_diam(lvl[n]), dm = log2_diam(lvl[n - 1]);
    worst = std::min(worst, dm - dn - lR1);
    ++out.components_sampled;
  }
  out.expansion_check = std::exp2(worst);
  return out;
}

}  // namespace mcwd
