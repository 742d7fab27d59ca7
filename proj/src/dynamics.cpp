#include "mcwd/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace mcwd {

std::string Classification::str() const {
  switch (kind) {
    case OrbitClass::FatouEscape: return "FatouEscape(" + std::to_string(value) + ")";
    case OrbitClass::ECandidate: return "ECandidate";
    case OrbitClass::YLike: return "YLike(" + std::to_string(value) + ")";
    case OrbitClass::Z1Like: return "Z1Like(" + std::to_string(value) + ")";
    case OrbitClass::Z2Like: return "Z2Like";
    case OrbitClass::Truncated: return "Truncated(" + reason + ")";
  }
  return "?";
}

json OrbitRecord::to_json() const {
  json j;
  json pts = json::array();
  for (const auto& p : points) {
    if (p.is_zero) pts.push_back({{"zero", true}});
    else pts.push_back({{"log2_abs", p.log2_abs().str(24)}, {"turns", p.theta.to_double()}});
  }
  j["points"] = pts;
  json rg = json::array();
  for (const auto& r : regions) rg.push_back(r.str());
  j["regions"] = rg;
  json sq = json::array();
  for (long k : orbit_seq) {
    if (k == kNoIndex) sq.push_back(nullptr);
    else sq.push_back(k);
  }
  j["orbit_seq"] = sq;
  j["backwards_events"] = backwards_events;
  j["classification"] = classification.str();
  j["angle_bits_used"] = angle_bits_used;
  return j;
}

void finish_record(const ModelMap&, OrbitRecord& r, bool escaped, const std::string& trunc) {
  const size_t L = r.regions.size();
  r.orbit_seq.assign(L, kNoIndex);
  for (size_t i = 0; i < L; ++i)
    if (r.regions[i].in_A()) r.orbit_seq[i] = r.regions[i].k;
  // a run of D steps followed by A_1 gets indices ..., -1, 0
  for (size_t i = 0; i < L;) {
    if (r.regions[i].tag != RegionTag::D) {
      ++i;
      continue;
    }
    size_t e = i;
    while (e < L && r.regions[e].tag == RegionTag::D) ++e;
    if (e < L && r.regions[e].in_A() && r.regions[e].k == 1)
      for (size_t q = i; q < e; ++q) r.orbit_seq[q] = 1 - static_cast<long>(e - q);
    i = e;
  }
  r.backwards_events.clear();
  for (size_t n = 1; n < L; ++n) {
    long a = r.orbit_seq[n - 1], b = r.orbit_seq[n];
    if (a != kNoIndex && b != kNoIndex && b < a + 1) r.backwards_events.push_back(static_cast<long>(n));
  }

  Classification c;
  if (escaped) {
    for (const auto& g : r.regions)
      if (g.tag == RegionTag::B) {
        c.kind = OrbitClass::FatouEscape;
        c.value = g.k;
        break;
      }
  } else if (!trunc.empty()) {
    c.kind = OrbitClass::Truncated;
    c.reason = trunc;
  } else if (std::all_of(r.regions.begin(), r.regions.end(),
                         [](const Region& g) { return g.tag == RegionTag::D; })) {
    c.kind = OrbitClass::ECandidate;
  } else if (!r.backwards_events.empty()) {
    c.kind = OrbitClass::YLike;
    c.value = static_cast<long>(r.backwards_events.size());
  } else {
    long nonV = 0, last = -1;
    for (size_t i = 0; i < L; ++i)
      if (r.regions[i].tag != RegionTag::V) ++nonV, last = static_cast<long>(i);
    if (nonV >= 2) {
      c.kind = OrbitClass::Z2Like;
    } else {
      c.kind = OrbitClass::Z1Like;
      c.value = last + 1;
    }
  }
  r.classification = c;
}

bool orbit_monotone(const OrbitRecord& r) {
  for (size_t n = 1; n < r.orbit_seq.size(); ++n) {
    long a = r.orbit_seq[n - 1], b = r.orbit_seq[n];
    if (a != kNoIndex && b != kNoIndex && b > a + 1) return false;
  }
  return true;
}

namespace {

// bits of angle consumed by applying f at a point of region g
long step_cost(const ModelMap& m, const Region& g) {
  if (g.tag == RegionTag::D) return m.N();
  return m.table().j_of(g.k);
}

}  // namespace

OrbitRecord iterate_orbit(const ModelMap& m, const LogPolar& z0, int nmax, const OrbitOptions& opt) {
  if (nmax < 1) throw std::invalid_argument("iterate_orbit needs nmax >= 1");
  long budget = opt.angle_budget >= 0 ? opt.angle_budget : long(num_config().ang_bits) - 64;
  OrbitRecord r;
  LogPolar z = z0;
  std::string trunc;
  bool escaped = false;
  for (int n = 0; n <= nmax; ++n) {
    Region g;
    try {
      g = classify(m, z, opt.margin);
    } catch (const resource_error& e) {
      trunc = e.what();
      break;
    }
    r.points.push_back(z);
    r.regions.push_back(g);
    if (g.tag == RegionTag::Boundary) {
      trunc = "boundary at step " + std::to_string(n);
      break;
    }
    if (n == nmax && g.tag != RegionTag::B) break;
    long cost = step_cost(m, g);
    if (r.angle_bits_used + cost > budget) {
      trunc = "angular budget: need " + std::to_string(r.angle_bits_used + cost + 64) + " bits, have " +
              std::to_string(budget + 64);
      break;
    }
    try {
      z = eval_model(m, z).value;
    } catch (const resource_error& e) {
      trunc = e.what();
      break;
    }
    r.angle_bits_used += cost;
    if (g.tag == RegionTag::B) {
      // record the escape image and stop
      escaped = true;
      r.points.push_back(z);
      try {
        r.regions.push_back(classify(m, z, opt.margin));
      } catch (const resource_error&) {
        r.points.pop_back();
      }
      break;
    }
  }
  finish_record(m, r, escaped, trunc);
  return r;
}

std::string InverseBranchSpec::str() const {
  switch (kind) {
    case BranchKind::VkRoot: return "VkRoot(" + std::to_string(k) + "," + index.str() + ")";
    case BranchKind::PetalInverse: return "PetalInverse(" + std::to_string(k) + "," + index.str() + ")";
    case BranchKind::OriginBranch: return "OriginBranch(" + index.str() + ")";
  }
  return "?";
}

InverseBranchSpec branch_of(const ModelMap& m, const LogPolar& z) {
  const ParamTable& t = m.table();
  Region g = classify(m, z);
  InverseBranchSpec b;
  if (g.tag == RegionTag::Petal) {
    b.kind = BranchKind::PetalInverse;
    b.k = g.k;
    b.index = g.j;
    return b;
  }
  if (g.tag == RegionTag::D) {
    b.kind = BranchKind::OriginBranch;
    b.k = 0;
    if (z.is_zero) return b;
    LogPolar w = qN_zero(m, 0);
    if (z.log2_abs() < w.rho - Log2Real(1)) return b;
    BigInt Mm1 = t.M(t.N) - 1;
    b.index = floor_shift(z.theta.mant() * Mm1, z.theta.scale()) + 1;
    return b;
  }
  if (g.tag == RegionTag::Boundary || g.tag == RegionTag::B)
    throw std::invalid_argument("no inverse branch recorded for " + g.str());
  b.kind = BranchKind::VkRoot;
  b.k = g.k;
  BigInt n = t.n(g.k);
  b.index = floor_shift(z.theta.mant() * n, z.theta.scale()) % n;
  return b;
}

namespace {

LogPolar raw_inverse(const ModelMap& m, const LogPolar& T, const InverseBranchSpec& b) {
  const ParamTable& t = m.table();
  switch (b.kind) {
    case BranchKind::VkRoot: return power_inverse(m, t.j_of(b.k), b.index, T).z;
    case BranchKind::PetalInverse: return seam_inverse(m, t.j_of(b.k), b.index - 1, T).z;
    case BranchKind::OriginBranch: return qN_inverse(m, T, b.index).z;
  }
  throw std::logic_error("bad branch kind");
}

// log2 |a/b - 1|
double rel_err_log2(const LogPolar& a, const LogPolar& b) {
  if (a.is_zero || b.is_zero) return (a.is_zero && b.is_zero) ? -INFINITY : 0.0;
  AddResult u = lp_minus_one(lp_div(a, b));
  if (u.value.is_zero) return -INFINITY;
  Log2Real l = u.value.log2_abs();
  if (l < Log2Real(-1000000)) return -1e6;
  return l.to_double();
}

}  // namespace

LogPolar inverse_step(const ModelMap& m, const LogPolar& target, const InverseBranchSpec& b, double tol) {
  LogPolar z = raw_inverse(m, target, b);
  LogPolar back = eval_model(m, z).value;
  // |u| <= tol ln 2 bounds both the log2-magnitude and the turn error by tol
  double err = rel_err_log2(back, target);
  if (err > std::log2(tol * std::log(2.0)))
    throw convergence_error(b.str() + ": residual 2^" + std::to_string(err) + " exceeds tolerance");
  return z;
}

namespace {

bool forward_ok(const Region& a, const Region& b) {
  switch (a.tag) {
    case RegionTag::V: return b.in_A() && b.k == a.k + 1;
    case RegionTag::Petal: return b.tag == RegionTag::D || (b.in_A() && b.k <= a.k + 1);
    case RegionTag::D: return b.tag == RegionTag::D || (b.in_A() && b.k == 1);
    default: return false;
  }
}

}  // namespace

namespace {

// z_i for i = 0..L, z_L = anchor
std::vector<LogPolar> pull_back(const ModelMap& m, const std::vector<ItineraryStep>& it,
                                const LogPolar& anchor) {
  const ParamTable& t = m.table();
  std::vector<LogPolar> zs(it.size() + 1);
  zs.back() = anchor;
  for (size_t i = it.size(); i-- > 0;) {
    const ItineraryStep& s = it[i];
    const LogPolar& T = zs[i + 1];
    switch (s.region.tag) {
      case RegionTag::V: zs[i] = power_inverse(m, t.j_of(s.region.k), s.branch, T).z; break;
      case RegionTag::Petal: zs[i] = seam_inverse(m, t.j_of(s.region.k), s.region.j - 1, T).z; break;
      default: zs[i] = qN_inverse(m, T, s.branch).z; break;
    }
  }
  return zs;
}

}  // namespace

unsigned required_bits(const ModelMap& m, const std::vector<ItineraryStep>& it, const LogPolar& anchor) {
  // Forward iteration retraces exact dyadic anchors up to the first petal or
  // origin step. After that every offset must be resolved, and each petal or
  // near-zero step amplifies relative error by about 1/|offset|.
  std::vector<LogPolar> zs = pull_back(m, it, anchor);
  BigInt need = BigInt(num_config().sig_bits) + 64;
  long first = -1;
  for (size_t i = 0; i < it.size(); ++i) {
    const Region& g = it[i].region;
    need += step_cost(m, g);
    bool inexact = g.tag == RegionTag::Petal || g.tag == RegionTag::D;
    if (first >= 0 && inexact && zs[i].has_delta && !cx_is_zero(zs[i].delta)) {
      Log2Real d = Log2Real::from_real(log2(cx_abs(zs[i].delta)));
      need += -d.floor() + 1;
    }
    if (inexact && first < 0) first = static_cast<long>(i);
  }
  if (need > BigInt(1) << 17)
    throw resource_error("backward_construct needs " + need.str() + " working bits");
  return std::max(need.convert_to<unsigned>(), working_bits());
}

BackwardResult backward_construct(const ModelMap& m, const std::vector<ItineraryStep>& it,
                                  const LogPolar& anchor) {
  if (it.empty()) throw std::invalid_argument("empty itinerary");
  Region last = classify(m, anchor);
  for (size_t i = 0; i < it.size(); ++i) {
    const Region& a = it[i].region;
    const Region& b = i + 1 < it.size() ? it[i + 1].region : last;
    if (a.tag != RegionTag::V && a.tag != RegionTag::Petal && a.tag != RegionTag::D)
      throw std::invalid_argument("itinerary step " + std::to_string(i) + ": " + a.str() +
                                  " is not a V, petal or D step");
    if (!forward_ok(a, b))
      throw std::invalid_argument("illegal transition at step " + std::to_string(i) + ": " + a.str() +
                                  " -> " + b.str());
  }
  BackwardResult out;
  out.bits_used = required_bits(m, it, anchor);
  WorkingBits wb(out.bits_used);
  out.z = pull_back(m, it, anchor).front();
  OrbitOptions opt;
  opt.margin = 0;
  opt.angle_budget = std::max<long>(long(num_config().ang_bits) - 64, 0);
  OrbitRecord r = iterate_orbit(m, out.z, static_cast<int>(it.size()), opt);
  out.realized = r.regions;
  out.verified = true;
  for (size_t i = 0; i <= it.size(); ++i) {
    const Region& want = i < it.size() ? it[i].region : last;
    if (i >= r.regions.size() || !(r.regions[i] == want)) {
      out.verified = false;
      out.mismatch_step = static_cast<long>(i);
      break;
    }
  }
  return out;
}

namespace {

struct Extremes {
  Log2Real lo, hi;
};

Extremes circle_extremes(const ModelMap& m, const Log2Real& rho, int samples) {
  Extremes e;
  for (int i = 0; i < samples; ++i) {
    LogPolar z = LogPolar::polar(rho, Angle::from_ratio(2 * i + 1, 2 * samples));
    Log2Real v = eval_model(m, z).value.log2_abs();
    if (i == 0 || v < e.lo) e.lo = v;
    if (i == 0 || v > e.hi) e.hi = v;
  }
  return e;
}

Certificate row(const std::string& name, long k, const Log2Real& lhs, const Log2Real& rhs, bool pass,
                const std::string& note = "") {
  Certificate c;
  c.name = name;
  c.index = k;
  c.lhs = lhs.str(16);
  c.rhs = rhs.str(16);
  c.pass = pass;
  c.note = note;
  return c;
}

// image of a circle inside the open annulus (2^lo, 2^hi), with margin bits of slack
void annulus_rows(CertificateReport& rep, const std::string& name, long k, const Extremes& x,
                  const Log2Real& lo, const Log2Real& hi, long margin = 0) {
  std::string note = margin ? "seam margin " + std::to_string(margin) + " bits" : "";
  rep.add(row(name + "_min", k, x.lo, lo, x.lo - Log2Real(margin) > lo, note));
  rep.add(row(name + "_max", k, x.hi, hi, x.hi + Log2Real(margin) < hi, note));
}

}  // namespace

CertificateReport verify_inclusions(const ModelMap& m, long k, int samples) {
  if (samples < 4096) throw std::invalid_argument("verify_inclusions needs samples >= 4096");
  const ParamTable& t = m.table();
  if (k < 1 || k + 2 > t.kmax_stored()) throw std::invalid_argument("annulus index out of range");
  const AnnulusEdges& E = annulus_edges();
  CertificateReport rep;
  Log2Real eR = Log2Real::from_int(t.eR(k)), eR1 = Log2Real::from_int(t.eR(k + 1)),
           eR2 = Log2Real::from_int(t.eR(k + 2));
  Log2Real f54 = Log2Real::from_real(log2(Real(5) / 4));

  Extremes q = circle_extremes(m, eR + E.quarter, samples);
  annulus_rows(rep, "quarter_Rk_into_Bk", k, q, eR + E.four, eR1 + E.quarter);
  Extremes in = circle_extremes(m, eR + E.two_fifths, samples);
  annulus_rows(rep, "two_fifths_Rk_into_Bk", k, in, eR + E.four, eR1 + E.quarter);
  Extremes out = circle_extremes(m, eR + E.three_fifths, samples);
  annulus_rows(rep, "three_fifths_Rk_into_Bk1", k, out, eR1 + E.four, eR2 + E.quarter);
  Extremes fv = circle_extremes(m, eR + f54, samples);
  annulus_rows(rep, "five_quarters_Rk_into_Bk1", k, fv, eR1 + E.four, eR2 + E.quarter);
  Extremes o4 = circle_extremes(m, eR + E.four, samples);
  annulus_rows(rep, "four_Rk_into_8Rk1_Rk2_8", k, o4, eR1 + Log2Real(3), eR2 - Log2Real(3));
  Extremes o14 = circle_extremes(m, eR1 + E.quarter, samples);
  annulus_rows(rep, "quarter_Rk1_into_8Rk1_Rk2_8", k, o14, eR1 + Log2Real(3), eR2 - Log2Real(3));

  // petal boundaries |z/w - 1| = 2^{-n} e^{-pi/(4 M)} on a spread of petals
  BigInt n = t.n(k);
  long j = t.j_of(k);
  Real rad = pow(Real(2), -to_real(n)) * exp(-real_pi() / (4 * to_real(n)));
  BigInt npet = std::min<BigInt>(n, 16);
  Extremes pe;
  bool first = true;
  for (BigInt p = 0; p < npet; ++p) {
    BigInt b = npet == n ? p : (p * (n - 1)) / (npet - 1);
    LogPolar w = m.seam_zero(j, b);
    for (int i = 0; i < samples; ++i) {
      Cx u = cx_scale(cis(Angle::from_ratio(2 * i + 1, 2 * samples)), rad);
      Log2Real v = eval_model(m, lp_with_delta(w, u)).value.log2_abs();
      if (first || v < pe.lo) pe.lo = v;
      if (first || v > pe.hi) pe.hi = v;
      first = false;
    }
  }
  annulus_rows(rep, "petal_boundary_into_Bk1", k, pe, eR1 + E.four, eR2 + E.quarter, 2);

  rep.summaries["k"] = k;
  rep.summaries["samples_per_circle"] = samples;
  rep.summaries["petals_sampled"] = npet.str();
  rep.summaries["outer_Vk_margin"] = (out.lo - (eR1 + E.four)).to_double();
  rep.summaries["inner_Vk_margin"] = ((eR1 + E.quarter) - in.hi).to_double();
  return rep;
}

CertificateReport check_singular_values(const ModelMap& m) {
  const ParamTable& t = m.table();
  CertificateReport rep;
  const long N = t.N;
  // q_N critical values in (8 r_N, r_{N+1}/(16 sqrt 2))
  QnLandmarks L = qN_landmarks(m, 64);
  Log2Real lo = Log2Real::from_int(t.e_at(N)) + Log2Real(3);
  Log2Real hi = Log2Real::from_int(t.e_at(N + 1)) - Log2Real::from_ratio(9, 2);
  rep.add(row("qN_crit_value_lower", 1, L.crit_value_log2, lo, L.crit_value_log2 > lo));
  rep.add(row("qN_crit_value_upper", 1, L.crit_value_log2, hi, L.crit_value_log2 < hi));
  Log2Real smin, smax;
  for (size_t i = 0; i < L.crit_values.size(); ++i) {
    Log2Real v = L.crit_values[i].log2_abs();
    if (i == 0 || v < smin) smin = v;
    if (i == 0 || v > smax) smax = v;
  }
  rep.add(row("qN_crit_value_sampled_lower", 1, smin, lo, smin > lo));
  rep.add(row("qN_crit_value_sampled_upper", 1, smax, hi, smax < hi));

  for (long k = 1; k + 2 <= t.kmax_stored(); ++k) {
    long j = t.j_of(k);
    BigInt n = t.n(k);
    BigInt lhs = t.eC(k) + n * t.eR(k), rhs = n + t.eR(k + 1);
    Certificate c;
    c.name = "identity_CkRknk";
    c.index = k;
    c.lhs = lhs.str();
    c.rhs = rhs.str();
    c.pass = lhs == rhs;
    rep.add(c);
    SeamCritical s = seam_critical(m, j);
    Log2Real a = Log2Real::from_int(t.eR(k + 1)) + Log2Real(3);
    Log2Real b = Log2Real::from_int(t.eR(k + 2)) - Log2Real(3);
    rep.add(row("seam_crit_value_lower", k, s.value_log2, a, s.value_log2 > a));
    rep.add(row("seam_crit_value_upper", k, s.value_log2, b, s.value_log2 < b));
  }
  return rep;
}

}  // namespace mcwd
