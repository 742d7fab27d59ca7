#include "mcwd/modelmap.hpp"

#include <cmath>
#include <limits>

namespace mcwd {

std::string PieceId::str() const {
  switch (kind) {
    case PieceKind::OriginPoly: return "OriginPoly";
    case PieceKind::Bump: return "BumpRegion(" + std::to_string(j) + ")";
    case PieceKind::Power: return "PowerAnnulus(" + std::to_string(j) + ")";
    case PieceKind::Seam: return "SeamAnnulus(" + std::to_string(j) + ")";
  }
  return "?";
}

ModelMap::ModelMap(ParamTable t, double lambda_, double delta_)
    : lambda(lambda_), delta(delta_), t_(std::move(t)) {
  le_.resize(t_.jmax + 1);
  w_.resize(t_.jmax + 1);
  for (long j = 1; j <= t_.jmax; ++j) {
    le_[j] = Log2Real::from_int(t_.e_at(j));
    w_[j] = Log2Real::from_real(real_pi() / (to_real(t_.M(j)) * real_ln2()));
  }
  // log2(1 - 2^-e_N); rounds to zero once e_N is past the fixed-point resolution
  const BigInt& eN = t_.e_at(t_.N);
  Real tiny = eN < BigInt(1) << 60 ? ldexp_big(Real(1), -eN) : Real(0);
  bump_in_ = e(t_.N) + Log2Real::from_real(log1p(-tiny) / real_ln2());
}

LogPolar ModelMap::zeta(long j) const {
  Log2Real rho = e(j) + seam_width(j).div(4);
  return LogPolar::polar(rho, Angle::from_ratio(1, 2 * t_.M(j)));
}

LogPolar ModelMap::zetaM(long j) const { return lp_pow(zeta(j), t_.M(j)); }

LogPolar ModelMap::seam_zero(long j, const BigInt& b) const {
  LogPolar z = zeta(j);
  z.theta = z.theta + Angle::from_ratio(b, t_.M(j));
  return z;
}

PieceId ModelMap::piece_of(const LogPolar& z) const {
  if (z.is_zero) return {PieceKind::OriginPoly, 0};
  Log2Real rho = z.log2_abs();
  const long N = t_.N;
  if (rho < bump_in_) return {PieceKind::OriginPoly, 0};
  if (rho < e(N)) return {PieceKind::Bump, N};
  // largest j with e_j <= rho
  long lo = N, hi = t_.jmax;
  if (rho >= e(hi)) throw resource_error("point beyond the stored table (raise kmax)");
  while (hi - lo > 1) {
    long mid = (lo + hi) / 2;
    if (e(mid) <= rho) lo = mid;
    else hi = mid;
  }
  if (rho < seam_outer(lo)) return {PieceKind::Seam, lo};
  return {PieceKind::Power, lo + 1};
}

namespace {

LogPolar pos(const Log2Real& rho) { return LogPolar::polar(rho, Angle()); }
LogPolar pos(const BigInt& rho) { return pos(Log2Real::from_int(rho)); }

LogPolar neg_pos(const Log2Real& rho) { return LogPolar::polar(rho, Angle::from_ratio(1, 2)); }

Log2Real log2_of(const BigInt& pow2) { return Log2Real::from_int(BigInt(log2_exact(pow2))); }

LogPolar real_lp(const Real& x) { return LogPolar::from_cx(Cx(x, Real(0))); }

// 1 - t, keeping relative precision near t = 1
LogPolar one_minus(const LogPolar& t) {
  AddResult r = lp_minus_one(t);
  if (r.value.is_zero) return r.value;
  return lp_neg(r.value);
}

// r z (1 - t), t = -(c/r) z^{M-1}
LogPolar origin_eval(const ParamTable& t, const LogPolar& z) {
  if (z.is_zero) return z;
  long N = t.N;
  BigInt M = t.M(N);
  LogPolar tt = lp_mul(neg_pos(Log2Real::from_int(t.eps_at(N) - t.e_at(N))), lp_pow(z, M - 1));
  return lp_mul(lp_mul(pos(t.e_at(N)), z), one_minus(tt));
}

// r (1 - u), u = -(cM/r) z^{M-1}
LogPolar origin_deriv(const ParamTable& t, const LogPolar& z) {
  long N = t.N;
  if (z.is_zero) return pos(t.e_at(N));
  BigInt M = t.M(N);
  Log2Real k = Log2Real::from_int(t.eps_at(N) - t.e_at(N)) + log2_of(M);
  LogPolar u = lp_mul(neg_pos(k), lp_pow(z, M - 1));
  return lp_mul(pos(t.e_at(N)), one_minus(u));
}

LogPolar power_eval(const ParamTable& t, const LogPolar& z, long j) {
  return lp_mul(pos(t.eps_at(j)), lp_pow(z, t.M(j)));
}

LogPolar power_deriv(const ParamTable& t, const LogPolar& z, long j) {
  BigInt M = t.M(j);
  return lp_mul(pos(Log2Real::from_int(t.eps_at(j)) + log2_of(M)), lp_pow(z, M - 1));
}

LogPolar seam_eval(const ModelMap& m, const LogPolar& z, long j) {
  const ParamTable& t = m.table();
  BigInt M = t.M(j);
  LogPolar zm = lp_pow(z, M);
  LogPolar d = lp_sub(zm, m.zetaM(j)).value;
  if (d.is_zero || z.is_zero) return LogPolar::zero();
  LogPolar k = pos(t.eps_at(j) - M * t.e_at(j));
  return lp_mul(lp_mul(k, zm), d);
}

LogPolar seam_deriv(const ModelMap& m, const LogPolar& z, long j) {
  const ParamTable& t = m.table();
  BigInt M = t.M(j);
  if (z.is_zero) return LogPolar::zero();
  LogPolar zm = lp_pow(z, M);
  LogPolar d = lp_sub(lp_scale(zm, Log2Real(1)), m.zetaM(j)).value;
  if (d.is_zero) return d;
  LogPolar k = pos(Log2Real::from_int(t.eps_at(j) - M * t.e_at(j)) + log2_of(M));
  return lp_mul(lp_mul(k, lp_pow(z, M - 1)), d);
}

// s = |z| - (r_k - 1) from rho; needs e_k inside the fixed-point resolution
Real bump_s(const ModelMap& m, long k, const LogPolar& z) {
  const BigInt& ek = m.table().e_at(k);
  if (ek > BigInt(fix_bits() - 64))
    throw resource_error("bump strip at j=" + std::to_string(k) +
                         " is below log-polar resolution; use shifted coordinates");
  Log2Real x = z.log2_abs() - m.e(k);
  Real v = expm1(x.to_real() * real_ln2());
  return 1 + ldexp_big(v, ek);
}

// 2^-e, or 0 once it underflows the MPFR exponent range
Real pow2_neg(const BigInt& e) {
  if (e > BigInt(1) << 60) return Real(0);
  return ldexp_big(Real(1), -e);
}

LogPolar z_from_shift(const ModelMap& m, long k, const Real& s, const Angle& theta) {
  const BigInt& ek = m.table().e_at(k);
  Real tiny = (1 - s) * pow2_neg(ek);
  Log2Real rho = m.e(k) + Log2Real::from_real(log1p(-tiny) / real_ln2());
  return LogPolar::polar(rho, theta);
}

LogPolar gk_eval(const ModelMap& m, long k, const LogPolar& z, const Real& eta) {
  const ParamTable& t = m.table();
  LogPolar a = power_eval(t, z, k);
  if (eta == 0) return a;
  LogPolar b = lp_mul(lp_mul(pos(t.e_at(k)), z), real_lp(eta));
  return lp_add(a, b).value;
}

}  // namespace

Real bump_b(const Real& x) {
  if (x >= 1) return Real(0);
  if (x <= 0) return Real(1);
  return exp(1 + 1 / (x * x - 1));
}

Real bump_db(const Real& x) {
  if (x >= 1 || x <= 0) return Real(0);
  Real d = x * x - 1;
  return bump_b(x) * (-2 * x / (d * d));
}

LogPolar eval_piece(const ModelMap& m, const LogPolar& z, const PieceId& p) {
  const ParamTable& t = m.table();
  switch (p.kind) {
    case PieceKind::OriginPoly: return origin_eval(t, z);
    case PieceKind::Power: return power_eval(t, z, p.j);
    case PieceKind::Seam: return seam_eval(m, z, p.j);
    case PieceKind::Bump: return eval_bump_gk(m, p.j, z);
  }
  return z;
}

EvalResult eval_model(const ModelMap& m, const LogPolar& z) {
  PieceId p = m.piece_of(z);
  return {eval_piece(m, z, p), p};
}

LogPolar deriv_piece(const ModelMap& m, const LogPolar& z, const PieceId& p) {
  const ParamTable& t = m.table();
  switch (p.kind) {
    case PieceKind::OriginPoly: return origin_deriv(t, z);
    case PieceKind::Power: return power_deriv(t, z, p.j);
    case PieceKind::Seam: return seam_deriv(m, z, p.j);
    case PieceKind::Bump: {
      Real s = bump_s(m, p.j, z);
      return gk_partials(m, p.j, s, z.theta).gz;
    }
  }
  return z;
}

LogPolar deriv_model(const ModelMap& m, const LogPolar& z) {
  PieceId p = m.piece_of(z);
  if (!z.is_zero) {
    // nudge rho both ways by the significand resolution; a change of piece is ambiguous
    Log2Real eps = Log2Real::from_raw(BigInt(1), num_config().sig_bits);
    LogPolar lo = lp_scale(z, -eps), hi = lp_scale(z, eps);
    PieceId a = m.piece_of(lo), b = m.piece_of(hi);
    if (!(a == p) || !(b == p)) {
      PieceId other = a == p ? b : a;
      throw ambiguity_error("point on the boundary between " + p.str() + " and " + other.str());
    }
  }
  return deriv_piece(m, z, p);
}

LogPolar eval_bump_gk(const ModelMap& m, long k, const Real& s, const Angle& theta) {
  if (k < 5) throw std::invalid_argument("bump map needs k >= 5");
  LogPolar z = z_from_shift(m, k, s, theta);
  return gk_eval(m, k, z, bump_b(s));
}

LogPolar eval_bump_gk(const ModelMap& m, long k, const LogPolar& z) {
  if (k < 5) throw std::invalid_argument("bump map needs k >= 5");
  const BigInt& ek = m.table().e_at(k);
  Log2Real rho = z.is_zero ? Log2Real(-1) : z.log2_abs();
  if (rho >= m.e(k)) return power_eval(m.table(), z, k);
  // inside r_k - 1 the bump is 1
  if (ek > BigInt(fix_bits() - 64) || z.is_zero) return gk_eval(m, k, z, Real(1));
  Real s = bump_s(m, k, z);
  if (s <= 0) return gk_eval(m, k, z, Real(1));
  return gk_eval(m, k, z, bump_b(s));
}

GkPartials gk_partials(const ModelMap& m, long k, const Real& s, const Angle& theta) {
  const ParamTable& t = m.table();
  LogPolar z = z_from_shift(m, k, s, theta);
  BigInt M = t.M(k);
  GkPartials out;
  LogPolar a = power_deriv(t, z, k);
  Real eta = bump_b(s), deta = bump_db(s);
  // |z| = r_k - 1 + s as a real scaled by 2^-e_k to keep it in range
  Real zr = 1 - (1 - s) * pow2_neg(t.e_at(k));  // |z| / r_k
  // r (eta + eta' |z| / 2) = r (eta + eta' r zr / 2)
  Real lin = eta;
  LogPolar b;
  bool have_b = true;
  if (deta != 0) {
    // eta' r zr / 2 dominates eta for large r
    LogPolar d = lp_mul(pos(Log2Real::from_int(t.e_at(k)) - Log2Real(1)), real_lp(deta * zr));
    b = eta != 0 ? lp_add(real_lp(eta), d).value : d;
    out.has_gzbar = true;
    out.log2_gzbar = Log2Real::from_int(2 * t.e_at(k) - 1) +
                     Log2Real::from_real(log2(abs(deta) * zr));
  } else if (eta != 0) {
    b = real_lp(lin);
  } else {
    have_b = false;
  }
  if (have_b && !b.is_zero) {
    AddResult r = lp_add(a, lp_mul(pos(t.e_at(k)), b));
    out.gz = r.value;
    out.flagged = r.status == AddStatus::cancellation;
  } else {
    out.gz = a;
  }
  return out;
}

DilatationSup dilatation_sup(const ModelMap& m, long k, int grid) {
  if (k < 5) throw std::invalid_argument("dilatation needs k >= 5");
  if (grid < 64) throw std::invalid_argument("dilatation grid must be at least 64");
  DilatationSup out;
  out.k = k;
  out.log2_sup = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    Real s = Real(i) / grid;
    for (int a = 0; a < grid; ++a) {
      Angle th = Angle::from_ratio(a, grid);
      GkPartials p = gk_partials(m, k, s, th);
      ++out.samples;
      if (p.flagged || p.gz.is_zero) {
        ++out.flagged;
        continue;
      }
      if (!p.has_gzbar) continue;  // mu = 0
      double l = (p.log2_gzbar - p.gz.log2_abs()).to_double();
      out.log2_sup = std::max(out.log2_sup, l);
    }
  }
  out.sup = std::exp2(out.log2_sup);
  return out;
}

KPrime find_Kprime(const ModelMap& m, int grid) {
  KPrime out;
  long top = m.table().jmax;
  for (long k = 5; k + 8 <= top; ++k) {
    std::vector<DilatationSup> sw;
    bool ok = true;
    for (long i = k; i <= k + 8 && ok; ++i) {
      sw.push_back(dilatation_sup(m, i, grid));
      ok = sw.back().log2_sup < 0;
    }
    if (!ok) continue;
    out.Kprime = k;
    out.sweep = sw;
    out.decreasing = true;
    for (size_t i = 1; i < sw.size(); ++i)
      out.decreasing = out.decreasing && sw[i].log2_sup < sw[i - 1].log2_sup;
    break;
  }
  return out;
}

SeamMismatch seam_mismatch(const ModelMap& m, long j, int samples) {
  if (samples < 256) throw std::invalid_argument("seam_mismatch needs at least 256 samples");
  const ParamTable& t = m.table();
  SeamMismatch out;
  out.inner_min_ratio = std::numeric_limits<double>::infinity();
  PieceId seam{PieceKind::Seam, j};
  PieceId inner_adj = j == t.N ? PieceId{PieceKind::Bump, j} : PieceId{PieceKind::Power, j};
  PieceId outer_adj{PieceKind::Power, j + 1};
  BigInt M = t.M(j);
  for (int i = 0; i < samples; ++i) {
    // uniform in the phase of z^M, offset by half a cell
    Angle th = Angle::from_ratio(2 * i + 1, 2 * BigInt(samples) * M);
    LogPolar zi = LogPolar::polar(m.e(j), th);
    LogPolar s = eval_piece(m, zi, seam);
    LogPolar a = j == t.N ? power_eval(t, zi, j) : eval_piece(m, zi, inner_adj);
    double li = (s.log2_abs() - a.log2_abs()).to_double();
    out.inner_max_log2_ratio = std::max(out.inner_max_log2_ratio, std::fabs(li));
    out.inner_min_ratio = std::min(out.inner_min_ratio, std::exp2(li));
    out.inner_max_ratio = std::max(out.inner_max_ratio, std::exp2(li));

    LogPolar zo = LogPolar::polar(m.seam_outer(j), th);
    LogPolar so = eval_piece(m, zo, seam);
    LogPolar b = eval_piece(m, zo, outer_adj);
    double lo = (so.log2_abs() - b.log2_abs()).to_double();
    out.outer_max_log2_ratio = std::max(out.outer_max_log2_ratio, std::fabs(lo));
  }
  return out;
}

QnLandmarks qN_landmarks(const ModelMap& m, size_t max_count) {
  const ParamTable& t = m.table();
  const long N = t.N;
  BigInt M = t.M(N);
  BigInt Mm1 = M - 1;
  BigInt e = t.e_at(N), eps = t.eps_at(N);
  QnLandmarks out;
  Log2Real rz = Log2Real::from_int(e - eps).div(Mm1);
  Log2Real rc = Log2Real::from_int(e - eps - N).div(Mm1);
  // (1 - 1/M) r |z_c|
  out.crit_value_log2 = Log2Real::from_int(e) + rc +
                        Log2Real::from_real(log2(1 - 1 / to_real(M)));
  size_t count = static_cast<size_t>(std::min<BigInt>(Mm1, BigInt(max_count)).convert_to<unsigned long>());
  for (size_t b = 0; b < count; ++b) {
    // -r/c and -r/(cM) have argument 1/2; the (M-1)-th roots are (1/2 + b)/(M-1)
    Angle th = Angle::from_ratio(2 * BigInt(b) + 1, 2 * Mm1);
    out.zeros.push_back(LogPolar::polar(rz, th));
    LogPolar cp = LogPolar::polar(rc, th);
    out.crit_points.push_back(cp);
    out.crit_values.push_back(origin_eval(t, cp));
  }
  out.deriv_at_zero = DyadicReal::pow2(e).mul(DyadicReal::from_real(to_real(Mm1)));
  return out;
}

SeamCritical seam_critical(const ModelMap& m, long j) {
  const ParamTable& t = m.table();
  BigInt M = t.M(j);
  SeamCritical out;
  out.point_log2 = m.zeta(j).rho - Log2Real::from_ratio(1, M);
  Real f = exp(real_pi() / 2) / 4;
  out.value_log2 = Log2Real::from_int(t.eps_at(j) + M * t.e_at(j)) + Log2Real::from_real(log2(f));
  return out;
}

}  // namespace mcwd

namespace mcwd {

namespace {

Cx tiny_cx(const LogPolar& z) { return z.is_zero ? Cx() : z.to_cx(); }

Real pow2_work(int drop) { return ldexp(Real(1), -(static_cast<int>(working_bits()) - drop)); }

}  // namespace

LogPolar qN_zero(const ModelMap& m, const BigInt& b) {
  const ParamTable& t = m.table();
  const long N = t.N;
  BigInt Mm1 = t.M(N) - 1;
  if (b < 0 || b >= Mm1) throw std::invalid_argument("q_N zero index out of range");
  Log2Real rz = Log2Real::from_int(t.e_at(N) - t.eps_at(N)).div(Mm1);
  return LogPolar::polar(rz, Angle::from_ratio(2 * b + 1, 2 * Mm1));
}

InverseResult qN_inverse(const ModelMap& m, const LogPolar& T, const BigInt& b) {
  const ParamTable& t = m.table();
  const long N = t.N;
  BigInt M = t.M(N);
  if (b < 0 || b >= M) throw std::invalid_argument("q_N branch out of range");
  InverseResult out;
  Log2Real lc = Log2Real::from_int(t.eps_at(N) - t.e_at(N));  // log2(c/r)
  if (b == 0) {
    if (T.is_zero) {
      out.z = T;
      return out;
    }
    // z = (T/r) / (1 - t(z)), t(z) = -(c/r) z^{M-1}, contracting near the origin
    LogPolar z0 = lp_scale(T, -Log2Real::from_int(t.e_at(N)));
    LogPolar z = z0;
    for (int i = 0; i < 64; ++i) {
      LogPolar tt = lp_mul(neg_pos(lc), lp_pow(z, M - 1));
      LogPolar zn = lp_div(z0, one_minus(tt));
      ++out.iterations;
      AddResult d = lp_sub(zn, z);
      z = zn;
      if (d.value.is_zero || d.value.log2_abs() < z.log2_abs() - Log2Real(long(working_bits()) - 4)) {
        out.z = z;
        return out;
      }
    }
    throw convergence_error("q_N branch 0 did not converge");
  }
  LogPolar w = qN_zero(m, b - 1);
  // t_w = 1 + ew up to the rounding of the zero's anchor
  LogPolar tw = lp_mul(neg_pos(lc), lp_pow(w, M - 1));
  Cx ew = tiny_cx(lp_minus_one(tw).value);
  Cx tau = tiny_cx(lp_div(T, lp_mul(pos(t.e_at(N)), w)));
  Real Mr = to_real(M), Mm1 = to_real(M - 1);
  Cx u = cx_scale(tau, -1 / Mm1);
  // g(u) = (1+u)(1 - t_w (1+u)^{M-1}) = -(1+u)(ew + p + ew p), p = (1+u)^{M-1} - 1
  for (int i = 0; i < 64; ++i) {
    Cx p = cx_expm1(cx_scale(cx_log1p(u), Mm1));
    Cx s = ew + p + ew * p;
    Cx one_u(1 + u.re, u.im);
    Cx g = Cx(-(one_u * s).re, -(one_u * s).im);
    // g'(u) = 1 - M t_w (1+u)^{M-1} = 1 - M (1 + s)
    Cx gp(1 - Mr * (1 + s.re), -Mr * s.im);
    Cx du = (g - tau) / gp;
    u = u - du;
    ++out.iterations;
    if (cx_is_zero(du) || cx_abs(du) <= cx_abs(u) * pow2_work(4)) {
      out.z = lp_with_delta(w, u);
      return out;
    }
  }
  throw convergence_error("q_N branch " + b.str() + " did not converge");
}

InverseResult seam_inverse(const ModelMap& m, long j, const BigInt& b, const LogPolar& T) {
  const ParamTable& t = m.table();
  BigInt M = t.M(j);
  if (b < 0 || b >= M) throw std::invalid_argument("petal index out of range");
  InverseResult out;
  out.iterations = 1;
  LogPolar zb = m.seam_zero(j, b);
  if (T.is_zero) {
    out.z = zb;
    return out;
  }
  // K = c r^{-M} zeta^{2M}, argument 0
  LogPolar K = lp_mul(pos(t.eps_at(j) - M * t.e_at(j)), lp_pow(m.zetaM(j), 2));
  Cx tau = lp_div(T, K).to_cx();
  // root of v^2 + v - tau near 0
  Cx q = cx_sqrt(Cx(1 + 4 * tau.re, 4 * tau.im));
  Cx v = cx_scale(tau, Real(2)) / Cx(1 + q.re, q.im);
  Real Mr = to_real(M);
  Cx l = cx_log1p(v);
  Cx u = cx_expm1(Cx(l.re / Mr, l.im / Mr));
  out.z = lp_with_delta(zb, u);
  return out;
}

InverseResult power_inverse(const ModelMap& m, long j, const BigInt& b, const LogPolar& T) {
  const ParamTable& t = m.table();
  BigInt M = t.M(j);
  if (b < 0 || b >= M) throw std::invalid_argument("root branch out of range");
  InverseResult out;
  LogPolar q = lp_div(T, pos(t.eps_at(j)));
  LogPolar z = lp_root(q, M, b);
  out.iterations = 1;
  if (j != t.N || T.is_zero) {
    out.z = z;
    return out;
  }
  // q_N = c z^M (1 + s), s = r / (c z^{M-1})
  Log2Real ls = Log2Real::from_int(t.e_at(j) - t.eps_at(j));
  for (int i = 0; i < 8; ++i) {
    LogPolar s = lp_div(pos(ls), lp_pow(z, M - 1));
    AddResult one_s = lp_add(pos(Log2Real()), s);
    ++out.iterations;
    if (one_s.status == AddStatus::negligible) break;
    LogPolar zn = lp_root(lp_div(q, one_s.value), M, b);
    AddResult d = lp_sub(zn, z);
    z = zn;
    if (d.value.is_zero || d.value.log2_abs() < z.log2_abs() - Log2Real(long(working_bits()) - 4)) break;
  }
  out.z = z;
  return out;
}

}  // namespace mcwd
