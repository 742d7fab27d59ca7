#include "mcwd/curves.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mcwd/geometry.hpp"

namespace mcwd {

namespace {

Log2Real log2_const(double x) { return Log2Real::from_real(log2(Real(x))); }

const Log2Real& log2_three_fifths() {
  static const Log2Real v = log2_const(0.6);
  return v;
}

std::vector<Angle> phases(unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::vector<Angle> out;
  for (int i = 0; i < 3; ++i) out.push_back(Angle::from_ratio(BigInt(rng() >> 11), BigInt(1) << 53));
  return out;
}

// V_L containing z, or 0.
long v_index(const ModelMap& m, const LogPolar& z) {
  Region r = classify(m, z);
  return r.tag == RegionTag::V ? r.k : 0;
}

double sum_tail_sqrt(double start, double Cp, int N) {
  // sum_{l >= start} 2 C' 2^{-sqrt(l+N)/4}: direct terms, then an integral bound.
  double s = 0;
  long l = static_cast<long>(start);
  const long stop = l + 20000;
  for (; l < stop; ++l) s += 2 * Cp * std::exp2(-std::sqrt(double(l + N)) / 4);
  double u = std::sqrt(double(l - 1 + N)) / 4;
  const double ln2 = std::log(2.0);
  s += 2 * Cp * 32 * std::exp2(-u) * (u / ln2 + 1 / (ln2 * ln2));
  return s;
}

struct Chain {
  std::vector<LogPolar> w;  // w[i] = phi(u[i]) in V_{k+1+i}; w[depth] is the circle point
  std::vector<LogPolar> u;  // u[i] pre-phi, i < depth
};

Chain pull_chain(const ModelMap& m, const DistortionModel& phi, long k, long depth,
                 const Log2Real& top_rho, const Angle& theta, long cell) {
  const ParamTable& t = m.table();
  std::vector<Angle> th(depth + 1);
  th[0] = theta;
  for (long i = 0; i < depth; ++i) th[i + 1] = th[i].mul(t.n(k + 1 + i));
  Chain c;
  c.w.resize(depth + 1);
  c.u.resize(depth);
  c.w[depth] = LogPolar::polar(top_rho, th[depth]);
  for (long i = depth - 1; i >= 0; --i) {
    long L = k + 1 + i;
    BigInt n = t.n(L);
    LogPolar q = lp_scale(c.w[i + 1], -Log2Real::from_int(t.eC(L))).folded();
    Real d = (th[i].mul(n) - q.theta).centered();
    if (abs(d) > Real(0.125)) {
      std::ostringstream os;
      os << "branch inconsistency at theta cell " << cell << " level " << i;
      throw branch_error(os.str());
    }
    BigInt b = floor_to_int(th[i].to_real() * to_real(n) - q.theta.to_real() - d + Real(0.5));
    b %= n;
    if (b < 0) b += n;
    c.u[i] = lp_root(q, n, b);
    c.w[i] = phi.apply(m, c.u[i]);
  }
  return c;
}

double cx_abs_d(const Cx& z) { return cx_abs(z).convert_to<double>(); }

Cx level_factor(const ModelMap& m, const DistortionModel& phi, const LogPolar& u) {
  Cx one(1, 0);
  return (one + phi.eps(m, u)) / phi.dphi(m, u);
}

}  // namespace

DistortionModel DistortionModel::synthetic(double Cprime, double p, unsigned long seed) {
  DistortionModel d;
  d.kind = SyntheticOmega;
  d.Cprime = Cprime;
  d.p = p;
  d.phase_seed = seed;
  return d;
}

double DistortionModel::scale_amplitude(const ParamTable& t, long L) const {
  if (kind == Identity) return 0;
  Log2Real log2_s = Log2Real::from_int(t.eR(L)) + log2_three_fifths();
  return Cprime * omega_from_log2_inv(p, log2_s);
}

Cx DistortionModel::eps(const ModelMap& m, const LogPolar& z0) const {
  if (kind == Identity || z0.is_zero) return Cx();
  LogPolar z = z0.folded();
  long L = v_index(m, z);
  if (L <= 0) return Cx();
  static thread_local unsigned long cached_seed = ~0ul;
  static thread_local std::vector<Angle> psi;
  if (cached_seed != phase_seed) psi = phases(phase_seed), cached_seed = phase_seed;
  Real a = scale_amplitude(m.table(), L);
  Real x = (z.rho - Log2Real::from_int(m.table().eR(L)) - log2_three_fifths()).to_real();
  Cx s;
  for (int j = 1; j <= 3; ++j) {
    Real mag = a * pow(Real(2), Real(j) * x - (j + 2));
    s = s + cx_scale(cis(z.theta.mul(j) + psi[j - 1]), mag);
  }
  return s;
}

Cx DistortionModel::dphi(const ModelMap& m, const LogPolar& z0) const {
  Cx one(1, 0);
  if (kind == Identity || z0.is_zero) return one;
  LogPolar z = z0.folded();
  long L = v_index(m, z);
  if (L <= 0) return one;
  static thread_local unsigned long cached_seed = ~0ul;
  static thread_local std::vector<Angle> psi;
  if (cached_seed != phase_seed) psi = phases(phase_seed), cached_seed = phase_seed;
  Real a = scale_amplitude(m.table(), L);
  Real x = (z.rho - Log2Real::from_int(m.table().eR(L)) - log2_three_fifths()).to_real();
  // d/dz [z (1 + eps)] = 1 + sum (j + 1) eps_j
  Cx s = one;
  for (int j = 1; j <= 3; ++j) {
    Real mag = a * (j + 1) * pow(Real(2), Real(j) * x - (j + 2));
    s = s + cx_scale(cis(z.theta.mul(j) + psi[j - 1]), mag);
  }
  return s;
}

LogPolar DistortionModel::apply(const ModelMap& m, const LogPolar& z) const {
  if (kind == Identity) return z;
  return lp_with_delta(z, eps(m, z));
}

std::string DistortionModel::str() const {
  if (kind == Identity) return "Identity";
  std::ostringstream os;
  os << "SyntheticOmega(Cprime=" << Cprime << ", p=" << p << ", seed=" << phase_seed << ")";
  return os.str();
}

json CurveTrace::to_json() const {
  json j;
  j["k"] = k;
  j["m"] = m;
  j["phi"] = phi.str();
  j["grid"] = theta_grid.size();
  j["inner_oscillation_log2"] = inner_oscillation;
  j["outer_oscillation_log2"] = outer_oscillation;
  j["oscillation_bound_log2"] = oscillation_bound;
  json rows = json::array();
  for (size_t i = 0; i < theta_grid.size(); ++i)
    rows.push_back({{"theta", theta_grid[i].to_double()},
                    {"inner_rho", inner_radii[i].str(30)},
                    {"outer_rho", outer_radii[i].str(30)}});
  j["samples"] = rows;
  json tp = json::array();
  for (auto& c : tangent_partials) tp.push_back({real_str(c.re, 20), real_str(c.im, 20)});
  j["tangent_partials"] = tp;
  return j;
}

std::string CurveTrace::to_csv() const {
  std::ostringstream os;
  os << "theta,inner_rho,outer_rho\n";
  for (size_t i = 0; i < theta_grid.size(); ++i)
    os << real_str(theta_grid[i].to_real(), 20) << ',' << inner_radii[i].str(30) << ','
       << outer_radii[i].str(30) << '\n';
  return os.str();
}

CurveTrace trace_gamma(const ModelMap& m, const DistortionModel& phi, long k, long depth, int grid) {
  if (grid < 256) throw std::invalid_argument("trace_gamma needs grid >= 256");
  if (k < 1 || depth < 1) throw std::invalid_argument("trace_gamma needs k, depth >= 1");
  const ParamTable& t = m.table();
  if (k + 1 + depth > t.kmax_stored()) throw resource_error("trace_gamma: depth beyond stored R_k");
  long ang = 0;
  for (long i = 0; i < depth; ++i) ang += t.log2n(k + 1 + i);
  if (ang + 64 > long(num_config().ang_bits))
    throw resource_error("trace_gamma: " + std::to_string(ang) + " angle bits exceed the budget");

  CurveTrace tr;
  tr.k = k;
  tr.m = depth;
  tr.phi = phi;
  Log2Real top = Log2Real::from_int(t.eR(k + 1 + depth));
  Log2Real in_top = top - Log2Real(2), out_top = top + log2_const(0.75);
  for (int i = 0; i < grid; ++i) {
    Angle th = Angle::from_ratio(BigInt(i), BigInt(grid));
    Chain ci = pull_chain(m, phi, k, depth, in_top, th, i);
    Chain co = pull_chain(m, phi, k, depth, out_top, th, i);
    tr.theta_grid.push_back(th);
    tr.inner_radii.push_back(ci.w[0].log2_abs());
    tr.outer_radii.push_back(co.w[0].log2_abs());
    if (i == 0) {
      Cx T(1, 0);
      for (long l = 0; l < depth; ++l) {
        T = T * level_factor(m, phi, ci.u[l]);
        tr.tangent_partials.push_back(T);
      }
    }
  }
  auto osc = [](const std::vector<Log2Real>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo).to_double();
  };
  tr.inner_oscillation = osc(tr.inner_radii);
  tr.outer_oscillation = osc(tr.outer_radii);
  for (long i = 0; i < depth; ++i) {
    double a = phi.scale_amplitude(t, k + 1 + i) * 7 / 32;
    if (a > 0) tr.oscillation_bound += std::log2((1 + a) / (1 - a));
  }
  return tr;
}

WidthCheck width_check(const ModelMap& m, const CurveTrace& tr) {
  const ParamTable& t = m.table();
  WidthCheck w;
  w.measured_log2 = -INFINITY;
  for (size_t i = 0; i < tr.inner_radii.size(); ++i) {
    Log2Real gap = tr.outer_radii[i] - tr.inner_radii[i];
    Real g = gap.to_real();
    if (g <= 0) continue;
    // R_out - R_in = R_in (2^gap - 1)
    Real lw = tr.inner_radii[i].to_real() + log2(expm1(g * real_ln2()));
    w.measured_log2 = std::max(w.measured_log2, lw.convert_to<double>());
  }
  // 8^{m-1} R_{k+1} / (n_{k+1} ... n_{k+m})
  BigInt b = BigInt(3 * (tr.m - 1)) + t.eR(tr.k + 1);
  for (long i = 1; i <= tr.m; ++i) b -= t.log2n(tr.k + i);
  w.bound_log2 = b.convert_to<double>();
  w.pass = w.measured_log2 <= w.bound_log2;
  return w;
}

double TangentProducts::tail_from(size_t i) const {
  double s = 0;
  for (size_t l = i; l < level_bound.size(); ++l) s += level_bound[l];
  return s;
}

TangentProducts tangent_products(const ModelMap& m, const DistortionModel& phi, long k,
                                 const Angle& theta0, long mmax) {
  const ParamTable& t = m.table();
  if (mmax < 1 || k + 1 + mmax > t.kmax_stored())
    throw resource_error("tangent_products: mmax beyond stored R_k");
  Log2Real top = Log2Real::from_int(t.eR(k + 1 + mmax)) - Log2Real(1);
  Chain c = pull_chain(m, phi, k, mmax, top, theta0, 0);
  TangentProducts out;
  Cx T(1, 0);
  for (long i = 0; i < mmax; ++i) {
    Cx e = phi.eps(m, c.u[i]);
    Cx d = phi.dphi(m, c.u[i]);
    Cx one(1, 0);
    Cx f = (one + e) / d;
    Cx Tn = T * f;
    if (i > 0) out.diffs.push_back(cx_abs_d(Tn - T) / cx_abs_d(T));
    T = Tn;
    out.partials.push_back(T);
    Cx l1 = cx_log1p(e), l2 = cx_log1p(d - one);
    out.level_log.push_back(cx_abs_d(l1) + cx_abs_d(l2));
    long L = k + 1 + i;
    out.level_bound.push_back(2 * phi.Cprime * std::exp2(-std::sqrt(double(L + t.N)) / 4));
  }
  out.limit_log_bound = sum_tail_sqrt(1, phi.Cprime, t.N);
  return out;
}

AngleCheck angle_check(const ModelMap& m, const DistortionModel& phi, long k, long n1, long n2,
                       int samples) {
  if (!(0 <= n1 && n1 < n2)) throw std::invalid_argument("angle_check needs 0 <= n1 < n2");
  const ParamTable& t = m.table();
  if (k + 1 + n2 > t.kmax_stored()) throw resource_error("angle_check: n2 beyond stored R_k");
  AngleCheck a;
  a.samples = samples;
  for (long i = n1; i < n2; ++i) a.bound += std::atan(48 * phi.scale_amplitude(t, k + 1 + i));
  Log2Real top = Log2Real::from_int(t.eR(k + 1 + n2)) - Log2Real(1);
  for (int s = 0; s < samples; ++s) {
    Angle th = Angle::from_ratio(BigInt(2 * s + 1), BigInt(2 * samples));
    Chain c = pull_chain(m, phi, k, n2, top, th, s);
    // leaf direction relative to the circle: sum of arg(phi'(u) u / phi(u)) over levels
    Real ang = 0;
    for (long i = n1; i < n2; ++i) {
      Cx one(1, 0);
      Cx r = phi.dphi(m, c.u[i]) / (one + phi.eps(m, c.u[i]));
      ang += atan2(r.im, r.re);
    }
    a.max_angle = std::max(a.max_angle, abs(ang).convert_to<double>());
  }
  return a;
}

DilatationIntegral dilatation_integral(const ParamTable& t, const DyadicReal& r) {
  if (r.sign() <= 0) throw domain_error("dilatation_integral needs r > 0");
  Log2Real lr = r.log2_abs();
  if (lr.sign() >= 0) throw domain_error("dilatation_integral needs r < 1");
  Real inv = (-lr).to_real();  // log2(1/r)
  Real pi = real_pi(), ln2 = real_ln2();
  DilatationIntegral d;
  long j = 1;
  // smallest j with 1/r < r_j e^{pi/M_j}
  while (j <= t.jmax && !(inv < to_real(t.e_at(j)) + pi / (ldexp(Real(1), j) * ln2))) ++j;
  if (j > t.jmax) throw resource_error("dilatation_integral: j(r) beyond stored r_j");
  d.j_r = j;
  Real sum = 0, last = 0;
  for (long i = j; i <= t.jmax; ++i) {
    Real M = ldexp(Real(1), i);
    // -1/r_i, dropped once it is far below the working precision
    Real x = t.e_at(i) > 4 * long(working_bits()) ? Real(0) : ldexp_big(Real(-1), -t.e_at(i));
    // pi ((r/(r-1))^2 e^{2 pi/M} - 1)
    last = pi * expm1(2 * pi / M - 2 * log1p(x));
    sum += last;
  }
  sum += last;  // terms fall at least by half from one j to the next
  d.I_estimate = sum.convert_to<double>();
  d.omega1 = omega_eval(1.0, r);
  d.bound_half_pow = std::exp2(-double(j));
  return d;
}

}  // namespace mcwd
