#include "mcwd/dimension.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mcwd {

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::converges: return "converges";
    case Verdict::diverges: return "diverges";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

json DimConstants::to_json() const {
  return {{"Lpp", Lpp}, {"Pp", Pp}, {"delta", delta}, {"lambda", lambda}};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

std::string dstr(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

// log2(2^a + 2^b)
Real lse(const Real& a, const Real& b) {
  if (isinf(a) && a < 0) return b;
  if (isinf(b) && b < 0) return a;
  const Real& hi = a > b ? a : b;
  const Real& lo = a > b ? b : a;
  return hi + log2(1 + pow(Real(2), lo - hi));
}

Real neg_inf() { return -Real(std::numeric_limits<double>::infinity()); }

double to_d(const Real& x) { return x.convert_to<double>(); }

// log2 L_k, L_k = n_1 ... n_k
Real log2_L(long N, long k) { return Real(k) * N + Real(k) * (k - 1) / 2; }

// log2 n_k
Real log2_n(long N, long k) { return Real(N + k - 1); }

// log2(1 - 2^x) for x < 0
Real log2_one_minus(const Real& x) { return log2(-expm1(x * real_ln2())); }

void finish(CoverReport& r) {
  r.partial_sum = std::exp2(r.partial_log2);
  r.tail_bound = std::exp2(r.tail_log2);
  r.ratio = std::exp2(r.ratio_log2);
}

}  // namespace

double CoverReport::total_log2() const {
  if (!std::isfinite(tail_log2)) return tail_log2 > 0 ? kInf : partial_log2;
  return to_d(lse(Real(partial_log2), Real(tail_log2)));
}

json CoverReport::to_json() const {
  json j;
  j["name"] = name;
  j["t"] = t;
  j["partial_log2"] = num(partial_log2);
  j["tail_log2"] = num(tail_log2);
  j["first_omitted_log2"] = num(first_omitted_log2);
  j["partial_sum"] = num(partial_sum);
  j["tail_bound"] = num(tail_bound);
  j["ratio"] = num(ratio);
  j["ratio_log2"] = num(ratio_log2);
  j["tail_excess_log2"] = num(tail_excess_log2);
  j["cut"] = cut;
  j["verdict"] = verdict_str(verdict);
  j["constants_used"] = constants.to_json();
  if (!diagnosis.empty()) j["diagnosis"] = diagnosis;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

Rational origin_critical_exponent(const ParamTable& t) {
  return Rational(BigInt(t.N), t.e_at(t.N));
}

CoverReport origin_dim_bound(const ParamTable& t, double tdim) {
  if (!(tdim > 0)) throw std::invalid_argument("origin_dim_bound needs t > 0");
  CoverReport r;
  r.name = "origin_cantor";
  r.t = tdim;
  r.cut = 1;
  Real rl = Real(t.N) - Real(tdim) * to_real(t.e_at(t.N));
  r.ratio_log2 = to_d(rl);
  r.partial_log2 = r.ratio_log2;  // n = 1
  r.first_omitted_log2 = to_d(2 * rl);
  if (rl < 0) {
    r.verdict = Verdict::converges;
    r.tail_log2 = to_d(2 * rl - log2_one_minus(rl));
    r.tail_excess_log2 = to_d(-log2_one_minus(rl));
  } else {
    r.verdict = Verdict::diverges;
    r.tail_log2 = kInf;
    r.diagnosis = "2^N R_1^{-t} >= 1";
  }
  Rational ts = origin_critical_exponent(t);
  std::ostringstream o;
  o << ts;
  r.extra["t_star"] = o.str();
  r.extra["t_star_value"] = to_d(Real(ts));
  finish(r);
  return r;
}

CoverReport holesum_eval(const ParamTable& t, double tdim, long kcut) {
  if (!(tdim > 0)) throw std::invalid_argument("holesum_eval needs t > 0");
  if (kcut < 3) throw std::invalid_argument("holesum_eval needs kcut >= 3");
  if (kcut + 1 > t.kmax_stored()) throw resource_error("holesum_eval: kcut beyond the stored table");
  const long N = t.N;
  CoverReport r;
  r.name = "holesum";
  r.t = tdim;
  r.cut = kcut;
  auto term = [&](long k) { return Real(k) + log2_L(N, k) - Real(tdim) * to_real(t.eR(k)); };
  Real part = neg_inf();
  json terms = json::array();
  for (long k = 1; k <= kcut; ++k) {
    Real a = term(k);
    terms.push_back(to_d(a));
    part = lse(part, a);
  }
  r.partial_log2 = to_d(part);
  Real first = term(kcut + 1);
  r.first_omitted_log2 = to_d(first);
  r.extra["term_log2"] = terms;
  // a_{k+1}/a_k <= 8 n_{k-1} 2^{-t n_{k-1}}; from k = kcut + 1 on this is
  // decreasing once t n_kcut ln 2 >= 1
  auto rho = [&](long k) { return 3 + log2_n(N, k - 1) - Real(tdim) * pow(Real(2), log2_n(N, k - 1)); };
  auto usable = [&](long kc) {
    Real nk = pow(Real(2), log2_n(N, kc));
    return nk * tdim * real_ln2() >= 1 && rho(kc + 1) < -1;
  };
  Real rl = rho(kcut + 1);
  r.ratio_log2 = to_d(rl);
  if (usable(kcut)) {
    r.verdict = Verdict::converges;
    r.tail_log2 = to_d(first - log2_one_minus(rl));
    r.tail_excess_log2 = to_d(-log2_one_minus(rl));
  } else {
    r.verdict = Verdict::inconclusive;
    r.tail_log2 = kInf;
    long need = kcut;
    while (need < 4096 && !usable(need)) ++need;
    r.diagnosis = "ratio bound 2^" + dstr(r.ratio_log2) + " not below 1/2 at kcut; kcut >= " +
                  std::to_string(need) + " needed";
  }
  finish(r);
  return r;
}

namespace {

CoverReport holesum_adaptive(const ParamTable& t, double tdim) {
  CoverReport h;
  for (long kc = 3; kc + 1 <= t.kmax_stored(); ++kc) {
    h = holesum_eval(t, tdim, kc);
    if (h.verdict == Verdict::converges) break;
  }
  return h;
}

struct LayerNums {
  double easy_lhs, easy_rhs, hard_lhs, hard_rhs;
  bool easy() const { return easy_lhs <= easy_rhs; }
  bool hard() const { return hard_lhs <= hard_rhs; }
};

LayerNums layer_nums(const ParamTable& t, double tdim, double Lpp) {
  LayerNums n;
  n.easy_lhs = to_d(Real(tdim) * std::log2(Lpp) + t.N - Real(tdim) * to_real(t.e_at(t.N)));
  n.easy_rhs = -std::log2(100.0);
  CoverReport h = holesum_adaptive(t, tdim);
  n.hard_lhs = h.verdict == Verdict::converges ? h.total_log2() : kInf;
  n.hard_rhs = -std::log2(100.0) + tdim * (1 - 2 * std::log2(Lpp));
  return n;
}

}  // namespace

CertificateReport layer_checks(const ParamTable& t, double tdim, double Lpp) {
  if (Lpp < 1) throw std::invalid_argument("layer_checks needs L'' >= 1");
  if (!(tdim > 0)) throw std::invalid_argument("layer_checks needs t > 0");
  CertificateReport rep;
  LayerNums n = layer_nums(t, tdim, Lpp);
  rep.add({"easy_W_condition", t.N, dstr(n.easy_lhs), dstr(n.easy_rhs), n.easy(),
           "log2((L'')^t 2^N / R_1^t) <= log2(1/100)"});
  rep.add({"hard_W_condition", t.N, dstr(n.hard_lhs), dstr(n.hard_rhs), n.hard(),
           "log2 sum 2^k L_k R_k^{-t} <= log2((1/100)(2/L''^2)^t)"});
  double diam_log2 = tdim * (t.e_at(t.N).convert_to<double>() + 3);  // diam(A_1) <= 8 R_1
  double total = diam_log2 - std::log2(9.0);
  rep.summaries["layer_constant"] = 0.1;
  rep.summaries["layer_total_log2"] = total;
  rep.summaries["diam_A1_t_log2"] = diam_log2;
  rep.summaries["Lpp"] = Lpp;
  rep.summaries["t"] = tdim;
  if (!(n.easy() && n.hard())) {
    int fix = -1;
    for (int M = t.N + 1; M <= 64 && fix < 0; ++M) {
      ParamTable u = build_params(M, 16, t.Cprime, t.p, t.R_phi);
      LayerNums m = layer_nums(u, tdim, Lpp);
      if (m.easy() && m.hard()) fix = M;
    }
    rep.summaries["N_threshold"] = fix;
  }
  return rep;
}

CoverReport z2_tail(const ParamTable& t, long k, double tdim, long lcut, double Pp, double eps) {
  if (lcut < 1) throw std::invalid_argument("z2_tail needs lcut >= 1");
  if (!(tdim > 0)) throw std::invalid_argument("z2_tail needs t > 0");
  if (k < 1 || k > t.kmax_stored()) throw std::invalid_argument("z2_tail: annulus index out of range");
  const long N = t.N;
  CoverReport r;
  r.name = "z2_tail";
  r.t = tdim;
  r.constants.Pp = Pp;
  Real T(tdim);
  Real pre = T * (Real(std::log2(Pp)) + to_real(t.eR(k)));
  auto term = [&](long j) { return Real(j) + log2_L(N, k + j) - T * pow(Real(2), log2_n(N, k + j)); };
  // b_{j+1}/b_j = 4 n_{k+j} 2^{-t n_{k+j}}, decreasing once t n_{k+j} ln 2 >= 1
  auto rho = [&](long j) { return 2 + log2_n(N, k + j) - T * pow(Real(2), log2_n(N, k + j)); };
  auto ok = [&](long j) {
    return pow(Real(2), log2_n(N, k + j)) * T * real_ln2() >= 1 && rho(j) < -1;
  };
  auto sum_from = [&](long l, long* J, Real* first, Real* tail, Real* rl) {
    Real part = neg_inf();
    long j = l;
    do {
      part = lse(part, term(j));
      ++j;
    } while (!ok(j) && j < l + 100000);
    *J = j;
    *first = term(j);
    *rl = rho(j);
    *tail = *first - log2_one_minus(*rl);
    return part;
  };
  long J;
  Real first, tail, rl;
  Real part = sum_from(lcut, &J, &first, &tail, &rl);
  r.cut = J - lcut;
  r.partial_log2 = to_d(pre + part);
  r.first_omitted_log2 = to_d(pre + first);
  r.tail_log2 = to_d(pre + tail);
  r.ratio_log2 = to_d(rl);
  r.tail_excess_log2 = to_d(-log2_one_minus(rl));
  r.verdict = ok(J) ? Verdict::converges : Verdict::inconclusive;
  r.extra["k"] = k;
  r.extra["lcut"] = lcut;
  r.extra["prefactor_log2"] = to_d(pre);
  // smallest l with total < eps
  long best = -1;
  Real le = log2(Real(eps));
  for (long l = 1; l <= 4096; ++l) {
    long J2;
    Real f2, t2, r2;
    Real p2 = sum_from(l, &J2, &f2, &t2, &r2);
    if (pre + lse(p2, t2) < le) {
      best = l;
      break;
    }
  }
  r.extra["eps"] = eps;
  r.extra["lcut_for_eps"] = best;
  finish(r);
  return r;
}

bool certifies(int N, double tdim, const DimConstants& c, json* why) {
  ParamTable t = build_params(N, 16);
  CoverReport o = origin_dim_bound(t, tdim);
  LayerNums l = layer_nums(t, tdim, c.Lpp);
  CoverReport h = holesum_adaptive(t, tdim);
  CoverReport z = z2_tail(t, 1, tdim, 1, c.Pp);
  bool ok = o.verdict == Verdict::converges && l.easy() && l.hard() && h.verdict == Verdict::converges &&
            z.verdict == Verdict::converges;
  if (why) {
    (*why)["origin"] = verdict_str(o.verdict);
    (*why)["layers"] = l.easy() && l.hard();
    (*why)["holesum"] = verdict_str(h.verdict);
    (*why)["z2_tail"] = verdict_str(z.verdict);
  }
  return ok;
}

int min_N_for_dimension(double tdim, const DimConstants& c) {
  if (!(tdim > 0)) throw std::invalid_argument("min_N_for_dimension needs t > 0");
  for (int N = 5; N <= 64; ++N)
    if (certifies(N, tdim, c)) return N;
  return -1;
}

double hausdorff_sum_log2(const std::vector<DyadicReal>& diams, double tdim) {
  Real acc = neg_inf();
  for (const auto& d : diams) {
    if (d.sign() <= 0) throw std::invalid_argument("hausdorff_sum needs positive diameters");
    acc = lse(acc, Real(tdim) * d.log2_abs().to_real());
  }
  return to_d(acc);
}

double hausdorff_sum(const std::vector<DyadicReal>& diams, double tdim) {
  return std::exp2(hausdorff_sum_log2(diams, tdim));
}

}  // namespace mcwd
