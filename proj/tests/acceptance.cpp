// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "mcwd/curves.hpp"
#include "mcwd/dimension.hpp"
#include "mcwd/dynamics.hpp"

using namespace mcwd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what() << "; ";
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && dt >= limit_s) {
    o.pass = false;
    o.detail << "runtime " << dt << " s over " << limit_s << " s; ";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", id, name, dt, o.detail.str().c_str());
  std::fflush(stdout);
}

const ModelMap& map5() {
  static ModelMap m(build_params(5, 30));
  return m;
}

std::pair<double, double> gap(const LogPolar& a, const LogPolar& b) {
  LogPolar r = lp_div(a, b).folded();
  return {std::fabs(r.rho.to_double()), std::fabs(r.theta.centered().convert_to<double>())};
}

LogPolar v_point(const ModelMap& m, long k) {
  return LogPolar::polar(Log2Real::from_int(m.table().eR(k)) - Log2Real(1), Angle::from_ratio(3, 7));
}

void table(Outcome& o) {
  const long M[] = {1, 2, 4, 8, 16};
  const long c[] = {0, 0, -8, -32, -128};
  const long r[] = {0, 4, 6, 12, 56};
  for (int N : {5, 10, 14, 20}) {
    ParamTable t = build_params(N, 5);
    for (int k = 0; k <= 4; ++k) o.require(t.M(k) == M[k], "M_" + std::to_string(k));
    for (int k = 1; k <= 4; ++k) {
      o.require(t.eps_at(k) == c[k], "c_" + std::to_string(k));
      o.require(t.e_at(k) == r[k], "r_" + std::to_string(k));
    }
  }
  o.detail << "M_4=16 c_4=2^-128 r_4=2^56 for N in {5,10,14,20}";
}

void inequalities(Outcome& o) {
  const char* need[] = {"ckrkeq", "sqrt_rk1_ge_rk", "rk1_ge_4rk2", "rk1_ge_2_pow_Mk", "Rkest_4Rk2",
                        "Rkest_CkRknk", "Rkest_lower_power", "Rkest_next", "nk_double", "nk_sum"};
  size_t total = 0;
  for (int N : {5, 10, 14}) {
    CertificateReport rep = verify_inequalities(build_params(N, 64));
    total += rep.certs.size();
    o.require(rep.all_pass(), "N=" + std::to_string(N) + " has " + std::to_string(rep.failures()) + " failures");
    auto has = [&](const std::string& s) {
      for (auto& c : rep.certs)
        if (c.name == s) return true;
      return false;
    };
    for (auto* s : need) o.require(has(s), std::string("missing ") + s);
    if (N >= 10) o.require(has("quotient_est_lower") && has("quotient_est_upper"), "quotient_est");
  }
  o.detail << total << " certificates";
}

void inclusions(Outcome& o) {
  const ModelMap& m = map5();
  size_t n = 0;
  for (long k = 1; k <= 6; ++k) {
    CertificateReport rep = verify_inclusions(m, k, 4096);
    n += rep.certs.size();
    for (auto& c : rep.certs) o.require(c.pass, c.name + " k=" + std::to_string(k));
  }
  o.detail << n << " extrema certificates, 4096 samples per circle";
}

void landmarks(Outcome& o) {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  double eN = t.e_at(5).convert_to<double>(), eN1 = t.e_at(6).convert_to<double>();
  QnLandmarks q = qN_landmarks(m);
  o.require(q.zeros.size() == 31, "zero count");
  double worst_rel = 0;
  for (size_t i = 0; i < q.zeros.size(); ++i) {
    const LogPolar& z = q.zeros[i];
    LogPolar v = eval_model(m, z).value;
    o.require(v.is_zero || v.log2_abs().to_double() < eN + z.log2_abs().to_double() - 100, "q_N(zero)");
    LogPolar dc = deriv_model(m, q.crit_points[i]);
    o.require(dc.is_zero || dc.log2_abs().to_double() < eN - 100, "q_N'(critical point)");
    double cv = q.crit_values[i].log2_abs().to_double();
    o.require(cv > eN + 3 && cv < eN1 - 4.5, "critical value window");
  }
  // |q_N'(zero)| = r_N (M_N - 1)
  double want = eN + std::log2(31.0);
  for (auto& z : q.zeros) {
    double rel = std::fabs(std::exp2(deriv_model(m, z).log2_abs().to_double() - want) - 1);
    worst_rel = std::max(worst_rel, rel);
  }
  o.require(worst_rel < 1e-12, "q_N'(zero) relative error");
  o.require(std::fabs(q.deriv_at_zero.log2_abs().to_double() - want) < 1e-12, "deriv_at_zero");
  o.detail << "worst |q'(zero)| relative error " << worst_rel << ", critical value log2 "
           << q.crit_value_log2.to_double();
}

void dimension(Outcome& o) {
  o.require(origin_critical_exponent(build_params(5, 8)) == Rational(5, 752), "t* = 5/752");
  ParamTable t10 = build_params(10, 16);
  for (double td : {1.0, 0.1, 0.01}) {
    CoverReport h = holesum_eval(t10, td, 3);
    o.require(h.verdict == Verdict::converges && h.tail_excess_log2 < 1, "holesum t=" + std::to_string(td));
    CoverReport z = z2_tail(t10, 1, td, 1, 10);
    o.require(z.verdict == Verdict::converges && z.tail_excess_log2 < 1, "z2_tail t=" + std::to_string(td));
  }
  // min N is non-increasing as t grows
  const double ts[] = {0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0};
  int prev = 1 << 30;
  o.detail << "min N:";
  for (double td : ts) {
    int n = min_N_for_dimension(td);
    o.require(n > 0 && n <= prev, "min_N monotone at t=" + std::to_string(td));
    prev = n;
    o.detail << " t=" << td << "->" << n;
  }
  for (double td : {1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001, 1e-4}) {
    CoverReport z = z2_tail(t10, 1, td, 1, 10);
    o.require(z.verdict == Verdict::converges, "z2_tail converges at t=" + std::to_string(td));
  }
}

void curves(Outcome& o) {
  const ModelMap& m = map5();
  const double osc_tol = std::ldexp(1.0, -int(num_config().sig_bits) + 8);
  double worst = -INFINITY;
  for (long d = 1; d <= 8; ++d) {
    CurveTrace tr = trace_gamma(m, DistortionModel::identity(), 1, d, 256);
    o.require(tr.inner_oscillation <= osc_tol && tr.outer_oscillation <= osc_tol, "circle at depth " + std::to_string(d));
    WidthCheck w = width_check(m, tr);
    o.require(w.pass, "width at depth " + std::to_string(d));
    worst = std::max(worst, w.measured_log2 - w.bound_log2);
  }
  DistortionModel phi = DistortionModel::synthetic(1.0, 2 * std::sqrt(2.0), 1);
  double worst_ratio = 0;
  for (int s = 0; s < 8; ++s) {
    TangentProducts tp = tangent_products(m, phi, 1, Angle::from_ratio(2 * s + 1, 16), 8);
    for (size_t a = 0; a < tp.partials.size(); ++a)
      for (size_t b = a + 1; b < tp.partials.size(); ++b) {
        double sum = 0;
        for (size_t l = a + 1; l <= b; ++l) sum += tp.level_bound[l];
        double lhs = cx_abs(tp.partials[b] - tp.partials[a]).convert_to<double>();
        double rhs = cx_abs(tp.partials[a]).convert_to<double>() * std::expm1(sum);
        o.require(lhs <= rhs, "Cauchy difference");
        worst_ratio = std::max(worst_ratio, lhs / rhs);
      }
    double floor = std::exp(-tp.limit_log_bound);
    o.require(floor > 0, "limit modulus bound positive");
    for (auto& p : tp.partials) o.require(cx_abs(p).convert_to<double>() >= floor, "limit modulus");
  }
  o.detail << "max log2(width/bound) " << worst << ", max Cauchy difference/bound " << worst_ratio;
}

void dilatation(Outcome& o) {
  const ModelMap& m = map5();
  KPrime kp = find_Kprime(m, 64);
  o.require(kp.Kprime > 0 && kp.sweep.size() == 9, "K' found");
  for (auto& d : kp.sweep) o.require(d.sup < 1, "dilatation_sup < 1 at k=" + std::to_string(d.k));
  // K is fixed on s = 4..9 and must hold unchanged on s = 10..14
  const ParamTable& t = m.table();
  double K = 0;
  std::vector<double> ratios;
  for (int s = 4; s <= 14; ++s) {
    DilatationIntegral d = dilatation_integral(t, DyadicReal::pow2(-(BigInt(1) << s)));
    double r = d.I_estimate / d.omega1;
    ratios.push_back(r);
    if (s <= 9) K = std::max(K, r);
  }
  for (size_t i = 0; i < ratios.size(); ++i) o.require(ratios[i] <= K, "I(r) <= K omega_1(r) at s=" + std::to_string(i + 4));
  o.detail << "K'=" << kp.Kprime << " K=" << K;
}

void round_trips(Outcome& o) {
  const ModelMap& m = map5();
  const ParamTable& t = m.table();
  const double tol = std::ldexp(1.0, -64);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0, 1);
  double worst[3] = {0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    long k = 1 + static_cast<long>(rng() % 4);
    unsigned long n = t.n(k).convert_to<unsigned long>();
    Angle th = Angle::from_real(Real(U(rng)));
    LogPolar T = LogPolar::polar(Log2Real::from_int(t.eR(k + 1)) - Log2Real::from_real(Real(2 * U(rng))), th);
    LogPolar To = LogPolar::polar(Log2Real::from_int(t.eR(1)) - Log2Real::from_real(Real(40 * U(rng))), th);
    InverseBranchSpec specs[3] = {{BranchKind::VkRoot, k, BigInt(rng() % n)},
                                  {BranchKind::PetalInverse, k, BigInt(1 + rng() % n)},
                                  {BranchKind::OriginBranch, 0, BigInt(rng() % 32)}};
    for (int s = 0; s < 3; ++s) {
      const LogPolar& target = s == 2 ? To : T;
      LogPolar z = inverse_step(m, target, specs[s]);
      auto g = gap(eval_model(m, z).value, target);
      o.require(g.first < tol && g.second < tol, "round trip " + specs[s].str());
      worst[s] = std::max({worst[s], g.first, g.second});
    }
  }
  auto V = [](long k, long b) { return ItineraryStep{region_V(k), BigInt(b)}; };
  auto P = [](long k, long j) { return ItineraryStep{region_petal(k, BigInt(j)), 0}; };
  auto D = [](long b) { return ItineraryStep{region_D(), BigInt(b)}; };
  std::vector<std::pair<std::vector<ItineraryStep>, long>> its;
  {
    std::vector<ItineraryStep> a;
    for (long k = 1; k <= 20; ++k) a.push_back(V(k, 3 * k));
    its.push_back({a, 21});
    std::vector<ItineraryStep> b = {V(1, 4), P(2, 17)};
    for (long k = 3; k <= 20; ++k) b.push_back(V(k, k));
    its.push_back({b, 21});
    std::vector<ItineraryStep> c = {V(1, 2), V(2, 0), P(3, 9)};
    for (long k = 2; k <= 18; ++k) c.push_back(V(k, 1));
    its.push_back({c, 19});
    std::vector<ItineraryStep> d = {V(1, 6), P(2, 3), D(7)};
    for (long k = 1; k <= 17; ++k) d.push_back(V(k, 5));
    its.push_back({d, 18});
  }
  for (auto& [it, anchor] : its) {
    if (it.size() != 20) o.require(false, "itinerary length");
    BackwardResult r = backward_construct(m, it, v_point(m, anchor));
    o.require(r.verified, "backward itinerary, mismatch at " + std::to_string(r.mismatch_step));
  }
  o.detail << "3x1000 round trips, worst gaps " << worst[0] << " " << worst[1] << " " << worst[2]
           << "; " << its.size() << " length-20 itineraries verified";
}

}  // namespace

int main() {
  configure(NumConfig());
  run(1, "table_reproduction", 1.0, table);
  run(2, "inequality_suite", 10.0, inequalities);
  run(3, "mapping_inclusions", 60.0, inclusions);
  run(4, "qN_landmarks", 0, landmarks);
  run(5, "dimension_certificates", 0, dimension);
  run(6, "curve_suite", 0, curves);
  run(7, "dilatation", 0, dilatation);
  run(8, "round_trips", 0, round_trips);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
