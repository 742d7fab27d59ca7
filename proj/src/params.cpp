#include "mcwd/params.hpp"

#include <functional>

namespace mcwd {

void CertificateReport::merge(const CertificateReport& o) {
  certs.insert(certs.end(), o.certs.begin(), o.certs.end());
  for (auto it = o.summaries.begin(); it != o.summaries.end(); ++it) summaries[it.key()] = it.value();
}

size_t CertificateReport::failures() const {
  size_t n = 0;
  for (const auto& c : certs) n += !c.pass;
  return n;
}

json CertificateReport::to_json() const {
  json a = json::array();
  for (const auto& c : certs) {
    json o = {{"name", c.name}, {"index", c.index}, {"lhs_exponent", c.lhs},
              {"rhs_exponent", c.rhs}, {"pass", c.pass}};
    if (!c.note.empty()) o["note"] = c.note;
    a.push_back(o);
  }
  return a;
}

BigInt ParamTable::M(long j) const {
  if (j < 0) throw std::out_of_range("M_j with j < 0");
  return BigInt(1) << static_cast<unsigned>(j);
}

const BigInt& ParamTable::e_at(long j) const {
  if (j < 1 || j > jmax) throw std::out_of_range("r_j outside the table: j=" + std::to_string(j));
  return e[j];
}

const BigInt& ParamTable::eps_at(long j) const {
  if (j < 1 || j > jmax) throw std::out_of_range("c_j outside the table: j=" + std::to_string(j));
  return eps[j];
}

double ParamTable::alpha(long k) const {
  return 1.0 / (1.0 - Cprime * std::pow(0.5, std::sqrt(double(j_of(k))) / 4));
}

double ParamTable::beta(long k) const {
  return 1.0 / (1.0 + Cprime * std::pow(0.5, std::sqrt(double(j_of(k))) / 4));
}

ParamTable build_params(int N, int kmax, double Cprime, double p, double R_phi) {
  if (N < 5) throw std::invalid_argument("N must be at least 5");
  if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");
  ParamTable t;
  t.N = N;
  t.kmax = kmax;
  t.Cprime = Cprime;
  t.p = p;
  t.R_phi = R_phi;
  t.jmax = kmax + N + 1;
  t.e.assign(t.jmax + 1, BigInt(0));
  t.eps.assign(t.jmax + 1, BigInt(0));
  t.e[1] = 4;  // r_1 = 16
  t.eps[1] = 0;  // c_1 = 1
  for (int j = 1; j < t.jmax; ++j) {
    BigInt Mj = t.M(j);
    t.e[j + 1] = t.eps[j] + Mj * (t.e[j] - 1);
    t.eps[j + 1] = t.eps[j] - Mj * t.e[j];
    if (msb(abs(t.eps[j + 1]) + 1) > 1000000)
      throw resource_error("exponent bit budget exceeded at j=" + std::to_string(j + 1));
  }
  t.k0 = compute_k0(t);
  return t;
}

namespace {

Certificate cert_ge(std::string name, long idx, const BigInt& l, const BigInt& r) {
  return {std::move(name), idx, l.str(), r.str(), l >= r, ""};
}

Certificate cert_gt(std::string name, long idx, const BigInt& l, const BigInt& r) {
  return {std::move(name), idx, l.str(), r.str(), l > r, ""};
}

Certificate cert_eq(std::string name, long idx, const BigInt& l, const BigInt& r) {
  return {std::move(name), idx, l.str(), r.str(), l == r, ""};
}

Certificate cert_ge_q(std::string name, long idx, const Rational& l, const Rational& r) {
  return {std::move(name), idx, l.str(), r.str(), l >= r, ""};
}

}  // namespace

CertificateReport verify_inequalities(const ParamTable& t) {
  CertificateReport rep;
  const long J = t.jmax;
  auto e = [&](long j) -> const BigInt& { return t.e_at(j); };
  auto ep = [&](long j) -> const BigInt& { return t.eps_at(j); };

  rep.add(cert_gt("r2_gt_r1", 1, e(2), e(1)));
  for (long k = 1; k < J; ++k) rep.add(cert_gt("rk_increasing", k, e(k + 1), e(k)));
  for (long k = 2; k < J; ++k)
    rep.add(cert_ge_q("sqrt_rk1_ge_rk", k, Rational(e(k + 1), 2), Rational(e(k))));
  for (long k = 3; k <= J; ++k)
    rep.add(cert_ge("ckrkeq", k, t.M(k) * e(k) + ep(k), (t.M(k - 1) + 1) * e(k)));
  for (long k = 3; k < J; ++k)
    rep.add(cert_ge("xkesteq", k, e(k + 1), -t.M(k) + (t.M(k - 1) + 1) * e(k)));
  for (long k = 5; k < J; ++k) rep.add(cert_ge("rk1_ge_2_pow_Mk", k, e(k + 1), t.M(k)));
  for (long k = 5; k < J; ++k) rep.add(cert_ge("rk1_ge_4rk2", k, e(k + 1), 2 + 2 * e(k)));

  // exact recurrence identities
  for (long j = 1; j < J; ++j)
    rep.add(cert_eq("recurrence_r", j, e(j + 1) + t.M(j), ep(j) + t.M(j) * e(j)));
  for (long j = 2; j <= J; ++j)
    rep.add(cert_eq("recurrence_c", j, ep(j), ep(j - 1) + (t.M(j - 1) - t.M(j)) * e(j - 1)));
  for (long k = 2; k <= J; ++k) {
    BigInt s = 0;
    for (long j = 0; j <= k - 2; ++j) s += t.M(j);
    rep.add(cert_eq("sum_Mj", k, s, t.M(k - 1) - 1));
  }

  // permissibility: log2(r_{j+1}/r_j) >= pi/(M_j ln 2). Fails at j = 1 (4 < e^{pi/2}).
  for (long j = 2; j < J; ++j) {
    BigInt gap = e(j + 1) - e(j);
    Real need = real_pi() / (to_real(t.M(j)) * real_ln2());
    rep.add({"permissible", j, gap.str(), real_str(need, 12), to_real(gap) >= need, ""});
  }
  {
    BigInt gap = e(2) - e(1);
    Real need = real_pi() / (2 * real_ln2());
    rep.summaries["permissible_j1"] = {
        {"lhs_exponent", gap.str()}, {"rhs_exponent", real_str(need, 12)},
        {"holds", to_real(gap) >= need},
        {"note", "r_2/r_1 = 4 is below e^{pi/2}; the model only uses j >= N"}};
  }

  // re-indexed forms
  const long K = t.kmax_stored();
  auto n = [&](long k) { return t.n(k); };
  for (long k = 1; k <= K; ++k) {
    rep.add(cert_ge("Rkest_CkRknk", k, n(k) * t.eR(k) + t.eC(k), (n(k - 1) + 1) * t.eR(k)));
    rep.add(cert_ge("Rkest_lower_power", k, t.eR(k), t.M(k + t.N - 2)));
    if (k < K) {
      rep.add(cert_ge("Rkest_next", k, t.eR(k + 1), -n(k) + (n(k - 1) + 1) * t.eR(k)));
      rep.add(cert_ge("Rkest_4Rk2", k, t.eR(k + 1), 2 + 2 * t.eR(k)));
      rep.add(cert_eq("identity_CkRknk", k, t.eC(k) + n(k) * t.eR(k), n(k) + t.eR(k + 1)));
      rep.add(cert_eq("nk_double", k, 2 * n(k), n(k + 1)));
      BigInt s = BigInt(1) << t.N;
      for (long i = 1; i <= k; ++i) s += n(i);
      rep.add(cert_eq("nk_sum", k, s, n(k + 1)));
    }
  }

  if (t.N >= 10) {
    long N = t.N;
    Rational Q(e(N) - ep(N) - N, t.M(N) - 1);
    rep.add(cert_ge_q("quotient_est_lower", N, Q, Rational(t.M(N - 7) + e(N - 1))));
    rep.add(cert_ge_q("quotient_est_upper", N, Rational(2 * e(N - 1)) - Rational(1, 2), Q));
  }

  // alpha/beta closeness window (informational)
  {
    bool all = true;
    long first = -1;
    for (long k = 1; k <= K; ++k) {
      bool ok = t.beta(k) > 0.99 && t.alpha(k) < 1.01 && t.alpha(k) > 1 && t.beta(k) < 1;
      all = all && ok;
      if (ok && first < 0) first = k;
    }
    double x = 4 * std::log2(101 * t.Cprime);
    rep.summaries["alpha_beta_window"] = {
        {"holds_for_all_stored_k", all},
        {"first_stored_k", first},
        {"needs_k_plus_N_minus_1_above", x * x},
        {"alpha_1", t.alpha(1)},
        {"beta_1", t.beta(1)}};
  }
  rep.summaries["k0"] = t.k0;
  return rep;
}

double omega_from_log2_inv(double p, const Log2Real& log2_inv_r) {
  Real l = log2_inv_r.to_real() * real_ln2();  // ln r^-1
  if (l < 1) throw domain_error("omega_p needs ln ln r^-1 >= 0");
  Real ll = log(l);
  Real ex = sqrt(ll) / p;
  return pow(Real(0.5), ex).convert_to<double>();
}

double omega_eval(double p, const DyadicReal& r) {
  if (r.sign() <= 0) throw domain_error("omega_p needs r > 0");
  Log2Real l = r.log2_abs();
  if (l.sign() >= 0) throw domain_error("omega_p needs r < 1");
  return omega_from_log2_inv(p, -l);
}

int compute_k0(const ParamTable& t) {
  const long J = t.jmax;
  std::vector<bool> ok(J + 2, false);
  for (long k = 1; k <= J; ++k) {
    Real l = to_real(t.e_at(k)) * real_ln2() - log(Real(20));  // ln(r_k/20)
    ok[k] = l > 0 && log(l) >= Real(k) / 2;
  }
  // suffix-closed condition plus r_k >= 20 R_phi
  Real need = log2(Real(20 * t.R_phi));
  int best = -1;
  bool suffix = true;
  for (long k = J; k >= 1; --k) {
    suffix = suffix && ok[k];
    if (suffix && to_real(t.e_at(k)) >= need) best = static_cast<int>(k);
  }
  return best;
}

json params_json(const ParamTable& t, long jshow) {
  json rows = json::array();
  for (long j = 1; j <= std::min<long>(jshow, t.jmax); ++j) {
    rows.push_back({{"j", j},
                    {"M", t.M(j).str()},
                    {"log2_r", t.e_at(j).str()},
                    {"log2_c", t.eps_at(j).str()},
                    {"r", "1×2^" + t.e_at(j).str()},
                    {"c", "1×2^" + t.eps_at(j).str()}});
  }
  json ks = json::array();
  for (long k = 1; k <= std::min<long>(jshow, t.kmax_stored()); ++k) {
    ks.push_back({{"k", k},
                  {"log2_n", t.log2n(k)},
                  {"log2_R", t.eR(k).str()},
                  {"log2_C", t.eC(k).str()},
                  {"alpha", t.alpha(k)},
                  {"beta", t.beta(k)}});
  }
  return {{"N", t.N}, {"kmax", t.kmax}, {"Cprime", t.Cprime}, {"p", t.p},
          {"k0", t.k0}, {"table", rows}, {"reindexed", ks}};
}

}  // namespace mcwd
