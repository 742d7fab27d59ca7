// Command-line front end.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mcwd/curves.hpp"
#include "mcwd/dimension.hpp"
#include "mcwd/dynamics.hpp"

using namespace mcwd;
namespace fs = std::filesystem;

namespace {

struct Config {
  int N = 10, kmax = 64;
  unsigned P_sig = 128, P_ang = 4096, guard = 256;
  double Cprime = 1.0, p = 2 * std::sqrt(2.0);
  double Lpp = 10, Pp = 10, lambda = 0.05, delta = 0.25;
  double tol = 0x1p-64;
  unsigned long seed = 1;
  std::string output_dir;

  json to_json() const {
    return {{"N", N},     {"kmax", kmax}, {"P_sig", P_sig},   {"P_ang", P_ang}, {"guard", guard},
            {"Cprime", Cprime}, {"p", p}, {"Lpp", Lpp},       {"Pp", Pp},       {"lambda", lambda},
            {"delta", delta}, {"tol", tol}, {"seed", seed},   {"output_dir", output_dir}};
  }
  DimConstants dim() const {
    DimConstants c;
    c.Lpp = Lpp, c.Pp = Pp, c.lambda = lambda, c.delta = delta;
    return c;
  }
};

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(const Config& c) {
  if (c.N < 5) throw usage_error("N must be at least 5");
  if (c.kmax < 1) throw usage_error("kmax must be positive");
  if (c.P_sig < 53 || c.P_ang < c.P_sig) throw usage_error("need 53 <= P_sig <= P_ang");
  if (!(c.Cprime > 0) || !(c.p > 2)) throw usage_error("need Cprime > 0 and p > 2");
  if (!(c.tol > 0)) throw usage_error("tol must be positive");
}

json report_certs(const CertificateReport& r) {
  json a = json::array();
  for (const auto& c : r.certs) {
    json o = {{"name", c.name}, {"index", c.index}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}};
    if (!c.note.empty()) o["note"] = c.note;
    a.push_back(o);
  }
  return a;
}

json report(const Config& c, const CertificateReport& r) {
  return {{"config", c.to_json()}, {"certificates", report_certs(r)}, {"summaries", r.summaries}};
}

void write_file(const Config& c, const std::string& name, const std::string& body) {
  fs::path dir = c.output_dir.empty() ? fs::path(".") : fs::path(c.output_dir);
  fs::create_directories(dir);
  std::ofstream(dir / name) << body;
}

void emit(const Config& c, const std::string& name, const json& j) {
  std::string s = j.dump(2);
  std::cout << s << '\n';
  if (!c.output_dir.empty()) write_file(c, name, s + '\n');
}

std::string pow2_str(const Log2Real& l) { return DyadicReal::from_log2(l).str(20); }

json point_json(const LogPolar& z) {
  if (z.is_zero) return {{"value", "0"}};
  LogPolar f = z.folded();
  return {{"log2_abs", f.rho.str(30)}, {"arg_turns", real_str(f.theta.to_real(), 30)},
          {"abs", pow2_str(f.rho)}};
}

LogPolar point_from(const std::string& rho, double theta) {
  return LogPolar::polar(Log2Real::from_real(Real(rho)), Angle::from_real(Real(theta)));
}

// "V3:5,P2:17,D:7,V1"
std::vector<ItineraryStep> parse_itinerary(const std::string& s) {
  std::vector<ItineraryStep> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::string head = tok, tail;
    auto colon = tok.find(':');
    if (colon != std::string::npos) head = tok.substr(0, colon), tail = tok.substr(colon + 1);
    try {
      BigInt b = tail.empty() ? BigInt(0) : BigInt(tail);
      if (head == "D") out.push_back({region_D(), b});
      else if (head.size() > 1 && head[0] == 'V') out.push_back({region_V(std::stol(head.substr(1))), b});
      else if (head.size() > 1 && head[0] == 'P') out.push_back({region_petal(std::stol(head.substr(1)), b), 0});
      else throw usage_error("bad itinerary token " + tok);
    } catch (const std::invalid_argument&) {
      throw usage_error("bad itinerary token " + tok);
    }
  }
  if (out.empty()) throw usage_error("empty itinerary");
  return out;
}

CertificateReport verify_all(const ModelMap& m, long kfrom, long kto, int samples, int grid) {
  const ParamTable& t = m.table();
  CertificateReport rep = verify_inequalities(t);
  kto = std::min(kto, t.kmax_stored() - 2);
  for (long k = kfrom; k <= kto; ++k) rep.merge(verify_inclusions(m, k, samples));
  rep.merge(check_singular_values(m));

  KPrime kp = find_Kprime(m, grid);
  Certificate kc{"dilatation_Kprime_found", kp.Kprime, std::to_string(kp.Kprime), ">0", kp.Kprime > 0, ""};
  rep.add(kc);
  for (const auto& d : kp.sweep) {
    std::ostringstream l;
    l << d.log2_sup;
    rep.add({"dilatation_sup_below_1", d.k, l.str(), "0", d.log2_sup < 0, ""});
  }
  rep.summaries["Kprime"] = kp.Kprime;

  const double lo = std::exp(M_PI / 4) - 1, hi = std::exp(M_PI / 4) + 1;
  const double out_cap = -std::log2(1 - std::exp(-3 * M_PI / 4)) + 1e-12;
  for (long j = t.N; j <= std::min<long>(t.N + 3, m.jtop()); ++j) {
    SeamMismatch s = seam_mismatch(m, j, 512);
    auto num = [](double x) {
      std::ostringstream os;
      os << x;
      return os.str();
    };
    rep.add({"seam_inner_ratio_lower", j, num(s.inner_min_ratio), num(lo), s.inner_min_ratio >= lo * (1 - 1e-9), ""});
    rep.add({"seam_inner_ratio_upper", j, num(s.inner_max_ratio), num(hi), s.inner_max_ratio <= hi * (1 + 1e-9), ""});
    rep.add({"seam_outer_log2_ratio", j, num(s.outer_max_log2_ratio), num(out_cap), s.outer_max_log2_ratio <= out_cap, ""});
  }
  return rep;
}

json dims_json(const Config& c, double td, long kcut, long lcut) {
  ParamTable t = build_params(c.N, c.kmax, c.Cprime, c.p);
  DimConstants dc = c.dim();
  json j;
  j["config"] = c.to_json();
  j["t"] = td;
  j["origin"] = origin_dim_bound(t, td).to_json();
  j["origin_critical_exponent"] = origin_critical_exponent(t).str();
  j["holesum"] = holesum_eval(t, td, kcut).to_json();
  CertificateReport lay = layer_checks(t, td, c.Lpp);
  j["layers"] = {{"certificates", report_certs(lay)}, {"summaries", lay.summaries}};
  j["z2_tail"] = z2_tail(t, 1, td, lcut, c.Pp).to_json();
  j["min_N"] = min_N_for_dimension(td, dc);
  return j;
}

std::string dims_sweep_csv(const Config& c, const std::vector<double>& ts) {
  std::ostringstream os;
  os << "N,t,origin,holesum,layers,z2_tail,certified\n";
  for (int N = 5; N <= 14; ++N) {
    ParamTable t = build_params(N, 16, c.Cprime, c.p);
    for (double td : ts) {
      os << N << ',' << td << ',' << verdict_str(origin_dim_bound(t, td).verdict) << ','
         << verdict_str(holesum_eval(t, td, 3).verdict) << ','
         << (layer_checks(t, td, c.Lpp).all_pass() ? "pass" : "fail") << ','
         << verdict_str(z2_tail(t, 1, td, 1, c.Pp).verdict) << ','
         << (certifies(N, td, c.dim()) ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

// Log-polar SVG: x = log2|z|, y = argument in turns.
std::string render_svg(const ModelMap& m, long kfrom, long kto, const OrbitRecord* orbit,
                       const CurveTrace* curve, int petals) {
  const ParamTable& t = m.table();
  const double W = 1200, H = 600;
  double xmin = t.eR(kfrom).convert_to<double>() - 4;
  double xmax = t.eR(kto + 1).convert_to<double>() + 3;
  auto X = [&](double rho) { return (rho - xmin) / (xmax - xmin) * W; };
  auto Y = [&](double th) { return th * H; };
  std::ostringstream os;
  os.precision(10);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<!-- mcwd build " << __DATE__ << " -->\n";
  auto band = [&](const std::string& id, double a, double b, const char* fill) {
    a = std::max(a, xmin), b = std::min(b, xmax);
    if (b <= a) return;
    os << "  <rect id=\"" << id << "\" x=\"" << X(a) << "\" y=\"0\" width=\"" << X(b) - X(a)
       << "\" height=\"" << H << "\" fill=\"" << fill << "\"/>\n";
  };
  const double q = -2, tf = std::log2(0.4), thf = std::log2(0.6), f4 = 2;
  os << " <g id=\"B\">\n";
  for (long k = kfrom; k <= kto; ++k) {
    double e = t.eR(k).convert_to<double>(), e1 = t.eR(k + 1).convert_to<double>();
    band("Bk-" + std::to_string(k), e + f4, e1 + q, "#dbe9f6");
  }
  os << " </g>\n <g id=\"A\">\n";
  for (long k = kfrom; k <= kto; ++k) {
    double e = t.eR(k).convert_to<double>();
    band("Ak-" + std::to_string(k), e + q, e + f4, "#f6e0d0");
  }
  os << " </g>\n <g id=\"V\">\n";
  for (long k = kfrom; k <= kto; ++k) {
    double e = t.eR(k).convert_to<double>();
    band("Vk-" + std::to_string(k), e + tf, e + thf, "#e8b08a");
  }
  os << " </g>\n <g id=\"petals\">\n";
  for (long k = kfrom; k <= kto; ++k) {
    ZeroList zl = zeros_in_annulus(m, k, petals);
    for (size_t i = 0; i < zl.zeros.size(); ++i) {
      LogPolar z = zl.zeros[i].folded();
      os << "  <circle id=\"petal-" << k << '-' << i + 1 << "\" cx=\"" << X(z.rho.to_double()) << "\" cy=\""
         << Y(z.theta.to_double()) << "\" r=\"2\" fill=\"#a03020\"/>\n";
    }
  }
  os << " </g>\n";
  if (orbit) {
    os << " <g id=\"orbit\">\n";
    for (size_t i = 0; i < orbit->points.size(); ++i) {
      LogPolar z = orbit->points[i].folded();
      if (z.is_zero) continue;
      double r = z.rho.to_double();
      if (r < xmin || r > xmax) continue;
      os << "  <circle id=\"orbit-" << i << "\" cx=\"" << X(r) << "\" cy=\"" << Y(z.theta.to_double())
         << "\" r=\"3\" fill=\"#204080\"/>\n";
    }
    os << " </g>\n";
  }
  if (curve) {
    os << " <g id=\"curves\">\n";
    for (int side = 0; side < 2; ++side) {
      const auto& rr = side == 0 ? curve->inner_radii : curve->outer_radii;
      os << "  <polyline id=\"curve-" << (side == 0 ? "inner" : "outer") << '-' << curve->k << '-' << curve->m
         << "\" fill=\"none\" stroke=\"#106010\" points=\"";
      for (size_t i = 0; i < rr.size(); ++i)
        os << X(rr[i].to_double()) << ',' << Y(curve->theta_grid[i].to_double()) << ' ';
      os << "\"/>\n";
    }
    os << " </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcwd: model map certificates, orbits, dimension reports and curves"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "key=value configuration file");
  Config c;
  app.add_option("--N", c.N)->capture_default_str();
  app.add_option("--kmax", c.kmax)->capture_default_str();
  app.add_option("--P_sig", c.P_sig)->capture_default_str();
  app.add_option("--P_ang", c.P_ang)->capture_default_str();
  app.add_option("--guard", c.guard)->capture_default_str();
  app.add_option("--Cprime", c.Cprime)->capture_default_str();
  app.add_option("--p", c.p)->capture_default_str();
  app.add_option("--Lpp", c.Lpp)->capture_default_str();
  app.add_option("--Pp", c.Pp)->capture_default_str();
  app.add_option("--lambda", c.lambda)->capture_default_str();
  app.add_option("--delta", c.delta)->capture_default_str();
  app.add_option("--tol", c.tol)->capture_default_str();
  app.add_option("--seed", c.seed)->capture_default_str();
  app.add_option("--output_dir", c.output_dir);

  auto* params = app.add_subcommand("params", "parameter table as JSON");
  long jshow = 8;
  params->add_option("--jshow", jshow)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run every certificate; nonzero exit on failure");
  long kfrom = 1, kto = 6;
  int samples = 4096, grid = 64;
  for (auto* s : {verify}) {
    s->add_option("--kfrom", kfrom)->capture_default_str();
    s->add_option("--kto", kto)->capture_default_str();
    s->add_option("--samples", samples)->capture_default_str();
    s->add_option("--grid", grid)->capture_default_str();
  }

  std::string rho = "0";
  double theta = 0;
  int steps = 20;
  auto* eval = app.add_subcommand("eval", "evaluate the model map at 2^rho e(theta)");
  eval->add_option("--rho", rho, "log2 |z|")->required();
  eval->add_option("--theta", theta, "argument in turns")->capture_default_str();

  auto* orbit = app.add_subcommand("orbit", "iterate and classify an orbit");
  orbit->add_option("--rho", rho)->required();
  orbit->add_option("--theta", theta)->capture_default_str();
  orbit->add_option("--steps", steps)->capture_default_str();

  auto* backward = app.add_subcommand("backward", "construct a point with a given itinerary");
  std::string itin;
  long anchor_k = 0;
  backward->add_option("--itinerary", itin, "e.g. V1:4,P2:17,V3")->required();
  backward->add_option("--anchor-k", anchor_k, "anchor in the middle of V_k (default: next index)");
  backward->add_option("--theta", theta)->capture_default_str();

  auto* dims = app.add_subcommand("dims", "dimension reports and minimal N");
  double td = 0.1;
  long kcut = 3, lcut = 1;
  bool sweep = false;
  dims->add_option("--t", td)->capture_default_str();
  dims->add_option("--kcut", kcut)->capture_default_str();
  dims->add_option("--lcut", lcut)->capture_default_str();
  dims->add_flag("--sweep", sweep, "also write dims_sweep.csv over N = 5..14");

  auto* trace = app.add_subcommand("trace", "trace boundaries of Gamma_{k,depth}");
  long tk = 1, depth = 4;
  int tgrid = 256;
  std::string phi_kind = "identity";
  trace->add_option("--k", tk)->capture_default_str();
  trace->add_option("--depth", depth)->capture_default_str();
  trace->add_option("--grid", tgrid)->capture_default_str();
  trace->add_option("--phi", phi_kind)->check(CLI::IsMember({"identity", "synthetic"}))->capture_default_str();

  auto* render = app.add_subcommand("render", "log-polar SVG of annuli, petals, an orbit and a curve");
  long rfrom = 1, rto = 2;
  int petals = 64;
  std::string orbit_rho;
  render->add_option("--kfrom", rfrom)->capture_default_str();
  render->add_option("--kto", rto)->capture_default_str();
  render->add_option("--petals", petals, "petals drawn per annulus")->capture_default_str();
  render->add_option("--orbit-rho", orbit_rho, "start an orbit at 2^rho e(theta)");
  render->add_option("--theta", theta)->capture_default_str();
  render->add_option("--steps", steps)->capture_default_str();
  render->add_option("--depth", depth, "curve depth; 0 for none")->capture_default_str();

  auto* rep = app.add_subcommand("report", "params, verify and dims in one JSON report");
  rep->add_option("--t", td)->capture_default_str();
  rep->add_option("--kto", kto)->capture_default_str();
  rep->add_option("--samples", samples)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    check(c);
    NumConfig nc;
    nc.sig_bits = c.P_sig, nc.ang_bits = c.P_ang, nc.guard = c.guard;
    configure(nc);
    auto table = [&] { return build_params(c.N, c.kmax, c.Cprime, c.p); };

    if (*params) {
      json j = {{"config", c.to_json()}, {"params", params_json(table(), jshow)}};
      emit(c, "params.json", j);
    } else if (*verify) {
      ModelMap m(table(), c.lambda, c.delta);
      CertificateReport r = verify_all(m, kfrom, kto, samples, grid);
      r.summaries["failures"] = r.failures();
      emit(c, "verify.json", report(c, r));
      std::cerr << (r.all_pass() ? "all certificates pass" : "certificate failures: " + std::to_string(r.failures()))
                << '\n';
      return r.all_pass() ? 0 : 1;
    } else if (*eval) {
      ModelMap m(table(), c.lambda, c.delta);
      LogPolar z = point_from(rho, theta);
      EvalResult r = eval_model(m, z);
      json j = {{"config", c.to_json()}, {"z", point_json(z)}, {"region", classify(m, z).str()},
                {"piece", r.piece.str()}, {"value", point_json(r.value)},
                {"derivative", point_json(deriv_model(m, z))}};
      emit(c, "eval.json", j);
    } else if (*orbit) {
      ModelMap m(table(), c.lambda, c.delta);
      OrbitRecord r = iterate_orbit(m, point_from(rho, theta), steps);
      emit(c, "orbit.json", {{"config", c.to_json()}, {"orbit", r.to_json()}});
    } else if (*backward) {
      ModelMap m(table(), c.lambda, c.delta);
      auto it = parse_itinerary(itin);
      if (anchor_k == 0) {
        const Region& last = it.back().region;
        anchor_k = last.tag == RegionTag::D ? 1 : last.k + 1;
      }
      LogPolar anchor = LogPolar::polar(Log2Real::from_int(m.table().eR(anchor_k)) - Log2Real(1),
                                        Angle::from_real(Real(theta)));
      BackwardResult r = backward_construct(m, it, anchor);
      json realized = json::array();
      for (auto& g : r.realized) realized.push_back(g.str());
      json j = {{"config", c.to_json()}, {"itinerary", itin}, {"anchor_k", anchor_k},
                {"z", point_json(r.z)}, {"verified", r.verified}, {"mismatch_step", r.mismatch_step},
                {"realized", realized}, {"bits_used", r.bits_used}};
      emit(c, "backward.json", j);
      return r.verified ? 0 : 1;
    } else if (*dims) {
      emit(c, "dims.json", dims_json(c, td, kcut, lcut));
      if (sweep) write_file(c, "dims_sweep.csv", dims_sweep_csv(c, {1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001}));
    } else if (*trace) {
      ModelMap m(table(), c.lambda, c.delta);
      DistortionModel phi = phi_kind == "identity" ? DistortionModel::identity()
                                                   : DistortionModel::synthetic(c.Cprime, c.p, c.seed);
      CurveTrace tr = trace_gamma(m, phi, tk, depth, tgrid);
      WidthCheck w = width_check(m, tr);
      std::string stem = "trace_k" + std::to_string(tk) + "_m" + std::to_string(depth);
      write_file(c, stem + ".csv", tr.to_csv());
      json full = tr.to_json();
      full["config"] = c.to_json();
      full["width"] = {{"measured_log2", w.measured_log2}, {"bound_log2", w.bound_log2}, {"pass", w.pass}};
      write_file(c, stem + ".json", full.dump(2) + '\n');
      json sum = {{"config", c.to_json()}, {"files", {stem + ".csv", stem + ".json"}},
                  {"inner_oscillation_log2", tr.inner_oscillation},
                  {"outer_oscillation_log2", tr.outer_oscillation}, {"width", full["width"]}};
      std::cout << sum.dump(2) << '\n';
      return w.pass ? 0 : 1;
    } else if (*render) {
      ModelMap m(table(), c.lambda, c.delta);
      std::unique_ptr<OrbitRecord> orb;
      if (!orbit_rho.empty()) orb = std::make_unique<OrbitRecord>(iterate_orbit(m, point_from(orbit_rho, theta), steps));
      std::unique_ptr<CurveTrace> cur;
      if (depth > 0 && rfrom + 1 + depth <= m.table().kmax_stored())
        cur = std::make_unique<CurveTrace>(trace_gamma(m, DistortionModel::identity(), rfrom, depth, 256));
      write_file(c, "render.svg", render_svg(m, rfrom, rto, orb.get(), cur.get(), petals));
      std::cout << (fs::path(c.output_dir.empty() ? "." : c.output_dir) / "render.svg").string() << '\n';
    } else if (*rep) {
      ModelMap m(table(), c.lambda, c.delta);
      CertificateReport r = verify_all(m, 1, kto, samples, 64);
      json j = report(c, r);
      j["summaries"]["params"] = params_json(m.table(), 8);
      j["summaries"]["dims"] = dims_json(c, td, 3, 1);
      j["summaries"]["failures"] = r.failures();
      emit(c, "report.json", j);
      return r.all_pass() ? 0 : 1;
    }
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const resource_error& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
