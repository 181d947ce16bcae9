#include "trf/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "trf/automorphic.hpp"
#include "trf/qdiff.hpp"
#include "trf/schrodinger.hpp"
#include "trf/sturm_liouville.hpp"

namespace trf::cli {

using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::vector<long> parse_longs(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    try {
      out.push_back(std::stol(item, &used));
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != item.size()) throw UsageError("expected a comma-separated integer list, got '" + text + "'");
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

// All flags share one bag; each subcommand registers the ones it reads.
struct Flags {
  std::string potential;
  int nmax = 100;
  std::string lambda = "-1";
  double b = 1.0;
  std::string k = "0.4";
  long d = -4;
  std::string s = "2";
  std::string check;
  std::string out;
  std::string csv;
  double tol = 0.0;
  unsigned seed = 1;
  int order = 0;
  std::string task;
  std::string z = "0,1";
  std::string zp = "0,2";
  std::string curve = "zeta:1";
  double umax = 200.0;
  std::string targets = "1000,500000";
};

class Session {
 public:
  Session(CLI::App* sub, const Flags& f) : sub_(sub), f_(f) {}

  double tol(double fallback) const { return given("--tol") ? f_.tol : fallback; }
  bool given(const std::string& name) const {
    const CLI::Option* o = sub_->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  }

  void csv(const std::string& header, const std::vector<std::vector<std::string>>& rows) const {
    if (f_.csv.empty()) return;
    std::ofstream os(f_.csv);
    if (!os) throw UsageError("cannot write " + f_.csv);
    os << header << '\n';
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
  }

 private:
  CLI::App* sub_;
  const Flags& f_;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void require_choice(const std::string& what, const std::string& value, std::initializer_list<const char*> choices) {
  for (const char* c : choices)
    if (value == c) return;
  std::string msg = what + " must be one of:";
  for (const char* c : choices) msg += std::string(" ") + c;
  throw UsageError(msg);
}

void run_sl(const Flags& f, const Session& ses, ReportRecord& rec) {
  require_choice("--check", f.check, {"eigenvalues", "determinant", "trace", "gelfand-levitan", "asymptotics"});
  if (f.potential.empty()) throw UsageError("sl needs --potential");
  if (f.nmax < 2) throw UsageError("--nmax must be at least 2");
  const sl::Problem p(Potential::parse(f.potential));
  if (f.check == "eigenvalues") {
    const auto ev = p.eigenvalues(f.nmax);
    double worst = 0.0;
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < ev.values.size(); ++i) {
      worst = std::max(worst, ev.errors[i]);
      rows.push_back({std::to_string(i + 1), num(ev.values[i]), num(ev.residuals[i]), num(ev.errors[i])});
    }
    rec.results["eigenvalues"] = ev.values;
    rec.checks.push_back(make_check("grid_doubling_shift", worst, 0.0, ses.tol(1e-8)));
    ses.csv("index,eigenvalue,residual,doubling_shift", rows);
  } else if (f.check == "determinant") {
    const auto det = p.regularized_determinant(f.nmax);
    rec.results["determinant"] = det.value;
    rec.results["determinant_half_nmax"] = det.half_value;
    rec.checks.push_back(make_check("hadamard_2d0", det.value, 2.0 * p.d(0.0), ses.tol(1e-4)));
  } else if (f.check == "trace") {
    const cplx lambda = parse_complex(f.lambda);
    const auto t = p.trace_resolvent(lambda);
    rec.checks.push_back(make_check("trace_vs_log_derivative", t.diagonal, t.log_derivative, ses.tol(1e-6)));
  } else if (f.check == "gelfand-levitan") {
    const auto g = p.gelfand_levitan_check(f.nmax);
    rec.results["partial_sum"] = g.partial_sum;
    rec.results["tail"] = g.tail;
    rec.checks.push_back(make_check("gelfand_levitan", g.lhs, g.rhs, ses.tol(1e-3)));
  } else {
    const auto fit = p.d_asymptotic_fit(20.0, 40.0);
    rec.results["coeff2"] = fit.coeff2;
    rec.results["expected2"] = fit.expected2;
    rec.checks.push_back(make_check("inverse_k_coefficient", fit.coeff1, fit.expected1, ses.tol(0.02 * std::fabs(fit.expected1))));
  }
}

void run_schrod(const Flags& f, const Session& ses, ReportRecord& rec) {
  require_choice("--check", f.check, {"coefficients", "bound-states", "trace", "zf"});
  if (f.potential.empty()) throw UsageError("schrod needs --potential");
  const schrod::Scatterer s(Potential::parse(f.potential));
  if (f.check == "coefficients") {
    const cplx k = parse_complex(f.k);
    if (k.imag() != 0.0) throw UsageError("--check coefficients needs a real --k");
    const auto c = s.coefficients(k.real());
    rec.results["a"] = complex_json(c.a);
    rec.results["b"] = complex_json(c.b);
    rec.checks.push_back(make_check("unitarity", std::norm(c.a) - std::norm(c.b), 1.0, ses.tol(1e-7)));
  } else if (f.check == "bound-states") {
    // kappa^2 cannot exceed the depth of the well
    double depth = 0.0;
    for (double x = -s.cutoff(); x <= s.cutoff(); x += 0.01) depth = std::max(depth, -s.potential()(x));
    const auto kappas = s.bound_states(std::sqrt(depth) + 0.1);
    rec.results["kappas"] = kappas;
    for (size_t i = 0; i < kappas.size(); ++i)
      rec.checks.push_back(make_check("a_vanishes_" + std::to_string(i), s.a(cplx(0.0, kappas[i])), 0.0, ses.tol(1e-6)));
  } else if (f.check == "trace") {
    const auto t = s.trace_difference(parse_complex(f.lambda));
    rec.checks.push_back(make_check("trace_vs_log_derivative_a", t.lhs, t.rhs, ses.tol(1e-5)));
  } else {
    if (f.order < 0) throw UsageError("--order must be non-negative");
    const auto z = s.zf_identity(f.order);
    rec.results["k_tail"] = z.tail;
    rec.checks.push_back(make_check("zakharov_faddeev_order_" + std::to_string(f.order), z.lhs, z.rhs, ses.tol(1e-4)));
  }
}

std::vector<qdiff::ExpTerm> curve_terms(const std::string& text, double b, double& weyl) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--curve is zeta:<value> or mn:<m>,<n>");
  const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
  if (kind == "zeta") {
    double zeta = 0.0;
    try {
      zeta = std::stod(arg);
    } catch (const std::exception&) {
      throw UsageError("bad zeta in --curve");
    }
    weyl = qdiff::weyl_constant_h_zeta(b);
    return qdiff::mirror_h_zeta(zeta);
  }
  if (kind == "mn") {
    const auto mn = parse_longs(arg);
    if (mn.size() != 2) throw UsageError("--curve mn:<m>,<n>");
    weyl = qdiff::weyl_constant_h_mn(b, int(mn[0]), int(mn[1]));
    return qdiff::mirror_h_mn(int(mn[0]), int(mn[1]));
  }
  throw UsageError("--curve kind must be zeta or mn");
}

void run_qdiff(const Flags& f, const Session& ses, ReportRecord& rec) {
  require_choice("--check", f.check, {"dilog", "modulus", "free-kernel", "scattering", "mirror"});
  if (!(f.b > 0.0)) throw UsageError("--b must be positive");
  const double b = f.b;
  if (f.check == "dilog") {
    const qdiff::Dilog D(b);
    std::mt19937 gen(f.seed);
    std::uniform_real_distribution<double> xr(-2.0, 2.0), fr(0.25, 0.75);
    double worst[2] = {0.0, 0.0};
    double dual = 0.0;
    const qdiff::Dilog Dd(1.0 / b);
    for (int j = 0; j < 20; ++j) {
      const double x = xr(gen), frac = fr(gen);
      for (int which = 0; which < 2; ++which) {
        const double h = which == 0 ? b : 1.0 / b;
        const cplx z(x, -D.c_b() + (2.0 * D.c_b() - h) * frac);
        const cplx ratio = std::exp(D.integral(z + kI * h) - D.integral(z));
        const cplx rhs = 1.0 + std::exp(-kI * kPi * h * h - 2.0 * kPi * h * z);
        worst[which] = std::max(worst[which], std::abs(ratio / rhs - 1.0));
      }
      const cplx w(x, 0.9 * D.c_b() * (2.0 * frac - 1.0));
      dual = std::max(dual, std::abs(std::exp(D.integral(w) - Dd.integral(w)) - 1.0));
    }
    rec.checks.push_back(make_check("shift_b_relative", worst[0], 0.0, ses.tol(1e-8)));
    rec.checks.push_back(make_check("shift_inverse_b_relative", worst[1], 0.0, ses.tol(1e-8)));
    rec.checks.push_back(make_check("self_duality", dual, 0.0, ses.tol(1e-9)));
  } else if (f.check == "modulus") {
    const cplx k = parse_complex(f.k);
    if (k.imag() != 0.0 || k.real() <= 0.0) throw UsageError("--check modulus needs a real positive --k");
    const qdiff::Dilog D(b);
    const cplx m = qdiff::m_coefficient(D, k.real());
    rec.results["m"] = complex_json(m);
    const double lhs = 1.0 / std::norm(m) / (4.0 * std::sinh(2.0 * kPi * b * k.real()) * std::sinh(2.0 * kPi * k.real() / b));
    rec.checks.push_back(make_check("modulus_identity", lhs, 1.0, ses.tol(1e-7)));
  } else if (f.check == "free-kernel") {
    const cplx k = parse_complex(f.k);
    const cplx lambda = qdiff::lambda_of_k(b, k);
    for (double p : {0.0, 0.3, 0.8}) {
      const cplx want = 1.0 / (2.0 * std::cosh(2.0 * kPi * b * p) - lambda);
      std::ostringstream name;
      name << "fourier_p_" << p;
      rec.checks.push_back(make_check(name.str(), qdiff::free_kernel_fourier(b, k, p), want, ses.tol(1e-7)));
    }
  } else if (f.check == "scattering") {
    const qdiff::Scattering S(b, parse_complex(f.k));
    rec.results["m"] = complex_json(S.m());
    for (double x : {-3.0, -1.0, 0.5}) {
      std::ostringstream name;
      name << "relation_x_" << x;
      rec.checks.push_back(make_check(name.str(), S.phi(x), S.m() * S.f_plus(x) + S.m_minus() * S.f_minus(x), ses.tol(1e-5)));
    }
    rec.checks.push_back(make_check("casorati", S.casorati_f_minus_phi(-1.0), 2.0 * std::sinh(2.0 * kPi * b * S.k()) * S.m(), ses.tol(1e-5)));
  } else {
    const int n = ses.given("--nmax") ? f.nmax : 160;
    if (n < 8) throw UsageError("--nmax (basis size) must be at least 8");
    double weyl = 0.0;
    const auto terms = curve_terms(f.curve, b, weyl);
    const auto sp = qdiff::mirror_spectrum(b, terms, n, weyl);
    rec.results["resolved"] = sp.resolved;
    rec.results["eigenvalues"] = std::vector<double>(sp.values.begin(), sp.values.begin() + sp.resolved);
    rec.results["positive"] = sp.positive;
    const int low = std::min(5, sp.resolved);
    if (low == 0) throw ConvergenceError("mirror: no eigenvalue stable under basis doubling", 0.0);
    for (int j = 0; j < low; ++j)
      rec.checks.push_back(make_check("doubling_" + std::to_string(j), sp.values[j], sp.reference[j], ses.tol(1e-4)));
    rec.checks.push_back(make_check("weyl_slope", sp.weyl_fit, sp.weyl_expected, 0.2 * sp.weyl_expected));
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j < n; ++j)
      rows.push_back({std::to_string(j), num(sp.values[j]), std::to_string(n), num(sp.agreement_digits[j])});
    ses.csv("index,eigenvalue,N,agreement_digits", rows);
  }
}

void run_auto(const Flags& f, const Session& ses, ReportRecord& rec) {
  require_choice("--task", f.task, {"forms", "eisenstein", "dedekind", "deuring", "resolvent", "linnik"});
  const cplx s = parse_complex(f.s);
  if (f.task == "forms") {
    const auto set = autom::reduced_forms(f.d);
    rec.results["h"] = set.h;
    rec.results["w"] = set.w;
    std::vector<std::vector<std::string>> rows;
    json forms = json::array();
    int outside = 0;
    for (size_t i = 0; i < set.forms.size(); ++i) {
      const auto& q = set.forms[i];
      forms.push_back({q.a, q.b, q.c});
      if (!autom::in_fundamental_domain(set.points[i], 1e-14)) ++outside;
      rows.push_back({std::to_string(f.d), std::to_string(q.a), std::to_string(q.b), std::to_string(q.c),
                      num(set.points[i].real()), num(set.points[i].imag())});
    }
    rec.results["forms"] = forms;
    rec.checks.push_back(make_check("points_outside_domain", double(outside), 0.0, 0.0));
    ses.csv("d,a,b,c,x,y", rows);
  } else if (f.task == "eisenstein") {
    const cplx z = parse_complex(f.z);
    const auto fo = autom::eisenstein_fourier(z, s);
    const auto la = autom::eisenstein_lattice(z, s);
    rec.results["fourier_terms"] = fo.terms;
    rec.checks.push_back(make_check("fourier_vs_lattice", fo.value, la.value, ses.tol(1e-7)));
    auto row = [&](const char* route, const autom::EisensteinValue& v) {
      return std::vector<std::string>{num(z.real()), num(z.imag()), num(s.real()), num(s.imag()), route,
                                      num(v.value.real()), num(v.value.imag()), num(v.tail_bound)};
    };
    ses.csv("x,y,s_re,s_im,route,value_re,value_im,tail_bound", {row("fourier", fo), row("lattice", la)});
  } else if (f.task == "dedekind") {
    const auto z = autom::dedekind_zeta(f.d, s);
    rec.results["h"] = z.h;
    rec.results["w"] = z.w;
    rec.checks.push_back(make_check("hecke_vs_factorization", z.via_heegner, z.via_factorization, ses.tol(1e-7)));
  } else if (f.task == "deuring") {
    const auto c = autom::deuring_limit_check(f.d, s);
    rec.results["height"] = c.height;
    // the dropped modes are of size e^{-2 pi height}
    const double bound = std::max(1e-12, 10.0 * std::exp(-2.0 * kPi * c.height) * std::abs(c.zeta_k));
    rec.checks.push_back(make_check("one_class_two_term", c.zeta_k, c.two_term, ses.tol(bound)));
  } else if (f.task == "resolvent") {
    const cplx z = parse_complex(f.z), zp = parse_complex(f.zp);
    const auto a = autom::automorphic_resolvent_series(z, zp, s, f.umax);
    const auto b = autom::automorphic_resolvent_series(z, zp, s, 2.0 * f.umax);
    rec.results["value"] = complex_json(b.value);
    rec.results["tail"] = complex_json(b.tail);
    rec.results["terms"] = b.terms;
    rec.checks.push_back(make_check("budget_doubling", a.value, b.value, ses.tol(1e-4)));
  } else {
    const autom::Box omega{-0.5, 0.5, 1.0, 2.0};
    std::vector<autom::LinnikStatistic> stats;
    if (ses.given("--targets") || !ses.given("--d"))
      stats = autom::linnik_ladder(parse_longs(f.targets), omega);
    else
      stats.push_back(autom::linnik_statistic(f.d, omega));
    json table = json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& st : stats) {
      table.push_back({{"d", st.d}, {"h", st.h}, {"count", st.count}, {"mu", st.mu}, {"discrepancy", st.discrepancy}});
      rows.push_back({std::to_string(st.d), std::to_string(st.h), std::to_string(st.count), num(st.mu), num(st.discrepancy)});
    }
    rec.results["ladder"] = table;
    if (stats.size() >= 2) {
      // positive part of (last - first); zero when the discrepancy went down
      const double excess = std::max(0.0, stats.back().discrepancy - stats.front().discrepancy);
      rec.checks.push_back(make_check("discrepancy_trend_excess", excess, 0.0, 0.0));
    }
    ses.csv("d,h,count,mu,discrepancy", rows);
  }
}

// --config file entries become flags placed right after the subcommand, so the command line wins
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + long(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config " + path);
  json cfg;
  try {
    cfg = json::parse(is);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  size_t at = 1;
  while (at < args.size() && !args[at].empty() && args[at][0] == '-') ++at;
  if (at == args.size()) {
    if (!cfg.contains("subcommand")) throw UsageError("no subcommand on the command line or in the config");
    args.push_back(cfg["subcommand"].get<std::string>());
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "subcommand") continue;
    std::string flag = key;
    while (!flag.empty() && flag[0] == '-') flag.erase(0, 1);
    injected.push_back("--" + flag);
    if (value.is_string()) {
      injected.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      injected.push_back(joined);
    } else {
      injected.push_back(value.dump());
    }
  }
  args.insert(args.begin() + long(at) + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

Check make_check(std::string name, cplx lhs, cplx rhs, double tol) {
  Check c{std::move(name), lhs, rhs, std::abs(lhs - rhs), tol, false};
  c.pass = c.abs_err <= c.tol;
  return c;
}

bool ReportRecord::all_pass() const {
  if (!error.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

json to_json(const ReportRecord& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"lhs", complex_json(c.lhs)}, {"rhs", complex_json(c.rhs)}, {"abs_err", c.abs_err},
                      {"tol", c.tol}, {"pass", c.pass}});
  json j = {{"schema_version", r.schema_version}, {"task", r.task}, {"parameters", r.parameters}, {"results", r.results},
            {"checks", checks}, {"runtime_s", r.runtime_s}, {"pass", r.all_pass()}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

ReportRecord report_from_json(const json& j) {
  ReportRecord r;
  r.schema_version = j.at("schema_version").get<std::string>();
  if (r.schema_version != kSchemaVersion) throw std::invalid_argument("unknown report schema " + r.schema_version);
  r.task = j.at("task").get<std::string>();
  r.parameters = j.at("parameters");
  r.results = j.at("results");
  r.runtime_s = j.at("runtime_s").get<double>();
  if (j.contains("error")) r.error = j["error"].get<std::string>();
  for (const auto& c : j.at("checks")) {
    Check k{c.at("name").get<std::string>(), complex_from_json(c.at("lhs")), complex_from_json(c.at("rhs")),
            c.at("abs_err").get<double>(), c.at("tol").get<double>(), c.at("pass").get<bool>()};
    if (k.pass != (k.abs_err <= k.tol)) throw std::invalid_argument("check " + k.name + ": pass flag disagrees with abs_err <= tol");
    r.checks.push_back(std::move(k));
  }
  return r;
}

std::string serialize(const ReportRecord& r) { return to_json(r).dump(2) + "\n"; }

cplx parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  auto one = [&](const std::string& part) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != part.size()) throw UsageError("expected <re>[,<im>], got '" + text + "'");
    return v;
  };
  if (comma == std::string::npos) return {one(text), 0.0};
  return {one(text.substr(0, comma)), one(text.substr(comma + 1))};
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Spectral and automorphic numerics: checks with machine-readable reports", "trf"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  app.footer("Any flag may also come from --config <file.json>; the command line overrides it.");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--check", f.check, "Which identity to check");
    sub->add_option("--out", f.out, "Write the JSON report here instead of stdout");
    sub->add_option("--csv", f.csv, "Write the table for this check here");
    sub->add_option("--tol", f.tol, "Override the tolerance of every check");
    sub->add_option("--seed", f.seed, "Seed for sampled points");
  };
  CLI::App* sl_cmd = app.add_subcommand("sl", "Sturm-Liouville on [0, pi]");
  common(sl_cmd);
  sl_cmd->add_option("--potential", f.potential, "v(x), e.g. \"x^2\"");
  sl_cmd->add_option("--nmax", f.nmax, "Eigenvalue count / sum cutoff");
  sl_cmd->add_option("--lambda", f.lambda, "Spectral parameter re[,im]");

  CLI::App* sch = app.add_subcommand("schrod", "Schrodinger scattering on the line");
  common(sch);
  sch->add_option("--potential", f.potential, "v(x), e.g. \"-2*sech(x)^2\"");
  sch->add_option("--k", f.k, "Momentum re[,im]");
  sch->add_option("--lambda", f.lambda, "Spectral parameter re[,im]");
  sch->add_option("--order", f.order, "Order of the Zakharov-Faddeev identity");

  CLI::App* qd = app.add_subcommand("qdiff", "Functional-difference operator and quantum dilogarithm");
  common(qd);
  qd->add_option("--b", f.b, "Deformation parameter b > 0");
  qd->add_option("--k", f.k, "Spectral parameter k re[,im]");
  qd->add_option("--nmax", f.nmax, "Galerkin basis size for --check mirror (160 when absent)");
  qd->add_option("--curve", f.curve, "zeta:<value> or mn:<m>,<n>");

  CLI::App* au = app.add_subcommand("auto", "Modular-group Laplacian, Eisenstein series, Heegner points");
  common(au);
  au->add_option("--task", f.task, "forms | eisenstein | dedekind | deuring | resolvent | linnik");
  au->add_option("--d", f.d, "Fundamental discriminant (negative)");
  au->add_option("--s", f.s, "Spectral parameter re[,im]");
  au->add_option("--z", f.z, "Point x,y of the upper half-plane");
  au->add_option("--zp", f.zp, "Second point for the resolvent");
  au->add_option("--umax", f.umax, "Point-pair budget for the resolvent series");
  au->add_option("--targets", f.targets, "Linnik ladder targets, comma-separated");

  std::vector<std::string> args;
  try {
    args = expand_config(raw);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Session ses(sub, f);
  ReportRecord rec;
  rec.task = sub->get_name() + (sub == au ? ":" + f.task : (f.check.empty() ? "" : ":" + f.check));
  for (const CLI::Option* o : sub->get_options())
    if (o->count() > 0 && o->get_name() != "--out" && o->get_name() != "--csv") rec.parameters[o->get_name().substr(2)] = o->as<std::string>();

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (sub == sl_cmd)
      run_sl(f, ses, rec);
    else if (sub == sch)
      run_schrod(f, ses, rec);
    else if (sub == qd)
      run_qdiff(f, ses, rec);
    else
      run_auto(f, ses, rec);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "usage error: potential: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = serialize(rec);
  if (f.out.empty()) {
    out << text;
  } else {
    std::ofstream os(f.out);
    if (!os) {
      err << "usage error: cannot write " << f.out << "\n";
      return kUsage;
    }
    os << text;
  }
  if (!rec.error.empty()) err << "failed: " << rec.error << "\n";
  for (const auto& c : rec.checks)
    if (!c.pass) err << "check " << c.name << " failed: abs_err " << c.abs_err << " > tol " << c.tol << "\n";
  return rec.all_pass() ? kOk : kCheckFailed;
}

}  // namespace trf::cli
