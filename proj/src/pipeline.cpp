#include "bdyn/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "bdyn/critical.hpp"
#include "bdyn/error.hpp"
#include "bdyn/orbit.hpp"

namespace bdyn {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json cplx(std::complex<double> c) { return json::array({num(c.real()), num(c.imag())}); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

bool is_verdict_error(const std::exception& e) {
  return dynamic_cast<const SpectralMismatch*>(&e) || dynamic_cast<const MorseInequalityViolation*>(&e) ||
         dynamic_cast<const SignInconsistency*>(&e) || dynamic_cast<const NotMorse*>(&e) ||
         dynamic_cast<const RegularValueViolation*>(&e) || dynamic_cast<const Degenerate*>(&e) ||
         dynamic_cast<const RankDeficient*>(&e);
}

json location_json(const TubularChart& chart, const Location& w) {
  return {{"patch", to_string(chart.patch(w.patch).kind)}, {"u", num(w.uvz[0])}, {"v", num(w.uvz[1])},
          {"z", num(w.uvz[2])}};
}

json limit_json(const Trajectory& tr, const LimitResult& l) {
  json j{{"verdict", to_string(l.verdict)},
         {"target", l.target},
         {"distance", num(l.distance)},
         {"return_time", num(l.return_time)},
         {"left_neighborhood", tr.left},
         {"t_end", num(tr.stats.t_end)},
         {"accepted_steps", tr.stats.accepted},
         {"rejected_steps", tr.stats.rejected}};
  if (!tr.error.empty()) j["error"] = tr.error;
  return j;
}

class Run {
 public:
  Run(const Scenario& s, Command cmd) : s_(s), cmd_(cmd), out_(s.output) {}

  RunResult execute();

 private:
  // Records a pass/fail verdict.
  void check(const std::string& name, bool passed, double value, double threshold, const std::string& detail = {}) {
    json c{{"name", name}, {"passed", passed}, {"value", num(value)}, {"threshold", num(threshold)}};
    if (!detail.empty()) c["detail"] = detail;
    checks_.push_back(c);
    if (!passed) failed_ = true;
  }

  template <class F>
  void stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    timing_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  void validate();
  void critical();
  void trace();
  void census();
  void beltrami_checks();
  void beltrami_stability();
  void mcgehee();

  bool wants(Command c) const { return cmd_ == c || cmd_ == Command::All; }
  bool through(Command last) const;

  const Scenario& s_;
  Command cmd_;
  fs::path out_;
  json report_;
  json checks_ = json::array();
  json timing_ = json::object();
  bool failed_ = false;

  std::vector<BComponent> comps_;
  std::optional<BeltramiData> beltrami_;
  bool contact_ok_ = true;
  std::vector<CriticalSearch> searches_;
  std::vector<std::vector<CriticalPoint>> cps_;
  std::vector<std::vector<StabilityReport>> stab_;
  CensusBound bound_;
  std::vector<std::vector<EscapeOrbit>> orbits_;
};

bool Run::through(Command last) const {
  // Stage order validate < critical < trace < census; `all` and `beltrami` run
  // every stage the scenario kind supports.
  auto rank = [](Command c) {
    switch (c) {
      case Command::Validate: return 0;
      case Command::Critical: return 1;
      case Command::Trace: return 2;
      case Command::Census: return 3;
      default: return 3;
    }
  };
  if (cmd_ == Command::Beltrami) return rank(last) <= 1;
  return rank(last) <= rank(cmd_);
}

void Run::validate() {
  json out = json::array();
  const ValidationGrid g{s_.grid.nu, s_.grid.nv, s_.grid.nz};
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    const BComponent& c = comps_[k];
    auto add = [&](const ValidationReport& r) {
      out.push_back({{"component", k},
                     {"check", r.check},
                     {"passed", r.passed},
                     {"value", num(r.value)},
                     {"threshold", num(r.threshold)},
                     {"where", location_json(c.chart, r.where)},
                     {"samples", r.samples},
                     {"detail", r.detail}});
      check(r.check + "[" + std::to_string(k) + "]", r.passed, r.value, r.threshold);
    };
    const ValidationReport contact = contact_check(c, g, s_.tol.contact);
    add(contact);
    if (!contact.passed) {
      contact_ok_ = false;
      continue;
    }
    add(reeb_residuals(c, g, s_.tol.reeb));
    add(verify_hamiltonian_identity(c, g, s_.tol.identity));
    add(chart_consistency(c, g, s_.tol.chart));
    add(periodicity_check(c, 16, s_.tol.chart));
    try {
      const ZSymplecticData z = symplectic_on_Z(c, g.nu, g.nv);
      check("symplectic-nondegenerate[" + std::to_string(k) + "]", true, z.min_abs_w, 1e-8);
    } catch (const Degenerate& e) {
      check("symplectic-nondegenerate[" + std::to_string(k) + "]", false, 0.0, 1e-8, e.what());
      contact_ok_ = false;
    }
  }
  report_["validation"] = out;
}

void Run::critical() {
  std::vector<std::string> warnings;
  int scan = s_.scan;
  for (int attempt = 0;; ++attempt) {
    searches_.clear();
    for (std::size_t k = 0; k < comps_.size(); ++k) {
      CriticalOptions opt;
      opt.scan_nu = opt.scan_nv = scan;
      searches_.push_back(find_critical_points(comps_[k].chart, exceptional_hamiltonian(comps_[k]), opt,
                                               static_cast<int>(k)));
    }
    std::vector<ComponentPoints> cp;
    for (std::size_t k = 0; k < comps_.size(); ++k) cp.push_back({&comps_[k].chart, &searches_[k].points});
    try {
      bound_ = census_bound(cp);
      break;
    } catch (const MorseInequalityViolation& e) {
      // A missed critical point is the usual cause; rescan finer.
      if (attempt == 2) throw;
      warnings.push_back(std::string("Morse inequality failed at scan ") + std::to_string(scan) + ": " + e.what() +
                         "; rescanning");
      scan *= 2;
    }
  }

  cps_.clear();
  stab_.clear();
  json points = json::array();
  double worst_spectral = 0.0;
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    for (const std::string& w : searches_[k].warnings) warnings.push_back("component " + std::to_string(k) + ": " + w);
    cps_.push_back(searches_[k].points);
    const BReebField reeb(comps_[k]);
    std::vector<StabilityReport> reports;
    for (const CriticalPoint& p : cps_[k]) {
      const StabilityReport r = stability_at(p, reeb, s_.tol.spectral);
      worst_spectral = std::max(worst_spectral, r.max_relative_error);
      json spectrum = json::array();
      for (const auto& ev : r.spectrum) spectrum.push_back(cplx(ev));
      points.push_back({{"component", k},
                        {"patch", to_string(comps_[k].chart.patch(p.patch).kind)},
                        {"u", p.uv[0]},
                        {"v", p.uv[1]},
                        {"point", {p.point[0], p.point[1], p.point[2]}},
                        {"H", p.H},
                        {"f", p.f},
                        {"index", p.index},
                        {"hessian", {p.hess[0], p.hess[1], p.hess[2]}},
                        {"det_hess", p.det_hess()},
                        {"grad_norm", p.grad_norm},
                        {"stability",
                         {{"type", to_string(r.type)},
                          {"manifold_dim", r.manifold_dim},
                          {"transverse_unstable", r.transverse_unstable},
                          {"lambda_plus", cplx(r.lambda_plus)},
                          {"lambda_minus", cplx(r.lambda_minus)},
                          {"lambda_z", r.lambda_z},
                          {"closed_lambda_plus", cplx(r.closed_lambda_plus)},
                          {"closed_lambda_z", r.closed_lambda_z},
                          {"spectrum", spectrum},
                          {"max_relative_error", r.max_relative_error},
                          {"g", r.g},
                          {"w", r.w}}}});
      reports.push_back(r);
    }
    stab_.push_back(std::move(reports));
  }
  report_["critical_points"] = points;
  report_["warnings"] = warnings;
  check("spectral-closed-forms", worst_spectral <= s_.tol.spectral, worst_spectral, s_.tol.spectral);

  json comps = json::array();
  bool morse = true, euler = true;
  for (const ComponentCensus& c : bound_.components) {
    for (int i = 0; i < 3; ++i) morse = morse && c.counts[static_cast<std::size_t>(i)] >= c.betti[static_cast<std::size_t>(i)];
    euler = euler && c.euler_consistent;
    comps.push_back({{"surface", to_string(c.surface)},
                     {"betti", c.betti},
                     {"counts", c.counts},
                     {"euler_characteristic", c.euler_characteristic},
                     {"euler_consistent", c.euler_consistent}});
  }
  report_["census_bound"] = {{"N", bound_.N},
                             {"components", comps},
                             {"counts", bound_.counts},
                             {"verdict", bound_.verdict()},
                             {"lower_bound", bound_.lower_bound},
                             {"expected_weighted", bound_.expected_weighted}};
  check("morse-inequalities", morse, 0.0, 0.0, "C_k >= b_k on every component");
  check("euler-characteristic", euler, 0.0, 0.0, "C_0 - C_1 + C_2 = chi(Z) on every component");
}

void Run::trace() {
  fs::create_directories(out_ / "orbits");
  TraceOptions opt;
  opt.orbit.rtol = s_.tol.rtol;
  opt.orbit.atol = s_.tol.atol;
  opt.orbit.t_max = s_.t_max;
  opt.orbit.limit_tol = s_.tol.limit;
  opt.fan_seeds = s_.fan_seeds;
  opt.offset = s_.offset;

  orbits_.assign(comps_.size(), {});
  json list = json::array();
  double worst_limit = 0.0, worst_shift = 0.0;
  bool robust = true;
  int id = 0;
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    const RegularizedField field(comps_[k]);
    for (std::size_t i = 0; i < cps_[k].size(); ++i) {
      auto orbits = trace_invariant_manifolds(field, cps_[k], static_cast<int>(i), stab_[k][i], opt);
      for (EscapeOrbit& o : orbits) {
        check_robustness(field, cps_[k], o, opt.orbit, s_.tol.limit);
        orbits_[k].push_back(std::move(o));
      }
    }
    mark_distinct(comps_[k].chart, orbits_[k], 1e-6);
    for (const EscapeOrbit& o : orbits_[k]) {
      char name[32];
      std::snprintf(name, sizeof name, "orbit_%03d.csv", id);
      write_orbit_csv((out_ / "orbits" / name).string(), comps_[k].chart, o);
      for (const LimitResult* l : {&o.forward_limit, &o.backward_limit})
        if (l->verdict == Verdict::LimitsTo) worst_limit = std::max(worst_limit, l->distance);
      robust = robust && o.robust;
      worst_shift = std::max(worst_shift, o.robust_shift);
      list.push_back({{"id", id},
                      {"component", k},
                      {"source", o.source},
                      {"source_index", cps_[k][static_cast<std::size_t>(o.source)].index},
                      {"seed_index", o.seed_index},
                      {"side", o.sigma},
                      {"patch", to_string(comps_[k].chart.patch(o.patch).kind)},
                      {"seed", {o.seed[0], o.seed[1], o.seed[2]}},
                      {"forward", limit_json(o.forward, o.forward_limit)},
                      {"backward", limit_json(o.backward, o.backward_limit)},
                      {"kind", to_string(o.kind)},
                      {"multiplicity", o.multiplicity},
                      {"distinct", o.distinct},
                      {"robust", o.robust},
                      {"robust_shift", num(o.robust_shift)},
                      {"csv", std::string("orbits/") + name}});
      ++id;
    }
  }
  report_["orbits"] = list;
  check("limit-distance", worst_limit < s_.tol.limit, worst_limit, s_.tol.limit,
        "every limits-to verdict ends this close to its critical point");
  check("limit-robustness", robust, worst_shift, s_.tol.limit, "limit point shift under 10x tighter tolerances");
}

void Run::census() {
  const EscapeCensus c = escape_census(orbits_, cps_, bound_);
  report_["census"] = {{"orbits", c.orbits},
                       {"escape", c.escape},
                       {"distinct", c.distinct},
                       {"one_way", c.one_way},
                       {"singular_periodic", c.singular_periodic},
                       {"weighted", c.weighted},
                       {"witnesses", c.witnesses},
                       {"fan_orbits", c.fan_orbits},
                       {"bound", c.infinite ? std::string("infinite") : "at-least-" + std::to_string(c.lower_bound)},
                       {"expected-weighted", c.expected_weighted},
                       {"agree", c.agree}};
  check("census-agree", c.agree, c.infinite ? c.witnesses : c.weighted,
        c.infinite ? c.fan_orbits : c.expected_weighted,
        c.infinite ? "fan orbits limiting to their saddle" : "weighted escape-orbit count vs 4N");

  std::ofstream csv(out_ / "census.csv");
  if (!csv) throw Error("cannot write " + (out_ / "census.csv").string());
  csv << "id,component,source,source_index,seed_index,side,seed_u,seed_v,seed_z,forward,forward_target,"
         "forward_distance,backward,backward_target,backward_distance,kind,multiplicity,distinct,robust,robust_shift\n";
  int id = 0;
  for (std::size_t k = 0; k < orbits_.size(); ++k)
    for (const EscapeOrbit& o : orbits_[k]) {
      csv << id++ << ',' << k << ',' << o.source << ',' << cps_[k][static_cast<std::size_t>(o.source)].index << ','
          << o.seed_index << ',' << o.sigma << ',' << fmt(o.seed[0]) << ',' << fmt(o.seed[1]) << ',' << fmt(o.seed[2])
          << ',' << to_string(o.forward_limit.verdict) << ',' << o.forward_limit.target << ','
          << fmt(o.forward_limit.distance) << ',' << to_string(o.backward_limit.verdict) << ','
          << o.backward_limit.target << ',' << fmt(o.backward_limit.distance) << ',' << to_string(o.kind) << ','
          << o.multiplicity << ',' << (o.distinct ? 1 : 0) << ',' << (o.robust ? 1 : 0) << ',' << fmt(o.robust_shift)
          << '\n';
    }
  if (!csv) throw Error("write failed for census.csv");
}

void Run::beltrami_checks() {
  const BeltramiData& d = *beltrami_;
  const int nu = s_.grid.nu, nv = s_.grid.nv;
  json b;
  const ValidationReport metric = metric_check(d, nu, nv);
  check("metric-positive", metric.passed, metric.value, 0.0);
  if (!metric.passed) throw Degenerate("metric h is not positive definite on the grid");

  const IdentityReport id = hamiltonian_identity_check(d, nu, nv, s_.tol.beltrami_identity);
  check("beltrami-hamiltonian-identity", id.report.passed, id.report.value, s_.tol.beltrami_identity);
  b["identity"] = {{"residual", id.report.value}, {"sigma0", id.sigma0}, {"samples", id.report.samples}};

  const LaplaceResult lap = laplace_eigen_check(d, nu, nv, s_.tol.laplace);
  check("laplace-eigenfunction", lap.eigenfunction, lap.spread, s_.tol.laplace);
  b["laplace"] = {{"eigenfunction", lap.eigenfunction},
                  {"ratio", lap.ratio},
                  {"spread", lap.spread},
                  {"samples", lap.samples},
                  {"minus_lambda_squared", -d.lambda * d.lambda}};

  const ValidationReport div = divergence_check(d, nu, nv, s_.tol.divergence);
  check("beltrami-divergence", div.passed, div.value, s_.tol.divergence);
  b["divergence"] = div.value;

  const BContactForm& alpha = comps_.front().forms.front();
  const ValidationReport rt = beltrami_roundtrip(d, alpha, nu, nv, s_.tol.roundtrip);
  check("beltrami-roundtrip", rt.passed, rt.value, s_.tol.roundtrip);
  b["roundtrip"] = rt.value;

  // w = lambda sqrt(det h) g(X, X) is derived for flat h with Delta F = -lambda^2 F.
  const bool flat = d.h.h11.is_constant() && d.h.h12.is_constant() && d.h.h22.is_constant();
  const ValidationReport sr = symplectic_rescaling_check(d, alpha, nu, nv, s_.tol.rescaling);
  b["symplectic_rescaling"] = {{"residual", num(sr.value)}, {"applies", flat}, {"detail", sr.detail}};
  if (flat && lap.eigenfunction && std::abs(lap.ratio + d.lambda * d.lambda) < 1e-6 * d.lambda * d.lambda)
    check("beltrami-symplectic-rescaling", sr.passed, sr.value, s_.tol.rescaling);

  const ValidationReport contact = contact_check(comps_.front(), {nu, nv, s_.grid.nz, 0.1}, s_.tol.contact);
  b["alpha_contact"] = {{"passed", contact.passed}, {"min_volume", contact.value}};
  if (!contact.passed) contact_ok_ = false;
  report_["beltrami"] = b;
}

void Run::beltrami_stability() {
  const BeltramiData& d = *beltrami_;
  json list = json::array();
  double worst = 0.0, worst_zero = 0.0;
  for (const CriticalPoint& p : cps_.front()) {
    const BeltramiStability st = beltrami_stability_matrix(d, p.uv, s_.tol.beltrami_spectral);
    const Vec2 X = tangential_components(d, p.uv);
    worst = std::max(worst, st.max_relative_error);
    worst_zero = std::max(worst_zero, std::hypot(X[0], X[1]));
    json spectrum = json::array();
    for (const auto& ev : st.spectrum) spectrum.push_back(cplx(ev));
    list.push_back({{"u", p.uv[0]},
                    {"v", p.uv[1]},
                    {"F", -p.f},
                    {"type", to_string(st.type)},
                    {"lambda_plus", cplx(st.lambda_plus)},
                    {"lambda_z", st.lambda_z},
                    {"spectrum", spectrum},
                    {"max_relative_error", st.max_relative_error}});
  }
  report_["beltrami"]["stability"] = list;
  check("beltrami-spectral-closed-forms", worst <= s_.tol.beltrami_spectral, worst, s_.tol.beltrami_spectral);
  check("beltrami-zeros-at-critical-points", worst_zero < 1e-8, worst_zero, 1e-8);
}

void Run::mcgehee() {
  const McGeheeSpec& m = *s_.mcgehee;
  const McGeheeParams p{m.mu};
  p.validate();
  McGeheeOptions opt;
  opt.rtol = s_.tol.mc_rtol;
  opt.atol = s_.tol.mc_atol;
  opt.dt_out = m.dt_out;
  fs::create_directories(out_ / "orbits");
  json list = json::array(), comparison = json::array();
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    const McState& y0 = m.states[k];
    const std::string tag = "[" + std::to_string(k) + "]";
    const McTrajectory tr = integrate_mcgehee(y0, p, m.t_end, opt);
    char name[40];
    std::snprintf(name, sizeof name, "mcgehee_%03zu.csv", k);
    write_mcgehee_csv((out_ / "orbits" / name).string(), tr);
    check("energy-drift" + tag, tr.energy_drift < s_.tol.energy, tr.energy_drift, s_.tol.energy);
    json j{{"state", {{"x", y0[0]}, {"a", y0[1]}, {"Pr", y0[2]}, {"Pa", y0[3]}}},
           {"H0", tr.samples.front().H},
           {"energy_drift", tr.energy_drift},
           {"max_abs_x", tr.max_abs_x},
           {"accepted_steps", tr.stats.accepted},
           {"csv", std::string("orbits/") + name}};
    if (y0[0] == 0.0) {
      const PeriodicityResult per = infinity_periodicity(y0, p, s_.tol.periodicity, opt);
      check("infinity-periodicity" + tag, per.passed, per.max_deviation, s_.tol.periodicity);
      check("infinity-invariance" + tag, tr.max_abs_x == 0.0 && per.max_abs_x == 0.0, tr.max_abs_x, 0.0);
      j["periodicity"] = {{"period", per.period}, {"deviation", per.max_deviation}, {"passed", per.passed}};
    } else {
      const OracleComparison oc = newtonian_oracle_compare(y0, p, m.oracle_t_end, opt);
      check("newtonian-oracle" + tag, oc.max_deviation < s_.tol.oracle, oc.max_deviation, s_.tol.oracle);
      const double rev = time_reversal_error(y0, p, m.reversal_t_end, opt);
      check("time-reversal" + tag, rev < s_.tol.reversal, rev, s_.tol.reversal);
      json c{{"state", k},
             {"t_end", m.oracle_t_end},
             {"max_deviation", oc.max_deviation},
             {"at_time", oc.at_time},
             {"max_r_deviation", oc.max_r_deviation},
             {"samples", oc.samples}};
      comparison.push_back(c);
      j["oracle"] = c;
      j["time_reversal"] = rev;
    }
    list.push_back(j);
  }
  report_["mcgehee"] = {{"mu", m.mu}, {"orbits", list}};
  std::ofstream cmp(out_ / "mcgehee_comparison.json");
  if (!cmp) throw Error("cannot write mcgehee_comparison.json");
  cmp << json{{"mu", m.mu}, {"comparisons", comparison}}.dump(2) << '\n';
}

RunResult Run::execute() {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  report_["scenario"] = to_json(s_);
  report_["command"] = to_string(cmd_);
  std::string error;
  bool operational = false;
  try {
    fs::create_directories(out_);
    if (s_.kind == ScenarioKind::McGehee) {
      if (cmd_ != Command::McGehee && cmd_ != Command::All)
        throw PreconditionError("command '" + to_string(cmd_) + "' needs a bcontact or beltrami scenario");
      stage("mcgehee", [&] { mcgehee(); });
    } else {
      if (cmd_ == Command::McGehee) throw PreconditionError("command 'mcgehee' needs a mcgehee scenario");
      const bool beltrami = s_.kind == ScenarioKind::Beltrami;
      if (cmd_ == Command::Beltrami && !beltrami)
        throw PreconditionError("command 'beltrami' needs a beltrami scenario");
      if (beltrami) {
        const BeltramiSpec& bs = *s_.beltrami;
        beltrami_ = build_beltrami(bs);
        std::optional<BeltramiExtension> ext;
        if (bs.extension) {
          const std::vector<std::string> vars{"u", "v", "z"};
          ext = BeltramiExtension{Expression::parse((*bs.extension)[0], vars), Expression::parse((*bs.extension)[1], vars),
                                  Expression::parse((*bs.extension)[2], vars)};
        }
        comps_.push_back(BComponent{TubularChart::torus(s_.epsilon),
                                    {contact_from_beltrami(*beltrami_, {"u", "v", "z"}, ext)}});
        if (wants(Command::Beltrami)) stage("beltrami", [&] { beltrami_checks(); });
      } else {
        for (const ComponentSpec& c : s_.components) comps_.push_back(build_component(c, s_.epsilon));
      }
      if (contact_ok_) stage("validate", [&] { validate(); });
      if (!contact_ok_) throw Degenerate("alpha is not a b-contact form on the validation grid");
      if (through(Command::Critical)) {
        stage("critical", [&] { critical(); });
        if (beltrami && wants(Command::Beltrami)) stage("beltrami-stability", [&] { beltrami_stability(); });
      }
      if (through(Command::Trace)) stage("trace", [&] { trace(); });
      if (through(Command::Census)) stage("census", [&] { census(); });
    }
  } catch (const std::exception& e) {
    error = e.what();
    operational = !is_verdict_error(e);
  }

  report_["checks"] = checks_;
  if (!error.empty()) {
    report_["verdict"] = operational ? "error" : "fail";
    report_["error"] = error;
    res.exit_code = operational ? kExitOperational : kExitVerdict;
  } else {
    report_["verdict"] = failed_ ? "fail" : "pass";
    res.exit_code = failed_ ? kExitVerdict : kExitPass;
  }
  timing_["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report_["timing"] = {{"seconds", timing_}};

  try {
    std::ofstream f(out_ / "report.json");
    if (!f) throw Error("cannot write report.json");
    f << report_.dump(2) << '\n';
    if (!f) throw Error("write failed for report.json");
  } catch (const std::exception& e) {
    report_["verdict"] = "error";
    report_["error"] = e.what();
    res.exit_code = kExitOperational;
  }
  res.report = report_;
  return res;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Validate: return "validate";
    case Command::Critical: return "critical";
    case Command::Trace: return "trace";
    case Command::Census: return "census";
    case Command::Beltrami: return "beltrami";
    case Command::McGehee: return "mcgehee";
    case Command::All: return "all";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::Validate, Command::Critical, Command::Trace, Command::Census, Command::Beltrami,
                    Command::McGehee, Command::All})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

RunResult run(const Scenario& scenario, Command command) { return Run(scenario, command).execute(); }

}  // namespace bdyn
