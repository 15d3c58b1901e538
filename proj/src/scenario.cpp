#include "bdyn/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bdyn/error.hpp"

namespace bdyn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kTorusVars{"u", "v", "z"};
const std::vector<std::string> kAngularVars{"theta", "phi", "z"};
const std::vector<std::string> kPoleVars{"u", "v", "z"};
const std::vector<std::string> kSurfaceVars{"u", "v"};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads an object and rejects every key that was not consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ScenarioError("'" + (path_.empty() ? std::string("scenario") : path_) + "' must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string where(const std::string& key) const { return join(path_, key); }

  const json* get(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback, bool positive = true) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ScenarioError("'" + where(key) + "' must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x) || (positive && !(x > 0.0))) throw ScenarioError("'" + where(key) + "' must be positive");
    return x;
  }

  int integer(const std::string& key, int fallback, int minimum) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer() || v->get<long long>() < minimum || v->get<long long>() > 1'000'000)
      throw ScenarioError("'" + where(key) + "' must be an integer >= " + std::to_string(minimum));
    return v->get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback, bool required = false) {
    const json* v = get(key);
    if (!v) {
      if (required) throw ScenarioError("missing key '" + where(key) + "'");
      return fallback;
    }
    if (!v->is_string()) throw ScenarioError("'" + where(key) + "' must be a string");
    return v->get<std::string>();
  }

  // Expression string, checked against the chart variables.
  std::string expr(const std::string& key, const std::string& fallback, const std::vector<std::string>& vars,
                   bool required = false) {
    const std::string src = string(key, fallback, required);
    try {
      Expression::parse(src, vars);
    } catch (const ParseError& e) {
      throw ScenarioError("'" + where(key) + "': " + e.what() + " at offset " + std::to_string(e.offset()));
    }
    return src;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ScenarioError("unknown key '" + where(key) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

FormSpec read_form(Reader& r, const std::string& u, const std::string& v, const std::vector<std::string>& vars,
                   bool f_required) {
  FormSpec s;
  s.f = r.expr("f", "0", vars, f_required);
  s.beta_u = r.expr("beta_" + u, "0", vars);
  s.beta_v = r.expr("beta_" + v, "0", vars);
  s.beta_z = r.expr("beta_z", "0", vars);
  return s;
}

ComponentSpec read_component(Reader& r) {
  ComponentSpec c;
  const std::string surface = r.string("surface", "", true);
  if (surface == "torus") {
    c.surface = SurfaceKind::Torus;
    c.form = read_form(r, "u", "v", kTorusVars, true);
    return c;
  }
  if (surface != "sphere") throw ScenarioError("'" + r.where("surface") + "' must be \"torus\" or \"sphere\"");
  c.surface = SurfaceKind::Sphere;
  c.form = read_form(r, "theta", "phi", kAngularVars, true);
  c.pole_exclusion = r.number("pole_exclusion", c.pole_exclusion);
  if (c.pole_exclusion >= 0.5) throw ScenarioError("'" + r.where("pole_exclusion") + "' must be below 0.5");
  const json* poles = r.get("poles");
  if (!poles) throw ScenarioError("missing key '" + r.where("poles") + "' (sphere pole-patch forms)");
  Reader pr(*poles, r.where("poles"));
  for (const char* name : {"north", "south"}) {
    const json* p = pr.get(name);
    if (!p) throw ScenarioError("missing key '" + pr.where(name) + "'");
    Reader fr(*p, pr.where(name));
    FormSpec form = read_form(fr, "u", "v", kPoleVars, true);
    fr.finish();
    (std::string(name) == "north" ? c.north : c.south) = form;
  }
  pr.finish();
  return c;
}

Tolerances read_tolerances(Reader& top) {
  Tolerances t;
  const json* j = top.get("tolerances");
  if (!j) return t;
  Reader r(*j, "tolerances");
  t.contact = r.number("contact", t.contact);
  t.reeb = r.number("reeb", t.reeb);
  t.identity = r.number("identity", t.identity);
  t.chart = r.number("chart", t.chart);
  t.spectral = r.number("spectral", t.spectral);
  t.limit = r.number("limit", t.limit);
  t.rtol = r.number("rtol", t.rtol);
  t.atol = r.number("atol", t.atol);
  t.beltrami_identity = r.number("beltrami_identity", t.beltrami_identity);
  t.laplace = r.number("laplace", t.laplace);
  t.roundtrip = r.number("roundtrip", t.roundtrip);
  t.divergence = r.number("divergence", t.divergence);
  t.beltrami_spectral = r.number("beltrami_spectral", t.beltrami_spectral);
  t.rescaling = r.number("rescaling", t.rescaling);
  t.mc_rtol = r.number("mc_rtol", t.mc_rtol);
  t.mc_atol = r.number("mc_atol", t.mc_atol);
  t.energy = r.number("energy", t.energy);
  t.periodicity = r.number("periodicity", t.periodicity);
  t.oracle = r.number("oracle", t.oracle);
  t.reversal = r.number("reversal", t.reversal);
  r.finish();
  return t;
}

GridSpec read_grid(Reader& r, GridSpec g) {
  const json* j = r.get("grid");
  if (!j) return g;
  if (!j->is_array() || j->size() != 3 || !std::all_of(j->begin(), j->end(), [](const json& x) {
        return x.is_number_integer() && x.get<long long>() >= 2 && x.get<long long>() <= 4096;
      }))
    throw ScenarioError("'grid' must be an array of three integers in [2, 4096]");
  return {(*j)[0].get<int>(), (*j)[1].get<int>(), (*j)[2].get<int>()};
}

void read_seeds(Reader& top, Scenario& s) {
  const json* j = top.get("seeds");
  if (!j) return;
  Reader r(*j, "seeds");
  s.fan_seeds = r.integer("fan", s.fan_seeds, 1);
  s.offset = r.number("offset", s.offset);
  r.finish();
}

BeltramiSpec read_beltrami(Reader& r) {
  BeltramiSpec b;
  b.F = r.expr("F", "", kSurfaceVars, true);
  const json* lam = r.get("lambda");
  if (!lam) throw ScenarioError("missing key 'lambda'");
  if (!lam->is_number() || lam->get<double>() == 0.0 || !std::isfinite(lam->get<double>()))
    throw ScenarioError("'lambda' must be a nonzero number");
  b.lambda = lam->get<double>();
  if (const json* h = r.get("h")) {
    Reader hr(*h, "h");
    b.h11 = hr.expr("h11", b.h11, kSurfaceVars);
    b.h12 = hr.expr("h12", b.h12, kSurfaceVars);
    b.h22 = hr.expr("h22", b.h22, kSurfaceVars);
    hr.finish();
  }
  if (const json* e = r.get("extension")) {
    Reader er(*e, "extension");
    b.extension = std::array<std::string, 3>{er.expr("X_u", "", kTorusVars, true), er.expr("X_v", "", kTorusVars, true),
                                             er.expr("X_z", "", kTorusVars, true)};
    er.finish();
  }
  return b;
}

McGeheeSpec read_mcgehee(Reader& r) {
  McGeheeSpec m;
  m.mu = r.number("mu", m.mu);
  if (!(m.mu < 1.0)) throw ScenarioError("'mu' must lie in (0, 1)");
  m.t_end = r.number("t_end", m.t_end);
  m.oracle_t_end = r.number("oracle_t_end", m.oracle_t_end);
  m.reversal_t_end = r.number("reversal_t_end", m.reversal_t_end);
  m.dt_out = r.number("dt_out", m.dt_out);
  const json* states = r.get("states");
  if (!states || !states->is_array() || states->empty())
    throw ScenarioError("'states' must be a non-empty array of initial states");
  for (std::size_t k = 0; k < states->size(); ++k) {
    Reader sr((*states)[k], "states[" + std::to_string(k) + "]");
    McState y{sr.number("x", 0.0, false), sr.number("a", 0.0, false), sr.number("Pr", 0.0, false),
              sr.number("Pa", 0.0, false)};
    if (y[0] < 0.0) throw ScenarioError("'" + sr.where("x") + "' must be non-negative");
    sr.finish();
    m.states.push_back(y);
  }
  return m;
}

ordered_json form_json(const FormSpec& f, const std::string& u, const std::string& v) {
  return {{"f", f.f}, {"beta_" + u, f.beta_u}, {"beta_" + v, f.beta_v}, {"beta_z", f.beta_z}};
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::BContact: return "bcontact";
    case ScenarioKind::Beltrami: return "beltrami";
    case ScenarioKind::McGehee: return "mcgehee";
  }
  return "?";
}

Scenario parse_scenario(const json& j) {
  Reader r(j, "");
  Scenario s;
  const std::string kind = r.string("kind", "", true);
  if (kind == "bcontact") s.kind = ScenarioKind::BContact;
  else if (kind == "beltrami") s.kind = ScenarioKind::Beltrami;
  else if (kind == "mcgehee") s.kind = ScenarioKind::McGehee;
  else throw ScenarioError("'kind' must be one of \"bcontact\", \"beltrami\", \"mcgehee\"");

  s.name = r.string("name", kind);
  r.get("description");  // free text, not echoed
  s.output = r.string("output", "out/" + s.name);
  s.tol = read_tolerances(r);

  if (s.kind != ScenarioKind::McGehee) {
    s.epsilon = r.number("epsilon", s.epsilon);
    s.grid = read_grid(r, s.grid);
    s.scan = r.integer("scan", s.scan, 8);
    read_seeds(r, s);
    s.t_max = r.number("t_max", s.t_max);
  }

  switch (s.kind) {
    case ScenarioKind::BContact: {
      if (const json* comps = r.get("components")) {
        if (r.has("surface")) throw ScenarioError("give either 'surface' or 'components', not both");
        if (!comps->is_array() || comps->empty()) throw ScenarioError("'components' must be a non-empty array");
        for (std::size_t k = 0; k < comps->size(); ++k) {
          Reader cr((*comps)[k], "components[" + std::to_string(k) + "]");
          s.components.push_back(read_component(cr));
          cr.finish();
        }
      } else {
        s.components.push_back(read_component(r));
      }
      break;
    }
    case ScenarioKind::Beltrami:
      s.beltrami = read_beltrami(r);
      break;
    case ScenarioKind::McGehee:
      s.mcgehee = read_mcgehee(r);
      break;
  }
  r.finish();
  if (s.kind == ScenarioKind::Beltrami) {
    // Positive definiteness is checked on the grid at run time; here only
    // that the expressions combine.
    build_beltrami(*s.beltrami).validate();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n');
    throw ScenarioError(path + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

ordered_json to_json(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["kind"] = to_string(s.kind);
  if (s.kind != ScenarioKind::McGehee) {
    j["epsilon"] = s.epsilon;
    j["grid"] = {s.grid.nu, s.grid.nv, s.grid.nz};
    j["scan"] = s.scan;
    j["seeds"] = {{"fan", s.fan_seeds}, {"offset", s.offset}};
    j["t_max"] = s.t_max;
  }
  const Tolerances& t = s.tol;
  j["tolerances"] = {{"contact", t.contact},
                     {"reeb", t.reeb},
                     {"identity", t.identity},
                     {"chart", t.chart},
                     {"spectral", t.spectral},
                     {"limit", t.limit},
                     {"rtol", t.rtol},
                     {"atol", t.atol},
                     {"beltrami_identity", t.beltrami_identity},
                     {"laplace", t.laplace},
                     {"roundtrip", t.roundtrip},
                     {"divergence", t.divergence},
                     {"beltrami_spectral", t.beltrami_spectral},
                     {"rescaling", t.rescaling},
                     {"mc_rtol", t.mc_rtol},
                     {"mc_atol", t.mc_atol},
                     {"energy", t.energy},
                     {"periodicity", t.periodicity},
                     {"oracle", t.oracle},
                     {"reversal", t.reversal}};
  if (!s.components.empty()) {
    ordered_json comps = ordered_json::array();
    for (const ComponentSpec& c : s.components) {
      ordered_json cj;
      if (c.surface == SurfaceKind::Torus) {
        cj["surface"] = "torus";
        cj.update(form_json(c.form, "u", "v"));
      } else {
        cj["surface"] = "sphere";
        cj.update(form_json(c.form, "theta", "phi"));
        cj["pole_exclusion"] = c.pole_exclusion;
        cj["poles"] = {{"north", form_json(*c.north, "u", "v")}, {"south", form_json(*c.south, "u", "v")}};
      }
      comps.push_back(cj);
    }
    j["components"] = comps;
  }
  if (s.beltrami) {
    const BeltramiSpec& b = *s.beltrami;
    j["F"] = b.F;
    j["lambda"] = b.lambda;
    j["h"] = {{"h11", b.h11}, {"h12", b.h12}, {"h22", b.h22}};
    if (b.extension)
      j["extension"] = {{"X_u", (*b.extension)[0]}, {"X_v", (*b.extension)[1]}, {"X_z", (*b.extension)[2]}};
  }
  if (s.mcgehee) {
    const McGeheeSpec& m = *s.mcgehee;
    j["mu"] = m.mu;
    j["t_end"] = m.t_end;
    j["oracle_t_end"] = m.oracle_t_end;
    j["reversal_t_end"] = m.reversal_t_end;
    j["dt_out"] = m.dt_out;
    ordered_json states = ordered_json::array();
    for (const McState& y : m.states) states.push_back({{"x", y[0]}, {"a", y[1]}, {"Pr", y[2]}, {"Pa", y[3]}});
    j["states"] = states;
  }
  j["output"] = s.output;
  return j;
}

BComponent build_component(const ComponentSpec& spec, double epsilon) {
  auto form = [](const FormSpec& f, const std::vector<std::string>& vars) {
    try {
      return BContactForm::parse(f.f, f.beta_u, f.beta_v, f.beta_z, vars);
    } catch (const ParseError& e) {
      throw ScenarioError(std::string("form expression: ") + e.what());
    }
  };
  if (spec.surface == SurfaceKind::Torus) return BComponent{TubularChart::torus(epsilon), {form(spec.form, kTorusVars)}};
  if (!spec.north || !spec.south) throw ScenarioError("sphere component needs north and south pole forms");
  BComponent c{TubularChart::sphere(epsilon, spec.pole_exclusion), {}};
  // Patch order of TubularChart::sphere: north pole, north angular, south angular, south pole.
  const BContactForm north = form(spec.form, kAngularVars);
  c.forms = {form(*spec.north, kPoleVars), north, south_from_north(north), form(*spec.south, kPoleVars)};
  return c;
}

BeltramiData build_beltrami(const BeltramiSpec& spec) {
  try {
    return BeltramiData{Expression::parse(spec.F, kSurfaceVars),
                        MetricOnZ::parse(spec.h11, spec.h12, spec.h22, kSurfaceVars), spec.lambda};
  } catch (const ParseError& e) {
    throw ScenarioError(std::string("Beltrami expression: ") + e.what());
  }
}

}  // namespace bdyn
