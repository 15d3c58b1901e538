#include "bdyn/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "bdyn/error.hpp"
#include "bdyn/parallel.hpp"

namespace bdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Cap on the step so stored samples resolve the orbit for interpolation and matching.
constexpr double kMaxStep = 0.1;

double wrap_signed(double x) {
  double r = std::fmod(x + std::numbers::pi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - std::numbers::pi;
}

double min_target_distance(const TubularChart& chart, int patch, const Vec2& uv,
                           const std::vector<CriticalPoint>& targets, int* which = nullptr) {
  double best = INFINITY;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = chart.distance(patch, uv, targets[i].patch, targets[i].uv);
    if (d < best) {
      best = d;
      if (which) *which = static_cast<int>(i);
    }
  }
  return best;
}

using Vec4 = std::array<double, 4>;

Vec4 lifted(const TubularChart& chart, int patch, const std::array<double, 3>& y, int sigma, bool on_z) {
  const Vec3 p = chart.patch(patch).embed({y[0], y[1]});
  return {p[0], p[1], p[2], on_z ? 0.0 : sigma * std::exp(y[2])};
}

double point_segment_distance(const Vec4& x, const Vec4& a, const Vec4& b) {
  double ab2 = 0.0, t = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    ab2 += (b[i] - a[i]) * (b[i] - a[i]);
    t += (x[i] - a[i]) * (b[i] - a[i]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double c = a[i] + t * (b[i] - a[i]) - x[i];
    d2 += c * c;
  }
  return std::sqrt(d2);
}

std::string fmt(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

}  // namespace

double RegState::z() const { return on_z ? 0.0 : sigma * std::exp(s); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::LimitsTo: return "limits-to";
    case Verdict::LeftNeighborhood: return "left-neighborhood";
    case Verdict::Periodic: return "periodic";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

std::string to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::OneWay: return "one-way";
    case OrbitKind::SingularPeriodic: return "singular-periodic";
    case OrbitKind::NotEscape: return "not-escape";
  }
  return "?";
}

std::array<double, 3> RegularizedField::operator()(int patch, const std::array<double, 3>& uvs, int sigma,
                                                   bool on_z) const {
  const double z = on_z ? 0.0 : sigma * std::exp(uvs[2]);
  const ReebSample r = reeb_.eval(patch, {uvs[0], uvs[1], z});
  return {r.r[0], r.r[1], on_z ? 0.0 : r.r[2]};
}

Trajectory integrate_orbit(const RegularizedField& field, const RegState& start, double t_span,
                           const OrbitOptions& opt, const std::vector<CriticalPoint>& targets) {
  const TubularChart& chart = field.component().chart;
  Trajectory tr;
  tr.sigma = start.sigma;
  tr.on_z = start.on_z;
  tr.direction = t_span >= 0.0 ? 1.0 : -1.0;
  const double log_eps = std::log(chart.epsilon());
  const double s_cut = std::log(opt.cutoff * chart.epsilon());

  auto [patch, uv] = chart.reproject(start.patch, start.uv);
  OdeState<3> y{uv[0], uv[1], start.s};
  const int sigma = start.sigma;
  const bool on_z = start.on_z;
  auto rhs = [&](double, const OdeState<3>& x, OdeState<3>& dx) { dx = field(patch, x, sigma, on_z); };

  try {
    tr.samples.push_back({0.0, patch, y, field(patch, y, sigma, on_z)});
    if (!on_z && y[2] > log_eps) {
      tr.left = true;
      return tr;
    }
    auto observer = [&](double t, OdeState<3>& x, const OdeState<3>& dx) {
      tr.samples.push_back({t, patch, x, dx});
      if (!on_z && x[2] > log_eps) {
        tr.left = true;
        return StepAction::Stop;
      }
      if (!on_z && x[2] < s_cut - 1.0 &&
          min_target_distance(chart, patch, {x[0], x[1]}, targets) < 0.5 * opt.limit_tol) {
        tr.converged = true;
        return StepAction::Stop;
      }
      if (chart.patch_count() > 1 && !chart.owns(patch, {x[0], x[1]})) {
        const auto [q, uq] = chart.reproject(patch, {x[0], x[1]});
        patch = q;
        x[0] = uq[0];
        x[1] = uq[1];
        tr.samples.push_back({t, patch, x, field(patch, x, sigma, on_z)});
        return StepAction::StateChanged;
      }
      return StepAction::Continue;
    };
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.h_max = kMaxStep;
    tr.stats = dopri5<3>(rhs, 0.0, y, t_span, o, observer);
  } catch (const Error& e) {
    tr.error = e.what();
  }
  return tr;
}

LimitResult detect_limit(const Trajectory& tr, const TubularChart& chart, const std::vector<CriticalPoint>& cps,
                         const OrbitOptions& opt) {
  LimitResult out;
  if (tr.samples.empty()) return out;
  if (tr.left) {
    out.verdict = Verdict::LeftNeighborhood;
    return out;
  }
  const double s_cut = std::log(opt.cutoff * chart.epsilon());
  const auto& last = tr.samples.back();

  if (!tr.on_z && last.y[2] < s_cut && !cps.empty() && tr.samples.size() >= opt.window) {
    int target = -1;
    const double d_last = min_target_distance(chart, last.patch, {last.y[0], last.y[1]}, cps, &target);
    bool monotone = d_last < opt.limit_tol;
    const CriticalPoint& p = cps[static_cast<std::size_t>(target)];
    double prev_d = INFINITY, prev_s = INFINITY;
    for (std::size_t k = tr.samples.size() - opt.window; k < tr.samples.size() && monotone; ++k) {
      const auto& smp = tr.samples[k];
      const double d = chart.distance(smp.patch, {smp.y[0], smp.y[1]}, p.patch, p.uv);
      if (d > prev_d + 1e-12 || smp.y[2] > prev_s + 1e-12) monotone = false;
      prev_d = d;
      prev_s = smp.y[2];
    }
    if (monotone) {
      out.verdict = Verdict::LimitsTo;
      out.target = target;
      out.distance = d_last;
      return out;
    }
  }

  double s_min = INFINITY;
  for (const auto& smp : tr.samples) s_min = std::min(s_min, smp.y[2]);
  if (!tr.on_z && s_min <= s_cut) return out;

  // Poincare return to the plane through the first sample normal to its velocity.
  const auto& first = tr.samples.front();
  const Patch& patch0 = chart.patch(first.patch);
  const std::size_t dims = tr.on_z ? 2 : 3;
  auto diff = [&](const std::array<double, 3>& y) {
    std::array<double, 3> d{};
    for (std::size_t i = 0; i < dims; ++i) d[i] = y[i] - first.y[i];
    if (patch0.periodic_u()) d[0] = wrap_signed(d[0]);
    if (patch0.periodic_v()) d[1] = wrap_signed(d[1]);
    return d;
  };
  auto section = [&](const std::array<double, 3>& y) {
    const auto d = diff(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < dims; ++i) acc += d[i] * first.dydt[i];
    return acc;
  };
  auto norm = [&](const std::array<double, 3>& d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dims; ++i) acc += d[i] * d[i];
    return std::sqrt(acc);
  };
  double speed = 0.0;
  for (std::size_t i = 0; i < dims; ++i) speed += first.dydt[i] * first.dydt[i];
  if (speed < 1e-24) return out;

  const double dir = tr.direction;
  const double away = 100.0 * opt.limit_tol;
  bool departed = false;
  for (std::size_t k = 0; k + 1 < tr.samples.size(); ++k) {
    const auto& a = tr.samples[k];
    const auto& b = tr.samples[k + 1];
    if (a.patch != first.patch || b.patch != first.patch) continue;
    if (norm(diff(a.y)) > away) departed = true;
    if (!departed) continue;
    const double h = b.t - a.t;
    if (h == 0.0 || norm(diff(a.y)) > 0.5) continue;
    const double fa = dir * section(a.y), fb = dir * section(b.y);
    if (!(fa < 0.0 && fb >= 0.0)) continue;
    auto interp = [&](double th) {
      const double h00 = 2 * th * th * th - 3 * th * th + 1, h10 = th * th * th - 2 * th * th + th;
      const double h01 = -2 * th * th * th + 3 * th * th, h11 = th * th * th - th * th;
      std::array<double, 3> y{};
      for (std::size_t i = 0; i < 3; ++i)
        y[i] = h00 * a.y[i] + h10 * h * a.dydt[i] + h01 * b.y[i] + h11 * h * b.dydt[i];
      return y;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (dir * section(interp(mid)) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double th = 0.5 * (lo + hi);
    const double d = norm(diff(interp(th)));
    if (d < out.distance) {
      out.distance = d;
      out.return_time = a.t + th * h;
    }
    if (d < opt.limit_tol) {
      out.verdict = Verdict::Periodic;
      return out;
    }
  }
  return out;
}

OrbitKind classify(const LimitResult& f, const LimitResult& b) {
  const bool lf = f.verdict == Verdict::LimitsTo, lb = b.verdict == Verdict::LimitsTo;
  if (lf && lb) return OrbitKind::SingularPeriodic;
  if (lf || lb) return OrbitKind::OneWay;
  return OrbitKind::NotEscape;
}

std::vector<Vec3> manifold_seeds(const CriticalPoint& p, const StabilityReport& report, int fan_seeds,
                                 double offset) {
  if (!(offset > 0.0)) throw PreconditionError("seed offset must be positive");
  const Vec3 base{p.uv[0], p.uv[1], 0.0};
  const Vec3& e = report.transverse_vector;
  std::vector<Vec3> seeds;
  if (report.manifold_dim == 1) {
    for (double sgn : {1.0, -1.0}) seeds.push_back({base[0] + sgn * offset * e[0], base[1] + sgn * offset * e[1],
                                                     sgn * offset * e[2]});
    return seeds;
  }
  if (fan_seeds < 1) throw PreconditionError("fan needs at least one seed");
  const Vec3& t = report.tangent_vector;
  for (int k = 0; k < fan_seeds; ++k) {
    const double phi = kTwoPi * (k + 0.5) / fan_seeds;
    const double c = std::cos(phi), s = std::sin(phi);
    seeds.push_back({base[0] + offset * (c * e[0] + s * t[0]), base[1] + offset * (c * e[1] + s * t[1]),
                     offset * (c * e[2] + s * t[2])});
  }
  return seeds;
}

std::vector<EscapeOrbit> trace_invariant_manifolds(const RegularizedField& field,
                                                   const std::vector<CriticalPoint>& cps, int source,
                                                   const StabilityReport& report, const TraceOptions& opt) {
  const CriticalPoint& p = cps.at(static_cast<std::size_t>(source));
  const TubularChart& chart = field.component().chart;
  double offset = opt.offset;
  if (report.manifold_dim == 2) {
    // A linear seed misses the manifold by O(offset^2). While z decays to the
    // stop level that error grows by (offset / z_stop)^kappa along the
    // expanding direction in Z, so shrink the offset until the predicted
    // miss stays below a tenth of the convergence radius.
    const double kappa = std::abs(report.lambda_plus.real()) / std::abs(report.g);
    const double z_stop = std::exp(-1.0) * opt.orbit.cutoff * chart.epsilon();
    const double miss = 0.1 * 0.5 * opt.orbit.limit_tol;
    offset = std::min(offset, std::pow(miss * std::pow(z_stop, kappa), 1.0 / (2.0 + kappa)));
  }
  const std::vector<Vec3> seeds = manifold_seeds(p, report, opt.fan_seeds, offset);
  std::vector<EscapeOrbit> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    EscapeOrbit& o = out[k];
    o.source = source;
    o.seed_index = static_cast<int>(k);
    o.patch = p.patch;
    o.seed = seeds[k];
    o.sigma = seeds[k][2] >= 0.0 ? 1 : -1;
    RegState st;
    st.patch = p.patch;
    st.uv = {seeds[k][0], seeds[k][1]};
    st.s = std::log(std::abs(seeds[k][2]));
    st.sigma = o.sigma;
    o.forward = integrate_orbit(field, st, opt.orbit.t_max, opt.orbit, cps);
    o.backward = integrate_orbit(field, st, -opt.orbit.t_max, opt.orbit, cps);
    o.forward_limit = detect_limit(o.forward, chart, cps, opt.orbit);
    o.backward_limit = detect_limit(o.backward, chart, cps, opt.orbit);
    o.kind = classify(o.forward_limit, o.backward_limit);
    o.multiplicity = o.kind == OrbitKind::SingularPeriodic ? 2 : o.kind == OrbitKind::OneWay ? 1 : 0;
  });
  return out;
}

void check_robustness(const RegularizedField& field, const std::vector<CriticalPoint>& cps, EscapeOrbit& o,
                      const OrbitOptions& opt, double shift_tol) {
  const TubularChart& chart = field.component().chart;
  OrbitOptions tight = opt;
  tight.rtol = opt.rtol / 10.0;
  tight.atol = opt.atol / 10.0;
  o.robust = true;
  o.robust_shift = 0.0;
  for (int side = 0; side < 2; ++side) {
    const Trajectory& tr = side == 0 ? o.forward : o.backward;
    const LimitResult& lim = side == 0 ? o.forward_limit : o.backward_limit;
    if (lim.verdict != Verdict::LimitsTo) continue;
    RegState st;
    st.patch = o.patch;
    st.uv = {o.seed[0], o.seed[1]};
    st.s = std::log(std::abs(o.seed[2]));
    st.sigma = o.sigma;
    const Trajectory again = integrate_orbit(field, st, side == 0 ? opt.t_max : -opt.t_max, tight, cps);
    const LimitResult l2 = detect_limit(again, chart, cps, tight);
    if (l2.verdict != Verdict::LimitsTo || l2.target != lim.target) {
      o.robust = false;
      o.robust_shift = INFINITY;
      continue;
    }
    const auto& a = tr.samples.back();
    const auto& b = again.samples.back();
    const double shift = chart.distance(a.patch, {a.y[0], a.y[1]}, b.patch, {b.y[0], b.y[1]});
    o.robust_shift = std::max(o.robust_shift, shift);
    if (!(shift < shift_tol)) o.robust = false;
  }
}

void mark_distinct(const TubularChart& chart, std::vector<EscapeOrbit>& orbits, double match_tol) {
  std::vector<std::vector<Vec4>> paths(orbits.size());
  for (std::size_t i = 0; i < orbits.size(); ++i)
    for (const Trajectory* tr : {&orbits[i].backward, &orbits[i].forward})
      for (const auto& smp : tr->samples)
        paths[i].push_back(lifted(chart, smp.patch, smp.y, orbits[i].sigma, tr->on_z));
  for (std::size_t j = 0; j < orbits.size(); ++j) {
    orbits[j].distinct = orbits[j].kind != OrbitKind::NotEscape;
    if (!orbits[j].distinct) continue;
    const Vec4 x = lifted(chart, orbits[j].patch, {orbits[j].seed[0], orbits[j].seed[1], 0.0}, orbits[j].sigma, true);
    const Vec4 seed{x[0], x[1], x[2], orbits[j].seed[2]};
    for (std::size_t i = 0; i < j && orbits[j].distinct; ++i) {
      if (!orbits[i].distinct || orbits[i].sigma != orbits[j].sigma) continue;
      // Backward samples run from the seed outwards, so each half is a polyline.
      const std::size_t nb = orbits[i].backward.samples.size();
      for (std::size_t k = 0; k + 1 < paths[i].size(); ++k) {
        if (k + 1 == nb) continue;
        const Vec4& a = paths[i][k];
        const Vec4& b = paths[i][k + 1];
        double jump = 0.0;
        for (std::size_t c = 0; c < 4; ++c) jump = std::max(jump, std::abs(b[c] - a[c]));
        if (jump > 0.5) continue;
        if (point_segment_distance(seed, a, b) < match_tol) {
          orbits[j].distinct = false;
          break;
        }
      }
    }
  }
}

EscapeCensus escape_census(const std::vector<std::vector<EscapeOrbit>>& per_component,
                           const std::vector<std::vector<CriticalPoint>>& cps, const CensusBound& bound) {
  EscapeCensus c;
  for (std::size_t comp = 0; comp < per_component.size(); ++comp) {
    for (const auto& o : per_component[comp]) {
      ++c.orbits;
      if (o.kind == OrbitKind::NotEscape) continue;
      ++c.escape;
      const bool from_saddle = cps[comp][static_cast<std::size_t>(o.source)].index == 1;
      if (from_saddle) {
        ++c.fan_orbits;
        if (o.forward_limit.target == o.source || o.backward_limit.target == o.source) ++c.witnesses;
      }
      if (!o.distinct) continue;
      ++c.distinct;
      if (o.kind == OrbitKind::OneWay) ++c.one_way;
      if (o.kind == OrbitKind::SingularPeriodic) ++c.singular_periodic;
      c.weighted += o.multiplicity;
    }
    for (const auto& o : per_component[comp])
      if (o.kind == OrbitKind::NotEscape && cps[comp][static_cast<std::size_t>(o.source)].index == 1) ++c.fan_orbits;
  }
  c.infinite = bound.infinite;
  c.lower_bound = bound.lower_bound;
  c.expected_weighted = bound.expected_weighted;
  if (c.infinite)
    c.agree = c.fan_orbits > 0 && c.witnesses == c.fan_orbits;
  else
    c.agree = c.distinct >= c.lower_bound && c.weighted == c.expected_weighted;
  return c;
}

void write_trajectory_csv(const std::string& path, const TubularChart& chart,
                          const std::vector<const Trajectory*>& parts) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "t,u,v,s,z,side\n";
  const int na = chart.find(PatchKind::NorthAngular);
  auto row = [&](const Trajectory& tr, const OrbitSample& smp) {
    Vec2 uv;
    if (chart.surface() == SurfaceKind::Torus) {
      uv = chart.patch(0).normalize({smp.y[0], smp.y[1]});
    } else {
      uv = chart.patch(na).coords(chart.patch(smp.patch).embed({smp.y[0], smp.y[1]}));
    }
    const double s = tr.on_z ? -INFINITY : smp.y[2];
    const double z = tr.on_z ? 0.0 : tr.sigma * std::exp(smp.y[2]);
    out << fmt(smp.t) << ',' << fmt(uv[0]) << ',' << fmt(uv[1]) << ',' << fmt(s) << ',' << fmt(z) << ','
        << (tr.on_z ? 0 : tr.sigma) << '\n';
  };
  bool wrote_origin = false;
  for (const Trajectory* tr : parts) {
    if (tr->direction < 0.0) {
      for (auto it = tr->samples.rbegin(); it != tr->samples.rend(); ++it) row(*tr, *it);
      wrote_origin = true;
    } else {
      for (std::size_t k = 0; k < tr->samples.size(); ++k) {
        if (k == 0 && wrote_origin) continue;
        row(*tr, tr->samples[k]);
      }
    }
  }
}

void write_orbit_csv(const std::string& path, const TubularChart& chart, const EscapeOrbit& orbit) {
  write_trajectory_csv(path, chart, {&orbit.backward, &orbit.forward});
}

}  // namespace bdyn
