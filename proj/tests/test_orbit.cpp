#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "bdyn/critical.hpp"
#include "bdyn/error.hpp"
#include "bdyn/ode.hpp"
#include "bdyn/orbit.hpp"
#include "support.hpp"

using namespace bdyn;
using testing::kPi;

namespace {

struct Traced {
  BComponent comp;
  std::vector<CriticalPoint> cps;
  std::vector<StabilityReport> stab;
};

Traced prepare(const BComponent& c) {
  Traced t{c, {}, {}};
  t.cps = find_critical_points(t.comp.chart, exceptional_hamiltonian(t.comp)).points;
  const BReebField R(t.comp);
  for (const auto& p : t.cps) t.stab.push_back(stability_at(p, R));
  return t;
}

}  // namespace

TEST_CASE("dopri5 integrates the harmonic oscillator in both directions") {
  auto rhs = [](double, const OdeState<2>& y, OdeState<2>& d) { d = {y[1], -y[0]}; };
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  OdeState<2> y{1.0, 0.0};
  const OdeStats st = dopri5<2>(rhs, 0.0, y, 2 * kPi, o);
  CHECK(std::abs(y[0] - 1.0) < 1e-9);
  CHECK(std::abs(y[1]) < 1e-9);
  CHECK(st.t_end == 2 * kPi);
  CHECK(st.accepted > 0);

  OdeState<2> b{1.0, 0.0};
  dopri5<2>(rhs, 0.0, b, -1.0, o);
  CHECK(b[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-10));
  CHECK(b[1] == doctest::Approx(std::sin(1.0)).epsilon(1e-10));
}

TEST_CASE("dopri5 observer can stop and edit the state") {
  auto rhs = [](double, const OdeState<1>&, OdeState<1>& d) { d = {1.0}; };
  OdeOptions o;
  o.h_max = 0.1;
  OdeState<1> y{0.0};
  const OdeStats st = dopri5<1>(rhs, 0.0, y, 10.0, o, [](double t, OdeState<1>&, const OdeState<1>&) {
    return t > 1.0 ? StepAction::Stop : StepAction::Continue;
  });
  CHECK(st.stopped);
  CHECK(st.t_end > 1.0);
  CHECK(st.t_end < 1.2);

  OdeState<1> z{0.0};
  bool reset = false;
  dopri5<1>(rhs, 0.0, z, 2.0, o, [&](double t, OdeState<1>& x, const OdeState<1>&) {
    if (!reset && t >= 1.0) {
      reset = true;
      x[0] = 0.0;
      return StepAction::StateChanged;
    }
    return StepAction::Continue;
  });
  CHECK(reset);
  CHECK(z[0] < 1.05);
}

TEST_CASE("dopri5 reports blow-up") {
  auto rhs = [](double, const OdeState<1>& y, OdeState<1>& d) { d = {y[0] * y[0]}; };
  OdeState<1> y{1.0};
  CHECK_THROWS_AS(dopri5<1>(rhs, 0.0, y, 2.0, OdeOptions{}), Error);
}

TEST_CASE("manifold seeds sit at the requested offset") {
  const Traced t = prepare(testing::torus_component());
  for (std::size_t i = 0; i < t.cps.size(); ++i) {
    const auto seeds = manifold_seeds(t.cps[i], t.stab[i], 16, 1e-4);
    CHECK(seeds.size() == (t.stab[i].manifold_dim == 2 ? 16u : 2u));
    for (const Vec3& s : seeds) {
      const double du = s[0] - t.cps[i].uv[0], dv = s[1] - t.cps[i].uv[1];
      CHECK(std::sqrt(du * du + dv * dv + s[2] * s[2]) == doctest::Approx(1e-4).epsilon(1e-9));
      CHECK(s[2] != 0.0);
    }
    CHECK_THROWS_AS(manifold_seeds(t.cps[i], t.stab[i], 16, 0.0), PreconditionError);
  }
}

TEST_CASE("sphere: four escape orbits limiting to the poles") {
  const Traced t = prepare(testing::sphere_component());
  const RegularizedField field(t.comp);
  TraceOptions opt;
  std::vector<EscapeOrbit> all;
  for (std::size_t i = 0; i < t.cps.size(); ++i) {
    auto orbits = trace_invariant_manifolds(field, t.cps, static_cast<int>(i), t.stab[i], opt);
    for (auto& o : orbits) {
      check_robustness(field, t.cps, o, opt.orbit);
      all.push_back(std::move(o));
    }
  }
  mark_distinct(t.comp.chart, all);
  REQUIRE(all.size() == 4);
  for (const EscapeOrbit& o : all) {
    CHECK(o.kind == OrbitKind::OneWay);
    CHECK(o.distinct);
    CHECK(o.robust);
    CHECK(o.robust_shift < 1e-5);
    const LimitResult& lim = o.forward_limit.verdict == Verdict::LimitsTo ? o.forward_limit : o.backward_limit;
    const Trajectory& tr = o.forward_limit.verdict == Verdict::LimitsTo ? o.forward : o.backward;
    CHECK(lim.target == o.source);
    // Independent distance from the final point to the pole in R^3.
    const auto& last = tr.samples.back();
    const Vec3 x = t.comp.chart.patch(last.patch).embed({last.y[0], last.y[1]});
    const Vec3& pole = t.cps[static_cast<std::size_t>(o.source)].point;
    const double d = std::hypot(x[0] - pole[0], x[1] - pole[1], x[2] - pole[2]);
    CHECK(d < 1e-5);
    CHECK(std::exp(last.y[2]) < 1e-5);
    // The other half leaves the tube.
    const LimitResult& other = &lim == &o.forward_limit ? o.backward_limit : o.forward_limit;
    CHECK(other.verdict == Verdict::LeftNeighborhood);
  }
}

TEST_CASE("orbits on Z around a pole are periodic with the closed-form period") {
  // On Z, w = sin(theta)(1 + cos^2 theta) and f_theta = -sin(theta), so the
  // flow rotates phi at rate 1/(1 + cos^2 theta).
  const BComponent c = testing::sphere_component();
  const RegularizedField field(c);
  const int na = c.chart.find(PatchKind::NorthAngular);
  for (double theta0 : {0.5, 1.0, 2.0}) {
    RegState st;
    st.patch = na;
    st.uv = {theta0, 0.3};
    st.on_z = true;
    const Trajectory tr = integrate_orbit(field, st, 40.0, OrbitOptions{});
    CHECK(tr.error.empty());
    const LimitResult lim = detect_limit(tr, c.chart, {}, OrbitOptions{});
    CHECK(lim.verdict == Verdict::Periodic);
    const double period = 2 * kPi * (1 + std::cos(theta0) * std::cos(theta0));
    CHECK(lim.return_time == doctest::Approx(period).epsilon(1e-6));
  }
}

TEST_CASE("classification of semiorbit verdicts") {
  LimitResult to, left;
  to.verdict = Verdict::LimitsTo;
  left.verdict = Verdict::LeftNeighborhood;
  CHECK(classify(to, to) == OrbitKind::SingularPeriodic);
  CHECK(classify(to, left) == OrbitKind::OneWay);
  CHECK(classify(left, to) == OrbitKind::OneWay);
  CHECK(classify(left, left) == OrbitKind::NotEscape);
  CHECK(classify(LimitResult{}, left) == OrbitKind::NotEscape);
}

TEST_CASE("duplicated orbits are not distinct and the CSV is well formed") {
  const Traced t = prepare(testing::sphere_component());
  const RegularizedField field(t.comp);
  TraceOptions opt;
  auto orbits = trace_invariant_manifolds(field, t.cps, 0, t.stab[0], opt);
  REQUIRE(orbits.size() == 2);
  orbits.push_back(orbits[0]);
  mark_distinct(t.comp.chart, orbits);
  CHECK(orbits[0].distinct);
  CHECK(orbits[1].distinct);
  CHECK(!orbits[2].distinct);

  const auto dir = testing::temp_dir("orbit_csv");
  const std::string path = (dir / "orbit.csv").string();
  write_orbit_csv(path, t.comp.chart, orbits[0]);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,u,v,s,z,side");
  double prev = -INFINITY;
  int rows = 0;
  while (std::getline(in, line)) {
    const double tt = std::stod(line.substr(0, line.find(',')));
    CHECK(tt >= prev);
    prev = tt;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
    ++rows;
  }
  CHECK(rows == static_cast<int>(orbits[0].forward.samples.size() + orbits[0].backward.samples.size() - 1));
}

TEST_CASE("torus saddle fans limit to their own saddle") {
  const Traced t = prepare(testing::torus_component());
  const RegularizedField field(t.comp);
  TraceOptions opt;
  for (std::size_t i = 0; i < t.cps.size(); ++i) {
    if (t.cps[i].index != 1) continue;
    const auto orbits = trace_invariant_manifolds(field, t.cps, static_cast<int>(i), t.stab[i], opt);
    CHECK(orbits.size() == 16);
    for (const auto& o : orbits)
      CHECK((o.forward_limit.target == static_cast<int>(i) || o.backward_limit.target == static_cast<int>(i)));
    break;
  }
}
