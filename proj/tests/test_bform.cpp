#include <doctest.h>

#include <cmath>
#include <random>

#include "bdyn/bform.hpp"
#include "bdyn/error.hpp"
#include "support.hpp"

using namespace bdyn;
using testing::kPi;

namespace {

// Residual of alpha(R) = 1 and i_R d(alpha) = 0 with coframe data from finite differences.
double fd_reeb_residual(const BContactForm& form, const Vec3& x, const std::array<double, 3>& r) {
  const auto c = testing::fd_coframe(form, x);
  const double ru = r[0], rv = r[1], g = r[2];
  const double e0 = c.a[0] * ru + c.a[1] * rv + c.a[2] * g - 1.0;
  const double e1 = -c.c_uv * rv - c.c_us * g;
  const double e2 = c.c_uv * ru - c.c_vs * g;
  const double e3 = c.c_us * ru + c.c_vs * rv;
  return std::max({std::abs(e0), std::abs(e1), std::abs(e2), std::abs(e3)});
}

// i_Y(w du^dv) - df on Z from values only.
std::array<double, 2> fd_identity_defect(const BContactForm& form, const Vec2& uv, const std::array<double, 3>& r) {
  const Vec3 x{uv[0], uv[1], 0.0};
  auto f = [&](const std::array<double, 3>& p) { return testing::value(form.f, p); };
  const auto c = testing::fd_coframe(form, x);
  const double fu = testing::fd(f, x, 0), fv = testing::fd(f, x, 1);
  const double w = c.a[2] * c.c_uv + c.a[0] * fv - c.a[1] * fu;
  return {-w * r[1] - fu, w * r[0] - fv};
}

BComponent torus_with(const FormSpec& fs) {
  ComponentSpec spec;
  spec.surface = SurfaceKind::Torus;
  spec.form = fs;
  return build_component(spec, 0.5);
}

}  // namespace

TEST_CASE("sample_coframe matches the finite-difference coframe") {
  const BComponent t = testing::torus_component();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uv(0.0, 2 * kPi), z(-0.5, 0.5);
  for (int k = 0; k < 100; ++k) {
    const Vec3 x{uv(rng), uv(rng), z(rng)};
    const CoframeSample s = sample_coframe(t.form(0), x);
    const auto o = testing::fd_coframe(t.form(0), x);
    for (int i = 0; i < 3; ++i) CHECK(s.a[i] == doctest::Approx(o.a[i]).epsilon(1e-14));
    CHECK(s.c[0] == doctest::Approx(o.c_uv).epsilon(1e-7).scale(1.0));
    CHECK(s.c[1] == doctest::Approx(o.c_us).epsilon(1e-7).scale(1.0));
    CHECK(s.c[2] == doctest::Approx(o.c_vs).epsilon(1e-7).scale(1.0));
    const double V = o.a[0] * o.c_vs - o.a[1] * o.c_us + o.a[2] * o.c_uv;
    CHECK(s.volume == doctest::Approx(V).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("Reeb field satisfies the defining equations at random points") {
  for (const BComponent& comp : {testing::torus_component(), testing::sphere_component()}) {
    const BReebField R(comp);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> z(-0.4, 0.4);
    std::uniform_real_distribution<double> th(0.3, kPi - 0.3), ph(0.0, 2 * kPi);
    int checked = 0;
    for (int k = 0; k < 200; ++k) {
      const double theta = th(rng), phi = ph(rng);
      const Vec3 p{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
      const int patch = comp.chart.owner(p);
      const Vec2 uv = comp.chart.patch(patch).coords(p);
      const Vec3 x{uv[0], uv[1], z(rng)};
      const ReebSample s = R.eval(patch, x);
      CHECK(s.residual < 1e-9);
      CHECK(fd_reeb_residual(comp.form(patch), x, s.r) < 1e-6);
      ++checked;
    }
    CHECK(checked == 200);
  }
}

TEST_CASE("Reeb Jacobian matches finite differences of the field") {
  const BComponent t = testing::torus_component();
  const BReebField R(t);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uv(0.0, 2 * kPi), z(-0.4, 0.4);
  for (int k = 0; k < 30; ++k) {
    const Vec3 x{uv(rng), uv(rng), z(rng)};
    std::array<std::array<double, 3>, 3> jac{};
    R.eval_with_jacobian(0, x, jac);
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < 3; ++m) {
        auto comp_i = [&](const std::array<double, 3>& p) { return R.eval(0, p).r[static_cast<std::size_t>(i)]; };
        CHECK(jac[i][m] == doctest::Approx(testing::fd(comp_i, x, m)).epsilon(1e-6).scale(1.0));
      }
  }
}

TEST_CASE("the Reeb field on Z is Hamiltonian for -f up to w") {
  const BComponent t = testing::torus_component();
  const BReebField R(t);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uv(0.0, 2 * kPi);
  for (int k = 0; k < 100; ++k) {
    const Vec2 p{uv(rng), uv(rng)};
    const ReebSample s = R.eval(0, {p[0], p[1], 0.0});
    const auto d = fd_identity_defect(t.form(0), p, s.r);
    CHECK(std::abs(d[0]) < 1e-7);
    CHECK(std::abs(d[1]) < 1e-7);
    // w from the library agrees with the oracle's coefficient.
    const auto c = testing::fd_coframe(t.form(0), {p[0], p[1], 0.0});
    auto f = [&](const std::array<double, 3>& q) { return testing::value(t.form(0).f, q); };
    const Vec3 x{p[0], p[1], 0.0};
    const double w = c.a[2] * c.c_uv + c.a[0] * testing::fd(f, x, 1) - c.a[1] * testing::fd(f, x, 0);
    CHECK(symplectic_coefficient(t.form(0), p) == doctest::Approx(w).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("validation checks pass on the built-in forms") {
  const ValidationGrid grid{32, 32, 5};
  for (const BComponent& comp : {testing::torus_component(), testing::sphere_component()}) {
    CHECK(contact_check(comp, grid).passed);
    const auto r = reeb_residuals(comp, grid);
    CHECK(r.passed);
    CHECK(r.value < 1e-9);
    const auto id = verify_hamiltonian_identity(comp, grid);
    CHECK(id.passed);
    CHECK(id.value < 1e-9);
    CHECK(chart_consistency(comp, grid).passed);
  }
  CHECK(periodicity_check(testing::torus_component()).passed);
}

TEST_CASE("dz/z alone is not contact") {
  const BComponent c = torus_with({"1", "0", "0", "0"});
  const auto r = contact_check(c, {16, 16, 5});
  CHECK(!r.passed);
  CHECK(r.value < 1e-8);
  CHECK_THROWS_AS(BReebField(c).eval(0, {0.1, 0.2, 0.1}), RankDeficient);
}

TEST_CASE("beta = 0 gives a degenerate form on Z") {
  const BComponent c = torus_with({"cos(v)", "0", "0", "0"});
  CHECK_THROWS_AS(symplectic_on_Z(c, 16, 16), Degenerate);
}

TEST_CASE("a non-periodic coefficient fails the periodicity check") {
  const BComponent c = torus_with({"u", "sin(v)", "0", "0"});
  CHECK(!periodicity_check(c).passed);
}

TEST_CASE("a corrupted pole patch fails chart consistency") {
  Scenario s = load_scenario(testing::scenario_path("sphere"));
  s.components.front().north->f = "1.01*sqrt(1-u^2-v^2)";
  const BComponent c = build_component(s.components.front(), 0.5);
  const auto r = chart_consistency(c, {32, 32, 5});
  CHECK(!r.passed);
  CHECK(r.value > 1e-3);
}

TEST_CASE("the injected sampler is what the residual check measures") {
  const BComponent t = testing::torus_component();
  const BReebField R(t);
  ReebSampler off = [&](int patch, const Vec3& x) {
    ReebSample s = R.eval(patch, x);
    s.r[0] += 1e-6;
    return s;
  };
  CHECK(!reeb_residuals(t, {16, 16, 5}, 1e-9, off).passed);
  CHECK(!verify_hamiltonian_identity(t, {16, 16, 5}, 1e-9, off).passed);
}

TEST_CASE("exceptional Hamiltonian is -f") {
  const BComponent t = testing::torus_component();
  const Expression H = exceptional_hamiltonian(t.form(0));
  CHECK(testing::value(H, {0.4, 1.1, 0.0}) == doctest::Approx(-(std::cos(1.1) + 0.3 * std::cos(0.4) * std::sin(1.1))));
  CHECK(hamiltonian_range(t, {32, 32, 5}).passed);
}
