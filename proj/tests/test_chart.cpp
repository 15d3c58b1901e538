#include <doctest.h>

#include <cmath>
#include <random>

#include "bdyn/chart.hpp"
#include "support.hpp"

using namespace bdyn;
using testing::kPi;

namespace {
double norm3(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

Vec3 unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}
}  // namespace

TEST_CASE("torus chart is one periodic patch") {
  const TubularChart c = TubularChart::torus(0.5);
  REQUIRE(c.patch_count() == 1);
  CHECK(c.surface() == SurfaceKind::Torus);
  CHECK(c.patch(0).periodic_u());
  CHECK(c.patch(0).periodic_v());
  const Vec2 n = c.patch(0).normalize({-0.5, 2 * kPi + 0.25});
  CHECK(n[0] == doctest::Approx(2 * kPi - 0.5));
  CHECK(n[1] == doctest::Approx(0.25));
  CHECK(c.betti(0) == 1);
  CHECK(c.betti(1) == 2);
  CHECK(c.betti(2) == 1);
  CHECK(c.euler_characteristic() == 0);
  // Flat periodic distance wraps around.
  CHECK(c.distance(0, {0.1, 0.1}, 0, {2 * kPi - 0.1, 0.1}) == doctest::Approx(0.2));
  CHECK(c.distance(0, {0.0, 0.0}, 0, {0.3, 0.4}) == doctest::Approx(0.5));
}

TEST_CASE("sphere atlas covers every point exactly once") {
  const TubularChart c = TubularChart::sphere(0.5);
  CHECK(c.surface() == SurfaceKind::Sphere);
  CHECK(c.euler_characteristic() == 2);
  CHECK(c.betti(1) == 0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, 2 * kPi);
  for (int k = 0; k < 500; ++k) {
    const Vec3 p = unit(th(rng), ph(rng));
    const int o = c.owner(p);
    REQUIRE(o >= 0);
    const Vec2 uv = c.patch(o).coords(p);
    CHECK(c.owns(o, uv));
    CHECK(c.patch(o).covers(p));
    CHECK(norm3(c.patch(o).embed(uv), p) < 1e-12);
  }
  // The poles belong to the Cartesian pole patches.
  CHECK(c.patch(c.owner({0, 0, 1})).kind == PatchKind::NorthPole);
  CHECK(c.patch(c.owner({0, 0, -1})).kind == PatchKind::SouthPole);
}

TEST_CASE("transitions round-trip and preserve the embedded point") {
  const TubularChart c = TubularChart::sphere(0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.3, kPi - 0.3), ph(0.0, 2 * kPi);
  for (int k = 0; k < 200; ++k) {
    const Vec3 p = unit(th(rng), ph(rng));
    for (int a = 0; a < c.patch_count(); ++a) {
      if (!c.patch(a).covers(p)) continue;
      const Vec2 ua = c.patch(a).coords(p);
      for (int b = 0; b < c.patch_count(); ++b) {
        if (!c.patch(b).covers(p)) continue;
        const Vec2 ub = c.transition(a, b, ua);
        CHECK(norm3(c.patch(b).embed(ub), p) < 1e-12);
        const Vec2 back = c.transition(b, a, ub);
        CHECK(c.distance(a, back, a, ua) < 1e-12);
      }
    }
  }
  // Angular transition: theta' = pi - theta, phi' = -phi.
  const int n = c.find(PatchKind::NorthAngular), s = c.find(PatchKind::SouthAngular);
  const Vec2 t = c.transition(n, s, {1.0, 0.5});
  CHECK(t[0] == doctest::Approx(kPi - 1.0));
  CHECK(c.patch(s).normalize(t)[1] == doctest::Approx(2 * kPi - 0.5));
}

TEST_CASE("chordal distance on the sphere") {
  const TubularChart c = TubularChart::sphere(0.5);
  const int n = c.find(PatchKind::NorthAngular);
  CHECK(c.distance(n, {kPi / 2, 0.0}, n, {kPi / 2, kPi}) == doctest::Approx(2.0));
  const int np = c.find(PatchKind::NorthPole), sp = c.find(PatchKind::SouthPole);
  CHECK(c.distance(np, {0.0, 0.0}, sp, {0.0, 0.0}) == doctest::Approx(2.0));
  CHECK(c.patch(np).area_factor({0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("transverse samples and grids") {
  const TubularChart c = TubularChart::torus(0.5);
  const auto z = c.transverse_samples(9);
  CHECK(z.size() == 9);
  int zeros = 0;
  for (double v : z) {
    CHECK(std::abs(v) <= 0.5);
    if (v == 0.0) ++zeros;
  }
  CHECK(zeros == 1);
  const PatchGrid g = c.patch_grid(0, 16, 8);
  CHECK(g.us.size() == 16);
  CHECK(g.vs.size() == 8);
  CHECK(g.periodic_u);
  CHECK(c.surface_grid(0, 16, 8).size() == 128);
}

TEST_CASE("angular patches stay away from their poles") {
  const TubularChart c = TubularChart::sphere(0.5, 0.05);
  const Patch& n = c.patch(c.find(PatchKind::NorthAngular));
  CHECK(!n.valid({0.01, 1.0}));
  CHECK(n.valid({1.0, 1.0}));
  CHECK(!n.covers({0, 0, 1}));
}
