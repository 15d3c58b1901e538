#include <doctest.h>

#include <cmath>
#include <random>

#include "bdyn/beltrami.hpp"
#include "bdyn/error.hpp"
#include "support.hpp"

using namespace bdyn;
using testing::kPi;

namespace {

const std::vector<std::string> kUV{"u", "v"};
const std::vector<std::string> kUVZ{"u", "v", "z"};

BeltramiData flat(const std::string& F, double lambda) {
  return {Expression::parse(F, kUV), MetricOnZ::flat(kUV), lambda};
}

std::string mode(int m, int n) { return "cos(" + std::to_string(m) + "*u+" + std::to_string(n) + "*v)"; }

}  // namespace

TEST_CASE("tangential components of simple fields") {
  const BeltramiData d = flat("cos(u)", 1.0);
  for (double u : {0.0, 0.7, 2.0}) {
    const Vec2 X = tangential_components(d, {u, 1.3});
    CHECK(X[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(X[1] == doctest::Approx(-std::sin(u)).epsilon(1e-15));
  }
  // lambda and sqrt(det h) divide the Hamiltonian field.
  BeltramiData s{Expression::parse("sin(u+2*v)", kUV), MetricOnZ::parse("4", "0", "4", kUV), 2.0};
  const Vec2 X = tangential_components(s, {0.3, 0.4});
  CHECK(X[0] == doctest::Approx(-2 * std::cos(1.1) / 8.0).epsilon(1e-15));
  CHECK(X[1] == doctest::Approx(std::cos(1.1) / 8.0).epsilon(1e-15));
  CHECK_THROWS_AS(flat("cos(u)", 0.0).validate(), PreconditionError);
}

TEST_CASE("flat-torus modes: identity, Laplace ratio, divergence") {
  int tested = 0;
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      if (m == 0 && n == 0) continue;
      const double k2 = m * m + n * n;
      const BeltramiData d = flat(mode(m, n), std::sqrt(k2));
      const IdentityReport id = hamiltonian_identity_check(d, 32, 32);
      CHECK(id.report.passed);
      CHECK(id.report.value < 1e-8);
      CHECK(id.sigma0 == -1);
      const LaplaceResult lr = laplace_eigen_check(d, 32, 32);
      CHECK(lr.eigenfunction);
      CHECK(std::abs(lr.ratio + k2) < 1e-8);
      CHECK(divergence_check(d, 32, 32).passed);
      ++tested;
    }
  CHECK(tested == 48);
}

TEST_CASE("tangential components agree with an independent formula") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> a(0.0, 2 * kPi);
  const BeltramiData d = flat(mode(2, -3), std::sqrt(13.0));
  for (int k = 0; k < 50; ++k) {
    const Vec2 p{a(rng), a(rng)};
    auto F = [&](const std::array<double, 3>& x) { return std::cos(2 * x[0] - 3 * x[1]); };
    const std::array<double, 3> x{p[0], p[1], 0.0};
    const Vec2 X = tangential_components(d, p);
    CHECK(X[0] == doctest::Approx(-testing::fd(F, x, 1) / std::sqrt(13.0)).epsilon(1e-8).scale(1.0));
    CHECK(X[1] == doctest::Approx(testing::fd(F, x, 0) / std::sqrt(13.0)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("corrupted tangential data fails the identity") {
  const BeltramiData d = flat(mode(1, 2), std::sqrt(5.0));
  TangentialSampler bad = [&](const Vec2& uv) {
    Vec2 X = tangential_components(d, uv);
    X[1] *= 1.001;
    return X;
  };
  CHECK(!hamiltonian_identity_check(d, 32, 32, 1e-8, bad).report.passed);
  TangentialSampler flipped = [&](const Vec2& uv) {
    Vec2 X = tangential_components(d, uv);
    if (uv[0] > kPi) X = {-X[0], -X[1]};
    return X;
  };
  CHECK_THROWS_AS(hamiltonian_identity_check(d, 32, 32, 1e-8, flipped), SignInconsistency);
}

TEST_CASE("mixed modes are not eigenfunctions") {
  const LaplaceResult lr = laplace_eigen_check(flat("cos(u)+cos(2*v)", 1.0), 32, 32);
  CHECK(!lr.eigenfunction);
  CHECK(lr.spread > 1e-3);
}

TEST_CASE("Laplacian of a conformally flat metric") {
  // h = e^{2 phi} I with phi = 0.1 cos u gives Delta_h = e^{-2 phi} Delta.
  BeltramiData d{Expression::parse("cos(u)*cos(v)", kUV),
                 MetricOnZ::parse("exp(0.2*cos(u))", "0", "exp(0.2*cos(u))", kUV), 1.0};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(0.0, 2 * kPi);
  for (int k = 0; k < 50; ++k) {
    const Vec2 p{a(rng), a(rng)};
    const double expected = std::exp(-0.2 * std::cos(p[0])) * (-2.0 * std::cos(p[0]) * std::cos(p[1]));
    CHECK(laplacian(d, p) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
  CHECK(metric_check(d, 16, 16).passed);
  BeltramiData bad{Expression::parse("cos(u)", kUV), MetricOnZ::parse("1", "2", "1", kUV), 1.0};
  CHECK_THROWS_AS(metric_check(bad, 16, 16), Degenerate);
}

TEST_CASE("stability at critical points of F") {
  // F = cos u + 0.5 cos v at (0, pi): F = 0.5, Hess = diag(-1, 0.5).
  const BeltramiData d = flat("cos(u)+0.5*cos(v)", 1.0);
  const BeltramiStability s = beltrami_stability_matrix(d, {0.0, kPi});
  CHECK(s.type == StabilityType::Hyperbolic2D);
  CHECK(s.det_hess == doctest::Approx(-0.5));
  CHECK(s.lambda_plus.real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(s.lambda_z == doctest::Approx(-0.5));
  // Spectrum of the matrix assembled from the hand-computed entries.
  const double expected[3] = {std::sqrt(0.5), -std::sqrt(0.5), -0.5};
  for (double e : expected) {
    double best = 1e300;
    for (const auto& ev : s.spectrum) best = std::min(best, std::abs(ev - e));
    CHECK(best < 1e-10);
  }
  CHECK(s.max_relative_error < 1e-10);
  CHECK(s.DX[2][2] == doctest::Approx(-0.5));

  // Centre: F = cos u + 0.5 cos v at (0, 0).
  const BeltramiStability c = beltrami_stability_matrix(d, {0.0, 0.0});
  CHECK(c.type == StabilityType::NonHyperbolic1D);
  CHECK(std::abs(c.lambda_plus.imag()) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(c.lambda_z == doctest::Approx(-1.5));

  // cos u cos v has a saddle at (pi/2, pi/2), but F vanishes there.
  CHECK_THROWS_AS(beltrami_stability_matrix(flat("cos(u)*cos(v)", 1.0), {kPi / 2, kPi / 2}), RegularValueViolation);
  CHECK_THROWS_AS(beltrami_stability_matrix(flat("cos(u)", 1.0), {0.0, 0.0}), Degenerate);
  CHECK_THROWS_AS(beltrami_stability_matrix(d, {0.5, 0.5}), PreconditionError);
}

TEST_CASE("X vanishes exactly at critical points of F") {
  const BeltramiData d = flat("cos(u)+0.5*cos(v)", 1.0);
  for (const Vec2& p : {Vec2{0, 0}, Vec2{0, kPi}, Vec2{kPi, 0}, Vec2{kPi, kPi}}) {
    const Vec2 X = tangential_components(d, p);
    CHECK(std::hypot(X[0], X[1]) < 1e-15);
  }
}

TEST_CASE("induced b-contact form: round trip and symplectic rescaling") {
  const BeltramiData d = flat("cos(2*u)+0.5*cos(2*v)", 2.0);
  const BContactForm alpha = contact_from_beltrami(d, kUVZ);
  CHECK(beltrami_roundtrip(d, alpha, 32, 32).passed);
  CHECK(beltrami_roundtrip(d, alpha, 32, 32).value < 1e-10);
  CHECK(symplectic_rescaling_check(d, alpha, 32, 32).passed);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> a(0.0, 2 * kPi);
  for (int k = 0; k < 50; ++k) {
    const Vec2 p{a(rng), a(rng)};
    const double F = std::cos(2 * p[0]) + 0.5 * std::cos(2 * p[1]);
    // The exceptional Hamiltonian of alpha is -f = F.
    CHECK(-testing::value(alpha.f, {p[0], p[1], 0.0}) == doctest::Approx(F).epsilon(1e-14).scale(1.0));
    // |w| = lambda (|X|^2 + F^2) for an eigenfunction on the flat torus.
    const Vec2 X = tangential_components(d, p);
    const double w = symplectic_coefficient(alpha, p);
    CHECK(std::abs(w) == doctest::Approx(2.0 * (X[0] * X[0] + X[1] * X[1] + F * F)).epsilon(1e-10).scale(1.0));
  }

  BComponent comp{TubularChart::torus(0.5), {alpha}};
  CHECK(contact_check(comp, {32, 32, 5}).passed);
  CHECK(reeb_residuals(comp, {32, 32, 5}).passed);
}

TEST_CASE("a constant F does not induce a contact form") {
  const BeltramiData d = flat("1+0*u", 1.0);
  const BContactForm alpha = contact_from_beltrami(d, kUVZ);
  BComponent comp{TubularChart::torus(0.5), {alpha}};
  CHECK(!contact_check(comp, {16, 16, 5}).passed);
}
