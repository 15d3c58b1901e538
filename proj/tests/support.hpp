#pragma once
// Shared fixtures and independent oracles for the test binaries.

#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bdyn/bform.hpp"
#include "bdyn/scenario.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline std::string scenario_path(const std::string& name) {
  return std::string(BDYN_SOURCE_DIR) + "/scenarios/" + name + ".json";
}

// Fresh directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("bdyn_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline bdyn::BComponent sphere_component() {
  return bdyn::build_component(bdyn::load_scenario(scenario_path("sphere")).components.front(), 0.5);
}

inline bdyn::BComponent torus_component() {
  return bdyn::build_component(bdyn::load_scenario(scenario_path("torus")).components.front(), 0.5);
}

// Value-only evaluation: the oracles below never touch the jet code.
inline double value(const bdyn::Expression& e, const std::array<double, 3>& x) {
  return e.eval(std::span<const double>(x.data(), 3));
}

// Central difference of a scalar function along coordinate k.
inline double fd(const std::function<double(const std::array<double, 3>&)>& g, std::array<double, 3> x, int k,
                 double h = 1e-6) {
  auto xp = x, xm = x;
  xp[static_cast<std::size_t>(k)] += h;
  xm[static_cast<std::size_t>(k)] -= h;
  return (g(xp) - g(xm)) / (2.0 * h);
}

// b-coframe coefficients a = (beta_u, beta_v, f + z beta_z) and the
// coefficients of d(alpha) in du^dv, du^dz/z, dv^dz/z, all by finite
// differences of values.
struct FdCoframe {
  std::array<double, 3> a{};
  double c_uv = 0.0, c_us = 0.0, c_vs = 0.0;
};

inline FdCoframe fd_coframe(const bdyn::BContactForm& form, const std::array<double, 3>& x) {
  auto au = [&](const std::array<double, 3>& p) { return value(form.beta_u, p); };
  auto av = [&](const std::array<double, 3>& p) { return value(form.beta_v, p); };
  auto as = [&](const std::array<double, 3>& p) { return value(form.f, p) + p[2] * value(form.beta_z, p); };
  FdCoframe c;
  c.a = {au(x), av(x), as(x)};
  c.c_uv = fd(av, x, 0) - fd(au, x, 1);
  c.c_us = fd(as, x, 0) - x[2] * fd(au, x, 2);
  c.c_vs = fd(as, x, 1) - x[2] * fd(av, x, 2);
  return c;
}

// Random expression over (x, y, z) that is smooth on [-1, 1]^3: divisions,
// square roots and exponentials are guarded by construction.
class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

  std::string operator()(int depth) {
    if (depth == 0) return leaf();
    const int pick = pick_(rng_) % 12;
    const std::string a = (*this)(depth - 1);
    switch (pick) {
      case 0: return "(" + a + ")+(" + (*this)(depth - 1) + ")";
      case 1: return "(" + a + ")-(" + (*this)(depth - 1) + ")";
      case 2: return "(" + a + ")*(" + (*this)(depth - 1) + ")";
      case 3: return "(" + a + ")/(2.5+cos(" + (*this)(depth - 1) + "))";
      case 4: return "sin(" + a + ")";
      case 5: return "cos(" + a + ")";
      case 6: return "exp(0.5*sin(" + a + "))";
      case 7: return "sqrt(1.5+sin(" + a + "))";
      case 8: return "(" + a + ")^2";
      case 9: return "sin(" + a + ")^3";
      case 10: return "-(" + a + ")";
      default: return "abs(2+sin(" + a + "))";
    }
  }

  std::array<double, 3> point() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng_), u(rng_), u(rng_)};
  }

 private:
  std::string leaf() {
    static const char* vars[] = {"x", "y", "z"};
    const int pick = pick_(rng_) % 5;
    if (pick < 3) return vars[pick];
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", c(rng_));
    return buf[0] == '-' ? std::string("(") + buf + ")" : std::string(buf);
  }

  std::mt19937_64 rng_;
  std::uniform_int_distribution<int> pick_{0, 1 << 20};
};

}  // namespace testing
