#pragma once
// Planar circular restricted three-body problem in McGehee coordinates,
// r = 2 / x^2, rotating frame with the primaries (1 - mu) at (mu, 0) and mu
// at (-(1 - mu), 0). Infinity is the invariant plane x = 0.
//
// With omega = -4 dx/x^3 ^ dPr + da ^ dPa and i_X omega = dH:
//   x' = -(x^3/4) H_Pr,  Pr' = (x^3/4) H_x,  a' = H_Pa,  Pa' = -H_a.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bdyn/error.hpp"
#include "bdyn/jet.hpp"
#include "bdyn/ode.hpp"

namespace bdyn {

using McState = std::array<double, 4>;  // (x, a, Pr, Pa)

struct McGeheeParams {
  double mu = 0.5;

  // Throws PreconditionError unless 0 < mu < 1.
  void validate() const;
};

inline constexpr double kCollisionGuard = 1e-12;

inline double value_of(double v) { return v; }
inline double value_of(const Jet2& v) { return v.value(); }

// Squared distances to the primaries scaled by x^4: D1 for 1 - mu, D2 for mu.
template <class T>
std::array<T, 2> mcgehee_denominators(const T& x, const T& a, double mu) {
  using std::cos;
  const T x2 = x * x;
  const T x4 = x2 * x2;
  const T c = cos(a);
  return {4.0 - 4.0 * mu * x2 * c + mu * mu * x4, 4.0 + 4.0 * (1.0 - mu) * x2 * c + (1.0 - mu) * (1.0 - mu) * x4};
}

// Works for double and Jet2. Throws CollisionError when a denominator is
// below kCollisionGuard.
template <class T>
T mcgehee_hamiltonian(const T& x, const T& a, const T& Pr, const T& Pa, double mu) {
  using std::sqrt;
  const auto D = mcgehee_denominators(x, a, mu);
  if (!(value_of(D[0]) > kCollisionGuard) || !(value_of(D[1]) > kCollisionGuard))
    throw CollisionError("collision with a primary");
  const T x2 = x * x;
  return 0.5 * (Pr * Pr) + 0.125 * (x2 * x2 * Pa * Pa) - Pa - (1.0 - mu) * x2 / sqrt(D[0]) - mu * x2 / sqrt(D[1]);
}

double mcgehee_hamiltonian(const McState& y, const McGeheeParams& p);

// Exact branch on x = 0: (0, -1, 0, 0).
McState mcgehee_field(const McState& y, const McGeheeParams& p);

struct McGeheeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double dt_out = 0.1;
};

struct McSample {
  double t = 0.0;
  McState y{};
  double H = 0.0;
};

struct McTrajectory {
  std::vector<McSample> samples;  // every dt_out, plus the end point
  OdeStats stats;
  double energy_drift = 0.0;  // max |H(t) - H(0)| over the samples
  double max_abs_x = 0.0;
};

// Integrates from t = 0 to t_end (either sign). Throws PreconditionError for
// x0 < 0 and CollisionError / StepUnderflow from the integrator.
McTrajectory integrate_mcgehee(const McState& y0, const McGeheeParams& p, double t_end,
                               const McGeheeOptions& options = {});

// Rotating-frame polar coordinates (r, alpha, Pr, Palpha) with
// omega = dr ^ dPr + dalpha ^ dPalpha.
using PolarState = std::array<double, 4>;

double polar_hamiltonian(const PolarState& q, const McGeheeParams& p);
PolarState polar_field(const PolarState& q, const McGeheeParams& p);
PolarState to_polar(const McState& y);    // x > 0
McState from_polar(const PolarState& q);  // r > 0

struct OracleComparison {
  double max_deviation = 0.0;  // max over samples and components, McGehee coordinates
  double at_time = 0.0;
  double max_r_deviation = 0.0;  // |2/x^2 - r|
  std::size_t samples = 0;
};

// Throws PreconditionError for x0 <= 0.
OracleComparison newtonian_oracle_compare(const McState& y0, const McGeheeParams& p, double t_end,
                                          const McGeheeOptions& options = {});

struct PeriodicityResult {
  double period = 2.0 * std::numbers::pi;
  double max_deviation = 0.0;  // angle compared mod 2 pi
  double max_abs_x = 0.0;
  bool passed = false;
};

PeriodicityResult infinity_periodicity(const McState& y0, const McGeheeParams& p, double tolerance = 1e-8,
                                       const McGeheeOptions& options = {});

// Forward to t_end then back to 0; max component deviation from y0.
double time_reversal_error(const McState& y0, const McGeheeParams& p, double t_end,
                           const McGeheeOptions& options = {});

// Header t,x,a,Pr,Pa,H.
void write_mcgehee_csv(const std::string& path, const McTrajectory& traj);

}  // namespace bdyn
