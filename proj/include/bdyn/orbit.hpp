#pragma once
// b-Reeb flow in log-regularized transverse coordinates z = sigma * exp(s).
//
// In (u, v, s) the b-field z d/dz becomes d/ds, so the flow is smooth and Z
// sits at s = -inf. Orbits on Z itself are integrated with the on_z flag,
// which freezes s and evaluates the field at z = 0.

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bdyn/bform.hpp"
#include "bdyn/critical.hpp"
#include "bdyn/ode.hpp"

namespace bdyn {

struct RegState {
  int patch = 0;
  Vec2 uv{};
  double s = 0.0;
  int sigma = 1;  // side of Z
  bool on_z = false;

  double z() const;
};

class RegularizedField {
 public:
  explicit RegularizedField(const BComponent& component) : reeb_(component) {}

  // (du/dt, dv/dt, ds/dt) = (Y_u, Y_v, g) at z = sigma exp(s); ds/dt = 0 on Z.
  std::array<double, 3> operator()(int patch, const std::array<double, 3>& uvs, int sigma, bool on_z) const;

  const BComponent& component() const { return reeb_.component(); }
  const BReebField& reeb() const { return reeb_; }

 private:
  BReebField reeb_;
};

struct OrbitSample {
  double t = 0.0;
  int patch = 0;
  std::array<double, 3> y{};     // (u, v, s)
  std::array<double, 3> dydt{};
};

enum class Verdict { LimitsTo, LeftNeighborhood, Periodic, Undecided };
std::string to_string(Verdict v);

struct OrbitOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_max = 200.0;
  double limit_tol = 1e-5;
  std::size_t window = 8;
  // log(cutoff * epsilon) is the transverse level where convergence is
  // declared; stopping one unit of s below it keeps |z| under limit_tol / 2.
  double cutoff = 1e-5;
};

struct Trajectory {
  int sigma = 1;
  bool on_z = false;
  double direction = 1.0;
  std::vector<OrbitSample> samples;
  OdeStats stats;
  bool left = false;       // crossed s = log(epsilon)
  bool converged = false;  // stop predicate fired
  std::string error;       // integrator failure, if any
};

// Stops at the tube boundary, or once s < s_cut - 1 within limit_tol / 2 of
// one of `targets`. Integrator errors are recorded in Trajectory::error.
Trajectory integrate_orbit(const RegularizedField& field, const RegState& start, double t_span,
                           const OrbitOptions& options, const std::vector<CriticalPoint>& targets = {});

struct LimitResult {
  Verdict verdict = Verdict::Undecided;
  int target = -1;  // index into the critical-point list
  double distance = std::numeric_limits<double>::infinity();
  double return_time = 0.0;  // period estimate for periodic verdicts
};

LimitResult detect_limit(const Trajectory& traj, const TubularChart& chart, const std::vector<CriticalPoint>& cps,
                         const OrbitOptions& options);

enum class OrbitKind { OneWay, SingularPeriodic, NotEscape };
std::string to_string(OrbitKind k);

struct EscapeOrbit {
  int source = -1;  // critical point whose manifold was seeded
  int seed_index = 0;
  int patch = 0;
  Vec3 seed{};      // (u, v, z)
  int sigma = 1;
  Trajectory forward, backward;
  LimitResult forward_limit, backward_limit;
  OrbitKind kind = OrbitKind::NotEscape;
  int multiplicity = 0;
  bool distinct = true;
  // Re-integration at 10x tighter tolerances.
  bool robust = true;
  double robust_shift = 0.0;
};

struct TraceOptions {
  OrbitOptions orbit;
  int fan_seeds = 16;
  double offset = 1e-4;
};

std::vector<Vec3> manifold_seeds(const CriticalPoint& p, const StabilityReport& report, int fan_seeds,
                                 double offset);

// Seeds the transverse invariant manifold of cps[source] and classifies each
// seed's orbit. Throws PreconditionError for a non-positive offset.
std::vector<EscapeOrbit> trace_invariant_manifolds(const RegularizedField& field,
                                                   const std::vector<CriticalPoint>& cps, int source,
                                                   const StabilityReport& report, const TraceOptions& options);

OrbitKind classify(const LimitResult& forward, const LimitResult& backward);

// Re-runs every limits-to semiorbit with 10x tighter tolerances and records
// whether the same limit point is reached within `shift_tol`.
void check_robustness(const RegularizedField& field, const std::vector<CriticalPoint>& cps, EscapeOrbit& orbit,
                      const OrbitOptions& options, double shift_tol = 1e-5);

struct EscapeCensus {
  int orbits = 0;
  int escape = 0;
  int distinct = 0;
  int one_way = 0;
  int singular_periodic = 0;
  int weighted = 0;
  int witnesses = 0;  // fan orbits limiting to their own saddle
  int fan_orbits = 0;
  bool infinite = false;
  int lower_bound = 0;
  int expected_weighted = 0;
  bool agree = false;
};

// Marks orbits identified with an earlier one (same side, seed on its
// trajectory within `match_tol`) as not distinct.
void mark_distinct(const TubularChart& chart, std::vector<EscapeOrbit>& orbits, double match_tol = 1e-6);

EscapeCensus escape_census(const std::vector<std::vector<EscapeOrbit>>& per_component,
                           const std::vector<std::vector<CriticalPoint>>& cps, const CensusBound& bound);

// CSV with header t,u,v,s,z,side; backward samples first, time ascending.
// Torus rows use (u, v); sphere rows use north-angular (theta, phi).
void write_orbit_csv(const std::string& path, const TubularChart& chart, const EscapeOrbit& orbit);
void write_trajectory_csv(const std::string& path, const TubularChart& chart,
                          const std::vector<const Trajectory*>& parts);

}  // namespace bdyn
