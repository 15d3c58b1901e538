#pragma once
// Critical points of the exceptional Hamiltonian, linear stability of the
// b-Reeb field at them, and the Morse-theoretic census bound.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "bdyn/bform.hpp"
#include "bdyn/chart.hpp"
#include "bdyn/expr.hpp"

namespace bdyn {

struct CriticalOptions {
  int scan_nu = 128;
  int scan_nv = 128;
  double newton_tol = 1e-10;
  int max_iterations = 50;
  double dedup_distance = 1e-6;
  double min_abs_det = 1e-10;
  double min_abs_f = 1e-8;
  double owned_margin = 0.15;
};

struct CriticalPoint {
  int component = 0;
  int patch = 0;
  Vec2 uv{};
  Vec3 point{};  // canonical point of Z
  double H = 0.0;
  std::array<double, 3> hess{};  // (H_uu, H_uv, H_vv) in patch coordinates
  int index = 0;                 // Morse index
  double f = 0.0;                // f(p) = -H(p)
  double grad_norm = 0.0;

  double det_hess() const { return hess[0] * hess[2] - hess[1] * hess[1]; }
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  std::vector<std::string> warnings;
  std::size_t candidates = 0;
  std::size_t dropped = 0;
};

// H holds one expression per patch over (u, v, z); it is evaluated at z = 0.
// Throws NotMorse and RegularValueViolation.
CriticalSearch find_critical_points(const TubularChart& chart, const std::vector<Expression>& H,
                                    const CriticalOptions& options = {}, int component = 0);

enum class StabilityType { Hyperbolic2D, NonHyperbolic1D };
std::string to_string(StabilityType type);

using Mat3 = std::array<std::array<double, 3>, 3>;

struct StabilityReport {
  std::complex<double> lambda_plus, lambda_minus;  // lambda_minus = -lambda_plus exactly
  double lambda_z = 0.0;
  StabilityType type = StabilityType::NonHyperbolic1D;
  bool transverse_unstable = false;  // sign of g(p)
  int manifold_dim = 1;
  double g = 0.0;
  double w = 0.0;
  double det_hess = 0.0;
  Mat3 DR{};                                    // in (u, v, z)
  std::array<std::complex<double>, 3> spectrum{};
  Vec3 transverse_vector{};                    // eigenvector for lambda_z, unit length
  Vec3 tangent_vector{};                       // in-Z eigenvector spanning the 2-d manifold
  std::complex<double> closed_lambda_plus;     // sqrt(-det Hess H / w^2)
  double closed_lambda_z = 0.0;                // 1 / f(p)
  double max_relative_error = 0.0;
};

// Throws SpectralMismatch if the DR(p) spectrum deviates from the closed
// forms by more than `tolerance` relative.
StabilityReport stability_at(const CriticalPoint& p, const BReebField& reeb, double tolerance = 1e-6);

struct ComponentCensus {
  SurfaceKind surface = SurfaceKind::Torus;
  std::array<int, 3> betti{};
  std::array<int, 3> counts{};
  int euler_characteristic = 0;
  bool euler_consistent = false;
};

struct CensusBound {
  int N = 0;
  std::vector<ComponentCensus> components;
  std::array<int, 3> counts{};
  bool infinite = false;
  int lower_bound = 0;        // 2N
  int expected_weighted = 0;  // 4N when no saddles exist, 0 otherwise

  std::string verdict() const { return infinite ? "infinite" : "at-least-2N"; }
};

struct ComponentPoints {
  const TubularChart* chart = nullptr;
  const std::vector<CriticalPoint>* points = nullptr;
};

// Throws MorseInequalityViolation; PreconditionError if a component has fewer
// than two critical points.
CensusBound census_bound(const std::vector<ComponentPoints>& components);

}  // namespace bdyn
