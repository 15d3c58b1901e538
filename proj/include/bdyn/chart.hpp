#pragma once
// Tubular charts of a critical surface Z.
//
// A torus component is a single doubly periodic patch (u, v) in [0, 2pi)^2.
// A sphere component is a two-chart atlas (north- and south-centred) in
// angular coordinates with transition theta' = pi - theta, phi' = -phi. Each
// angular chart is singular at its own pole, so every hemisphere also has a
// Cartesian pole patch (u, v) = (sin theta cos phi, sin theta sin phi),
// the orthographic projection. The transverse coordinate z is shared by all
// patches of a component.

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace bdyn {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

enum class SurfaceKind { Torus, Sphere };
enum class PatchKind { Torus, NorthAngular, SouthAngular, NorthPole, SouthPole };

std::string to_string(SurfaceKind kind);
std::string to_string(PatchKind kind);

struct Patch {
  PatchKind kind = PatchKind::Torus;
  std::vector<std::string> vars;  // {u-name, v-name, z-name}
  double pole_exclusion = 0.05;

  bool periodic_u() const;
  bool periodic_v() const;
  // Coordinates where expressions of this patch may be evaluated.
  bool valid(const Vec2& uv) const;
  // Wraps periodic coordinates into [0, 2pi).
  Vec2 normalize(const Vec2& uv) const;
  // Canonical point of Z: (u, v, 0) on the torus, a unit vector on the sphere.
  Vec3 embed(const Vec2& uv) const;
  Vec2 coords(const Vec3& point) const;
  // Whether a point of Z lies in this patch's valid domain. Unlike valid(),
  // this distinguishes the hemispheres that share pole coordinates.
  bool covers(const Vec3& point) const;
  // Positive factor a with (area form) = a du ^ dv. Unit on the torus, the
  // round area element on the sphere.
  double area_factor(const Vec2& uv) const;
};

// Structured sample grid over a patch; mask marks points inside the region.
struct PatchGrid {
  std::vector<double> us, vs;
  bool periodic_u = false;
  bool periodic_v = false;
  std::vector<char> mask;  // row-major, index i * vs.size() + j

  bool inside(std::size_t i, std::size_t j) const { return mask[i * vs.size() + j] != 0; }
};

struct GridSpec {
  int nu = 64;
  int nv = 64;
  int nz = 9;
};

class TubularChart {
 public:
  static constexpr double kDefaultPoleExclusion = 0.05;
  // Angular patches extend this far past the equator into the other hemisphere.
  static constexpr double kAngularMargin = 0.7853981633974483;  // pi/4
  // Pole patches cover theta <= pi/3 of their hemisphere.
  static constexpr double kPoleRadius = 1.0471975511965976;  // pi/3

  static TubularChart torus(double epsilon, std::vector<std::string> vars = {"u", "v", "z"});
  static TubularChart sphere(double epsilon, double pole_exclusion = kDefaultPoleExclusion,
                             std::vector<std::string> angular_vars = {"theta", "phi", "z"},
                             std::vector<std::string> pole_vars = {"u", "v", "z"});

  SurfaceKind surface() const { return surface_; }
  double epsilon() const { return epsilon_; }
  double pole_exclusion() const { return pole_exclusion_; }
  const std::vector<Patch>& patches() const { return patches_; }
  const Patch& patch(int i) const { return patches_.at(static_cast<std::size_t>(i)); }
  int patch_count() const { return static_cast<int>(patches_.size()); }
  int find(PatchKind kind) const;

  // Patch that owns a point of Z; owned regions tile Z without overlap.
  int owner(const Vec3& point) const;
  bool owns(int patch, const Vec2& uv) const;
  // Moves (patch, uv) to the owning patch when uv is not owned by `patch`.
  std::pair<int, Vec2> reproject(int patch, const Vec2& uv) const;
  // Coordinates of the same point of Z in another patch.
  Vec2 transition(int from, int to, const Vec2& uv) const;
  // Distance on Z: flat periodic on the torus, chordal on the unit sphere.
  double distance(int pa, const Vec2& a, int pb, const Vec2& b) const;

  int betti(int k) const;
  int euler_characteristic() const { return betti(0) - betti(1) + betti(2); }

  // Sample points over a patch's valid domain (`owned_margin` < 0) or over its
  // owned region enlarged by `owned_margin` radians.
  PatchGrid patch_grid(int patch, int nu, int nv, double owned_margin = -1.0) const;
  std::vector<Vec2> surface_grid(int patch, int nu, int nv, double owned_margin = -1.0) const;
  // Transverse samples: 0 and +-eps * 2^-k.
  std::vector<double> transverse_samples(int nz) const;

 private:
  SurfaceKind surface_ = SurfaceKind::Torus;
  double epsilon_ = 0.5;
  double pole_exclusion_ = kDefaultPoleExclusion;
  std::vector<Patch> patches_;
};

}  // namespace bdyn
