#pragma once
// b-contact forms alpha = f dz/z + beta_u du + beta_v dv + beta_z dz on a
// tubular chart, their b-Reeb fields and the induced data on Z.
//
// Everything is expressed in the b-coframe {du, dv, dz/z} with dual frame
// {d/du, d/dv, z d/dz}. In that coframe alpha has coefficients
//   a = (beta_u, beta_v, f + z beta_z)
// and d(alpha) = c_uv du^dv + c_us du^dz/z + c_vs dv^dz/z with
//   c_uv = d_u a_v - d_v a_u,  c_us = d_u a_s - z d_z a_u,  c_vs = d_v a_s - z d_z a_v.
// The b-volume coefficient of alpha^d(alpha) in du^dv^dz/z is
//   V = a_u c_vs - a_v c_us + a_s c_uv.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "bdyn/chart.hpp"
#include "bdyn/expr.hpp"

namespace bdyn {

struct BContactForm {
  Expression f, beta_u, beta_v, beta_z;  // over the patch variables (u, v, z)

  static BContactForm parse(const std::string& f, const std::string& beta_u, const std::string& beta_v,
                            const std::string& beta_z, const std::vector<std::string>& vars);
  const std::vector<std::string>& variables() const { return f.variables(); }
};

// Pulls a form on the north angular patch back to the south angular patch
// through theta = pi - theta', phi = -phi'.
BContactForm south_from_north(const BContactForm& north);

// Coframe data at one point, with first derivatives in (u, v, z).
struct CoframeSample {
  std::array<double, 3> a{};                   // (a_u, a_v, a_s)
  std::array<double, 3> c{};                   // (c_uv, c_us, c_vs)
  std::array<std::array<double, 3>, 3> da{};   // da[i][k] = d a_i / d x_k
  std::array<std::array<double, 3>, 3> dc{};   // dc[i][k] = d c_i / d x_k
  double volume = 0.0;
};

CoframeSample sample_coframe(const BContactForm& form, const Vec3& uvz);

// One connected component of Z with its atlas and one form per patch.
struct BComponent {
  TubularChart chart;
  std::vector<BContactForm> forms;  // indexed like chart.patches()

  const BContactForm& form(int patch) const { return forms.at(static_cast<std::size_t>(patch)); }
};

struct ReebSample {
  std::array<double, 3> r{};  // (Y_u, Y_v, g)
  double residual = 0.0;      // max |A r - b|
};

// Point where a check attained its worst value.
struct Location {
  int patch = 0;
  Vec3 uvz{};
};

struct ValidationReport {
  std::string check;
  bool passed = false;
  double value = 0.0;      // worst value found (min for lower bounds, max for residuals)
  double threshold = 0.0;
  Location where;
  std::size_t samples = 0;
  std::string detail;
};

// Pointwise least-squares solve of alpha(R) = 1, i_R d(alpha) = 0.
class BReebField {
 public:
  static constexpr double kResidualLimit = 1e-8;

  explicit BReebField(const BComponent& component) : component_(&component) {}

  // Throws RankDeficient when the system is singular or inconsistent.
  ReebSample eval(int patch, const Vec3& uvz) const;
  // Value and Jacobian d(Y_u, Y_v, g)/d(u, v, z); jac[i][k].
  ReebSample eval_with_jacobian(int patch, const Vec3& uvz, std::array<std::array<double, 3>, 3>& jac) const;

  const BComponent& component() const { return *component_; }

 private:
  const BComponent* component_;
};

using ReebSampler = std::function<ReebSample(int patch, const Vec3& uvz)>;

// H = -f|_{z=0}, one expression per patch (still over (u, v, z)).
std::vector<Expression> exceptional_hamiltonian(const BComponent& component);
Expression exceptional_hamiltonian(const BContactForm& form);

// Coefficient w of omega = f d(beta) + beta ^ df restricted to Z, in du^dv.
double symplectic_coefficient(const BContactForm& form, const Vec2& uv);

struct ZSymplecticData {
  std::vector<Expression> H;
  double min_abs_w = 0.0;
  Location where;
};

// Throws Degenerate when |w| < 1e-8 somewhere on the Z grid.
ZSymplecticData symplectic_on_Z(const BComponent& component, int nu, int nv);

struct ValidationGrid {
  int nu = 64, nv = 64, nz = 9;
  // Owned regions are enlarged by this margin so patch seams are covered twice.
  double owned_margin = 0.1;
};

ValidationReport contact_check(const BComponent& component, const ValidationGrid& grid, double threshold = 1e-8);
// Max of |alpha(R) - 1| and |i_R d(alpha)| over the grid.
ValidationReport reeb_residuals(const BComponent& component, const ValidationGrid& grid, double tolerance = 1e-9,
                                const ReebSampler& sampler = {});
// Max over the Z grid of |i_R omega - df|, componentwise.
ValidationReport verify_hamiltonian_identity(const BComponent& component, const ValidationGrid& grid,
                                             double tolerance = 1e-9, const ReebSampler& sampler = {});
// H, V/area and w/area computed in different patches agree on overlaps.
ValidationReport chart_consistency(const BComponent& component, const ValidationGrid& grid, double tolerance = 1e-8);
// All four expressions are 2pi-periodic in u and v (torus components only).
ValidationReport periodicity_check(const BComponent& component, int samples = 16, double tolerance = 1e-9);
// max H - min H over Z.
ValidationReport hamiltonian_range(const BComponent& component, const ValidationGrid& grid, double minimum = 0.1);

}  // namespace bdyn
