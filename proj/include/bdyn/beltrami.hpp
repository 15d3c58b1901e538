#pragma once
// Restriction to Z of a b-Beltrami field X (curl X = lambda X) for an
// asymptotically exact b-metric g = P*h + dz^2/z^2 on a torus component.
//
// With F = -X_z|_Z the tangential part of X on Z is
//   X_u = -F_v / (lambda sqrt(det h)),  X_v = F_u / (lambda sqrt(det h)),
// the Hamiltonian field of F for lambda times the area form of h.

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bdyn/bform.hpp"
#include "bdyn/chart.hpp"
#include "bdyn/critical.hpp"
#include "bdyn/expr.hpp"

namespace bdyn {

struct MetricSample {
  double h11 = 1.0, h12 = 0.0, h22 = 1.0;
  double det = 1.0;
  double sqrt_det = 1.0;
};

struct MetricOnZ {
  Expression h11, h12, h22;  // over (u, v)

  static MetricOnZ parse(const std::string& h11, const std::string& h12, const std::string& h22,
                         const std::vector<std::string>& vars);
  static MetricOnZ flat(const std::vector<std::string>& vars);

  // Throws Degenerate unless h is positive definite at uv.
  MetricSample at(const Vec2& uv) const;
};

struct BeltramiData {
  Expression F;  // over (u, v)
  MetricOnZ h;
  double lambda = 1.0;

  // Throws PreconditionError for lambda = 0.
  void validate() const;
};

// (X_u, X_v) on Z.
Vec2 tangential_components(const BeltramiData& data, const Vec2& uv);

// Throws Degenerate when h fails to be positive definite on the grid.
ValidationReport metric_check(const BeltramiData& data, int nu, int nv);

using TangentialSampler = std::function<Vec2(const Vec2& uv)>;

struct IdentityReport {
  ValidationReport report;
  int sigma0 = 0;  // global sign with i_X(lambda dA_h) = sigma0 dF
};

// Max |i_X(lambda dA_h) - sigma0 dF|. Throws SignInconsistency if a sample
// matches only with the opposite sign.
IdentityReport hamiltonian_identity_check(const BeltramiData& data, int nu, int nv, double tolerance = 1e-8,
                                          const TangentialSampler& sampler = {});

struct LaplaceResult {
  bool eigenfunction = false;
  double ratio = 0.0;   // mean of Delta_h F / F over the sampled points
  double spread = 0.0;  // max deviation from the mean, relative
  std::size_t samples = 0;
};

// Delta_h = div grad (non-positive spectrum).
double laplacian(const BeltramiData& data, const Vec2& uv);
LaplaceResult laplace_eigen_check(const BeltramiData& data, int nu, int nv, double tolerance = 1e-6);

// Max |div_h (X_u, X_v)| on the grid.
ValidationReport divergence_check(const BeltramiData& data, int nu, int nv, double tolerance = 1e-8);

struct BeltramiStability {
  Mat3 DX{};
  std::array<std::complex<double>, 3> spectrum{};
  std::complex<double> lambda_plus;  // closed form, lambda_minus = -lambda_plus
  double lambda_z = 0.0;             // closed form -F(p)
  double det_hess = 0.0;
  StabilityType type = StabilityType::NonHyperbolic1D;
  double max_relative_error = 0.0;
};

// Throws Degenerate (|det Hess F| < 1e-10), RegularValueViolation
// (|F(p)| < 1e-8) and SpectralMismatch.
BeltramiStability beltrami_stability_matrix(const BeltramiData& data, const Vec2& p, double tolerance = 1e-10);

// Off-Z extension of (X_u, X_v, X_z) over (u, v, z).
struct BeltramiExtension {
  Expression X_u, X_v, X_z;
};

// F, h and the tangential components rewritten over the chart variables (u, v, z).
Expression lift_to_chart(const Expression& e, const std::vector<std::string>& chart_vars);

// alpha = g(X, .) = X_z dz/z + h(X_tangential, .). Default extension is
// z-independent.
BContactForm contact_from_beltrami(const BeltramiData& data, const std::vector<std::string>& chart_vars,
                                   const std::optional<BeltramiExtension>& extension = std::nullopt);

// max |H_alpha - F| over the Z grid.
ValidationReport beltrami_roundtrip(const BeltramiData& data, const BContactForm& alpha, int nu, int nv,
                                    double tolerance = 1e-10);

// w = sigma0 lambda sqrt(det h) g(X, X) on Z, valid for Delta_h F = -lambda^2 F.
ValidationReport symplectic_rescaling_check(const BeltramiData& data, const BContactForm& alpha, int nu, int nv,
                                            double tolerance = 1e-8);

}  // namespace bdyn
