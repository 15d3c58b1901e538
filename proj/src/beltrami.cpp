#include "bdyn/beltrami.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "bdyn/error.hpp"

namespace bdyn {

namespace {

std::vector<Vec2> torus_grid(int nu, int nv) {
  if (nu < 2 || nv < 2) throw PreconditionError("grid needs at least 2 points per axis");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv));
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      pts.push_back({2.0 * std::numbers::pi * i / nu, 2.0 * std::numbers::pi * j / nv});
  return pts;
}

Jet2 jet(const Expression& e, const Vec2& uv) { return e.eval_jet2(std::span<const double>(uv.data(), 2)); }

struct MetricJet {
  Jet2 h11, h12, h22, sq;
};

MetricJet metric_jet(const MetricOnZ& h, const Vec2& uv) {
  MetricJet m{jet(h.h11, uv), jet(h.h12, uv), jet(h.h22, uv), {}};
  const Jet2 det = m.h11 * m.h22 - m.h12 * m.h12;
  if (!(m.h11.value() > 0.0) || !(det.value() > 0.0)) throw Degenerate("metric is not positive definite");
  m.sq = sqrt(det);
  return m;
}

}  // namespace

MetricOnZ MetricOnZ::parse(const std::string& h11, const std::string& h12, const std::string& h22,
                           const std::vector<std::string>& vars) {
  return {Expression::parse(h11, vars), Expression::parse(h12, vars), Expression::parse(h22, vars)};
}

MetricOnZ MetricOnZ::flat(const std::vector<std::string>& vars) {
  return {Expression::constant(1.0, vars), Expression::constant(0.0, vars), Expression::constant(1.0, vars)};
}

MetricSample MetricOnZ::at(const Vec2& uv) const {
  const std::span<const double> pt(uv.data(), 2);
  MetricSample s;
  s.h11 = h11.eval(pt);
  s.h12 = h12.eval(pt);
  s.h22 = h22.eval(pt);
  s.det = s.h11 * s.h22 - s.h12 * s.h12;
  if (!(s.h11 > 0.0) || !(s.det > 0.0)) throw Degenerate("metric is not positive definite");
  s.sqrt_det = std::sqrt(s.det);
  return s;
}

void BeltramiData::validate() const {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw PreconditionError("Beltrami eigenvalue lambda must be nonzero");
}

Vec2 tangential_components(const BeltramiData& d, const Vec2& uv) {
  d.validate();
  const Jet2 F = jet(d.F, uv);
  const double c = 1.0 / (d.lambda * d.h.at(uv).sqrt_det);
  return {-c * F.d(1), c * F.d(0)};
}

ValidationReport metric_check(const BeltramiData& d, int nu, int nv) {
  ValidationReport r;
  r.check = "metric-positive";
  r.value = INFINITY;
  for (const Vec2& uv : torus_grid(nu, nv)) {
    const MetricSample m = d.h.at(uv);
    const double lo = std::min(m.h11, m.det);
    if (lo < r.value) {
      r.value = lo;
      r.where = {0, {uv[0], uv[1], 0.0}};
    }
    ++r.samples;
  }
  r.passed = r.value > 0.0;
  r.detail = "min of h11 and det h";
  return r;
}

IdentityReport hamiltonian_identity_check(const BeltramiData& d, int nu, int nv, double tolerance,
                                          const TangentialSampler& sampler) {
  d.validate();
  IdentityReport out;
  ValidationReport& r = out.report;
  r.check = "beltrami-hamiltonian-identity";
  r.threshold = tolerance;
  r.value = 0.0;
  for (const Vec2& uv : torus_grid(nu, nv)) {
    const Jet2 F = jet(d.F, uv);
    const Vec2 X = sampler ? sampler(uv) : tangential_components(d, uv);
    const double area = d.lambda * d.h.at(uv).sqrt_det;
    // i_X(area du^dv) = -area X_v du + area X_u dv
    const std::array<double, 2> lhs{-area * X[1], area * X[0]};
    const std::array<double, 2> dF{F.d(0), F.d(1)};
    ++r.samples;
    const double scale = std::hypot(dF[0], dF[1]);
    if (out.sigma0 == 0) {
      if (scale < 1e-8) continue;
      out.sigma0 = lhs[0] * dF[0] + lhs[1] * dF[1] >= 0.0 ? 1 : -1;
    }
    const double res = std::max(std::abs(lhs[0] - out.sigma0 * dF[0]), std::abs(lhs[1] - out.sigma0 * dF[1]));
    const double flipped = std::max(std::abs(lhs[0] + out.sigma0 * dF[0]), std::abs(lhs[1] + out.sigma0 * dF[1]));
    if (res >= tolerance && flipped < tolerance && scale >= 1e-8)
      throw SignInconsistency("identity holds only with the opposite sign at (" + std::to_string(uv[0]) + ", " +
                              std::to_string(uv[1]) + ")");
    if (res > r.value) {
      r.value = res;
      r.where = {0, {uv[0], uv[1], 0.0}};
    }
  }
  if (out.sigma0 == 0) out.sigma0 = 1;  // dF vanishes everywhere; both sides are zero
  r.passed = r.value < tolerance;
  r.detail = "max |i_X(lambda dA_h) - sigma0 dF| with sigma0 = " + std::to_string(out.sigma0);
  return out;
}

double laplacian(const BeltramiData& d, const Vec2& uv) {
  const Jet2 F = jet(d.F, uv);
  const MetricJet m = metric_jet(d.h, uv);
  const Jet2 G11 = m.h22 / m.sq, G12 = -m.h12 / m.sq, G22 = m.h11 / m.sq;
  const double div = G11.d(0) * F.d(0) + G11.value() * F.dd(0, 0) + G12.d(0) * F.d(1) + G12.value() * F.dd(0, 1) +
                     G12.d(1) * F.d(0) + G12.value() * F.dd(0, 1) + G22.d(1) * F.d(1) + G22.value() * F.dd(1, 1);
  return div / m.sq.value();
}

LaplaceResult laplace_eigen_check(const BeltramiData& d, int nu, int nv, double tolerance) {
  const auto pts = torus_grid(nu, nv);
  double fmax = 0.0;
  for (const Vec2& uv : pts) fmax = std::max(fmax, std::abs(d.F.eval(std::span<const double>(uv.data(), 2))));
  LaplaceResult out;
  if (fmax == 0.0) return out;
  std::vector<double> ratios;
  for (const Vec2& uv : pts) {
    const double f = d.F.eval(std::span<const double>(uv.data(), 2));
    if (std::abs(f) <= 0.1 * fmax) continue;
    ratios.push_back(laplacian(d, uv) / f);
  }
  out.samples = ratios.size();
  if (ratios.empty()) return out;
  double mean = 0.0;
  for (double x : ratios) mean += x;
  mean /= static_cast<double>(ratios.size());
  double spread = 0.0;
  for (double x : ratios) spread = std::max(spread, std::abs(x - mean));
  const double scale = std::abs(mean) > 1e-12 ? std::abs(mean) : 1.0;
  out.ratio = mean;
  out.spread = spread / scale;
  out.eigenfunction = out.spread < tolerance;
  return out;
}

ValidationReport divergence_check(const BeltramiData& d, int nu, int nv, double tolerance) {
  d.validate();
  ValidationReport r;
  r.check = "beltrami-divergence";
  r.threshold = tolerance;
  r.value = 0.0;
  for (const Vec2& uv : torus_grid(nu, nv)) {
    const Jet2 F = jet(d.F, uv);
    const MetricJet m = metric_jet(d.h, uv);
    const double sq = m.sq.value(), l = d.lambda;
    const double Xu = -F.d(1) / (l * sq), Xv = F.d(0) / (l * sq);
    const double dXu_du = -F.dd(1, 0) / (l * sq) + F.d(1) * m.sq.d(0) / (l * sq * sq);
    const double dXv_dv = F.dd(0, 1) / (l * sq) - F.d(0) * m.sq.d(1) / (l * sq * sq);
    const double div = (m.sq.d(0) * Xu + sq * dXu_du + m.sq.d(1) * Xv + sq * dXv_dv) / sq;
    ++r.samples;
    if (std::abs(div) > r.value) {
      r.value = std::abs(div);
      r.where = {0, {uv[0], uv[1], 0.0}};
    }
  }
  r.passed = r.value < tolerance;
  r.detail = "max |div_h X| on Z";
  return r;
}

BeltramiStability beltrami_stability_matrix(const BeltramiData& d, const Vec2& p, double tolerance) {
  d.validate();
  const Jet2 F = jet(d.F, p);
  if (std::hypot(F.d(0), F.d(1)) > 1e-8) throw PreconditionError("point is not a critical point of F");
  BeltramiStability s;
  s.det_hess = F.dd(0, 0) * F.dd(1, 1) - F.dd(0, 1) * F.dd(0, 1);
  if (std::abs(s.det_hess) < 1e-10) throw Degenerate("Hessian of F is degenerate at the critical point");
  if (std::abs(F.value()) < 1e-8) throw RegularValueViolation("F vanishes at the critical point");
  const double scale = d.lambda * d.h.at(p).sqrt_det;
  const double c = 1.0 / scale;
  s.DX = {{{-c * F.dd(0, 1), -c * F.dd(1, 1), 0.0}, {c * F.dd(0, 0), c * F.dd(0, 1), 0.0}, {0.0, 0.0, -F.value()}}};
  s.lambda_plus = std::sqrt(std::complex<double>(-s.det_hess, 0.0)) / scale;
  s.lambda_z = -F.value();
  s.type = s.det_hess < 0.0 ? StabilityType::Hyperbolic2D : StabilityType::NonHyperbolic1D;

  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) M(i, k) = s.DX[i][k];
  Eigen::EigenSolver<Eigen::Matrix3d> es(M, false);
  std::array<std::complex<double>, 3> spec{es.eigenvalues()[0], es.eigenvalues()[1], es.eigenvalues()[2]};
  std::sort(spec.begin(), spec.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  s.spectrum = spec;
  const std::array<std::complex<double>, 3> closed{s.lambda_plus, -s.lambda_plus, {s.lambda_z, 0.0}};
  std::array<bool, 3> used{};
  for (const auto& cl : closed) {
    std::size_t best = 0;
    double err = INFINITY;
    for (std::size_t k = 0; k < 3; ++k) {
      if (used[k]) continue;
      const double e = std::abs(spec[k] - cl) / std::abs(cl);
      if (e < err) {
        err = e;
        best = k;
      }
    }
    used[best] = true;
    s.max_relative_error = std::max(s.max_relative_error, err);
  }
  if (!(s.max_relative_error <= tolerance))
    throw SpectralMismatch("DX(p) spectrum deviates from the closed forms by " +
                           std::to_string(s.max_relative_error) + " relative");
  return s;
}

Expression lift_to_chart(const Expression& e, const std::vector<std::string>& chart_vars) {
  return Expression::parse(e.to_string(), chart_vars);
}

BContactForm contact_from_beltrami(const BeltramiData& d, const std::vector<std::string>& vars,
                                   const std::optional<BeltramiExtension>& ext) {
  d.validate();
  const Expression h11 = lift_to_chart(d.h.h11, vars), h12 = lift_to_chart(d.h.h12, vars),
                   h22 = lift_to_chart(d.h.h22, vars);
  Expression Xu, Xv, Xz;
  if (ext) {
    Xu = ext->X_u;
    Xv = ext->X_v;
    Xz = ext->X_z;
  } else {
    const Expression F = lift_to_chart(d.F, vars);
    const Expression scale = Expression::constant(d.lambda, vars) * sqrt(h11 * h22 - h12 * h12);
    Xu = -F.derivative(1) / scale;
    Xv = F.derivative(0) / scale;
    Xz = -F;
  }
  return {Xz, h11 * Xu + h12 * Xv, h12 * Xu + h22 * Xv, Expression::constant(0.0, vars)};
}

ValidationReport beltrami_roundtrip(const BeltramiData& d, const BContactForm& alpha, int nu, int nv,
                                    double tolerance) {
  const Expression H = exceptional_hamiltonian(alpha);
  ValidationReport r;
  r.check = "beltrami-roundtrip";
  r.threshold = tolerance;
  r.value = 0.0;
  for (const Vec2& uv : torus_grid(nu, nv)) {
    const std::array<double, 3> x{uv[0], uv[1], 0.0};
    const double e = std::abs(H.eval(std::span<const double>(x.data(), 3)) - d.F.eval(std::span<const double>(uv.data(), 2)));
    ++r.samples;
    if (e > r.value) {
      r.value = e;
      r.where = {0, x};
    }
  }
  r.passed = r.value < tolerance;
  r.detail = "max |exceptional Hamiltonian of alpha - F|";
  return r;
}

ValidationReport symplectic_rescaling_check(const BeltramiData& d, const BContactForm& alpha, int nu, int nv,
                                            double tolerance) {
  ValidationReport r;
  r.check = "beltrami-symplectic-rescaling";
  r.threshold = tolerance;
  r.value = 0.0;
  int sigma = 0;
  bool consistent = true;
  for (const Vec2& uv : torus_grid(nu, nv)) {
    const std::array<double, 3> x{uv[0], uv[1], 0.0};
    const double w = symplectic_coefficient(alpha, uv);
    const MetricSample m = d.h.at(uv);
    const Vec2 X = tangential_components(d, uv);
    const double Xz = alpha.f.eval(std::span<const double>(x.data(), 3));
    const double norm2 = m.h11 * X[0] * X[0] + 2.0 * m.h12 * X[0] * X[1] + m.h22 * X[1] * X[1] + Xz * Xz;
    const double target = d.lambda * m.sqrt_det * norm2;
    if (sigma == 0 && std::abs(target) > 1e-8) sigma = w * target >= 0.0 ? 1 : -1;
    if (sigma == 0) continue;
    const double e = std::abs(w - sigma * target);
    if (e >= tolerance && std::abs(w + sigma * target) < tolerance) consistent = false;
    ++r.samples;
    if (e > r.value) {
      r.value = e;
      r.where = {0, x};
    }
  }
  r.passed = consistent && r.value < tolerance;
  r.detail = "max |w - sigma0 lambda sqrt(det h) g(X, X)| on Z, sigma0 = " + std::to_string(sigma == 0 ? 1 : sigma) +
             (consistent ? "" : " (sign varies)");
  return r;
}

}  // namespace bdyn
