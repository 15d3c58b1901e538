#include "bdyn/bform.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <atomic>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include "bdyn/error.hpp"
#include "bdyn/parallel.hpp"

namespace bdyn {

namespace {

using Mat43 = Eigen::Matrix<double, 4, 3>;

struct GridPoint {
  int patch;
  Vec3 uvz;
};

std::vector<GridPoint> component_grid(const BComponent& c, int nu, int nv, const std::vector<double>& zs,
                                      double owned_margin) {
  std::vector<GridPoint> pts;
  for (int p = 0; p < c.chart.patch_count(); ++p)
    for (const Vec2& uv : c.chart.surface_grid(p, nu, nv, owned_margin))
      for (double z : zs) pts.push_back({p, {uv[0], uv[1], z}});
  return pts;
}

// Reduction keeping the worst value and where it occurred.
struct Worst {
  explicit Worst(bool minimize) : minimize(minimize), value(minimize ? INFINITY : -INFINITY) {}
  bool minimize;
  double value;
  Location where;
  std::mutex m;

  void offer(double v, const GridPoint& p) {
    std::lock_guard lock(m);
    const bool better = minimize ? v < value : v > value;
    // Ties resolve to the lexicographically first point so reports are reproducible.
    const bool tie = v == value && std::tie(p.patch, p.uvz) < std::tie(where.patch, where.uvz);
    if (better || tie) {
      value = v;
      where = {p.patch, p.uvz};
    }
  }
};

Mat43 system_matrix(const CoframeSample& s) {
  const auto& a = s.a;
  const auto& c = s.c;
  Mat43 A;
  A << a[0], a[1], a[2],  //
      0.0, -c[0], -c[1],  //
      c[0], 0.0, -c[2],   //
      c[1], c[2], 0.0;
  return A;
}

Mat43 system_derivative(const CoframeSample& s, int k) {
  Mat43 dA;
  dA << s.da[0][k], s.da[1][k], s.da[2][k],  //
      0.0, -s.dc[0][k], -s.dc[1][k],         //
      s.dc[0][k], 0.0, -s.dc[2][k],          //
      s.dc[1][k], s.dc[2][k], 0.0;
  return dA;
}

const Eigen::Vector4d kRhs(1.0, 0.0, 0.0, 0.0);

struct Solved {
  Eigen::Vector3d r;
  double residual;
};

Solved solve_system(const Mat43& A) {
  Eigen::ColPivHouseholderQR<Mat43> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) throw RankDeficient("Reeb system is rank deficient");
  Solved out;
  out.r = qr.solve(kRhs);
  out.residual = (A * out.r - kRhs).cwiseAbs().maxCoeff();
  if (!std::isfinite(out.residual) || out.residual > BReebField::kResidualLimit)
    throw RankDeficient("Reeb system residual " + std::to_string(out.residual) + " exceeds limit");
  return out;
}

double residual_of(const CoframeSample& s, const std::array<double, 3>& r) {
  const Eigen::Vector3d rv(r[0], r[1], r[2]);
  return (system_matrix(s) * rv - kRhs).cwiseAbs().maxCoeff();
}

ReebSampler default_sampler(const BComponent& c) {
  return [field = BReebField(c)](int patch, const Vec3& uvz) { return field.eval(patch, uvz); };
}

}  // namespace

BContactForm BContactForm::parse(const std::string& f, const std::string& beta_u, const std::string& beta_v,
                                 const std::string& beta_z, const std::vector<std::string>& vars) {
  return {Expression::parse(f, vars), Expression::parse(beta_u, vars), Expression::parse(beta_v, vars),
          Expression::parse(beta_z, vars)};
}

BContactForm south_from_north(const BContactForm& n) {
  const auto& vars = n.variables();
  const Expression theta = Expression::constant(std::numbers::pi, vars) - Expression::variable(0, vars);
  const Expression phi = -Expression::variable(1, vars);
  auto pull = [&](const Expression& e) { return e.substitute(0, theta).substitute(1, phi); };
  // d(theta) = -d(theta'), d(phi) = -d(phi').
  return {pull(n.f), -pull(n.beta_u), -pull(n.beta_v), pull(n.beta_z)};
}

CoframeSample sample_coframe(const BContactForm& form, const Vec3& x) {
  const std::span<const double> pt(x.data(), 3);
  const Jet2 f = form.f.eval_jet2(pt);
  const Jet2 bu = form.beta_u.eval_jet2(pt);
  const Jet2 bv = form.beta_v.eval_jet2(pt);
  const Jet2 bz = form.beta_z.eval_jet2(pt);
  const double z = x[2];

  CoframeSample s;
  s.a = {bu.value(), bv.value(), f.value() + z * bz.value()};
  s.c = {bv.d(0) - bu.d(1), f.d(0) + z * bz.d(0) - z * bu.d(2), f.d(1) + z * bz.d(1) - z * bv.d(2)};
  for (int k = 0; k < 3; ++k) {
    const double dz = k == 2 ? 1.0 : 0.0;
    s.da[0][k] = bu.d(k);
    s.da[1][k] = bv.d(k);
    s.da[2][k] = f.d(k) + dz * bz.value() + z * bz.d(k);
    s.dc[0][k] = bv.dd(0, k) - bu.dd(1, k);
    s.dc[1][k] = f.dd(0, k) + dz * bz.d(0) + z * bz.dd(0, k) - dz * bu.d(2) - z * bu.dd(2, k);
    s.dc[2][k] = f.dd(1, k) + dz * bz.d(1) + z * bz.dd(1, k) - dz * bv.d(2) - z * bv.dd(2, k);
  }
  s.volume = s.a[0] * s.c[2] - s.a[1] * s.c[1] + s.a[2] * s.c[0];
  return s;
}

ReebSample BReebField::eval(int patch, const Vec3& uvz) const {
  const CoframeSample s = sample_coframe(component_->form(patch), uvz);
  const Solved sol = solve_system(system_matrix(s));
  return {{sol.r[0], sol.r[1], sol.r[2]}, sol.residual};
}

ReebSample BReebField::eval_with_jacobian(int patch, const Vec3& uvz,
                                          std::array<std::array<double, 3>, 3>& jac) const {
  const CoframeSample s = sample_coframe(component_->form(patch), uvz);
  const Mat43 A = system_matrix(s);
  const Solved sol = solve_system(A);
  // Differentiating the normal equations A^T A r = A^T b.
  const Eigen::Matrix3d M = A.transpose() * A;
  const Eigen::Vector4d res = kRhs - A * sol.r;
  const auto lu = M.partialPivLu();
  for (int k = 0; k < 3; ++k) {
    const Mat43 dA = system_derivative(s, k);
    const Eigen::Vector3d dr = lu.solve(dA.transpose() * res - A.transpose() * (dA * sol.r));
    for (int i = 0; i < 3; ++i) jac[i][k] = dr[i];
  }
  return {{sol.r[0], sol.r[1], sol.r[2]}, sol.residual};
}

Expression exceptional_hamiltonian(const BContactForm& form) {
  const auto& vars = form.variables();
  return -form.f.substitute(2, Expression::constant(0.0, vars));
}

std::vector<Expression> exceptional_hamiltonian(const BComponent& c) {
  std::vector<Expression> out;
  for (const auto& form : c.forms) out.push_back(exceptional_hamiltonian(form));
  return out;
}

double symplectic_coefficient(const BContactForm& form, const Vec2& uv) {
  const std::array<double, 3> x{uv[0], uv[1], 0.0};
  const std::span<const double> pt(x.data(), 3);
  const Jet2 f = form.f.eval_jet2(pt);
  const Jet2 bu = form.beta_u.eval_jet2(pt);
  const Jet2 bv = form.beta_v.eval_jet2(pt);
  return f.value() * (bv.d(0) - bu.d(1)) + bu.value() * f.d(1) - bv.value() * f.d(0);
}

ZSymplecticData symplectic_on_Z(const BComponent& c, int nu, int nv) {
  ZSymplecticData out;
  out.H = exceptional_hamiltonian(c);
  const auto pts = component_grid(c, nu, nv, {0.0}, 0.1);
  Worst worst(true);
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    worst.offer(std::abs(symplectic_coefficient(c.form(p.patch), {p.uvz[0], p.uvz[1]})), p);
  });
  out.min_abs_w = worst.value;
  out.where = worst.where;
  if (!(worst.value >= 1e-8))
    throw Degenerate("symplectic coefficient on Z vanishes (min |w| = " + std::to_string(worst.value) + ")");
  return out;
}

ValidationReport contact_check(const BComponent& c, const ValidationGrid& g, double threshold) {
  if (g.nu < 2 || g.nv < 2 || g.nz < 2) throw PreconditionError("validation grid needs at least 2 points per axis");
  const auto pts = component_grid(c, g.nu, g.nv, c.chart.transverse_samples(g.nz), g.owned_margin);
  Worst worst(true);
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    worst.offer(std::abs(sample_coframe(c.form(p.patch), p.uvz).volume), p);
  });
  ValidationReport r;
  r.check = "contact";
  r.value = worst.value;
  r.threshold = threshold;
  r.where = worst.where;
  r.samples = pts.size();
  r.passed = worst.value >= threshold;
  r.detail = "min |V| over the validation grid";
  return r;
}

ValidationReport reeb_residuals(const BComponent& c, const ValidationGrid& g, double tolerance,
                                const ReebSampler& sampler) {
  const ReebSampler eval = sampler ? sampler : default_sampler(c);
  const auto pts = component_grid(c, g.nu, g.nv, c.chart.transverse_samples(g.nz), g.owned_margin);
  Worst worst(false);
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    const CoframeSample s = sample_coframe(c.form(p.patch), p.uvz);
    worst.offer(residual_of(s, eval(p.patch, p.uvz).r), p);
  });
  ValidationReport r;
  r.check = "reeb-residual";
  r.value = worst.value;
  r.threshold = tolerance;
  r.where = worst.where;
  r.samples = pts.size();
  r.passed = worst.value < tolerance;
  r.detail = "max of |alpha(R) - 1| and |i_R d(alpha)| per b-coframe component";
  return r;
}

ValidationReport verify_hamiltonian_identity(const BComponent& c, const ValidationGrid& g, double tolerance,
                                             const ReebSampler& sampler) {
  const ReebSampler eval = sampler ? sampler : default_sampler(c);
  const auto pts = component_grid(c, g.nu, g.nv, {0.0}, g.owned_margin);
  Worst worst(false);
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    const BContactForm& form = c.form(p.patch);
    const double w = symplectic_coefficient(form, {p.uvz[0], p.uvz[1]});
    const Jet2 f = form.f.eval_jet2(std::span<const double>(p.uvz.data(), 3));
    const auto r = eval(p.patch, p.uvz).r;
    // i_R (w du^dv) = -w Y_v du + w Y_u dv
    const double res = std::max(std::abs(-w * r[1] - f.d(0)), std::abs(w * r[0] - f.d(1)));
    worst.offer(res, p);
  });
  ValidationReport r;
  r.check = "hamiltonian-identity";
  r.value = worst.value;
  r.threshold = tolerance;
  r.where = worst.where;
  r.samples = pts.size();
  r.passed = worst.value < tolerance;
  r.detail = "max |i_R omega - d(f|Z)| componentwise";
  return r;
}

ValidationReport chart_consistency(const BComponent& c, const ValidationGrid& g, double tolerance) {
  ValidationReport r;
  r.check = "chart-consistency";
  r.threshold = tolerance;
  r.value = 0.0;
  if (c.chart.patch_count() < 2) {
    r.passed = true;
    r.detail = "single patch";
    return r;
  }
  const std::vector<double> zs{0.0, 0.5 * c.chart.epsilon(), -0.5 * c.chart.epsilon()};
  const auto pts = component_grid(c, std::max(2, g.nu / 2), std::max(2, g.nv / 2), zs, -1.0);
  const auto H = exceptional_hamiltonian(c);
  Worst worst(false);
  std::atomic<std::size_t> compared{0};
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    const Patch& pa = c.chart.patch(p.patch);
    const Vec2 uv{p.uvz[0], p.uvz[1]};
    const double area = pa.area_factor(uv);
    const double V = sample_coframe(c.form(p.patch), p.uvz).volume / area;
    const bool on_z = p.uvz[2] == 0.0;
    const double h = on_z ? H[static_cast<std::size_t>(p.patch)].eval(std::span<const double>(p.uvz.data(), 3)) : 0.0;
    const double w = on_z ? symplectic_coefficient(c.form(p.patch), uv) / area : 0.0;
    for (int q = 0; q < c.chart.patch_count(); ++q) {
      if (q == p.patch) continue;
      if (!c.chart.patch(q).covers(pa.embed(uv))) continue;
      const Vec2 uq = c.chart.transition(p.patch, q, uv);
      const Vec3 xq{uq[0], uq[1], p.uvz[2]};
      const double aq = c.chart.patch(q).area_factor(uq);
      double d = std::abs(sample_coframe(c.form(q), xq).volume / aq - V) / (1.0 + std::abs(V));
      if (on_z) {
        const double hq = H[static_cast<std::size_t>(q)].eval(std::span<const double>(xq.data(), 3));
        const double wq = symplectic_coefficient(c.form(q), uq) / aq;
        d = std::max({d, std::abs(hq - h) / (1.0 + std::abs(h)), std::abs(wq - w) / (1.0 + std::abs(w))});
      }
      compared.fetch_add(1);
      worst.offer(d, p);
    }
  });
  r.value = std::max(0.0, worst.value);
  r.where = worst.where;
  r.samples = compared.load();
  r.passed = r.samples > 0 && r.value < tolerance;
  r.detail = "relative disagreement of H, V/area and w/area across patch transitions";
  return r;
}

ValidationReport periodicity_check(const BComponent& c, int samples, double tolerance) {
  ValidationReport r;
  r.check = "periodicity";
  r.threshold = tolerance;
  if (c.chart.surface() != SurfaceKind::Torus) {
    r.passed = true;
    r.detail = "not a torus component";
    return r;
  }
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> transverse(-c.chart.epsilon(), c.chart.epsilon());
  const BContactForm& form = c.form(0);
  const std::array<const Expression*, 4> exprs{&form.f, &form.beta_u, &form.beta_v, &form.beta_z};
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec3 x{angle(rng), angle(rng), transverse(rng)};
    const Vec3 xu{x[0] + 2.0 * std::numbers::pi, x[1], x[2]};
    const Vec3 xv{x[0], x[1] + 2.0 * std::numbers::pi, x[2]};
    for (const Expression* e : exprs) {
      const double v0 = e->eval(std::span<const double>(x.data(), 3));
      const double d = std::max(std::abs(e->eval(std::span<const double>(xu.data(), 3)) - v0),
                                std::abs(e->eval(std::span<const double>(xv.data(), 3)) - v0));
      if (d > worst) {
        worst = d;
        r.where = {0, x};
      }
    }
  }
  r.value = worst;
  r.samples = static_cast<std::size_t>(samples);
  r.passed = worst < tolerance;
  r.detail = "max |e(u + 2pi, v) - e(u, v)|, |e(u, v + 2pi) - e(u, v)|";
  return r;
}

ValidationReport hamiltonian_range(const BComponent& c, const ValidationGrid& g, double minimum) {
  const auto H = exceptional_hamiltonian(c);
  const auto pts = component_grid(c, g.nu, g.nv, {0.0}, g.owned_margin);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : pts) {
    const double h = H[static_cast<std::size_t>(p.patch)].eval(std::span<const double>(p.uvz.data(), 3));
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  ValidationReport r;
  r.check = "hamiltonian-range";
  r.value = hi - lo;
  r.threshold = minimum;
  r.samples = pts.size();
  r.passed = r.value > minimum;
  r.detail = "max H - min H on Z";
  return r;
}

}  // namespace bdyn
