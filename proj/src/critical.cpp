#include "bdyn/critical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "bdyn/error.hpp"
#include "bdyn/parallel.hpp"

namespace bdyn {

namespace {

struct ZJet {
  double value;
  Eigen::Vector2d grad;
  Eigen::Matrix2d hess;
};

ZJet jet_on_z(const Expression& H, const Vec2& uv) {
  const std::array<double, 3> x{uv[0], uv[1], 0.0};
  const Jet2 j = H.eval_jet2(std::span<const double>(x.data(), 3));
  ZJet out;
  out.value = j.value();
  out.grad << j.d(0), j.d(1);
  out.hess << j.dd(0, 0), j.dd(0, 1), j.dd(0, 1), j.dd(1, 1);
  return out;
}

struct NewtonResult {
  int patch;
  Vec2 uv;
  ZJet jet;
};

std::string describe(const TubularChart& chart, int patch, const Vec2& uv) {
  std::ostringstream os;
  os << to_string(chart.patch(patch).kind) << " (" << uv[0] << ", " << uv[1] << ")";
  return os.str();
}

// Newton iteration on grad H; hops to the owning patch whenever the iterate
// leaves the patch it is in. Returns nothing on failure.
std::optional<NewtonResult> newton(const TubularChart& chart, const std::vector<Expression>& H, int patch, Vec2 uv,
                                   const CriticalOptions& opt) {
  constexpr double kMaxStep = 0.5;
  try {
    for (int it = 0; it <= opt.max_iterations; ++it) {
      if (!chart.owns(patch, uv)) {
        auto [q, uq] = chart.reproject(patch, uv);
        if (!chart.patch(q).valid(uq)) return std::nullopt;
        patch = q;
        uv = uq;
      }
      const ZJet j = jet_on_z(H[static_cast<std::size_t>(patch)], uv);
      if (j.grad.norm() < opt.newton_tol) return NewtonResult{patch, chart.patch(patch).normalize(uv), j};
      if (it == opt.max_iterations) break;
      Eigen::Vector2d step = -j.hess.completeOrthogonalDecomposition().solve(j.grad);
      if (!step.allFinite()) return std::nullopt;
      if (step.norm() > kMaxStep) step *= kMaxStep / step.norm();
      const Vec2 next{uv[0] + step[0], uv[1] + step[1]};
      if (!chart.patch(patch).valid(next)) {
        const Vec3 x = chart.patch(patch).embed(next);
        const int q = chart.owner(x);
        const Vec2 uq = chart.patch(q).coords(x);
        if (!chart.patch(q).valid(uq)) return std::nullopt;
        patch = q;
        uv = uq;
      } else {
        uv = next;
      }
    }
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return std::nullopt;
}

int morse_index(const Eigen::Matrix2d& hess) {
  const double det = hess.determinant();
  if (det < 0.0) return 1;
  return hess.trace() > 0.0 ? 0 : 2;
}

}  // namespace

CriticalSearch find_critical_points(const TubularChart& chart, const std::vector<Expression>& H,
                                    const CriticalOptions& opt, int component) {
  if (static_cast<int>(H.size()) != chart.patch_count())
    throw PreconditionError("one Hamiltonian expression per patch is required");
  CriticalSearch out;

  struct Seed {
    int patch;
    Vec2 uv;
  };
  std::vector<Seed> seeds;
  double hmin = INFINITY, hmax = -INFINITY;
  for (int p = 0; p < chart.patch_count(); ++p) {
    const PatchGrid g = chart.patch_grid(p, opt.scan_nu, opt.scan_nv, opt.owned_margin);
    const std::size_t nu = g.us.size(), nv = g.vs.size();
    std::vector<double> g2(nu * nv, INFINITY);
    parallel_for(nu, [&](std::size_t i) {
      for (std::size_t j = 0; j < nv; ++j) {
        if (!g.inside(i, j)) continue;
        const ZJet z = jet_on_z(H[static_cast<std::size_t>(p)], {g.us[i], g.vs[j]});
        g2[i * nv + j] = z.grad.squaredNorm();
      }
    });
    for (std::size_t i = 0; i < nu; ++i)
      for (std::size_t j = 0; j < nv; ++j) {
        if (!g.inside(i, j)) continue;
        const std::array<double, 3> x{g.us[i], g.vs[j], 0.0};
        const double h = H[static_cast<std::size_t>(p)].eval(std::span<const double>(x.data(), 3));
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
      }
    // Interior local minima of |grad H|^2 over the 8-neighbourhood.
    for (std::size_t i = 0; i < nu; ++i)
      for (std::size_t j = 0; j < nv; ++j) {
        if (!g.inside(i, j)) continue;
        const double c = g2[i * nv + j];
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1 && is_min; ++dj) {
            if (di == 0 && dj == 0) continue;
            long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
            if (g.periodic_u) ii = (ii + static_cast<long>(nu)) % static_cast<long>(nu);
            if (g.periodic_v) jj = (jj + static_cast<long>(nv)) % static_cast<long>(nv);
            if (ii < 0 || jj < 0 || ii >= static_cast<long>(nu) || jj >= static_cast<long>(nv) ||
                !g.inside(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj))) {
              is_min = false;
              break;
            }
            if (g2[static_cast<std::size_t>(ii) * nv + static_cast<std::size_t>(jj)] < c) is_min = false;
          }
        if (is_min) seeds.push_back({p, {g.us[i], g.vs[j]}});
      }
  }
  if (hmax - hmin < 1e-12) {
    out.warnings.push_back("locally-constant: H is constant on the scan grid");
    return out;
  }

  out.candidates = seeds.size();
  std::vector<std::optional<NewtonResult>> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) { results[k] = newton(chart, H, seeds[k].patch, seeds[k].uv, opt); });

  constexpr std::size_t kMaxWarnings = 20;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!results[k]) {
      ++out.dropped;
      if (out.warnings.size() < kMaxWarnings)
        out.warnings.push_back("newton did not converge from " + describe(chart, seeds[k].patch, seeds[k].uv));
      continue;
    }
    const NewtonResult& r = *results[k];
    bool duplicate = false;
    for (const auto& q : out.points)
      if (chart.distance(q.patch, q.uv, r.patch, r.uv) < opt.dedup_distance) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;

    CriticalPoint cp;
    cp.component = component;
    cp.patch = r.patch;
    cp.uv = r.uv;
    cp.point = chart.patch(r.patch).embed(r.uv);
    cp.H = r.jet.value;
    cp.hess = {r.jet.hess(0, 0), r.jet.hess(0, 1), r.jet.hess(1, 1)};
    cp.index = morse_index(r.jet.hess);
    cp.f = -r.jet.value;
    cp.grad_norm = r.jet.grad.norm();
    if (std::abs(cp.det_hess()) < opt.min_abs_det)
      throw NotMorse("degenerate critical point at " + describe(chart, cp.patch, cp.uv) +
                     ": |det Hess H| = " + std::to_string(std::abs(cp.det_hess())));
    if (std::abs(cp.f) < opt.min_abs_f)
      throw RegularValueViolation("f vanishes at the critical point " + describe(chart, cp.patch, cp.uv));
    out.points.push_back(cp);
  }
  if (out.dropped > kMaxWarnings)
    out.warnings.push_back(std::to_string(out.dropped - kMaxWarnings) + " further non-converged candidates");

  std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return std::tie(a.patch, a.uv) < std::tie(b.patch, b.uv);
  });
  return out;
}

std::string to_string(StabilityType type) {
  return type == StabilityType::Hyperbolic2D ? "hyperbolic-2d-transverse" : "nonhyperbolic-1d-transverse";
}

StabilityReport stability_at(const CriticalPoint& p, const BReebField& reeb, double tolerance) {
  StabilityReport s;
  const Vec3 x{p.uv[0], p.uv[1], 0.0};
  Mat3 jac{};
  const ReebSample r = reeb.eval_with_jacobian(p.patch, x, jac);
  s.g = r.r[2];
  // Third row is (z g_u, z g_v, g + z g_z) at z = 0.
  s.DR = {{{jac[0][0], jac[0][1], jac[0][2]}, {jac[1][0], jac[1][1], jac[1][2]}, {0.0, 0.0, s.g}}};

  s.w = symplectic_coefficient(reeb.component().form(p.patch), p.uv);
  s.det_hess = p.det_hess();
  s.closed_lambda_plus = std::sqrt(std::complex<double>(-s.det_hess / (s.w * s.w), 0.0));
  s.closed_lambda_z = 1.0 / p.f;

  Eigen::Matrix2d B;
  B << s.DR[0][0], s.DR[0][1], s.DR[1][0], s.DR[1][1];
  s.lambda_plus = std::sqrt(std::complex<double>(-B.determinant(), 0.0));
  s.lambda_minus = -s.lambda_plus;
  s.lambda_z = s.g;
  s.type = s.det_hess < 0.0 ? StabilityType::Hyperbolic2D : StabilityType::NonHyperbolic1D;
  s.manifold_dim = s.type == StabilityType::Hyperbolic2D ? 2 : 1;
  s.transverse_unstable = s.g > 0.0;

  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) M(i, k) = s.DR[i][k];
  Eigen::EigenSolver<Eigen::Matrix3d> es(M, false);
  std::vector<std::complex<double>> spec(es.eigenvalues().data(), es.eigenvalues().data() + 3);
  std::sort(spec.begin(), spec.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::copy(spec.begin(), spec.end(), s.spectrum.begin());

  // Match each closed-form eigenvalue to a distinct numerical one.
  const std::array<std::complex<double>, 3> closed{s.closed_lambda_plus, -s.closed_lambda_plus,
                                                   std::complex<double>(s.closed_lambda_z, 0.0)};
  std::array<bool, 3> used{};
  for (const auto& c : closed) {
    int best = -1;
    double best_err = INFINITY;
    for (int k = 0; k < 3; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double e = std::abs(spec[static_cast<std::size_t>(k)] - c) / std::abs(c);
      if (e < best_err) {
        best_err = e;
        best = k;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    s.max_relative_error = std::max(s.max_relative_error, best_err);
  }
  s.max_relative_error = std::max(s.max_relative_error, std::abs(s.lambda_plus - s.closed_lambda_plus) /
                                                            std::abs(s.closed_lambda_plus));
  if (!(s.max_relative_error <= tolerance))
    throw SpectralMismatch("DR(p) spectrum deviates from the closed forms by " +
                           std::to_string(s.max_relative_error) + " relative");

  // Transverse eigenvector (e_uv, 1): (B - g I) e_uv = -DR[0:2, 2].
  const Eigen::Vector2d col(s.DR[0][2], s.DR[1][2]);
  const Eigen::Vector2d e_uv = (B - s.g * Eigen::Matrix2d::Identity()).completeOrthogonalDecomposition().solve(-col);
  Eigen::Vector3d e(e_uv[0], e_uv[1], 1.0);
  e.normalize();
  s.transverse_vector = {e[0], e[1], e[2]};

  if (s.type == StabilityType::Hyperbolic2D) {
    const double lam = std::copysign(s.lambda_plus.real(), s.g);
    const Eigen::Vector2d v1(B(0, 1), lam - B(0, 0)), v2(lam - B(1, 1), B(1, 0));
    Eigen::Vector2d v = v1.norm() >= v2.norm() ? v1 : v2;
    v.normalize();
    s.tangent_vector = {v[0], v[1], 0.0};
  }
  return s;
}

CensusBound census_bound(const std::vector<ComponentPoints>& components) {
  CensusBound b;
  b.N = static_cast<int>(components.size());
  for (const auto& c : components) {
    ComponentCensus cc;
    cc.surface = c.chart->surface();
    for (int k = 0; k < 3; ++k) cc.betti[static_cast<std::size_t>(k)] = c.chart->betti(k);
    if (c.points->size() < 2)
      throw PreconditionError("a closed component needs at least a minimum and a maximum, found " +
                              std::to_string(c.points->size()) + " critical points");
    for (const auto& p : *c.points) ++cc.counts[static_cast<std::size_t>(p.index)];
    for (int k = 0; k < 3; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      if (cc.counts[ku] < cc.betti[ku])
        throw MorseInequalityViolation("C_" + std::to_string(k) + " = " + std::to_string(cc.counts[ku]) +
                                       " < b_" + std::to_string(k) + " = " + std::to_string(cc.betti[ku]));
      b.counts[ku] += cc.counts[ku];
    }
    cc.euler_characteristic = c.chart->euler_characteristic();
    cc.euler_consistent = cc.counts[0] - cc.counts[1] + cc.counts[2] == cc.euler_characteristic;
    b.components.push_back(cc);
  }
  b.infinite = b.counts[1] > 0;
  b.lower_bound = 2 * b.N;
  b.expected_weighted = b.infinite ? 0 : 4 * b.N;
  return b;
}

}  // namespace bdyn
