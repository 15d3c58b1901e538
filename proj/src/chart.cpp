#include "bdyn/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double wrap_signed(double x) {
  double r = wrap_angle(x + kPi) - kPi;
  return r;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

std::vector<double> periodic_samples(int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = kTwoPi * i / n;
  return out;
}

bool is_angular(PatchKind k) { return k == PatchKind::NorthAngular || k == PatchKind::SouthAngular; }

}  // namespace

std::string to_string(SurfaceKind kind) { return kind == SurfaceKind::Torus ? "torus" : "sphere"; }

std::string to_string(PatchKind kind) {
  switch (kind) {
    case PatchKind::Torus: return "torus";
    case PatchKind::NorthAngular: return "north-angular";
    case PatchKind::SouthAngular: return "south-angular";
    case PatchKind::NorthPole: return "north-pole";
    case PatchKind::SouthPole: return "south-pole";
  }
  return "?";
}

bool Patch::periodic_u() const { return kind == PatchKind::Torus; }
bool Patch::periodic_v() const { return kind == PatchKind::Torus || is_angular(kind); }

bool Patch::valid(const Vec2& uv) const {
  switch (kind) {
    case PatchKind::Torus: return true;
    case PatchKind::NorthAngular:
    case PatchKind::SouthAngular:
      return uv[0] >= pole_exclusion && uv[0] <= kPi / 2 + TubularChart::kAngularMargin;
    case PatchKind::NorthPole:
    case PatchKind::SouthPole: {
      const double r = std::sin(TubularChart::kPoleRadius);
      return uv[0] * uv[0] + uv[1] * uv[1] <= r * r * (1.0 + 1e-12);
    }
  }
  return false;
}

Vec2 Patch::normalize(const Vec2& uv) const {
  return {periodic_u() ? wrap_angle(uv[0]) : uv[0], periodic_v() ? wrap_angle(uv[1]) : uv[1]};
}

Vec3 Patch::embed(const Vec2& uv) const {
  const double u = uv[0], v = uv[1];
  switch (kind) {
    case PatchKind::Torus: return {wrap_angle(u), wrap_angle(v), 0.0};
    case PatchKind::NorthAngular: return {std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)};
    case PatchKind::SouthAngular: return {std::sin(u) * std::cos(v), -std::sin(u) * std::sin(v), -std::cos(u)};
    case PatchKind::NorthPole: return {u, v, std::sqrt(std::max(0.0, 1.0 - u * u - v * v))};
    case PatchKind::SouthPole: return {u, -v, -std::sqrt(std::max(0.0, 1.0 - u * u - v * v))};
  }
  return {};
}

Vec2 Patch::coords(const Vec3& p) const {
  switch (kind) {
    case PatchKind::Torus: return {wrap_angle(p[0]), wrap_angle(p[1])};
    case PatchKind::NorthAngular: return {std::acos(clamp_unit(p[2])), wrap_angle(std::atan2(p[1], p[0]))};
    case PatchKind::SouthAngular: return {std::acos(clamp_unit(-p[2])), wrap_angle(std::atan2(-p[1], p[0]))};
    case PatchKind::NorthPole: return {p[0], p[1]};
    case PatchKind::SouthPole: return {p[0], -p[1]};
  }
  return {};
}

bool Patch::covers(const Vec3& p) const {
  switch (kind) {
    case PatchKind::Torus: return true;
    case PatchKind::NorthAngular:
    case PatchKind::SouthAngular: return valid(coords(p));
    case PatchKind::NorthPole: return p[2] > 0.0 && valid(coords(p));
    case PatchKind::SouthPole: return p[2] < 0.0 && valid(coords(p));
  }
  return false;
}

double Patch::area_factor(const Vec2& uv) const {
  switch (kind) {
    case PatchKind::Torus: return 1.0;
    case PatchKind::NorthAngular:
    case PatchKind::SouthAngular: return std::sin(uv[0]);
    case PatchKind::NorthPole:
    case PatchKind::SouthPole: return 1.0 / std::sqrt(1.0 - uv[0] * uv[0] - uv[1] * uv[1]);
  }
  return 1.0;
}

TubularChart TubularChart::torus(double epsilon, std::vector<std::string> vars) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("tubular half-width must be positive");
  if (vars.size() != 3) throw std::invalid_argument("torus chart needs three coordinate names");
  TubularChart c;
  c.surface_ = SurfaceKind::Torus;
  c.epsilon_ = epsilon;
  c.patches_.push_back(Patch{PatchKind::Torus, std::move(vars)});
  return c;
}

TubularChart TubularChart::sphere(double epsilon, double pole_exclusion, std::vector<std::string> angular_vars,
                                  std::vector<std::string> pole_vars) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("tubular half-width must be positive");
  if (!(pole_exclusion > 0.0) || pole_exclusion >= kPi / 4)
    throw std::invalid_argument("pole exclusion radius must lie in (0, pi/4)");
  if (angular_vars.size() != 3 || pole_vars.size() != 3)
    throw std::invalid_argument("sphere charts need three coordinate names");
  TubularChart c;
  c.surface_ = SurfaceKind::Sphere;
  c.epsilon_ = epsilon;
  c.pole_exclusion_ = pole_exclusion;
  c.patches_ = {
      Patch{PatchKind::NorthPole, pole_vars, pole_exclusion},
      Patch{PatchKind::NorthAngular, angular_vars, pole_exclusion},
      Patch{PatchKind::SouthAngular, angular_vars, pole_exclusion},
      Patch{PatchKind::SouthPole, pole_vars, pole_exclusion},
  };
  return c;
}

int TubularChart::find(PatchKind kind) const {
  for (int i = 0; i < patch_count(); ++i)
    if (patches_[static_cast<std::size_t>(i)].kind == kind) return i;
  return -1;
}

int TubularChart::owner(const Vec3& p) const {
  if (surface_ == SurfaceKind::Torus) return 0;
  const double theta = std::acos(clamp_unit(p[2]));
  if (theta <= kPi / 4) return find(PatchKind::NorthPole);
  if (theta <= kPi / 2) return find(PatchKind::NorthAngular);
  if (theta < 3 * kPi / 4) return find(PatchKind::SouthAngular);
  return find(PatchKind::SouthPole);
}

bool TubularChart::owns(int patch, const Vec2& uv) const {
  const Patch& p = this->patch(patch);
  if (!p.valid(uv)) return false;
  return owner(p.embed(uv)) == patch;
}

std::pair<int, Vec2> TubularChart::reproject(int patch, const Vec2& uv) const {
  const Patch& p = this->patch(patch);
  if (owns(patch, uv)) return {patch, p.normalize(uv)};
  const Vec3 x = p.embed(uv);
  const int o = owner(x);
  return {o, this->patch(o).coords(x)};
}

Vec2 TubularChart::transition(int from, int to, const Vec2& uv) const {
  return patch(to).coords(patch(from).embed(uv));
}

double TubularChart::distance(int pa, const Vec2& a, int pb, const Vec2& b) const {
  if (surface_ == SurfaceKind::Torus) {
    const double du = wrap_signed(a[0] - b[0]);
    const double dv = wrap_signed(a[1] - b[1]);
    return std::hypot(du, dv);
  }
  const Vec3 x = patch(pa).embed(a), y = patch(pb).embed(b);
  return std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) + (x[2] - y[2]) * (x[2] - y[2]));
}

int TubularChart::betti(int k) const {
  switch (k) {
    case 0:
    case 2: return 1;
    case 1: return surface_ == SurfaceKind::Torus ? 2 : 0;
    default: return 0;
  }
}

PatchGrid TubularChart::patch_grid(int patch, int nu, int nv, double owned_margin) const {
  if (nu < 2 || nv < 2) throw std::invalid_argument("grid resolution must be at least 2 per axis");
  const Patch& p = this->patch(patch);
  PatchGrid g;
  g.periodic_u = p.periodic_u();
  g.periodic_v = p.periodic_v();
  if (p.kind == PatchKind::Torus) {
    g.us = periodic_samples(nu);
    g.vs = periodic_samples(nv);
    g.mask.assign(g.us.size() * g.vs.size(), 1);
    return g;
  }
  if (is_angular(p.kind)) {
    double lo = pole_exclusion_, hi = kPi / 2 + kAngularMargin;
    if (owned_margin >= 0.0) {
      lo = std::max(lo, kPi / 4 - owned_margin);
      hi = std::min(hi, kPi / 2 + owned_margin);
    }
    g.us = linspace(lo, hi, nu);
    g.vs = periodic_samples(nv);
    g.mask.assign(g.us.size() * g.vs.size(), 1);
    return g;
  }
  const double theta_max = owned_margin >= 0.0 ? std::min(kPoleRadius, kPi / 4 + owned_margin) : kPoleRadius;
  const double r = std::sin(theta_max);
  g.us = linspace(-r, r, nu);
  g.vs = linspace(-r, r, nv);
  g.mask.resize(g.us.size() * g.vs.size());
  for (std::size_t i = 0; i < g.us.size(); ++i)
    for (std::size_t j = 0; j < g.vs.size(); ++j)
      g.mask[i * g.vs.size() + j] = g.us[i] * g.us[i] + g.vs[j] * g.vs[j] <= r * r ? 1 : 0;
  return g;
}

std::vector<Vec2> TubularChart::surface_grid(int patch, int nu, int nv, double owned_margin) const {
  const PatchGrid g = patch_grid(patch, nu, nv, owned_margin);
  std::vector<Vec2> out;
  out.reserve(g.mask.size());
  for (std::size_t i = 0; i < g.us.size(); ++i)
    for (std::size_t j = 0; j < g.vs.size(); ++j)
      if (g.inside(i, j)) out.push_back({g.us[i], g.vs[j]});
  return out;
}

std::vector<double> TubularChart::transverse_samples(int nz) const {
  if (nz < 2) throw std::invalid_argument("transverse resolution must be at least 2");
  std::vector<double> out;
  if (nz % 2 == 1) out.push_back(0.0);
  double scale = epsilon_;
  for (int k = 0; k < nz / 2; ++k) {
    out.push_back(scale);
    out.push_back(-scale);
    scale *= 0.5;
  }
  return out;
}

}  // namespace bdyn
