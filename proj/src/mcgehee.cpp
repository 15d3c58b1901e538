#include "bdyn/mcgehee.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

namespace bdyn {

namespace {

OdeOptions ode_options(const McGeheeOptions& o) {
  OdeOptions opt;
  opt.rtol = o.rtol;
  opt.atol = o.atol;
  return opt;
}

std::vector<double> output_times(double t_end, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("output spacing must be positive");
  std::vector<double> ts{0.0};
  const double dir = t_end >= 0.0 ? 1.0 : -1.0;
  const auto n = static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9));
  for (long k = 1; k < n; ++k) ts.push_back(dir * dt * static_cast<double>(k));
  if (t_end != 0.0) ts.push_back(t_end);
  return ts;
}

// Integrates segment by segment so every output time is hit exactly; the
// step size carries over between segments.
template <class Field, class Sink>
OdeStats integrate_sampled(Field&& field, std::array<double, 4> y, const std::vector<double>& ts,
                           const McGeheeOptions& o, Sink&& sink) {
  OdeStats total;
  OdeOptions opt = ode_options(o);
  sink(ts.front(), y);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const OdeStats st = dopri5<4>(field, ts[k - 1], y, ts[k], opt);
    total.accepted += st.accepted;
    total.rejected += st.rejected;
    total.evaluations += st.evaluations;
    total.h_min = std::min(total.h_min, st.h_min);
    total.h_max = std::max(total.h_max, st.h_max);
    total.h_last = st.h_last;
    total.t_end = st.t_end;
    opt.h_initial = std::max(st.h_next, st.h_max);
    sink(ts[k], y);
  }
  return total;
}

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)); }

}  // namespace

void McGeheeParams::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw PreconditionError("mass ratio mu must lie in (0, 1)");
}

double mcgehee_hamiltonian(const McState& y, const McGeheeParams& p) {
  p.validate();
  return mcgehee_hamiltonian(y[0], y[1], y[2], y[3], p.mu);
}

McState mcgehee_field(const McState& y, const McGeheeParams& p) {
  if (y[0] == 0.0) {
    // Keeps the infinity plane exactly invariant; the other components match
    // the limit of the general formula.
    mcgehee_hamiltonian(y[0], y[1], y[2], y[3], p.mu);
    return {0.0, -1.0, 0.0, 0.0};
  }
  const Jet2 H = mcgehee_hamiltonian(Jet2::variable(y[0], 0), Jet2::variable(y[1], 1), Jet2::variable(y[2], 2),
                                     Jet2::variable(y[3], 3), p.mu);
  const double k = y[0] * y[0] * y[0] / 4.0;
  return {-k * H.d(2), H.d(3), k * H.d(0), -H.d(1)};
}

McTrajectory integrate_mcgehee(const McState& y0, const McGeheeParams& p, double t_end, const McGeheeOptions& o) {
  p.validate();
  if (!(y0[0] >= 0.0)) throw PreconditionError("McGehee x must be non-negative");
  McTrajectory traj;
  const double H0 = mcgehee_hamiltonian(y0, p);
  auto field = [&](double, const McState& y, McState& dy) { dy = mcgehee_field(y, p); };
  traj.stats = integrate_sampled(field, y0, output_times(t_end, o.dt_out), o, [&](double t, const McState& y) {
    const double H = mcgehee_hamiltonian(y, p);
    traj.samples.push_back({t, y, H});
    traj.energy_drift = std::max(traj.energy_drift, std::abs(H - H0));
    traj.max_abs_x = std::max(traj.max_abs_x, std::abs(y[0]));
  });
  return traj;
}

double polar_hamiltonian(const PolarState& q, const McGeheeParams& p) {
  const auto [r, al, Pr, Pal] = q;
  const double mu = p.mu;
  const double d1 = std::sqrt(r * r - 2.0 * mu * r * std::cos(al) + mu * mu);
  const double d2 = std::sqrt(r * r + 2.0 * (1.0 - mu) * r * std::cos(al) + (1.0 - mu) * (1.0 - mu));
  return 0.5 * Pr * Pr + 0.5 * Pal * Pal / (r * r) - Pal - (1.0 - mu) / d1 - mu / d2;
}

PolarState polar_field(const PolarState& q, const McGeheeParams& p) {
  const auto [r, al, Pr, Pal] = q;
  const double mu = p.mu, c = std::cos(al), s = std::sin(al);
  const double d1sq = r * r - 2.0 * mu * r * c + mu * mu;
  const double d2sq = r * r + 2.0 * (1.0 - mu) * r * c + (1.0 - mu) * (1.0 - mu);
  if (!(d1sq > kCollisionGuard) || !(d2sq > kCollisionGuard)) throw CollisionError("oracle collision with a primary");
  const double d13 = d1sq * std::sqrt(d1sq), d23 = d2sq * std::sqrt(d2sq);
  // Partials of U = -(1 - mu)/d1 - mu/d2.
  const double Ur = (1.0 - mu) * (r - mu * c) / d13 + mu * (r + (1.0 - mu) * c) / d23;
  const double Ua = (1.0 - mu) * mu * r * s / d13 - mu * (1.0 - mu) * r * s / d23;
  return {Pr, Pal / (r * r) - 1.0, Pal * Pal / (r * r * r) - Ur, -Ua};
}

PolarState to_polar(const McState& y) {
  if (!(y[0] > 0.0)) throw PreconditionError("polar coordinates need x > 0");
  return {2.0 / (y[0] * y[0]), y[1], y[2], y[3]};
}

McState from_polar(const PolarState& q) {
  if (!(q[0] > 0.0)) throw PreconditionError("McGehee coordinates need r > 0");
  return {std::sqrt(2.0 / q[0]), q[1], q[2], q[3]};
}

OracleComparison newtonian_oracle_compare(const McState& y0, const McGeheeParams& p, double t_end,
                                          const McGeheeOptions& o) {
  p.validate();
  if (!(y0[0] > 0.0)) throw PreconditionError("oracle comparison needs x0 > 0");
  const std::vector<double> ts = output_times(t_end, o.dt_out);
  std::vector<McState> mc, nw;
  auto mfield = [&](double, const McState& y, McState& dy) { dy = mcgehee_field(y, p); };
  auto pfield = [&](double, const PolarState& q, PolarState& dq) { dq = polar_field(q, p); };
  integrate_sampled(mfield, y0, ts, o, [&](double, const McState& y) { mc.push_back(y); });
  integrate_sampled(pfield, to_polar(y0), ts, o, [&](double, const PolarState& q) { nw.push_back(q); });

  OracleComparison out;
  out.samples = ts.size();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const McState m = from_polar(nw[k]);
    const double dev = std::max({std::abs(mc[k][0] - m[0]), angle_gap(mc[k][1], m[1]), std::abs(mc[k][2] - m[2]),
                                 std::abs(mc[k][3] - m[3])});
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.at_time = ts[k];
    }
    out.max_r_deviation = std::max(out.max_r_deviation, std::abs(2.0 / (mc[k][0] * mc[k][0]) - nw[k][0]));
  }
  return out;
}

PeriodicityResult infinity_periodicity(const McState& y0, const McGeheeParams& p, double tolerance,
                                       const McGeheeOptions& o) {
  if (y0[0] != 0.0) throw PreconditionError("periodicity on the infinity plane needs x0 = 0");
  PeriodicityResult r;
  const McTrajectory traj = integrate_mcgehee(y0, p, r.period, o);
  const McState& y = traj.samples.back().y;
  r.max_deviation =
      std::max({std::abs(y[0] - y0[0]), angle_gap(y[1], y0[1]), std::abs(y[2] - y0[2]), std::abs(y[3] - y0[3])});
  r.max_abs_x = traj.max_abs_x;
  r.passed = r.max_deviation < tolerance && r.max_abs_x == 0.0;
  return r;
}

double time_reversal_error(const McState& y0, const McGeheeParams& p, double t_end, const McGeheeOptions& o) {
  p.validate();
  McState y = y0;
  auto field = [&](double, const McState& s, McState& dy) { dy = mcgehee_field(s, p); };
  const OdeOptions opt = ode_options(o);
  dopri5<4>(field, 0.0, y, t_end, opt);
  dopri5<4>(field, t_end, y, 0.0, opt);
  double err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) err = std::max(err, std::abs(y[i] - y0[i]));
  return err;
}

void write_mcgehee_csv(const std::string& path, const McTrajectory& traj) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error("cannot open " + path + " for writing");
  std::fputs("t,x,a,Pr,Pa,H\n", f.get());
  for (const McSample& s : traj.samples)
    std::fprintf(f.get(), "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n", s.t, s.y[0], s.y[1], s.y[2], s.y[3], s.H);
  if (std::ferror(f.get())) throw Error("write failed for " + path);
}

}  // namespace bdyn
