#pragma once
// Dormand-Prince 5(4) with PI step-size control.
//
// The integrator is a function template over a fixed-size state so the
// orbit engine, the McGehee system and the tests share one implementation.
// After each accepted step the observer may stop the run or edit the state
// (chart switches); an edited state restarts the FSAL stage.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "bdyn/error.hpp"

namespace bdyn {

enum class StepAction { Continue, Stop, StateChanged };

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_initial = 0.0;  // 0 selects automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double h_last = 0.0;
  double h_next = 0.0;  // proposed size of the following step
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  double t_end = 0.0;
  bool stopped = false;  // by the observer
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace dopri

template <std::size_t N>
using OdeState = std::array<double, N>;

// f(t, y, dydt); observer(t, y, dydt) -> StepAction. Integrates from t0 to
// t1 (either direction); y holds the final state on return.
template <std::size_t N, class Rhs, class Observer>
OdeStats dopri5(Rhs&& f, double t0, OdeState<N>& y, double t1, const OdeOptions& opt, Observer&& observer) {
  using S = OdeState<N>;
  OdeStats st;
  st.t_end = t0;
  if (t1 == t0) return st;
  const double dir = t1 > t0 ? 1.0 : -1.0;

  auto finite = [](const S& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  auto scale = [&](const S& a, const S& b, std::size_t i) {
    return opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  };
  auto eval = [&](double t, const S& v, S& out) {
    f(t, v, out);
    ++st.evaluations;
    if (!finite(out)) throw NonFiniteState("non-finite derivative at t = " + std::to_string(t));
  };

  if (!finite(y)) throw NonFiniteState("non-finite initial state");
  S k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  double t = t0;
  eval(t, y, k1);

  double h = std::abs(opt.h_initial);
  if (h == 0.0) {
    // Initial step estimate from the first two derivative evaluations.
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.atol + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sk) * (y[i] / sk);
      d1 += (k1[i] / sk) * (k1[i] / sk);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(t1 - t0));
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + dir * h0 * k1[i];
    eval(t + dir * h0, ytmp, k2);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.atol + opt.rtol * std::abs(y[i]);
      d2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.h_max, std::abs(t1 - t0)});

  constexpr double kSafe = 0.9, kFacMin = 0.2, kFacMax = 10.0, kBeta = 0.04;
  constexpr double kExpo = 0.2 - kBeta * 0.75;
  double facold = 1e-4;
  bool last_rejected = false;

  while (dir * (t1 - t) > 0.0) {
    if (st.accepted + st.rejected >= opt.max_steps) throw StepUnderflow("step budget exhausted");
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw StepUnderflow("step size underflow at t = " + std::to_string(t));
    bool final_step = false;
    if (h >= dir * (t1 - t)) {
      h = dir * (t1 - t);
      final_step = true;
    }
    const double hs = dir * h;
    using namespace dopri;
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    eval(t + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    eval(t + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(t + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(t + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    eval(t + hs, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    const double tnew = final_step ? t1 : t + hs;
    eval(tnew, ynew, k7);

    double e = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double r = err[i] / scale(y, ynew, i);
      e += r * r;
    }
    e = std::sqrt(e / N);
    if (!std::isfinite(e)) e = 1e10;

    const double fac11 = std::pow(std::max(e, 1e-300), kExpo);
    if (e <= 1.0) {
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
      double hnew = h / fac;
      if (last_rejected) hnew = std::min(hnew, h);
      facold = std::max(e, 1e-4);
      ++st.accepted;
      st.h_min = std::min(st.h_min, h);
      st.h_max = std::max(st.h_max, h);
      st.h_last = h;
      t = tnew;
      y = ynew;
      k1 = k7;
      last_rejected = false;
      st.t_end = t;
      const StepAction action = observer(t, y, k1);
      if (action == StepAction::Stop) {
        st.stopped = true;
        st.h_next = hnew;
        return st;
      }
      if (action == StepAction::StateChanged) {
        if (!finite(y)) throw NonFiniteState("observer produced a non-finite state");
        eval(t, y, k1);
      }
      h = std::min(hnew, opt.h_max);
    } else {
      h = h / std::min(1.0 / kFacMin, fac11 / kSafe);
      last_rejected = true;
      ++st.rejected;
    }
  }
  st.h_next = h;
  return st;
}

template <std::size_t N, class Rhs>
OdeStats dopri5(Rhs&& f, double t0, OdeState<N>& y, double t1, const OdeOptions& opt) {
  return dopri5<N>(std::forward<Rhs>(f), t0, y, t1, opt,
                   [](double, OdeState<N>&, const OdeState<N>&) { return StepAction::Continue; });
}

}  // namespace bdyn
