#pragma once
// Second-order forward-mode (hyper-dual) numbers.
//
// A Jet2 carries a value together with its gradient and Hessian with respect
// to up to kMaxVars independent variables. Arithmetic propagates all three
// exactly, so a single evaluation pass yields first and second derivatives
// without truncation error.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bdyn/error.hpp"

namespace bdyn {

inline constexpr int kMaxVars = 4;
inline constexpr int kHessSize = kMaxVars * (kMaxVars + 1) / 2;

// Index into the packed upper triangle.
constexpr int hess_index(int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  return i * kMaxVars - i * (i - 1) / 2 + (j - i);
}

class Jet2 {
 public:
  Jet2() = default;

  static Jet2 constant(double v) {
    Jet2 r;
    r.v_ = v;
    return r;
  }

  static Jet2 variable(double v, int index) {
    Jet2 r;
    r.v_ = v;
    r.g_[static_cast<std::size_t>(index)] = 1.0;
    return r;
  }

  double value() const { return v_; }
  double d(int i) const { return g_[static_cast<std::size_t>(i)]; }
  double dd(int i, int j) const { return h_[static_cast<std::size_t>(hess_index(i, j))]; }

  std::vector<double> gradient(int dim) const { return {g_.begin(), g_.begin() + dim}; }

  // Applies a scalar function with derivatives f0, f1, f2 at value().
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r;
    r.v_ = f0;
    for (int i = 0; i < kMaxVars; ++i) r.g_[i] = f1 * g_[i];
    for (int i = 0; i < kMaxVars; ++i)
      for (int j = i; j < kMaxVars; ++j) {
        const int k = hess_index(i, j);
        r.h_[k] = f1 * h_[k] + f2 * g_[i] * g_[j];
      }
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    v_ += o.v_;
    for (int i = 0; i < kMaxVars; ++i) g_[i] += o.g_[i];
    for (int k = 0; k < kHessSize; ++k) h_[k] += o.h_[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v_ -= o.v_;
    for (int i = 0; i < kMaxVars; ++i) g_[i] -= o.g_[i];
    for (int k = 0; k < kHessSize; ++k) h_[k] -= o.h_[k];
    return *this;
  }
  Jet2& operator*=(double s) {
    v_ *= s;
    for (auto& x : g_) x *= s;
    for (auto& x : h_) x *= s;
    return *this;
  }
  Jet2& operator+=(double s) {
    v_ += s;
    return *this;
  }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v_ = a.v_ * b.v_;
    for (int i = 0; i < kMaxVars; ++i) r.g_[i] = a.v_ * b.g_[i] + b.v_ * a.g_[i];
    for (int i = 0; i < kMaxVars; ++i)
      for (int j = i; j < kMaxVars; ++j) {
        const int k = hess_index(i, j);
        r.h_[k] = a.v_ * b.h_[k] + b.v_ * a.h_[k] + a.g_[i] * b.g_[j] + a.g_[j] * b.g_[i];
      }
    return r;
  }

  friend Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r *= -1.0;
    return r;
  }

 private:
  double v_ = 0.0;
  std::array<double, kMaxVars> g_{};
  std::array<double, kHessSize> h_{};
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator+(Jet2 a, double s) { return a += s; }
inline Jet2 operator+(double s, Jet2 a) { return a += s; }
inline Jet2 operator-(Jet2 a, double s) { return a += -s; }
inline Jet2 operator-(double s, const Jet2& a) { return -a + s; }
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

inline Jet2 reciprocal(const Jet2& a) {
  const double x = a.value();
  if (x == 0.0) throw DomainError("division by zero");
  const double r = 1.0 / x;
  return a.chain(r, -r * r, 2.0 * r * r * r);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(const Jet2& a, double s) {
  if (s == 0.0) throw DomainError("division by zero");
  return a * (1.0 / s);
}
inline Jet2 operator/(double s, const Jet2& b) { return s * reciprocal(b); }

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(s, c, -s);
}

inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(c, -s, -c);
}

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value());
  return a.chain(e, e, e);
}

// sqrt is not differentiable at 0, so the domain is x > 0.
inline Jet2 sqrt(const Jet2& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("sqrt of non-positive argument in differentiated context");
  const double s = std::sqrt(x);
  return a.chain(s, 0.5 / s, -0.25 / (s * x));
}

inline constexpr double kAbsKinkGuard = 1e-12;

inline Jet2 abs(const Jet2& a) {
  const double x = a.value();
  if (std::abs(x) < kAbsKinkGuard) throw DomainError("abs evaluated at its kink");
  return x > 0.0 ? a : -a;
}

// Real power with a constant exponent.
inline double pow_checked(double base, double p) {
  if (base < 0.0 && p != std::floor(p)) throw DomainError("negative base with fractional exponent");
  if (base == 0.0 && p < 0.0) throw DomainError("zero base with negative exponent");
  return std::pow(base, p);
}

inline Jet2 pow(const Jet2& a, double p) {
  const double x = a.value();
  const double f0 = pow_checked(x, p);
  const double f1 = (p == 0.0) ? 0.0 : p * pow_checked(x, p - 1.0);
  const double f2 = (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * pow_checked(x, p - 2.0);
  return a.chain(f0, f1, f2);
}

}  // namespace bdyn
