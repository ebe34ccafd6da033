#pragma once

// One-dimensional collar linearization: solve dg/dr = g/f for the change of
// coordinate g that straightens f * d/dr to r * d/dr across r = 0. The
// closed form is g = k * r * exp(int_0^r (1/f(s) - 1/s) ds); subtracting the
// 1/s singularity analytically keeps the integrand regular through the
// collar, so one smooth solution covers both sides.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nambu/errors.hpp"
#include "nambu/expr.hpp"

namespace nambu {

struct NormalFormProfile {
  Expression f;
  double r_max = 0;
  double k = 1;
  std::vector<double> r;
  std::vector<double> g;
};

namespace normalform_detail {

template <class F>
double adaptive_simpson(const F& fn, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = fn(lm), frm = fn(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& fn, double a, double b, double tol) {
  if (a == b) return 0.0;
  double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(fn, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace normalform_detail

// f is a 1-D expression in r with f(0) = 0 and f'(0) = 1, nonvanishing away
// from 0 on [-r_max, r_max].
inline NormalFormProfile solve_linearization(const Expression& f, double r_max, double k,
                                             int n_samples) {
  if (f.variables() != std::vector<std::string>{"r"})
    throw ValidationError("the profile expression must use the single variable r");
  if (!(r_max > 0.0 && r_max < 1.0))
    throw ValidationError("r_max must lie in (0, 1)");
  if (!(k > 0.0)) throw ValidationError("k must be positive");
  if (n_samples < 9) throw ValidationError("n_samples must be at least 9");

  auto f_at = [&](double r) { return eval_value(f, std::span<const double>(&r, 1)); };
  {
    double r0 = 0.0;
    ValueGrad vg = eval_with_gradient(f, std::span<const double>(&r0, 1));
    if (std::abs(vg.value) > 1e-10 || std::abs(vg.grad[0] - 1.0) > 1e-10)
      throw NotNormalized("profile requires f(0) = 0 and f'(0) = 1; got f(0) = " +
                          std::to_string(vg.value) + ", f'(0) = " +
                          std::to_string(vg.grad[0]));
  }
  // f must keep the sign of r on the collar.
  {
    const int probes = 8 * n_samples;
    for (int i = 1; i <= probes; ++i) {
      double r = r_max * i / probes;
      if (f_at(r) <= 0.0 || f_at(-r) >= 0.0)
        throw ZeroInsideRange("f vanishes or changes sign inside the collar at |r| = " +
                              std::to_string(r));
    }
  }

  // Regularized integrand; the removable 0/0 at the origin is evaluated a
  // hair off to the side.
  auto psi = [&](double s) {
    if (std::abs(s) < 1e-9) s = s < 0.0 ? -1e-9 : 1e-9;
    double fs = f_at(s);
    return (s - fs) / (s * fs);
  };

  NormalFormProfile p;
  p.f = f;
  p.r_max = r_max;
  p.k = k;
  p.r.resize(n_samples);
  p.g.resize(n_samples);
  const double h = 2.0 * r_max / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) p.r[i] = -r_max + i * h;

  // Cumulative integral of psi from 0, built panel by panel outward.
  std::vector<double> psi_int(n_samples, 0.0);
  int i0 = 0;
  double best = std::abs(p.r[0]);
  for (int i = 1; i < n_samples; ++i)
    if (std::abs(p.r[i]) < best) {
      best = std::abs(p.r[i]);
      i0 = i;
    }
  double base = normalform_detail::integrate(psi, 0.0, p.r[i0], 1e-13);
  psi_int[i0] = base;
  for (int i = i0 + 1; i < n_samples; ++i)
    psi_int[i] = psi_int[i - 1] + normalform_detail::integrate(psi, p.r[i - 1], p.r[i], 1e-13);
  for (int i = i0 - 1; i >= 0; --i)
    psi_int[i] = psi_int[i + 1] - normalform_detail::integrate(psi, p.r[i], p.r[i + 1], 1e-13);

  for (int i = 0; i < n_samples; ++i) p.g[i] = k * p.r[i] * std::exp(psi_int[i]);
  return p;
}

// Residual of the defining identity f(r) g'(r) = g(r), with g' from central
// differences on the sample grid.
inline double verify_linearization(const NormalFormProfile& p) {
  double worst = 0.0;
  const int n = static_cast<int>(p.r.size());
  for (int i = 1; i + 1 < n; ++i) {
    double gp = (p.g[i + 1] - p.g[i - 1]) / (p.r[i + 1] - p.r[i - 1]);
    double r = p.r[i];
    double fr = eval_value(p.f, std::span<const double>(&r, 1));
    worst = std::max(worst, std::abs(fr * gp - p.g[i]));
  }
  return worst;
}

}  // namespace nambu
