#pragma once

// Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4) pair with
// local extrapolation). Step-size control follows the classic ode45 rules:
// a step is accepted when every component satisfies
//   |err_i| <= max(rel_tol * max(|y_i|, |ynew_i|), abs_tol)
// (Mixed control) or |err_i| <= rel_tol * max(|y_i|, |ynew_i|) (Relative).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>

#include "blstab/types.hpp"

namespace blstab::ode {

enum class ErrorControl { Mixed, Relative };

struct Options {
  double abs_tol = 1e-6;
  double rel_tol = 1e-8;
  double max_step = 0.0;  // 0 selects 0.1 * |x1 - x0|
  double initial_step = 0.0;  // 0 selects the automatic initial step
  std::size_t max_steps = 2'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }

// Dormand-Prince tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Integrates y' = rhs(x, y) from x0 to x1 (either direction), updating y in
/// place. `rhs(x, y, dy)` writes the derivative; `observe(x, y)` is called at
/// the initial point and after every accepted step.
template <class T, std::size_t N, class Rhs, class Observer>
Stats integrate(Rhs&& rhs, double x0, double x1, std::array<T, N>& y, const Options& opt,
                const std::array<ErrorControl, N>& control, Observer&& observe) {
  using State = std::array<T, N>;
  using namespace detail;

  Stats stats;
  observe(x0, y);
  if (x1 == x0) return stats;

  const double span = std::abs(x1 - x0);
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double hmax = opt.max_step > 0.0 ? opt.max_step : 0.1 * span;
  const double rtol = opt.rel_tol;
  const double threshold = opt.abs_tol / rtol;
  const double pow = 1.0 / 5.0;
  constexpr double tiny = std::numeric_limits<double>::min();

  auto scale = [&](std::size_t i, double mag) {
    return control[i] == ErrorControl::Mixed ? std::max(mag, threshold) : std::max(mag, tiny);
  };

  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  double x = x0;
  rhs(x, y, k1);
  ++stats.rhs_evals;

  double absh = std::min(hmax, span);
  if (opt.initial_step > 0.0) {
    absh = std::min(absh, opt.initial_step);
  } else {
    double rh = 0.0;
    for (std::size_t i = 0; i < N; ++i) rh = std::max(rh, magnitude(k1[i]) / scale(i, magnitude(y[i])));
    rh /= 0.8 * std::pow(rtol, pow);
    if (absh * rh > 1.0) absh = 1.0 / rh;
  }

  bool done = false;
  while (!done) {
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), 1.0);
    absh = std::min(hmax, std::max(hmin, absh));
    double h = dir * absh;
    if (1.1 * absh >= std::abs(x1 - x)) {
      h = x1 - x;
      absh = std::abs(h);
      done = true;
    }

    bool nofailed = true;
    double err = 0.0;
    while (true) {
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
      rhs(x + c2 * h, ytmp, k2);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      rhs(x + c3 * h, ytmp, k3);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      rhs(x + c4 * h, ytmp, k4);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs(x + c5 * h, ytmp, k5);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      const double xnew = done ? x1 : x + h;
      rhs(xnew, ytmp, k6);
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      rhs(xnew, ynew, k7);
      stats.rhs_evals += 6;

      err = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        const T e = e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i];
        const double denom = scale(i, std::max(magnitude(y[i]), magnitude(ynew[i])));
        const double ei = absh * magnitude(e) / denom;
        if (!std::isfinite(ei)) finite = false;
        err = std::max(err, ei);
      }
      if (!finite) err = std::numeric_limits<double>::infinity();

      if (err <= rtol) break;

      ++stats.rejected;
      if (absh <= hmin) {
        std::ostringstream msg;
        msg << "step size underflow at x = " << x << " (error " << err << ")";
        throw IntegrationError(msg.str());
      }
      if (nofailed && std::isfinite(err)) {
        nofailed = false;
        absh = std::max(hmin, absh * std::max(0.1, 0.8 * std::pow(rtol / err, pow)));
      } else {
        nofailed = false;
        absh = std::max(hmin, 0.5 * absh);
      }
      h = dir * absh;
      done = false;
      if (1.1 * absh >= std::abs(x1 - x)) {
        h = x1 - x;
        absh = std::abs(h);
        done = true;
      }
    }

    ++stats.accepted;
    if (stats.accepted > opt.max_steps) throw IntegrationError("maximum number of steps exceeded");
    x = done ? x1 : x + h;
    y = ynew;
    k1 = k7;
    observe(x, y);

    if (nofailed) {
      const double temp = 1.25 * std::pow(err / rtol, pow);
      absh = temp > 0.2 ? absh / temp : 5.0 * absh;
    }
  }
  return stats;
}

}  // namespace blstab::ode
