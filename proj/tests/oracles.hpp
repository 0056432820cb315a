#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's eigen-solver, Kato continuation or integrator.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "blstab/types.hpp"

namespace oracle {

using blstab::Complex;
using blstab::Mat3;
using blstab::Vec3;
using CMat = Eigen::Matrix3cd;
using blstab::operator*;
using blstab::operator-;

inline CMat to_eigen(const Mat3& m) {
  CMat r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
  return r;
}

/// Roots of det(A - mu I) = mu^3 + c2 mu^2 + c1 mu + c0 from the companion
/// matrix, with the coefficients expanded from the entries by hand.
inline std::array<Complex, 3> companion_roots(const Mat3& a) {
  const Complex tr = a(0, 0) + a(1, 1) + a(2, 2);
  const Complex minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                         a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  const Complex det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                      a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                      a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  CMat c = CMat::Zero();
  c(0, 2) = det;
  c(1, 0) = 1.0;
  c(1, 2) = -minors;
  c(2, 1) = 1.0;
  c(2, 2) = tr;
  Eigen::ComplexEigenSolver<CMat> es(c, false);
  std::array<Complex, 3> r{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
  std::sort(r.begin(), r.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
  return r;
}

/// Spectral projector of `a` onto the eigenvalue nearest `mu`, from Eigen's
/// eigenvectors of a and a^T.
inline CMat projector(const Mat3& m, Complex mu) {
  const CMat a = to_eigen(m);
  Eigen::ComplexEigenSolver<CMat> right(a), left(a.transpose());
  int i = 0, j = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(right.eigenvalues()(k) - mu) < std::abs(right.eigenvalues()(i) - mu)) i = k;
    if (std::abs(left.eigenvalues()(k) - mu) < std::abs(left.eigenvalues()(j) - mu)) j = k;
  }
  const Eigen::Vector3cd r = right.eigenvectors().col(i);
  const Eigen::Vector3cd l = left.eigenvectors().col(j);
  return r * l.transpose() / (l.transpose() * r)(0);
}

/// Kato's ODE dV/dl = P'(l) V integrated by classical RK4 along the straight
/// segment l0 -> l1, with P' by central differences. Returns V(l1) and the
/// eigenvalue of the projector's mode at l1.
inline Vec3 kato_rk4(const std::function<Mat3(Complex)>& family, Complex mu0, const Vec3& v0, Complex l0, Complex l1,
                     int steps = 400) {
  Eigen::Vector3cd v(v0[0], v0[1], v0[2]);
  Complex mu = mu0;
  const Complex dl = (l1 - l0) / static_cast<double>(steps);
  const double h = 1e-5 * std::max(1.0, std::abs(l1 - l0));
  const Complex dir = dl / std::abs(dl);
  auto track = [&](Complex l) {
    // Eigenvalue of family(l) nearest the running estimate.
    Eigen::ComplexEigenSolver<CMat> es(to_eigen(family(l)), false);
    Complex best = es.eigenvalues()(0);
    for (int k = 1; k < 3; ++k)
      if (std::abs(es.eigenvalues()(k) - mu) < std::abs(best - mu)) best = es.eigenvalues()(k);
    return best;
  };
  auto dP = [&](Complex l) {
    const Complex m = track(l);
    const CMat p1 = projector(family(l + h * dir), m), p0 = projector(family(l - h * dir), m);
    return CMat((p1 - p0) / (2.0 * h * dir));
  };
  for (int s = 0; s < steps; ++s) {
    const Complex l = l0 + static_cast<double>(s) * dl;
    const Eigen::Vector3cd k1 = dP(l) * v;
    mu = track(l + 0.5 * dl);
    const Eigen::Vector3cd k2 = dP(l + 0.5 * dl) * (v + 0.5 * dl * k1);
    const Eigen::Vector3cd k3 = dP(l + 0.5 * dl) * (v + 0.5 * dl * k2);
    mu = track(l + dl);
    const Eigen::Vector3cd k4 = dP(l + dl) * (v + dl * k3);
    v += dl / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {v(0), v(1), v(2)};
}

/// Exact solution of v' = (v - 1)(v - v+), v(0) = v0: the ratio
/// (1 - v) / (v - v+) grows like exp((1 - v+) x).
inline double logistic(double x, double v_plus, double v0) {
  const double r = (1.0 - v0) / (v0 - v_plus) * std::exp((1.0 - v_plus) * x);
  return (1.0 + v_plus * r) / (1.0 + r);
}

/// Fixed-step RK4 for v' = H(v) written directly from the definition.
inline double profile_rk4(double gamma, double v_plus, double v0, double x, int steps = 20000) {
  const double a = std::pow(v_plus, gamma) * (1.0 - v_plus) / (1.0 - std::pow(v_plus, gamma));
  auto H = [&](double v) { return v * (v - 1.0 + a * (std::pow(v, -gamma) - 1.0)); };
  double v = v0;
  const double h = x / steps;
  for (int s = 0; s < steps; ++s) {
    const double k1 = H(v), k2 = H(v + 0.5 * h * k1), k3 = H(v + 0.5 * h * k2), k4 = H(v + h * k3);
    v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return v;
}

/// Least-squares slope of log|y| against x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(std::abs(y[i]));
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Angle between the complex lines through a and b, from the sine (the
/// orthogonal residual), which stays accurate for nearly parallel vectors.
inline double angle_between(const Vec3& a, const Vec3& b) {
  const Complex c = blstab::pairing(a, b) / blstab::pairing(a, a);
  const Vec3 r = b - c * a;
  return std::asin(std::min(1.0, blstab::norm(r) / blstab::norm(b)));
}

}  // namespace oracle
