#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace blstab {

using Complex = std::complex<double>;

/// Column vector in C^3. Component layout for the eigenvalue system is
/// (w, u - v, v).
using Vec3 = std::array<Complex, 3>;

enum class Side { Inflow, Outflow };

inline const char* to_string(Side s) { return s == Side::Inflow ? "inflow" : "outflow"; }

/// Dense 3x3 complex matrix, row-major.
struct Mat3 {
  std::array<Complex, 9> a{};

  Complex& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
};

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  Vec3 r{};
  for (std::size_t i = 0; i < 3; ++i) r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
  return r;
}

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

inline Mat3 operator-(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = x.a[k] - y.a[k];
  return r;
}

inline Mat3 operator*(Complex s, const Mat3& x) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = s * x.a[k];
  return r;
}

/// Conjugate transpose.
inline Mat3 adjoint(const Mat3& m) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = std::conj(m(j, i));
  return r;
}

inline double max_abs(const Mat3& m) {
  double r = 0.0;
  for (const auto& z : m.a) r = std::max(r, std::abs(z));
  return r;
}

inline Vec3 operator+(const Vec3& x, const Vec3& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2]}; }
inline Vec3 operator-(const Vec3& x, const Vec3& y) { return {x[0] - y[0], x[1] - y[1], x[2] - y[2]}; }
inline Vec3 operator*(Complex s, const Vec3& x) { return {s * x[0], s * x[1], s * x[2]}; }

/// Dual pairing <adj, w> = sum conj(adj_i) w_i. Conjugating the adjoint side
/// keeps pairings of an anti-analytic dual mode with an analytic mode analytic.
inline Complex pairing(const Vec3& adj, const Vec3& w) {
  return std::conj(adj[0]) * w[0] + std::conj(adj[1]) * w[1] + std::conj(adj[2]) * w[2];
}

/// Bilinear (unconjugated) product.
inline Complex bilinear(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

inline double norm(const Vec3& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2])); }

inline Vec3 conj(const Vec3& v) { return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; }

/// Bilinear cross product; r = x × y satisfies x·r = y·r = 0 without conjugation.
inline Vec3 cross(const Vec3& x, const Vec3& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

// Error taxonomy. DomainError covers bad inputs; everything deriving from
// NumericalError is a failure of a numerical procedure on valid inputs.

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrationError : NumericalError {
  using NumericalError::NumericalError;
};

struct OverflowError : NumericalError {
  using NumericalError::NumericalError;
};

struct SplittingError : NumericalError {
  using NumericalError::NumericalError;
};

struct CollisionError : NumericalError {
  using NumericalError::NumericalError;
};

struct NearZeroError : NumericalError {
  using NumericalError::NumericalError;
};

struct RefinementCapError : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace blstab
