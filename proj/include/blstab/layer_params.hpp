#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "blstab/types.hpp"

namespace blstab {

/// Rescaled parameter point of a compressive boundary layer. The left
/// endstate is normalized to v_- = 1. `v_plus == 0` selects the pressureless
/// limiting system, for which `gamma` is kept only as a label.
struct LayerParams {
  double gamma = 5.0 / 3.0;
  double v_plus = 0.1;
  double v0 = 0.5;
  Side side = Side::Inflow;
  double a = 0.0;      // pressure constant fixed by the endstate condition
  double delta = 0.0;  // displacement: vhat(delta) = (1 + v_plus) / 2

  bool limiting() const { return v_plus == 0.0; }

  /// Endstate approached inside the physical domain: v_plus for inflow
  /// (x -> +inf), 1 for outflow (x -> -inf).
  double endstate() const { return side == Side::Inflow ? v_plus : 1.0; }
};

struct DerivedConstants {
  double a = 0.0;
  double rhs_at_v_plus = 0.0;  // H(v_plus), zero up to rounding
  double rhs_at_one = 0.0;     // H(1), zero up to rounding
};

/// Pressure constant a = v+^g (1 - v+) / (1 - v+^g); a = v+ when g = 1.
DerivedConstants derive_constants(double gamma, double v_plus);

/// Validates the compressive ordering and fills in `a` and `delta`.
/// `v_plus == 0` is accepted as the limiting-system sentinel.
LayerParams make_layer_params(double gamma, double v_plus, double v0, Side side);

/// Profile right-hand side H(v) = v (v - 1 + a (v^-g - 1)).
double profile_rhs(double v, const LayerParams& p);

/// H written in the deviation d = v - endstate, free of the cancellation that
/// the direct formula suffers when v is within rounding of the endstate.
double deviation_rhs(double d, const LayerParams& p);

/// Displacement delta, computed as the integral of dv / H(v) from v0 to the
/// midpoint (1 + v_plus) / 2. Works whether or not delta lies in the domain.
double displacement(const LayerParams& p);

/// Background boundary-layer profile on [0, L] (inflow) or [-L, 0] (outflow).
///
/// Finite-amplitude profiles are stored at the integrator's accepted steps in
/// deviation form and evaluated by quintic Hermite interpolation of log|d|
/// with exact first and second derivatives; log|d| is nearly linear in the
/// exponential tails.
/// Limiting profiles (v_plus = 0) use the closed form
/// vhat(x) = (1 - tanh((x - delta) / 2)) / 2 directly.
class Profile {
 public:
  Profile() = default;

  const LayerParams& params() const { return params_; }
  double length() const { return length_; }
  double lower() const { return params_.side == Side::Inflow ? 0.0 : -length_; }
  double upper() const { return params_.side == Side::Inflow ? length_ : 0.0; }
  bool closed_form() const { return closed_form_; }
  double delta() const { return params_.delta; }

  double value(double x) const;
  double deviation(double x) const;
  double slope(double x) const;

  /// Node abscissae in increasing order (empty for closed-form profiles).
  std::span<const double> nodes() const { return x_; }
  /// Deviation values at `nodes()`.
  std::span<const double> node_deviations() const { return d_; }

  /// delta by bisection on the dense output to 1e-10; throws DomainError if
  /// the midpoint value is not attained inside the domain.
  double locate_delta() const;

  /// CSV with header `x,vhat,dvhat`: accepted steps for integrated profiles,
  /// a uniform grid of `closed_form_points` samples for closed-form ones.
  void write_csv(std::ostream& out, std::size_t closed_form_points = 361) const;

 private:
  friend Profile solve_profile(const LayerParams&, double, double);
  friend Profile limiting_profile(double, Side, double, double);

  LayerParams params_{};
  double length_ = 0.0;
  bool closed_form_ = false;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<double> log_slope_;  // d/dx log|d| at nodes
  std::vector<double> log_curv_;   // d2/dx2 log|d| at nodes
};

/// Integrates vhat' = H(vhat) from vhat(0) = v0 towards the attracting
/// endstate with the adaptive 4(5) pair. The error test is relative to the
/// deviation from the endstate so that the exponential tail keeps full
/// relative accuracy.
Profile solve_profile(const LayerParams& p, double L = 18.0, double rel_tol = 1e-8);

/// Closed-form strong-layer profile with delta = 2 artanh(2 v0 - 1).
/// `gamma` is carried as a label for downstream gauge choices.
Profile limiting_profile(double v0, Side side = Side::Inflow, double L = 18.0, double gamma = 5.0 / 3.0);

/// Exact solution of the gamma = 1 profile equation v' = (v - 1)(v - v_plus)
/// with v(0) = v0.
double gamma_one_profile(double x, double v_plus, double v0);

}  // namespace blstab
