#include "blstab/layer_params.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "blstab/ode.hpp"

namespace blstab {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw DomainError("gamma must satisfy gamma >= 1");
}

void check_ordering(double v_plus, double v0, Side side) {
  if (!(v_plus >= 0.0 && v_plus < 1.0)) throw DomainError("v_plus must lie in [0, 1)");
  if (!(v0 > v_plus && v0 < 1.0)) {
    std::ostringstream msg;
    msg << to_string(side) << " layer requires v_plus < v0 < 1 (got v_plus = " << v_plus << ", v0 = " << v0 << ")";
    throw DomainError(msg.str());
  }
}

double limiting_delta(double v0) { return 2.0 * std::atanh(2.0 * v0 - 1.0); }

// Closed-form limiting deviation from the endstate: vhat for inflow,
// vhat - 1 for outflow. Both forms avoid cancellation in their tails.
double limiting_deviation(double x, double delta, Side side) {
  if (side == Side::Inflow) return 1.0 / (1.0 + std::exp(x - delta));
  return -1.0 / (1.0 + std::exp(delta - x));
}

}  // namespace

DerivedConstants derive_constants(double gamma, double v_plus) {
  check_gamma(gamma);
  if (!(v_plus > 0.0 && v_plus < 1.0)) throw DomainError("v_plus must lie in (0, 1)");
  DerivedConstants c;
  if (gamma == 1.0) {
    c.a = v_plus;
  } else {
    const double vg = std::pow(v_plus, gamma);
    // 1 - v+^g via expm1 keeps precision when gamma is close to 1.
    c.a = vg * (1.0 - v_plus) / -std::expm1(gamma * std::log(v_plus));
  }
  LayerParams p;
  p.gamma = gamma;
  p.v_plus = v_plus;
  p.a = c.a;
  c.rhs_at_v_plus = profile_rhs(v_plus, p);
  c.rhs_at_one = profile_rhs(1.0, p);
  return c;
}

LayerParams make_layer_params(double gamma, double v_plus, double v0, Side side) {
  check_gamma(gamma);
  check_ordering(v_plus, v0, side);
  LayerParams p;
  p.gamma = gamma;
  p.v_plus = v_plus;
  p.v0 = v0;
  p.side = side;
  if (v_plus == 0.0) {
    p.a = 0.0;
    p.delta = limiting_delta(v0);
  } else {
    p.a = derive_constants(gamma, v_plus).a;
    p.delta = displacement(p);
  }
  return p;
}

double profile_rhs(double v, const LayerParams& p) {
  return v * (v - 1.0 + p.a * (std::pow(v, -p.gamma) - 1.0));
}

double deviation_rhs(double d, const LayerParams& p) {
  const double v = p.endstate() + d;
  if (p.limiting()) return v * (v - 1.0);
  double bracket;
  if (p.side == Side::Inflow) {
    // H = v [d + C ((1 + d / v+)^-g - 1)] with C = a v+^-g = (1 - v+) / (1 - v+^g).
    const double c = (1.0 - p.v_plus) / -std::expm1(p.gamma * std::log(p.v_plus));
    bracket = d + c * std::expm1(-p.gamma * std::log1p(d / p.v_plus));
  } else {
    bracket = d + p.a * std::expm1(-p.gamma * std::log1p(d));
  }
  return v * bracket;
}

double displacement(const LayerParams& p) {
  if (p.limiting()) return limiting_delta(p.v0);
  const double d0 = p.v0 - p.endstate();
  const double dm = 0.5 * (1.0 + p.v_plus) - p.endstate();
  if (d0 == dm) return 0.0;
  auto integrand = [&](double d) { return 1.0 / deviation_rhs(d, p); };
  double err = 0.0;
  const double val =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, d0, dm, 12, 1e-12, &err);
  if (!std::isfinite(val)) throw IntegrationError("displacement quadrature failed");
  return val;
}

double gamma_one_profile(double x, double v_plus, double v0) {
  // v' = (v - 1)(v - v+) gives (v - 1) / (v - v+) = K' e^{(1 - v+) x}.
  const double s = 1.0 - v_plus;
  const double k = (1.0 - v0) / (v0 - v_plus);
  const double e = k * std::exp(s * x);
  return (1.0 + v_plus * e) / (1.0 + e);
}

Profile solve_profile(const LayerParams& p, double L, double rel_tol) {
  if (!(L > 0.0)) throw DomainError("profile length L must be positive");
  check_ordering(p.v_plus, p.v0, p.side);
  if (p.limiting()) return limiting_profile(p.v0, p.side, L, p.gamma);

  Profile prof;
  prof.params_ = p;
  prof.length_ = L;

  const double x1 = p.side == Side::Inflow ? L : -L;
  std::array<double, 1> y{p.v0 - p.endstate()};
  ode::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 0.0;
  const std::array<ode::ErrorControl, 1> control{ode::ErrorControl::Relative};

  auto rhs = [&](double, const std::array<double, 1>& d, std::array<double, 1>& dd) {
    dd[0] = deviation_rhs(d[0], p);
  };
  auto observe = [&](double x, const std::array<double, 1>& d) {
    if (d[0] == 0.0 || (d[0] > 0.0) != (p.side == Side::Inflow))
      throw IntegrationError("profile deviation changed sign");
    prof.x_.push_back(x);
    prof.d_.push_back(d[0]);
  };
  ode::integrate<double, 1>(rhs, 0.0, x1, y, opt, control, observe);

  if (p.side == Side::Outflow) {
    std::reverse(prof.x_.begin(), prof.x_.end());
    std::reverse(prof.d_.begin(), prof.d_.end());
  }
  // l = log|d| has l' = H/d and l'' = l' (H'(v) - l'), with H'(v) = f(v).
  prof.log_slope_.resize(prof.d_.size());
  prof.log_curv_.resize(prof.d_.size());
  for (std::size_t i = 0; i < prof.d_.size(); ++i) {
    const double v = p.endstate() + prof.d_[i];
    const double s = deviation_rhs(prof.d_[i], p) / prof.d_[i];
    const double dh = 2.0 * v - 1.0 - p.a - p.a * (p.gamma - 1.0) * std::pow(v, -p.gamma);
    prof.log_slope_[i] = s;
    prof.log_curv_[i] = s * (dh - s);
  }
  return prof;
}

Profile limiting_profile(double v0, Side side, double L, double gamma) {
  if (!(v0 > 0.0 && v0 < 1.0)) throw DomainError("limiting profile requires 0 < v0 < 1");
  if (!(L > 0.0)) throw DomainError("profile length L must be positive");
  Profile prof;
  prof.params_.gamma = gamma;
  prof.params_.v_plus = 0.0;
  prof.params_.v0 = v0;
  prof.params_.side = side;
  prof.params_.a = 0.0;
  prof.params_.delta = limiting_delta(v0);
  prof.length_ = L;
  prof.closed_form_ = true;
  return prof;
}

double Profile::deviation(double x) const {
  if (closed_form_) return limiting_deviation(x, params_.delta, params_.side);
  const double slack = 1e-12 * std::max(1.0, length_);
  if (x < lower() - slack || x > upper() + slack) {
    std::ostringstream msg;
    msg << "x = " << x << " outside profile domain [" << lower() << ", " << upper() << "]";
    throw DomainError(msg.str());
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);

  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double l0 = std::log(std::abs(d_[i]));
  const double l1 = std::log(std::abs(d_[i + 1]));
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double b0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, b1 = t - 6 * t3 + 8 * t4 - 3 * t5,
               b2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), b3 = 0.5 * (t3 - 2 * t4 + t5), b4 = -4 * t3 + 7 * t4 - 3 * t5,
               b5 = 10 * t3 - 15 * t4 + 6 * t5;
  const double l = b0 * l0 + b1 * h * log_slope_[i] + b2 * h * h * log_curv_[i] + b3 * h * h * log_curv_[i + 1] +
                   b4 * h * log_slope_[i + 1] + b5 * l1;
  return std::copysign(std::exp(l), d_[i]);
}

double Profile::value(double x) const {
  if (closed_form_) return 1.0 / (1.0 + std::exp(x - params_.delta));
  return params_.endstate() + deviation(x);
}

double Profile::slope(double x) const { return deviation_rhs(deviation(x), params_); }

double Profile::locate_delta() const {
  const double mid = 0.5 * (1.0 + params_.v_plus);
  double lo = lower(), hi = upper();
  double flo = value(lo) - mid, fhi = value(hi) - mid;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw DomainError("displacement lies outside the profile domain");
  while (hi - lo > 1e-10) {
    const double m = 0.5 * (lo + hi);
    const double fm = value(m) - mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

void Profile::write_csv(std::ostream& out, std::size_t closed_form_points) const {
  out << "x,vhat,dvhat\n";
  out << std::setprecision(17);
  auto row = [&](double x, double d) {
    out << x << ',' << params_.endstate() + d << ',' << deviation_rhs(d, params_) << '\n';
  };
  if (closed_form_) {
    const std::size_t n = std::max<std::size_t>(closed_form_points, 2);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = lower() + (upper() - lower()) * static_cast<double>(k) / static_cast<double>(n - 1);
      row(x, deviation(x));
    }
    return;
  }
  for (std::size_t i = 0; i < x_.size(); ++i) row(x_[i], d_[i]);
}

}  // namespace blstab
