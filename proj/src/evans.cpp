#include "blstab/evans.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace blstab {

namespace {

using State = std::array<Complex, 4>;

constexpr double kOverflow = 1e100;

enum class Flow { Adjoint, Forward };

// Integrates the (shifted) eigenvalue system between x0 and x1. Component 3
// carries the profile deviation so that v-hat is evaluated on the same steps
// as the Evans state; closed-form profiles are evaluated directly instead.
ode::Stats integrate_system(const Profile& prof, Complex lambda, Complex shift, Flow flow, double x0, double x1,
                            State& y, const ShootingOptions& opt) {
  const LayerParams& p = prof.params();
  const bool closed = prof.closed_form();
  const double end = p.endstate();
  const Complex lb = std::conj(lambda);
  const Complex cs = std::conj(shift);

  auto rhs = [&](double x, const State& s, State& ds) {
    const double v = closed ? prof.value(x) : end + s[3].real();
    const double f = scalar_f_alt(v, p);
    if (flow == Flow::Adjoint) {
      ds[0] = -v * s[2] + cs * s[0];
      ds[1] = -lb * s[0] - v * s[2] + cs * s[1];
      ds[2] = -lb * s[0] - lb * s[1] - (f - lb) * s[2] + cs * s[2];
    } else {
      ds[0] = -shift * s[0] + lambda * s[1] + lambda * s[2];
      ds[1] = -shift * s[1] + lambda * s[2];
      ds[2] = v * s[0] + v * s[1] + (f - lambda - shift) * s[2];
    }
    ds[3] = closed ? 0.0 : deviation_rhs(s[3].real(), p);
  };
  auto observe = [&](double x, const State& s) {
    for (std::size_t i = 0; i < 3; ++i)
      if (!(std::abs(s[i]) <= kOverflow)) {
        std::ostringstream msg;
        msg << "Evans state overflow at x = " << x << ", lambda = " << lambda;
        throw OverflowError(msg.str());
      }
  };
  ode::Options o;
  o.abs_tol = opt.abs_tol;
  o.rel_tol = opt.rel_tol;
  const std::array<ode::ErrorControl, 4> control{ode::ErrorControl::Mixed, ode::ErrorControl::Mixed,
                                                 ode::ErrorControl::Mixed, ode::ErrorControl::Relative};
  return ode::integrate<Complex, 4>(rhs, x0, x1, y, o, control, observe);
}

State initial_state(const Profile& prof, const Vec3& z, double x) {
  return {z[0], z[1], z[2], Complex(prof.closed_form() ? 0.0 : prof.deviation(x))};
}

double boundary_slope(const LayerParams& p) { return deviation_rhs(p.v0 - p.endstate(), p); }

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::In:
      return "in";
    case Variant::Out:
      return "out";
    case Variant::LimIn:
      return "lim_in";
    case Variant::LimOut:
      return "lim_out";
  }
  return "?";
}

Variant variant_for(const LayerParams& p) {
  if (p.side == Side::Inflow) return p.limiting() ? Variant::LimIn : Variant::In;
  return p.limiting() ? Variant::LimOut : Variant::Out;
}

bool has_origin_root(Variant v) { return v != Variant::In; }

BoundaryData boundary_data(Complex lambda, Side side, double dvhat0) {
  BoundaryData b;
  b.side = side;
  if (side == Side::Inflow) return b;
  b.alpha = -dvhat0 / (lambda - dvhat0);
  b.w0_basis[0] = {1.0, 0.0, 0.0};
  b.w0_basis[1] = {0.0, -lambda / (lambda - dvhat0), 1.0};
  const Complex lb = std::conj(lambda);
  b.wtilde0 = {0.0, -1.0, -lb / (lb - dvhat0)};
  return b;
}

ShotResult shoot_adjoint_inflow(const Profile& profile, Complex lambda, const KatoFrame& frame,
                                const ShootingOptions& opt) {
  const double L = profile.upper();
  State y = initial_state(profile, frame.dual, L);
  ShotResult r;
  r.stats = integrate_system(profile, lambda, frame.mu, Flow::Adjoint, L, 0.0, y, opt);
  r.value = {y[0], y[1], y[2]};
  return r;
}

ShotResult shoot_unstable_outflow(const Profile& profile, Complex lambda, const KatoFrame& frame,
                                  const ShootingOptions& opt) {
  const double x0 = profile.lower();
  State y = initial_state(profile, frame.vector, x0);
  ShotResult r;
  r.stats = integrate_system(profile, lambda, frame.mu, Flow::Forward, x0, 0.0, y, opt);
  r.value = {y[0], y[1], y[2]};
  return r;
}

Complex limiting_gauge(Complex lambda, double gamma, Complex lambda_ref) {
  return std::conj(std::pow((gamma + lambda) / (gamma + lambda_ref), 0.25));
}

ShotResult shoot_limiting_inflow(const Profile& profile, Complex lambda, const ShootingOptions& opt) {
  const double L = profile.upper();
  const Vec3 seed = limiting_gauge(lambda, profile.params().gamma, opt.lambda_ref) * limiting_adjoint_direction(lambda);
  State y = initial_state(profile, seed, L);
  ShotResult r;
  r.stats = integrate_system(profile, lambda, 0.0, Flow::Adjoint, L, 0.0, y, opt);
  r.value = {y[0], y[1], y[2]};
  return r;
}

EvansFunction::EvansFunction(const LayerParams& p, const ShootingOptions& opt)
    : profile_(p.limiting() ? limiting_profile(p.v0, p.side, opt.L, p.gamma)
                            : solve_profile(p, opt.L, opt.profile_rel_tol)),
      opt_(opt),
      variant_(variant_for(p)) {}

KatoFrame EvansFunction::frame(Complex lambda) const {
  if (variant_ == Variant::LimIn) {
    KatoFrame f;
    f.lambda = lambda;
    f.dual = limiting_gauge(lambda, params().gamma, opt_.lambda_ref) * limiting_adjoint_direction(lambda);
    return f;
  }
  return frame_at(params(), lambda, opt_.lambda_ref, opt_.kato);
}

EvansSample EvansFunction::sample(Complex lambda) const {
  if (variant_ == Variant::LimIn) return sample(lambda, KatoFrame{});
  return sample(lambda, frame(lambda));
}

EvansSample EvansFunction::sample(Complex lambda, const KatoFrame& frame) const {
  if (lambda.real() < -1e-12) throw DomainError("Evans function is evaluated on Re lambda >= 0 only");
  EvansSample s;
  s.lambda = lambda;
  s.variant = variant_;
  ShotResult shot;
  switch (variant_) {
    case Variant::In:
      shot = shoot_adjoint_inflow(profile_, lambda, frame, opt_);
      s.value = std::conj(shot.value[0]);
      break;
    case Variant::LimIn:
      shot = shoot_limiting_inflow(profile_, lambda, opt_);
      s.value = std::conj(shot.value[0]);
      break;
    case Variant::Out:
    case Variant::LimOut: {
      shot = shoot_unstable_outflow(profile_, lambda, frame, opt_);
      const BoundaryData b = boundary_data(lambda, Side::Outflow, boundary_slope(params()));
      s.value = pairing(b.wtilde0, shot.value);
      break;
    }
  }
  s.meta = shot.stats;
  return s;
}

std::vector<EvansSample> EvansFunction::sample_path(std::span<const Complex> path, Execution exec) const {
  std::vector<EvansSample> out(path.size());
  for_each_index(path.size(), exec, [&](std::size_t i) { out[i] = sample(path[i]); });
  return out;
}

EvansSample evans_inflow(const LayerParams& p, Complex lambda, const ShootingOptions& opt) {
  if (p.side != Side::Inflow || p.limiting()) throw DomainError("evans_inflow needs inflow parameters with v_plus > 0");
  return EvansFunction(p, opt).sample(lambda);
}

EvansSample evans_outflow(const LayerParams& p, Complex lambda, const ShootingOptions& opt) {
  if (p.side != Side::Outflow || p.limiting())
    throw DomainError("evans_outflow needs outflow parameters with v_plus > 0");
  return EvansFunction(p, opt).sample(lambda);
}

EvansSample evans_limit(const LayerParams& p, Complex lambda, const ShootingOptions& opt) {
  if (!p.limiting()) throw DomainError("evans_limit needs the v_plus = 0 sentinel");
  return EvansFunction(p, opt).sample(lambda);
}

Complex unstable_rate(Complex lambda, const LayerParams& p, End end) {
  if (end == End::Plus && p.limiting()) return 0.0;
  return eigenvalues(endpoint_matrix(lambda, p, end).entries)[2];
}

Complex shock_correction(const LayerParams& p, Complex lambda, double x0) {
  if (x0 == 0.0) return 1.0;
  return std::exp((unstable_rate(lambda, p, End::Plus) - unstable_rate(lambda, p, End::Minus)) * x0);
}

std::vector<double> boundary_mismatch(const LayerParams& p, Complex lambda, std::span<const double> L_list,
                                      const ShootingOptions& opt) {
  if (p.side != Side::Inflow || p.limiting())
    throw DomainError("boundary mismatch is defined for finite-amplitude inflow layers");
  const Profile prof = solve_profile(p, opt.L, opt.profile_rel_tol);
  const KatoFrame fr = frame_at(p, lambda, opt.lambda_ref, opt.kato);
  // Standard normalization: second component -1 like the limiting direction,
  // exponential weight measured from the layer center.
  const Vec3 seed = (-1.0 / fr.dual[1]) * fr.dual;
  const Vec3 target = limiting_adjoint_direction(lambda);

  std::vector<std::size_t> order(L_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return L_list[a] > L_list[b]; });

  std::vector<double> out(L_list.size());
  State y = initial_state(prof, seed, opt.L);
  double x = opt.L;
  for (std::size_t idx : order) {
    const double xt = L_list[idx] + p.delta;
    if (!(xt >= 0.0 && xt <= opt.L)) {
      std::ostringstream msg;
      msg << "L + delta = " << xt << " outside [0, " << opt.L << "]";
      throw DomainError(msg.str());
    }
    integrate_system(prof, lambda, fr.mu, Flow::Adjoint, x, xt, y, opt);
    x = xt;
    const Complex w = std::exp(-std::conj(fr.mu) * (xt - p.delta));
    const Vec3 wt{w * y[0], w * y[1], w * y[2]};
    out[idx] = norm(wt - target);
  }
  return out;
}

void write_samples_csv(std::ostream& out, std::span<const EvansSample> samples, bool header) {
  if (header) out << "re_lambda,im_lambda,re_D,im_D,variant\n";
  out << std::setprecision(17);
  for (const auto& s : samples)
    out << s.lambda.real() << ',' << s.lambda.imag() << ',' << s.value.real() << ',' << s.value.imag() << ','
        << to_string(s.variant) << '\n';
}

}  // namespace blstab
