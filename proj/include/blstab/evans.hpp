#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "blstab/eigensystem.hpp"
#include "blstab/layer_params.hpp"
#include "blstab/ode.hpp"
#include "blstab/parallel.hpp"

namespace blstab {

enum class Variant { In, Out, LimIn, LimOut };

const char* to_string(Variant v);

/// In/Out for v_plus > 0, LimIn/LimOut for the v_plus = 0 sentinel.
Variant variant_for(const LayerParams& p);

/// True for the variants with a known root at lambda = 0.
bool has_origin_root(Variant v);

struct ShootingOptions {
  double L = 18.0;
  double abs_tol = 1e-6;
  double rel_tol = 1e-8;
  double profile_rel_tol = 1e-10;
  Complex lambda_ref = 1.0;
  KatoOptions kato{};
};

struct EvansSample {
  Complex lambda;
  Complex value;
  Variant variant = Variant::In;
  ode::Stats meta{};
};

/// Boundary data at x = 0.
struct BoundaryData {
  Side side = Side::Inflow;
  Vec3 w01{1.0, 0.0, 0.0};
  std::array<Vec3, 2> w0_basis{};  // outflow: (1,0,0) and (0, -l/(l - v'(0)), 1)
  Vec3 wtilde0{};                  // outflow: (0, -1, -conj(l)/(conj(l) - v'(0)))
  Complex alpha = 0.0;             // -v'(0) / (l - v'(0))
};

BoundaryData boundary_data(Complex lambda, Side side, double dvhat0);

struct ShotResult {
  Vec3 value;  // state at x = 0
  ode::Stats stats;
};

/// Adjoint shot Z' = (-A^* + conj(mu) I) Z from Z(L) = frame.dual down to
/// x = 0, co-integrating the profile deviation. Returns the dual mode at 0.
ShotResult shoot_adjoint_inflow(const Profile& profile, Complex lambda, const KatoFrame& frame,
                                const ShootingOptions& opt = {});

/// Forward shot Z' = (A - mu I) Z from Z(-L) = frame.vector up to x = 0.
ShotResult shoot_unstable_outflow(const Profile& profile, Complex lambda, const KatoFrame& frame,
                                  const ShootingOptions& opt = {});

/// Limiting adjoint shot Z' = -A0^* Z from Z(L) = gauge(lambda) * V1 down to 0.
ShotResult shoot_limiting_inflow(const Profile& profile, Complex lambda, const ShootingOptions& opt = {});

/// Scalar that carries the limiting inflow direction into the Kato gauge of
/// the finite-amplitude family: conj(((g + l) / (g + l_ref))^(1/4)).
Complex limiting_gauge(Complex lambda, double gamma, Complex lambda_ref = 1.0);

/// Evans function of one parameter point. Holds the profile; every call is
/// independent and safe to run concurrently.
class EvansFunction {
 public:
  explicit EvansFunction(const LayerParams& p, const ShootingOptions& opt = {});

  Variant variant() const { return variant_; }
  const LayerParams& params() const { return profile_.params(); }
  const Profile& profile() const { return profile_; }
  const ShootingOptions& options() const { return opt_; }

  /// Kato frame at lambda, continued from lambda_ref along a straight segment.
  KatoFrame frame(Complex lambda) const;

  EvansSample sample(Complex lambda) const;
  EvansSample sample(Complex lambda, const KatoFrame& frame) const;
  Complex operator()(Complex lambda) const { return sample(lambda).value; }

  /// Samples a list of points. Each frame is continued straight from
  /// lambda_ref, so points are independent and run in parallel (or serially).
  std::vector<EvansSample> sample_path(std::span<const Complex> path, Execution exec = Execution::Parallel) const;

 private:
  Profile profile_;
  ShootingOptions opt_;
  Variant variant_;
};

EvansSample evans_inflow(const LayerParams& p, Complex lambda, const ShootingOptions& opt = {});
EvansSample evans_outflow(const LayerParams& p, Complex lambda, const ShootingOptions& opt = {});
EvansSample evans_limit(const LayerParams& p, Complex lambda, const ShootingOptions& opt = {});

/// Unstable eigenvalue (largest real part) of A_+ or A_-. Zero for the
/// limiting A_+, whose non-fast spectrum is {0, 0}.
Complex unstable_rate(Complex lambda, const LayerParams& p, End end);

/// Shock-limit factor c(lambda) = exp((mu1+ - mu1-) x0) for both sides:
/// removes the exp(-mu1+ x0) and exp(mu1- x0) weights that the displaced
/// boundary picks up relative to a shock centered at x0.
Complex shock_correction(const LayerParams& p, Complex lambda, double x0);

/// |W1+(L + delta) - V1| for each L: the finite-amplitude adjoint mode in the
/// standard normalization (second component -1, asymptotic to
/// exp(-conj(mu) (x - delta)) times its eigenvector), shot from x = opt.L,
/// against the limiting direction V1.
std::vector<double> boundary_mismatch(const LayerParams& p, Complex lambda, std::span<const double> L_list,
                                      const ShootingOptions& opt = {});

/// CSV `re_lambda,im_lambda,re_D,im_D,variant`.
void write_samples_csv(std::ostream& out, std::span<const EvansSample> samples, bool header = true);

}  // namespace blstab
