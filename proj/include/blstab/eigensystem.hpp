#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "blstab/layer_params.hpp"
#include "blstab/types.hpp"

namespace blstab {

/// h(v) = -v^(g+1) + a (g - 1) + (a + 1) v^g.
double scalar_h(double v, const LayerParams& p);

/// f(v) = 2v - a (g - 1) v^-g - (a + 1). Reduces to 2v - 1 when v_plus = 0.
double scalar_f(double v, const LayerParams& p);

/// The same f written through (1 - v+) / (1 - v+^g) and (v+ / v)^g.
double scalar_f_alt(double v, const LayerParams& p);

enum class MatrixKind { Full, Limiting, Adjoint, AsymptoticPlus, AsymptoticMinus };

struct CoeffMatrix {
  Mat3 entries;
  MatrixKind kind = MatrixKind::Full;
};

enum class End { Plus, Minus };

/// Rows (0, l, l), (0, 0, l), (v, v, f(v) - l) for a given profile value v.
Mat3 system_matrix(double vhat, Complex lambda, const LayerParams& p);

/// A(x, lambda) on the profile; Limiting kind when the profile is the strong-layer limit.
CoeffMatrix coeff_matrix(double x, Complex lambda, const Profile& profile);

/// -M^* of a coefficient matrix.
CoeffMatrix adjoint(const CoeffMatrix& m);

/// A_+(lambda) (vhat = v_plus) or A_-(lambda) (vhat = 1).
CoeffMatrix endpoint_matrix(Complex lambda, const LayerParams& p, End end);

/// Eigenvalues of a 3x3 matrix from its characteristic cubic, each root
/// Newton-polished on the invariants. Sorted by real part, ties by imaginary part.
std::array<Complex, 3> eigenvalues(const Mat3& a);

/// Right null vector of a - mu I (bilinear cross product of rows).
Vec3 right_eigenvector(const Mat3& a, Complex mu);

/// Left null vector l with l (a - mu I) = 0, stored as a column.
Vec3 left_eigenvector(const Mat3& a, Complex mu);

struct Mode {
  Complex mu;
  Vec3 right;      // unit-norm right eigenvector
  Vec3 left;       // left eigenvector with left . right = 1 (bilinear) unless defective
  bool defective;  // left . right vanished (Jordan block)
};

/// Eigen-decomposition of the endpoint matrix, sorted as in `eigenvalues`.
/// Throws SplittingError if, for lambda != 0 with Re lambda >= 0, the minus
/// end does not have exactly one unstable mode or the plus end (v_plus > 0)
/// does not have exactly two stable modes.
std::array<Mode, 3> asymptotic_modes(Complex lambda, const LayerParams& p, End end);

/// Kernel direction (0, -1, conj(lambda / mu)) of the limiting adjoint at +inf, mu = -1 - lambda.
Vec3 limiting_adjoint_direction(Complex lambda);

/// Fast stable eigenvector ((l/mu)(l/mu + 1), l/mu, 1) of the limiting A_+, mu = -1 - lambda.
Vec3 limiting_fast_vector(Complex lambda);

/// Analytically continued eigenvector at one spectral point. `dual` is an
/// eigenvector of the matrix adjoint for conj(mu); pairings use the
/// conjugate convention, so <dual, vector> is analytic along a path.
struct KatoFrame {
  Complex lambda;
  Complex mu;
  Vec3 vector;
  Vec3 dual;
  Mat3 projector;
};

using MatrixFamily = std::function<Mat3(Complex)>;

struct KatoOptions {
  double tol = 1e-10;           // agreement between n and 2n substeps per segment
  double gap_tol = 1e-13;       // relative spectral gap below which a collision is declared
  std::size_t max_halvings = 18;
};

/// Eigen-data of `a` at the eigenvalue closest to `mu_guess`; vector and dual
/// are scaled so that <dual, vector> = 1.
KatoFrame make_frame(const Mat3& a, Complex lambda, Complex mu_guess, double gap_tol = 1e-13);

/// Marches `seed` (at path[0]) along the path with projector updates and
/// pairing-drift correction, refining each segment until n and 2n substeps
/// agree to `tol`. Returns one frame per path point.
std::vector<KatoFrame> kato_continue(const KatoFrame& seed, std::span<const Complex> path, const MatrixFamily& family,
                                     const KatoOptions& opt = {});

/// One segment of `kato_continue`.
KatoFrame kato_step(const KatoFrame& from, Complex to, const MatrixFamily& family, const KatoOptions& opt = {});

/// Gauge-fixed frame at `lambda_ref` for the mode used in shooting: the
/// unstable eigenvalue of A_+ (inflow, dual normalized to second component
/// -1) or of A_- (outflow, vector normalized to third component 1).
KatoFrame seed_frame(const LayerParams& p, Complex lambda_ref = 1.0);

/// Frame at `lambda`, continued from the seed along the straight segment
/// from `lambda_ref`. Path independent in the closed right half-plane minus 0.
/// Throws SplittingError if the continued eigenvalue is not the unstable one.
/// For inflow, |lambda| < 1e-12 returns the limit from the right (linear
/// extrapolation from 1e-8 and 2e-8), since the slow pair collides at 0.
KatoFrame frame_at(const LayerParams& p, Complex lambda, Complex lambda_ref = 1.0, const KatoOptions& opt = {});

/// Frames along an ordered path: straight continuation to path[0], then sequential.
std::vector<KatoFrame> frames_along(const LayerParams& p, std::span<const Complex> path, Complex lambda_ref = 1.0,
                                    const KatoOptions& opt = {});

}  // namespace blstab
