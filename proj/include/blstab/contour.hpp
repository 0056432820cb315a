#pragma once

#include <functional>
#include <span>
#include <vector>

#include "blstab/evans.hpp"
#include "blstab/parallel.hpp"
#include "blstab/types.hpp"

namespace blstab {

/// Radius bound on Re(l) + |Im(l)| for nonstable eigenvalues.
double hf_bound(double gamma, Side side);

/// Closed, counterclockwise boundary of the right half-disk, optionally with
/// a small half-circle into Re l > 0 around the origin. Every point carries
/// a parameter t (piece index + local fraction) so refinement can insert
/// points exactly on the curve.
class Contour {
 public:
  std::vector<Complex> points;
  std::vector<double> t;
  double radius = 10.0;
  double indent_radius = 0.0;

  Complex point_at(double t) const;
  double t_end() const { return static_cast<double>(pieces_.size()); }

  /// Shoelace area of the polygon through the points.
  double signed_area() const;

  friend Contour semicircle(double radius, std::size_t n, double indent_radius);

 private:
  struct Piece {
    bool arc;
    Complex a;  // segment start, or arc center
    Complex b;  // segment end
    double r = 0.0, theta0 = 0.0, theta1 = 0.0;
  };
  std::vector<Piece> pieces_;
};

/// n points including the closing duplicate of the first. Without an indent
/// the imaginary axis gets an odd interval count, so 0 is never a node.
Contour semicircle(double radius = 10.0, std::size_t n = 60, double indent_radius = 0.0);

struct WindingOptions {
  std::size_t max_points = 2048;
  Execution exec = Execution::Parallel;
};

struct WindingReport {
  long winding = 0;
  double max_arg_step = 0.0;
  std::size_t n_points_final = 0;
  bool refined = false;
  std::vector<Complex> points;
  std::vector<Complex> values;
};

using BatchEvaluator = std::function<std::vector<Complex>(std::span<const Complex>)>;
using PointEvaluator = std::function<Complex(Complex)>;

/// Lifts a pointwise evaluator into a batch one running under `exec`.
BatchEvaluator batch(PointEvaluator f, Execution exec = Execution::Parallel);

/// Batch evaluator backed by an Evans function.
BatchEvaluator batch(const EvansFunction& d, Execution exec = Execution::Parallel);

/// Winding of the image curve about 0, summed from principal arguments of
/// consecutive quotients. Segments turning by pi/2 or more are bisected in
/// parameter until every step is below pi/2.
/// Throws NearZeroError if some |D| < 1e-12 max|D| and RefinementCapError
/// past `max_points`.
WindingReport winding_number(const BatchEvaluator& f, const Contour& c, const WindingOptions& opt = {});

WindingReport winding_number(const EvansFunction& d, const Contour& c, const WindingOptions& opt = {});

}  // namespace blstab
