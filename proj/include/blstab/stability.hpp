#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "blstab/contour.hpp"
#include "blstab/evans.hpp"

namespace blstab {

struct RealAxisScan {
  std::vector<double> lambdas;  // 0, eps0, 2 eps0, 3 eps0, then a uniform grid up to R
  std::vector<double> values;   // Re D
  double max_imag_ratio = 0.0;  // max |Im D| / max |D|
  bool origin_root = false;     // variant has a known root at 0 (D(0) recorded as 0)
  bool zero_at_origin = false;  // origin root confirmed linear by the ratio test
  double transversal_slope = 0.0;
  std::size_t sign_changes = 0;  // on (0, R], plus [0, eps0] when D(0) was evaluated
};

constexpr double kScanEps0 = 1e-6;

/// Samples D on 0, eps0, 2 eps0, 3 eps0 and n uniform points of (3 eps0, R].
/// With `origin_root` the value at 0 is the known root and is not evaluated.
RealAxisScan real_axis_scan(const BatchEvaluator& f, bool origin_root, double R = 15.0, std::size_t n = 50);

RealAxisScan real_axis_scan(const EvansFunction& d, double R = 15.0, std::size_t n = 50,
                            Execution exec = Execution::Parallel);

/// sign(D(0) D(R)), or sign(D'(0) D(R)) when the scan has an origin root.
/// Throws DegenerateError when D(0) (or the slope) is below 1e-10 |D(R)|.
int stability_index(const RealAxisScan& scan);

/// Evaluates only what the index needs: 0 (or the three slope nodes) and R.
int stability_index(const BatchEvaluator& f, bool origin_root, double R = 15.0);

int stability_index(const EvansFunction& d, double R = 15.0);

/// Fixed point of v = exp(-2 / (1 - v)^2) by direct iteration.
double vstar(double start = 0.1, double tol = 1e-10);

struct LimitComparison {
  std::vector<double> v_plus;
  std::vector<double> distance;  // max over contour of |D(v+) - D0|
  double reference_scale = 0.0;  // max over contour of |D0|
};

/// Sup distance over the contour points between the finite-amplitude Evans
/// functions and the limiting one (v+ = 0) with the same gamma, v0, side.
/// A zero in `v_plus_list` compares the reference with itself.
LimitComparison limit_comparison(const LayerParams& base, std::span<const double> v_plus_list, const Contour& c,
                                 const ShootingOptions& opt = {}, Execution exec = Execution::Parallel);

/// CSV `lambda,D`.
void write_scan_csv(std::ostream& out, const RealAxisScan& scan);

}  // namespace blstab
