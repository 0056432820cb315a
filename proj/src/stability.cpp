#include "blstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace blstab {

namespace {

std::vector<Complex> real_points(std::span<const double> xs) {
  std::vector<Complex> z(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) z[i] = xs[i];
  return z;
}

double one_sided_slope(double d1, double d2, double d3, double h) { return (-3.0 * d1 + 4.0 * d2 - d3) / (2.0 * h); }

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

}  // namespace

RealAxisScan real_axis_scan(const BatchEvaluator& f, bool origin_root, double R, std::size_t n) {
  if (!(R > 0.0)) throw DomainError("scan radius must be positive");
  if (n < 10) throw DomainError("scan needs at least 10 points");
  RealAxisScan s;
  s.origin_root = origin_root;
  s.lambdas = {0.0, kScanEps0, 2 * kScanEps0, 3 * kScanEps0};
  for (std::size_t k = 1; k <= n; ++k) s.lambdas.push_back(R * static_cast<double>(k) / static_cast<double>(n));

  const std::size_t first = origin_root ? 1 : 0;
  const auto z = real_points(std::span<const double>(s.lambdas).subspan(first));
  const std::vector<Complex> d = f(z);
  if (d.size() != z.size()) throw DomainError("evaluator returned the wrong number of values");

  s.values.assign(s.lambdas.size(), 0.0);
  double scale = 0.0, imag = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    s.values[i + first] = d[i].real();
    scale = std::max(scale, std::abs(d[i]));
    imag = std::max(imag, std::abs(d[i].imag()));
  }
  s.max_imag_ratio = scale > 0.0 ? imag / scale : 0.0;

  const double d1 = s.values[1], d2 = s.values[2], d3 = s.values[3];
  s.transversal_slope = one_sided_slope(d1, d2, d3, kScanEps0);
  if (origin_root) {
    const bool linear = d1 != 0.0 && std::abs(d2 / d1 / 2.0 - 1.0) <= 0.2 && std::abs(d3 / d1 / 3.0 - 1.0) <= 0.2;
    s.zero_at_origin = linear && s.transversal_slope != 0.0;
  }

  for (std::size_t i = first; i + 1 < s.values.size(); ++i)
    if (s.values[i] * s.values[i + 1] < 0.0) ++s.sign_changes;
  return s;
}

RealAxisScan real_axis_scan(const EvansFunction& d, double R, std::size_t n, Execution exec) {
  return real_axis_scan(batch(d, exec), has_origin_root(d.variant()), R, n);
}

int stability_index(const RealAxisScan& scan) {
  const double far = scan.values.back();
  const double near = scan.origin_root ? scan.transversal_slope : scan.values.front();
  if (!(std::abs(near) >= 1e-10 * std::abs(far)) || far == 0.0) {
    std::ostringstream msg;
    msg << (scan.origin_root ? "slope D'(0) = " : "D(0) = ") << near << " is degenerate against D(R) = " << far;
    throw DegenerateError(msg.str());
  }
  return sign_of(near) * sign_of(far);
}

int stability_index(const BatchEvaluator& f, bool origin_root, double R) {
  RealAxisScan s;
  s.origin_root = origin_root;
  if (origin_root) {
    const std::vector<double> xs{kScanEps0, 2 * kScanEps0, 3 * kScanEps0, R};
    const auto d = f(real_points(xs));
    s.transversal_slope = one_sided_slope(d[0].real(), d[1].real(), d[2].real(), kScanEps0);
    s.values = {0.0, d[3].real()};
  } else {
    const std::vector<double> xs{0.0, R};
    const auto d = f(real_points(xs));
    s.values = {d[0].real(), d[1].real()};
  }
  return stability_index(s);
}

int stability_index(const EvansFunction& d, double R) {
  return stability_index(batch(d, Execution::Serial), has_origin_root(d.variant()), R);
}

double vstar(double start, double tol) {
  double v = start;
  for (int k = 0; k < 10000; ++k) {
    const double next = std::exp(-2.0 / ((1.0 - v) * (1.0 - v)));
    if (std::abs(next - v) < tol) return next;
    v = next;
  }
  throw NumericalError("v* iteration did not converge");
}

LimitComparison limit_comparison(const LayerParams& base, std::span<const double> v_plus_list, const Contour& c,
                                 const ShootingOptions& opt, Execution exec) {
  const std::span<const Complex> pts(c.points.data(), c.points.size() - 1);
  const LayerParams ref_p = make_layer_params(base.gamma, 0.0, base.v0, base.side);
  const auto ref = EvansFunction(ref_p, opt).sample_path(pts, exec);

  LimitComparison out;
  for (const auto& r : ref) out.reference_scale = std::max(out.reference_scale, std::abs(r.value));
  for (double vp : v_plus_list) {
    out.v_plus.push_back(vp);
    if (vp == 0.0) {
      out.distance.push_back(0.0);
      continue;
    }
    const auto s = EvansFunction(make_layer_params(base.gamma, vp, base.v0, base.side), opt).sample_path(pts, exec);
    double dist = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dist = std::max(dist, std::abs(s[i].value - ref[i].value));
    out.distance.push_back(dist);
  }
  return out;
}

void write_scan_csv(std::ostream& out, const RealAxisScan& scan) {
  out << "lambda,D\n" << std::setprecision(17);
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) out << scan.lambdas[i] << ',' << scan.values[i] << '\n';
}

}  // namespace blstab
