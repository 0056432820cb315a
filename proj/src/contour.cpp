#include "blstab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace blstab {

namespace {

constexpr double kPi = std::numbers::pi;

// Interval count closest to `ideal` with the requested parity.
std::size_t nearest_with_parity(double ideal, std::size_t parity, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  double err = 1e300;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (k % 2 != parity) continue;
    const double e = std::abs(static_cast<double>(k) - ideal);
    if (e < err) {
      err = e;
      best = k;
    }
  }
  return best;
}

}  // namespace

double hf_bound(double gamma, Side side) {
  if (!(gamma >= 1.0)) throw DomainError("gamma must be >= 1");
  if (side == Side::Inflow) {
    const double s = 2.0 * std::sqrt(gamma) + 1.0;
    return 0.5 * s * s;
  }
  return std::max(3.0 * std::sqrt(2.0) / 2.0, 3.0 * gamma + 3.0 / 8.0);
}

Complex Contour::point_at(double t) const {
  if (pieces_.empty()) throw DomainError("contour has no pieces");
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(pieces_.size() - 1)));
  const double s = t - static_cast<double>(i);
  const Piece& p = pieces_[i];
  if (!p.arc) return p.a + s * (p.b - p.a);
  const double th = p.theta0 + s * (p.theta1 - p.theta0);
  double re = p.r * std::cos(th);
  if (std::abs(re) < 1e-15 * p.r) re = 0.0;
  return p.a + Complex(re, p.r * std::sin(th));
}

double Contour::signed_area() const {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k)
    s += points[k].real() * points[k + 1].imag() - points[k + 1].real() * points[k].imag();
  return 0.5 * s;
}

Contour semicircle(double radius, std::size_t n, double indent_radius) {
  if (n < 16) throw DomainError("contour needs at least 16 points");
  if (!(radius > indent_radius && indent_radius >= 0.0)) throw DomainError("need radius > indent_radius >= 0");
  Contour c;
  c.radius = radius;
  c.indent_radius = indent_radius;
  const Complex I(0.0, 1.0);
  const std::size_t intervals = n - 1;
  const double arc_share = kPi / (kPi + 2.0);
  std::vector<std::size_t> counts;

  using Piece = Contour::Piece;
  c.pieces_.push_back(Piece{true, 0.0, 0.0, radius, -kPi / 2, kPi / 2});
  if (indent_radius == 0.0) {
    // Odd axis count keeps 0 off the node set.
    const std::size_t arc = nearest_with_parity(intervals * arc_share, (intervals + 1) % 2, 2, intervals - 1);
    c.pieces_.push_back(Piece{false, I * radius, -I * radius});
    counts = {arc, intervals - arc};
  } else {
    const double e = indent_radius;
    const std::size_t k = intervals % 2 == 1 ? 5 : 6;
    const std::size_t rest = intervals - k;
    const std::size_t arc = nearest_with_parity(rest * arc_share, 0, 2, rest - 2);
    const std::size_t half = (rest - arc) / 2;
    c.pieces_.push_back(Piece{false, I * radius, I * e});
    c.pieces_.push_back(Piece{true, 0.0, 0.0, e, kPi / 2, -kPi / 2});
    c.pieces_.push_back(Piece{false, -I * e, -I * radius});
    counts = {arc, half, k, half};
  }

  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i]; ++j) {
      const double t = static_cast<double>(i) + static_cast<double>(j) / static_cast<double>(counts[i]);
      c.t.push_back(t);
      c.points.push_back(c.point_at(t));
    }
  c.t.push_back(c.t_end());
  c.points.push_back(c.points.front());
  return c;
}

BatchEvaluator batch(PointEvaluator f, Execution exec) {
  return [f = std::move(f), exec](std::span<const Complex> pts) {
    std::vector<Complex> out(pts.size());
    for_each_index(pts.size(), exec, [&](std::size_t i) { out[i] = f(pts[i]); });
    return out;
  };
}

BatchEvaluator batch(const EvansFunction& d, Execution exec) {
  return [&d, exec](std::span<const Complex> pts) {
    const auto s = d.sample_path(pts, exec);
    std::vector<Complex> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].value;
    return out;
  };
}

WindingReport winding_number(const BatchEvaluator& f, const Contour& c, const WindingOptions& opt) {
  if (c.points.size() < 3 || c.points.size() != c.t.size()) throw DomainError("malformed contour");
  std::vector<Complex> pts = c.points;
  std::vector<double> ts = c.t;
  std::vector<Complex> vals = f(std::span<const Complex>(pts.data(), pts.size() - 1));
  if (vals.size() + 1 != pts.size()) throw DomainError("evaluator returned the wrong number of values");
  vals.push_back(vals.front());

  WindingReport rep;
  const double min_step = 1e-9 * c.radius;
  for (;;) {
    double scale = 0.0;
    for (const auto& v : vals) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < vals.size(); ++k)
      if (!(std::abs(vals[k]) >= 1e-12 * scale)) {
        std::ostringstream msg;
        msg << "|D| = " << std::abs(vals[k]) << " at lambda = " << pts[k] << " is below 1e-12 of max |D| = " << scale;
        throw NearZeroError(msg.str());
      }

    std::vector<std::size_t> bad;
    for (std::size_t k = 0; k + 1 < vals.size(); ++k)
      if (std::abs(std::arg(vals[k + 1] / vals[k])) >= kPi / 2) bad.push_back(k);
    if (bad.empty()) break;
    if (pts.size() + bad.size() > opt.max_points) {
      std::ostringstream msg;
      msg << "winding refinement needs more than " << opt.max_points << " points";
      throw RefinementCapError(msg.str());
    }

    std::vector<double> new_t(bad.size());
    std::vector<Complex> new_p(bad.size());
    for (std::size_t j = 0; j < bad.size(); ++j) {
      const double t0 = ts[bad[j]], t1 = ts[bad[j] + 1];
      double tm = 0.5 * (t0 + t1);
      if (std::abs(c.point_at(tm)) < min_step) tm = t0 + 0.4 * (t1 - t0);
      new_t[j] = tm;
      new_p[j] = c.point_at(tm);
    }
    const std::vector<Complex> new_v = f(new_p);

    std::vector<Complex> p2, v2;
    std::vector<double> t2;
    p2.reserve(pts.size() + bad.size());
    v2.reserve(p2.capacity());
    t2.reserve(p2.capacity());
    std::size_t j = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      p2.push_back(pts[k]);
      v2.push_back(vals[k]);
      t2.push_back(ts[k]);
      if (j < bad.size() && bad[j] == k) {
        p2.push_back(new_p[j]);
        v2.push_back(new_v[j]);
        t2.push_back(new_t[j]);
        ++j;
      }
    }
    pts.swap(p2);
    vals.swap(v2);
    ts.swap(t2);
    rep.refined = true;
  }

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    const double step = std::arg(vals[k + 1] / vals[k]);
    total += step;
    rep.max_arg_step = std::max(rep.max_arg_step, std::abs(step));
  }
  rep.winding = std::lround(total / (2.0 * kPi));
  rep.n_points_final = pts.size();
  rep.points = std::move(pts);
  rep.values = std::move(vals);
  return rep;
}

WindingReport winding_number(const EvansFunction& d, const Contour& c, const WindingOptions& opt) {
  return winding_number(batch(d, opt.exec), c, opt);
}

}  // namespace blstab
