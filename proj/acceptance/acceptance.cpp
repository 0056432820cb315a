// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any criterion fails. Thresholds are fixed here, not tuned to results.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "blstab/harness.hpp"

using namespace blstab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const char* name, Verdict& v) {
  std::printf("%s criterion %d: %s%s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

const std::vector<double> kVPlus{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

SweepConfig base_config(Side side) {
  SweepConfig c;
  c.side = side;
  c.radius = 10.0;
  c.points = 60;
  return c;
}

void winding_sweep(Verdict& v, Side side, const std::vector<double>& v0s) {
  SweepConfig c = base_config(side);
  c.gamma_list = {1.2, 5.0 / 3.0, 3.0};
  c.v0_list = v0s;
  c.v_plus_list = kVPlus;
  const auto recs = run_sweep(c);
  std::size_t ok = 0, zero = 0, index_plus = 0;
  for (const auto& r : recs) {
    if (r.status != Status::Ok) {
      v.require(false, "gamma=" + std::to_string(r.gamma) + " v0=" + std::to_string(r.v0) +
                           " v+=" + sci(r.v_plus) + ": " + r.reason);
      continue;
    }
    ++ok;
    zero += *r.winding == 0;
    index_plus += *r.stability_index == 1;
  }
  v.require(recs.size() == 60, "60 cases");
  v.require(zero == recs.size(), "winding 0 in " + std::to_string(zero) + "/" + std::to_string(recs.size()));
  v.require(index_plus == ok, "index +1 in " + std::to_string(index_plus) + "/" + std::to_string(ok));
  v.detail << " " << zero << "/" << recs.size() << " zero windings";
}

void criterion1() {
  Verdict v;
  winding_sweep(v, Side::Inflow, {0.1, 0.2, 0.4, 0.7});
  report(1, "inflow winding sweep", v);
}

void criterion2() {
  Verdict v;
  winding_sweep(v, Side::Outflow, {0.2, 0.4, 0.6, 0.8});
  std::size_t transversal = 0, total = 0;
  for (double g : {1.2, 5.0 / 3.0, 3.0})
    for (double v0 : {0.2, 0.4, 0.6, 0.8})
      for (double vp : kVPlus) {
        ++total;
        try {
          const EvansFunction d(make_layer_params(g, vp, v0, Side::Outflow));
          const RealAxisScan s = real_axis_scan(d);
          double scale = 0.0;
          for (double x : s.values) scale = std::max(scale, std::abs(x));
          const bool root = std::abs(d(0.0)) <= 1e-6 * scale;
          if (s.zero_at_origin && s.sign_changes == 0 && root) ++transversal;
        } catch (const std::exception& e) {
          v.require(false, e.what());
        }
      }
  v.require(transversal == total, "single transversal origin root in " + std::to_string(transversal) + "/" +
                                      std::to_string(total) + " scans");
  v.detail << ", " << transversal << "/" << total << " scans with one transversal origin root";
  report(2, "outflow winding sweep and real-axis scans", v);
}

void criterion3() {
  Verdict v;
  const Contour c = semicircle(10.0, 60, 1e-4);
  const LimitComparison in = limit_comparison(make_layer_params(5.0 / 3.0, 1e-2, 0.2, Side::Inflow), kVPlus, c);
  for (std::size_t i = 0; i + 1 < in.distance.size(); ++i)
    v.require(in.distance[i + 1] < in.distance[i], "inflow distance not decreasing at v+=" + sci(in.v_plus[i + 1]));
  v.detail << " inflow";
  for (double d : in.distance) v.detail << " " << sci(d);
  const std::vector<double> one{1e-2};
  const LimitComparison out = limit_comparison(make_layer_params(5.0 / 3.0, 1e-2, 0.4, Side::Outflow), one, c);
  v.require(out.distance[0] < 1e-2 * out.reference_scale, "outflow distance above 1e-2 of scale");
  v.detail << "; outflow " << sci(out.distance[0]) << " vs scale " << sci(out.reference_scale);
  report(3, "convergence to the strong-layer limit", v);
}

std::vector<ConvergenceRow> study(Side side, bool tolerances) {
  SweepConfig c = base_config(side);
  c.gamma = 1.666;
  c.v_plus = 1e-4;
  c.v0 = 0.6;
  c.convergence_L = {8, 10, 12, 14, 16, 18, 20};
  auto rows = convergence_study(c);
  std::vector<ConvergenceRow> pick;
  for (const auto& r : rows)
    if ((r.study == "tol") == tolerances) pick.push_back(r);
  return pick;
}

void criterion4() {
  Verdict v;
  // Successive-L relative errors, L = 8 .. 18.
  const double paper_in[] = {9.2e-1, 9.2e-2, 3.6e-3, 1.3e-4, 4.7e-6, 8.0e-6};
  const double paper_out[] = {5.4e-3, 9.1e-4, 1.5e-4, 2.0e-5, 2.6e-6, 8.7e-6};
  for (Side side : {Side::Inflow, Side::Outflow}) {
    const auto rows = study(side, false);
    const double* ref = side == Side::Inflow ? paper_in : paper_out;
    v.detail << " " << to_string(side) << ":";
    for (std::size_t i = 0; i < rows.size() && i < 6; ++i) {
      v.detail << " L" << rows[i].L << "=" << sci(rows[i].max_rel_error);
      const bool in_band = rows[i].max_rel_error <= 10 * ref[i] && rows[i].max_rel_error >= ref[i] / 10;
      // factor-of-10 agreement where the paper is above its 1e-5 floor
      const bool checked = side == Side::Inflow ? (rows[i].L >= 10 && rows[i].L <= 14) : rows[i].L <= 14;
      if (checked) v.require(in_band, std::string(to_string(side)) + " L=" + std::to_string(int(rows[i].L)) +
                                          " outside 10x of " + sci(ref[i]));
      if (rows[i].L <= 12) v.require(rows[i + 1].max_rel_error < rows[i].max_rel_error, "not monotone to L=14");
      if (rows[i].L >= 16) v.require(rows[i].max_rel_error <= 1e-4, "L>=16 above 1e-4");
    }
  }
  report(4, "successive-L convergence table", v);
}

void criterion5() {
  Verdict v;
  for (Side side : {Side::Inflow, Side::Outflow}) {
    const auto rows = study(side, true);
    const double first = rows.front().max_rel_error, last = rows.back().max_rel_error;
    v.detail << " " << to_string(side) << ":";
    for (const auto& r : rows) v.detail << " " << sci(r.max_rel_error);
    v.require(first >= 1e-5 && first <= 1e-2, std::string(to_string(side)) + " loosest level off ~1e-3/1e-4");
    v.require(last >= 1e-8 && last <= 1e-5, std::string(to_string(side)) + " tightest level off ~1e-6/1e-7");
    v.require(last < first, std::string(to_string(side)) + " no decrease");
  }
  report(5, "tolerance convergence table", v);
}

void criterion6() {
  Verdict v;
  const double vs = vstar();
  v.require(std::abs(vs - 0.0899) <= 5e-4, "vstar " + std::to_string(vs));
  v.require(hf_bound(3.0, Side::Inflow) < 10.0 && hf_bound(3.0, Side::Outflow) < 10.0, "hf_bound(3) >= 10");

  std::mt19937 rng(7);
  const LayerParams p = make_layer_params(5.0 / 3.0, 1e-2, 0.6, Side::Inflow);
  const Profile prof = solve_profile(p);
  std::uniform_real_distribution<double> ux(0.0, prof.upper()), ua(-1.0, 1.0);
  double kernel = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Mat3 m = adjoint(coeff_matrix(ux(rng), 0.0, prof)).entries;
    const Vec3 z{Complex(ua(rng), ua(rng)), Complex(ua(rng), ua(rng)), 0.0};
    kernel = std::max(kernel, norm(m * z) / norm(z));
  }
  v.require(kernel <= 1e-12, "adjoint kernel residual " + sci(kernel));

  const LayerParams lim = make_layer_params(5.0 / 3.0, 0.0, 0.6, Side::Inflow);
  std::uniform_real_distribution<double> ur(0.0, 10.0), ui(-10.0, 10.0);
  double spec = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Complex l(ur(rng), ui(rng));
    auto mu = eigenvalues(endpoint_matrix(l, lim, End::Plus).entries);
    std::array<Complex, 3> want{-1.0 - l, 0.0, 0.0};
    std::sort(mu.begin(), mu.end(), [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
    for (int i = 0; i < 3; ++i) spec = std::max(spec, std::abs(mu[i] - want[i]) / std::max(1.0, std::abs(l)));
  }
  v.require(spec <= 1e-10, "limiting spectrum error " + sci(spec));

  const LayerParams o = make_layer_params(5.0 / 3.0, 1e-2, 0.6, Side::Outflow);
  const Profile op = solve_profile(o);
  const Vec3 w = shoot_unstable_outflow(op, 0.0, frame_at(o, 0.0)).value;
  const Vec3 t{0.0, 0.0, op.slope(0.0)};
  const Complex c = pairing(t, w) / pairing(t, t);
  const double angle = std::asin(std::min(1.0, norm(w - c * t) / norm(w)));
  v.require(angle < 1e-6, "outflow mode angle " + sci(angle));
  v.detail << " vstar=" << vs << " kernel=" << sci(kernel) << " spectrum=" << sci(spec) << " angle=" << sci(angle);
  report(6, "analytic cross-checks", v);
}

void criterion7() {
  Verdict v;
  // Kato pairing along the contour and monodromy on a regular circle.
  double pairing_drift = 0.0, closure = 0.0;
  for (Side side : {Side::Inflow, Side::Outflow}) {
    const LayerParams p = make_layer_params(5.0 / 3.0, 1e-2, 0.6, side);
    const Contour c = semicircle(10.0, 60, 1e-2);
    const auto frames = frames_along(p, c.points);
    for (const auto& f : frames) pairing_drift = std::max(pairing_drift, std::abs(pairing(f.dual, f.vector) - 1.0));
    closure = std::max(closure, norm(frames.back().vector - frames.front().vector) / norm(frames.front().vector));
  }
  v.require(pairing_drift < 1e-6, "pairing drift " + sci(pairing_drift));
  v.require(closure < 1e-6, "frame closure " + sci(closure));

  const LayerParams pin = make_layer_params(5.0 / 3.0, 1e-2, 0.6, Side::Inflow);
  const MatrixFamily fam = [&](Complex l) { return endpoint_matrix(l, pin, End::Minus).entries; };
  std::vector<Complex> circle;
  for (int k = 0; k <= 64; ++k) circle.push_back(5.0 + std::polar(1.0, 2 * std::numbers::pi * k / 64));
  const Mat3 a0 = fam(circle.front());
  const KatoFrame seed = make_frame(a0, circle.front(), eigenvalues(a0)[2]);
  const auto loop = kato_continue(seed, circle, fam);
  const double mono = norm(loop.back().vector - seed.vector) / norm(seed.vector);
  v.require(mono < 1e-6, "monodromy " + sci(mono));

  // Real on the real axis and conjugate symmetry.
  double imag_ratio = 0.0, conj_err = 0.0;
  for (const LayerParams& p : {make_layer_params(5.0 / 3.0, 1e-2, 0.4, Side::Inflow),
                               make_layer_params(5.0 / 3.0, 1e-2, 0.4, Side::Outflow),
                               make_layer_params(5.0 / 3.0, 0.0, 0.4, Side::Inflow)}) {
    const EvansFunction d(p);
    imag_ratio = std::max(imag_ratio, real_axis_scan(d, 15.0, 30).max_imag_ratio);
    for (Complex l : {Complex(0.5, 2.0), Complex(3.0, 7.0), Complex(0.0, 4.0)}) {
      const Complex up = d(l), down = d(std::conj(l));
      conj_err = std::max(conj_err, std::abs(down - std::conj(up)) / std::abs(up));
    }
  }
  v.require(imag_ratio <= 1e-8, "imaginary part on the real axis " + sci(imag_ratio));
  v.require(conj_err <= 1e-8, "conjugate symmetry " + sci(conj_err));

  // Winding under nonvanishing gauges.
  {
    const EvansFunction d(make_layer_params(5.0 / 3.0, 1e-3, 0.4, Side::Outflow));
    const Contour c = semicircle(10.0, 60, 1e-4);
    const WindingReport base = winding_number(d, c);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    bool same = true;
    for (int t = 0; t < 5; ++t) {
      const Complex g0(u(rng), u(rng)), g1(u(rng), u(rng)), g2(0.1 * u(rng), 0.1 * u(rng));
      const BatchEvaluator gauged = [&](std::span<const Complex> pts) {
        auto vals = batch(d)(pts);
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= std::exp(g0 + g1 * pts[i] + g2 * pts[i] * pts[i]);
        return vals;
      };
      same = same && winding_number(gauged, c).winding == base.winding;
    }
    v.require(same, "winding changed under a gauge");
  }

  // gamma = 1 closed form and endstate decay.
  double closed = 0.0;
  for (Side side : {Side::Inflow, Side::Outflow}) {
    const LayerParams p = make_layer_params(1.0, 0.25, 0.5, side);
    const Profile prof = solve_profile(p);
    for (int k = 0; k <= 2000; ++k) {
      const double x = prof.lower() + (prof.upper() - prof.lower()) * k / 2000.0;
      const double r = (1.0 - 0.5) / (0.5 - 0.25) * std::exp(0.75 * x);
      closed = std::max(closed, std::abs(prof.value(x) - (1.0 + 0.25 * r) / (1.0 + r)));
    }
  }
  v.require(closed < 1e-8, "gamma=1 profile error " + sci(closed));

  const LayerParams pd = make_layer_params(5.0 / 3.0, 0.01, 0.5, Side::Inflow);
  const Profile prof = solve_profile(pd);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 61;
  for (int k = 0; k < n; ++k) {
    const double x = pd.delta + 2.0 + 6.0 * k / (n - 1.0), y = std::log(prof.value(x) - pd.v_plus);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  v.require(rate >= 0.75, "decay rate " + std::to_string(rate));
  v.detail << " pairing=" << sci(pairing_drift) << " monodromy=" << sci(mono) << " imag=" << sci(imag_ratio)
           << " conj=" << sci(conj_err) << " closed_form=" << sci(closed) << " decay=" << rate;
  report(7, "property suites", v);
}

void criterion8() {
  Verdict v;
  SweepConfig c = base_config(Side::Inflow);
  c.gamma = 5.0 / 3.0;
  c.v_plus = 0.1;
  c.v0 = 0.99;
  c.shock_correction = true;
  const EvansFunction d(point_params(c), c.shooting);
  const WindingReport w = winding_number(evaluator(c, d), contour_for(c, d.variant()));
  v.require(w.winding == 0, "winding " + std::to_string(w.winding));
  double near = 1e300, far = 1e300;
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    double& m = std::abs(w.points[i]) < 1.0 ? near : far;
    m = std::min(m, std::abs(w.values[i]));
  }
  // One dimple: the image dips toward 0 only where lambda is near the origin.
  v.require(near < 0.9 * far, "no near-origin dimple");
  v.detail << " winding=" << w.winding << " min|D| near 0 " << near << " elsewhere " << far;
  report(8, "corrected inflow contour, qualitative", v);
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<void (*)()> criteria{criterion1, criterion2, criterion3, criterion4,
                                         criterion5, criterion6, criterion7, criterion8};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %zu: unexpected error: %s\n", i + 1, e.what());
      ++failures;
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
