#include "blstab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

namespace blstab {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_fail(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) config_fail("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) config_fail("'" + key + "' must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) config_fail("'" + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

bool boolean(const json& j, const std::string& key) {
  if (!j.is_boolean()) config_fail("'" + key + "' must be true or false");
  return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array()) config_fail("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, key));
  return out;
}

Side side_from(const json& j) {
  if (j == "inflow") return Side::Inflow;
  if (j == "outflow") return Side::Outflow;
  config_fail("'side' must be \"inflow\" or \"outflow\"");
}

Complex complex_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  config_fail("each lambda must be a number or a [re, im] pair");
}

std::vector<Complex> contour_values(const EvansFunction& f, std::span<const Complex> pts, Execution exec) {
  const auto s = f.sample_path(pts, exec);
  std::vector<Complex> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = s[i].value;
  return v;
}

double max_rel_error(const std::vector<Complex>& a, const std::vector<Complex>& base) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - base[i]) / std::abs(base[i]));
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string r;
  for (char ch : s) {
    switch (ch) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += ch;
    }
  }
  return r;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

// Linear map of a data box onto the drawing area, y pointing up.
struct Frame {
  double x0, x1, y0, y1;
  double left = 70, top = 50, width = 520, height = 520;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + (y1 - y) / (y1 - y0) * height; }
};

Frame padded(double x0, double x1, double y0, double y1) {
  if (x1 - x0 <= 0) x0 -= 1, x1 += 1;
  if (y1 - y0 <= 0) y0 -= 1, y1 += 1;
  const double mx = 0.06 * (x1 - x0), my = 0.06 * (y1 - y0);
  return {x0 - mx, x1 + mx, y0 - my, y1 + my};
}

void svg_open(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"640\" viewBox=\"0 0 760 640\">\n"
      << "<title>" << xml_escape(title) << "</title>\n"
      << "<rect width=\"760\" height=\"640\" fill=\"white\"/>\n"
      << "<text x=\"330\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
}

void svg_axes(std::ostream& out, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  out << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << std::setprecision(4);
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0, y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    out << "<text x=\"" << f.px(x) << "\" y=\"" << f.top + f.height + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << x << "</text>\n";
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << f.py(y) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << y << "</text>\n";
  }
  out << "<text x=\"" << f.left + f.width / 2 << "\" y=\"" << f.top + f.height + 38
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << f.top + f.height / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"13\" transform=\"rotate(-90 18 " << f.top + f.height / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Ok:
      return "ok";
    case Status::Skipped:
      return "skipped";
    case Status::Error:
      return "error";
  }
  return "?";
}

SweepConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"gamma", "v_plus", "v0", "side", "sweep", "contour", "shooting", "scan", "convergence",
              "shock_correction", "lambdas", "out"});
  SweepConfig c;
  if (j.contains("gamma")) c.gamma = number(j["gamma"], "gamma");
  if (j.contains("v_plus")) c.v_plus = number(j["v_plus"], "v_plus");
  if (j.contains("v0")) c.v0 = number(j["v0"], "v0");
  if (j.contains("side")) c.side = side_from(j["side"]);
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, "sweep", {"gamma", "v0", "v_plus", "ladder", "workers"});
    if (s.contains("gamma")) c.gamma_list = numbers(s["gamma"], "sweep.gamma");
    if (s.contains("v0")) c.v0_list = numbers(s["v0"], "sweep.v0");
    if (s.contains("v_plus")) c.v_plus_list = numbers(s["v_plus"], "sweep.v_plus");
    if (s.contains("ladder")) c.ladder = boolean(s["ladder"], "sweep.ladder");
    if (s.contains("workers")) c.workers = static_cast<int>(count(s["workers"], "sweep.workers"));
  }
  if (j.contains("contour")) {
    const json& s = j["contour"];
    check_keys(s, "contour", {"radius", "points", "indent"});
    if (s.contains("radius")) c.radius = number(s["radius"], "contour.radius");
    if (s.contains("points")) c.points = count(s["points"], "contour.points");
    if (s.contains("indent")) {
      if (s["indent"] == "auto")
        c.indent.reset();
      else
        c.indent = number(s["indent"], "contour.indent");
    }
  }
  if (j.contains("shooting")) {
    const json& s = j["shooting"];
    check_keys(s, "shooting", {"L", "abs_tol", "rel_tol", "profile_rel_tol", "lambda_ref"});
    if (s.contains("L")) c.shooting.L = number(s["L"], "shooting.L");
    if (s.contains("abs_tol")) c.shooting.abs_tol = number(s["abs_tol"], "shooting.abs_tol");
    if (s.contains("rel_tol")) c.shooting.rel_tol = number(s["rel_tol"], "shooting.rel_tol");
    if (s.contains("profile_rel_tol"))
      c.shooting.profile_rel_tol = number(s["profile_rel_tol"], "shooting.profile_rel_tol");
    if (s.contains("lambda_ref")) c.shooting.lambda_ref = number(s["lambda_ref"], "shooting.lambda_ref");
  }
  if (j.contains("scan")) {
    const json& s = j["scan"];
    check_keys(s, "scan", {"radius", "points"});
    if (s.contains("radius")) c.scan_radius = number(s["radius"], "scan.radius");
    if (s.contains("points")) c.scan_points = count(s["points"], "scan.points");
  }
  if (j.contains("convergence")) {
    const json& s = j["convergence"];
    check_keys(s, "convergence", {"L", "tolerances"});
    if (s.contains("L")) c.convergence_L = numbers(s["L"], "convergence.L");
    if (s.contains("tolerances")) {
      if (!s["tolerances"].is_array()) config_fail("'convergence.tolerances' must be an array of [abs, rel] pairs");
      c.convergence_tol.clear();
      for (const auto& t : s["tolerances"]) {
        if (!t.is_array() || t.size() != 2) config_fail("each tolerance level must be an [abs, rel] pair");
        c.convergence_tol.emplace_back(number(t[0], "abs_tol"), number(t[1], "rel_tol"));
      }
    }
  }
  if (j.contains("shock_correction")) c.shock_correction = boolean(j["shock_correction"], "shock_correction");
  if (j.contains("lambdas")) {
    if (!j["lambdas"].is_array()) config_fail("'lambdas' must be an array");
    for (const auto& z : j["lambdas"]) c.lambdas.push_back(complex_from(z));
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) config_fail("'out' must be a string");
    c.out_dir = j["out"].get<std::string>();
  }
  validate(c);
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_fail("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_fail("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void validate(const SweepConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) config_fail(msg);
  };
  require(c.gamma >= 1.0, "gamma must be >= 1");
  require(c.v_plus >= 0.0 && c.v_plus < 1.0, "v_plus must lie in [0, 1)");
  require(c.v0 > c.v_plus && c.v0 < 1.0, "v0 must lie in (v_plus, 1)");
  for (double g : c.gamma_list) require(g >= 1.0, "sweep.gamma entries must be >= 1");
  for (double v : c.v0_list) require(v > 0.0 && v < 1.0, "sweep.v0 entries must lie in (0, 1)");
  for (double v : c.v_plus_list) require(v >= 0.0 && v < 1.0, "sweep.v_plus entries must lie in [0, 1)");
  require(c.radius > 0.0, "contour.radius must be positive");
  require(c.points >= 16, "contour.points must be at least 16");
  if (c.indent) require(*c.indent >= 0.0 && *c.indent < c.radius, "contour.indent must lie in [0, radius)");
  require(c.shooting.L > 0.0, "shooting.L must be positive");
  require(c.shooting.abs_tol > 0.0 && c.shooting.rel_tol > 0.0, "tolerances must be positive");
  require(c.shooting.profile_rel_tol > 0.0, "shooting.profile_rel_tol must be positive");
  require(c.scan_radius > 0.0, "scan.radius must be positive");
  require(c.scan_points >= 10, "scan.points must be at least 10");
  require(c.convergence_L.size() >= 2, "convergence.L needs at least two levels");
  for (double L : c.convergence_L) require(L > 0.0, "convergence.L entries must be positive");
  require(c.convergence_tol.size() >= 2, "convergence.tolerances needs at least two levels");
  for (auto [a, r] : c.convergence_tol) require(a > 0.0 && r > 0.0, "convergence tolerances must be positive");
  require(c.workers >= 0, "sweep.workers must be >= 0");
  require(!c.out_dir.empty(), "out must not be empty");
}

json to_json(const SweepConfig& c) {
  json j;
  j["gamma"] = c.gamma;
  j["v_plus"] = c.v_plus;
  j["v0"] = c.v0;
  j["side"] = to_string(c.side);
  j["sweep"] = {{"gamma", c.gamma_list}, {"v0", c.v0_list}, {"v_plus", c.v_plus_list}, {"ladder", c.ladder},
                {"workers", c.workers}};
  j["contour"] = {{"radius", c.radius}, {"points", c.points}};
  if (c.indent)
    j["contour"]["indent"] = *c.indent;
  else
    j["contour"]["indent"] = "auto";
  j["shooting"] = {{"L", c.shooting.L},
                   {"abs_tol", c.shooting.abs_tol},
                   {"rel_tol", c.shooting.rel_tol},
                   {"profile_rel_tol", c.shooting.profile_rel_tol},
                   {"lambda_ref", c.shooting.lambda_ref.real()}};
  j["scan"] = {{"radius", c.scan_radius}, {"points", c.scan_points}};
  json tol = json::array();
  for (auto [a, r] : c.convergence_tol) tol.push_back({a, r});
  j["convergence"] = {{"L", c.convergence_L}, {"tolerances", tol}};
  j["shock_correction"] = c.shock_correction;
  json lam = json::array();
  for (const auto& z : c.lambdas) lam.push_back({z.real(), z.imag()});
  j["lambdas"] = lam;
  j["out"] = c.out_dir;
  return j;
}

LayerParams point_params(const SweepConfig& c) { return make_layer_params(c.gamma, c.v_plus, c.v0, c.side); }

double indent_for(const SweepConfig& c, Variant v) {
  if (c.indent) return *c.indent;
  return has_origin_root(v) ? 1e-4 : 0.0;
}

Contour contour_for(const SweepConfig& c, Variant v) { return semicircle(c.radius, c.points, indent_for(c, v)); }

BatchEvaluator evaluator(const SweepConfig& c, const EvansFunction& d, Execution exec) {
  if (!c.shock_correction) return batch(d, exec);
  return [&d, exec](std::span<const Complex> pts) {
    auto v = batch(d, exec)(pts);
    const LayerParams& p = d.params();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= shock_correction(p, pts[i], p.delta);
    return v;
  };
}

std::vector<SweepRecord> sweep_grid(const SweepConfig& c) {
  std::vector<SweepRecord> out;
  for (double g : c.gamma_list)
    for (double v0 : c.v0_list) {
      std::vector<double> vps = c.v_plus_list;
      if (c.ladder && !vps.empty()) vps.insert(vps.begin(), std::min(0.9, 0.9 * v0));
      for (double vp : vps) {
        SweepRecord r;
        r.gamma = g;
        r.v0 = v0;
        r.v_plus = vp;
        r.side = c.side;
        if (!(vp < v0)) {
          r.status = Status::Skipped;
          std::ostringstream msg;
          msg << "v_plus = " << vp << " is not below v0 = " << v0;
          r.reason = msg.str();
        }
        out.push_back(r);
      }
    }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& c, Execution exec) {
  std::vector<SweepRecord> recs = sweep_grid(c);
  for (const auto& r : recs)
    if (r.status == Status::Skipped)
      spdlog::info("skip gamma={} v0={} v_plus={}: {}", r.gamma, r.v0, r.v_plus, r.reason);

  for_each_index(
      recs.size(), exec,
      [&](std::size_t i) {
        SweepRecord& r = recs[i];
        if (r.status == Status::Skipped) return;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const EvansFunction f(make_layer_params(r.gamma, r.v_plus, r.v0, r.side), c.shooting);
          const BatchEvaluator ev = evaluator(c, f, Execution::Serial);
          WindingOptions wo;
          wo.exec = Execution::Serial;
          const WindingReport w = winding_number(ev, contour_for(c, f.variant()), wo);
          r.stability_index = stability_index(ev, has_origin_root(f.variant()), c.scan_radius);
          r.winding = w.winding;
          r.max_arg_step = w.max_arg_step;
          r.n_points = w.n_points_final;
        } catch (const std::exception& e) {
          r.status = Status::Error;
          r.winding.reset();
          r.stability_index.reset();
          r.reason = e.what();
        }
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      },
      c.workers);

  for (const auto& r : recs)
    if (r.status == Status::Error)
      spdlog::warn("error gamma={} v0={} v_plus={}: {}", r.gamma, r.v0, r.v_plus, r.reason);
  return recs;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << "gamma,v0,v_plus,side,status,winding,stability_index,max_arg_step,n_points,reason\n";
  out << std::setprecision(17);
  for (const auto& r : records) {
    if (r.status == Status::Skipped) continue;
    out << r.gamma << ',' << r.v0 << ',' << r.v_plus << ',' << to_string(r.side) << ',' << to_string(r.status) << ',';
    if (r.winding) out << *r.winding;
    out << ',';
    if (r.stability_index) out << *r.stability_index;
    out << ',' << r.max_arg_step << ',' << r.n_points << ',';
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    out << reason << '\n';
  }
}

void write_timing_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << "gamma,v0,v_plus,side,status,wall_time\n" << std::setprecision(17);
  for (const auto& r : records)
    out << r.gamma << ',' << r.v0 << ',' << r.v_plus << ',' << to_string(r.side) << ',' << to_string(r.status) << ','
        << r.wall_time << '\n';
}

std::vector<ConvergenceRow> convergence_study(const SweepConfig& c, Execution exec) {
  const LayerParams p = point_params(c);
  const Contour contour = contour_for(c, variant_for(p));
  const std::span<const Complex> pts(contour.points.data(), contour.points.size() - 1);
  std::vector<ConvergenceRow> rows;

  std::vector<std::vector<Complex>> levels;
  for (double L : c.convergence_L) {
    ShootingOptions o = c.shooting;
    o.L = L;
    levels.push_back(contour_values(EvansFunction(p, o), pts, exec));
  }
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    rows.push_back({"L", c.convergence_L[k], c.shooting.abs_tol, c.shooting.rel_tol,
                    max_rel_error(levels[k], levels[k + 1])});

  levels.clear();
  for (auto [a, r] : c.convergence_tol) {
    ShootingOptions o = c.shooting;
    o.abs_tol = a;
    o.rel_tol = r;
    levels.push_back(contour_values(EvansFunction(p, o), pts, exec));
  }
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    rows.push_back({"tol", c.shooting.L, c.convergence_tol[k].first, c.convergence_tol[k].second,
                    max_rel_error(levels[k], levels[k + 1])});
  return rows;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  out << "study,L,abs_tol,rel_tol,max_rel_error\n" << std::setprecision(6);
  for (const auto& r : rows)
    out << r.study << ',' << r.L << ',' << r.abs_tol << ',' << r.rel_tol << ',' << r.max_rel_error << '\n';
}

void emit_plot(std::span<const PlotSeries> curves, const std::string& path, const std::string& title) {
  std::size_t total = 0;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;  // the origin is always in view
  for (const auto& s : curves)
    for (const auto& z : s.values) {
      ++total;
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    }
  if (total == 0) throw DomainError("nothing to plot");
  const double span = std::max(x1 - x0, y1 - y0);
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const Frame f = padded(cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2);

  auto out = open_out(path);
  svg_open(out, title);
  svg_axes(out, f, "Re D", "Im D");
  out << std::setprecision(7);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polygon fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\" points=\"";
    for (const auto& z : curves[i].values) out << f.px(z.real()) << ',' << f.py(z.imag()) << ' ';
    out << "\"/>\n";
    if (!curves[i].label.empty())
      out << "<text x=\"" << f.left + f.width + 14 << "\" y=\"" << f.top + 16 + 18 * i
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
          << xml_escape(curves[i].label) << "</text>\n";
  }
  out << "<g id=\"origin\" stroke=\"black\" stroke-width=\"1.5\"><line x1=\"" << f.px(0) - 6 << "\" y1=\"" << f.py(0)
      << "\" x2=\"" << f.px(0) + 6 << "\" y2=\"" << f.py(0) << "\"/><line x1=\"" << f.px(0) << "\" y1=\""
      << f.py(0) - 6 << "\" x2=\"" << f.px(0) << "\" y2=\"" << f.py(0) + 6 << "\"/></g>\n";
  out << "</svg>\n";
  if (!out) throw IoError("failed writing " + path);
}

void emit_plot(std::span<const EvansSample> samples, const std::string& path, const std::string& title) {
  PlotSeries s;
  for (const auto& e : samples) s.values.push_back(e.value);
  emit_plot(std::span<const PlotSeries>(&s, 1), path, title);
}

void emit_plot(const RealAxisScan& scan, const std::string& path, const std::string& title) {
  if (scan.lambdas.empty()) throw DomainError("nothing to plot");
  double y0 = 0.0, y1 = 0.0;
  for (double v : scan.values) {
    y0 = std::min(y0, v);
    y1 = std::max(y1, v);
  }
  const Frame f = padded(scan.lambdas.front(), scan.lambdas.back(), y0, y1);
  auto out = open_out(path);
  svg_open(out, title);
  svg_axes(out, f, "lambda", "D(lambda)");
  out << std::setprecision(7);
  out << "<line x1=\"" << f.px(f.x0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(f.x1) << "\" y2=\"" << f.py(0)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"" << kPalette[0] << "\" stroke-width=\"1.6\" points=\"";
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) out << f.px(scan.lambdas[i]) << ',' << f.py(scan.values[i]) << ' ';
  out << "\"/>\n</svg>\n";
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace blstab
