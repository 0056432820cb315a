// Command-line front end: one subcommand per study, all driven by the same
// JSON config with flag overrides.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "blstab/harness.hpp"

namespace fs = std::filesystem;
using namespace blstab;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Overrides {
  std::string config;
  std::optional<double> gamma, v_plus, v0, radius, L, abs_tol, rel_tol;
  std::optional<std::string> side, indent, out;
  std::optional<std::size_t> points;
  bool serial = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--gamma", o.gamma, "adiabatic index");
  cmd->add_option("--v-plus", o.v_plus, "end state v+ (0 selects the strong-layer limit)");
  cmd->add_option("--v0", o.v0, "boundary value v0");
  cmd->add_option("--side", o.side, "inflow or outflow")->check(CLI::IsMember({"inflow", "outflow"}));
  cmd->add_option("--radius", o.radius, "contour radius");
  cmd->add_option("--points", o.points, "contour points, closing point included");
  cmd->add_option("--indent", o.indent, "indent radius around 0, or 'auto'");
  cmd->add_option("--L", o.L, "numerical infinity");
  cmd->add_option("--abs-tol", o.abs_tol, "shooting absolute tolerance");
  cmd->add_option("--rel-tol", o.rel_tol, "shooting relative tolerance");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--serial", o.serial, "evaluate without OpenMP");
}

SweepConfig resolve(const Overrides& o) {
  SweepConfig c = o.config.empty() ? SweepConfig{} : load_config(o.config);
  if (o.gamma) c.gamma = *o.gamma;
  if (o.v_plus) c.v_plus = *o.v_plus;
  if (o.v0) c.v0 = *o.v0;
  if (o.side) c.side = *o.side == "inflow" ? Side::Inflow : Side::Outflow;
  if (o.radius) c.radius = *o.radius;
  if (o.points) c.points = *o.points;
  if (o.indent) {
    if (*o.indent == "auto") {
      c.indent.reset();
    } else {
      try {
        c.indent = std::stod(*o.indent);
      } catch (const std::exception&) {
        throw ConfigError("--indent expects a number or 'auto'");
      }
    }
  }
  if (o.L) c.shooting.L = *o.L;
  if (o.abs_tol) c.shooting.abs_tol = *o.abs_tol;
  if (o.rel_tol) c.shooting.rel_tol = *o.rel_tol;
  if (o.out) c.out_dir = *o.out;
  validate(c);
  return c;
}

std::string out_path(const SweepConfig& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out_dir + ": " + ec.message());
  return (fs::path(c.out_dir) / name).string();
}

std::ofstream open_csv(const SweepConfig& c, const std::string& name) {
  const std::string path = out_path(c, name);
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return f;
}

std::string point_title(const SweepConfig& c) {
  std::ostringstream t;
  t << to_string(c.side) << " gamma=" << c.gamma << " v+=" << c.v_plus << " v0=" << c.v0;
  return t.str();
}

int cmd_profile(const SweepConfig& c) {
  const LayerParams p = point_params(c);
  const Profile prof = p.limiting() ? limiting_profile(p.v0, p.side, c.shooting.L, p.gamma)
                                    : solve_profile(p, c.shooting.L, c.shooting.profile_rel_tol);
  auto f = open_csv(c, "profile.csv");
  prof.write_csv(f);
  std::cout << "profile: " << prof.nodes().size() << " nodes on [" << prof.lower() << ", " << prof.upper()
            << "], delta = " << prof.delta() << '\n';
  return kOk;
}

int cmd_evans(const SweepConfig& c, Execution exec) {
  const EvansFunction d(point_params(c), c.shooting);
  std::vector<Complex> pts = c.lambdas;
  const bool on_contour = pts.empty();
  if (on_contour) {
    const Contour k = contour_for(c, d.variant());
    pts.assign(k.points.begin(), k.points.end() - 1);
  }
  auto samples = d.sample_path(pts, exec);
  if (c.shock_correction)
    for (auto& s : samples) s.value *= shock_correction(d.params(), s.lambda, d.params().delta);
  auto f = open_csv(c, "evans.csv");
  write_samples_csv(f, samples);
  if (on_contour) emit_plot(samples, out_path(c, "evans.svg"), "D on the contour, " + point_title(c));
  std::cout << "evans: " << samples.size() << " samples (" << to_string(d.variant()) << ")\n";
  return kOk;
}

int cmd_winding(const SweepConfig& c, Execution exec) {
  const EvansFunction d(point_params(c), c.shooting);
  WindingOptions wo;
  wo.exec = exec;
  const WindingReport w = winding_number(evaluator(c, d, exec), contour_for(c, d.variant()), wo);
  std::vector<EvansSample> s(w.points.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = EvansSample{w.points[i], w.values[i], d.variant(), {}};
  auto f = open_csv(c, "winding.csv");
  write_samples_csv(f, s);
  emit_plot(s, out_path(c, "winding.svg"), "winding " + std::to_string(w.winding) + ", " + point_title(c));
  std::cout << "winding: " << w.winding << "  max_arg_step: " << w.max_arg_step << "  points: " << w.n_points_final
            << (w.refined ? " (refined)" : "") << '\n';
  return kOk;
}

int cmd_index(const SweepConfig& c, Execution exec) {
  const EvansFunction d(point_params(c), c.shooting);
  const int idx = stability_index(evaluator(c, d, exec), has_origin_root(d.variant()), c.scan_radius);
  std::cout << "stability_index: " << (idx > 0 ? "+1" : "-1") << '\n';
  return kOk;
}

int cmd_scan(const SweepConfig& c, Execution exec) {
  const EvansFunction d(point_params(c), c.shooting);
  const RealAxisScan s = real_axis_scan(evaluator(c, d, exec), has_origin_root(d.variant()), c.scan_radius,
                                        c.scan_points);
  auto f = open_csv(c, "scan.csv");
  write_scan_csv(f, s);
  emit_plot(s, out_path(c, "scan.svg"), "real axis, " + point_title(c));
  std::cout << "scan: sign_changes " << s.sign_changes << "  origin_root " << s.origin_root << "  transversal "
            << s.zero_at_origin << "  slope " << s.transversal_slope << "  index " << stability_index(s) << '\n';
  return kOk;
}

int cmd_sweep(const SweepConfig& c, Execution exec) {
  const auto recs = run_sweep(c, exec);
  auto f = open_csv(c, "sweep.csv");
  write_sweep_csv(f, recs);
  auto t = open_csv(c, "sweep_timing.csv");
  write_timing_csv(t, recs);
  std::size_t ok = 0, nonzero = 0, errors = 0;
  for (const auto& r : recs) {
    if (r.status == Status::Ok) {
      ++ok;
      if (*r.winding != 0) ++nonzero;
    }
    if (r.status == Status::Error) ++errors;
  }
  std::cout << "sweep: " << ok << " ok, " << nonzero << " with nonzero winding, " << errors << " errors\n";
  return kOk;
}

int cmd_converge(const SweepConfig& c, Execution exec) {
  const auto rows = convergence_study(c, exec);
  auto f = open_csv(c, "convergence.csv");
  write_convergence_csv(f, rows);
  write_convergence_csv(std::cout, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("blstab"));

  CLI::App app{"Evans-function stability checks for compressive boundary layers"};
  app.require_subcommand(1);
  Overrides o;
  const char* names[][2] = {{"profile", "write the boundary-layer profile"},
                            {"evans", "sample D at the config lambdas or on the contour"},
                            {"winding", "winding number of D over the contour"},
                            {"index", "stability index from the real axis"},
                            {"scan", "real-axis scan on [0, R]"},
                            {"sweep", "winding and index over a parameter grid"},
                            {"converge", "successive-L and tolerance convergence tables"}};
  for (auto& n : names) add_common(app.add_subcommand(n[0], n[1]), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const SweepConfig c = resolve(o);
    const Execution exec = o.serial ? Execution::Serial : Execution::Parallel;
    if (cmd == "profile") return cmd_profile(c);
    if (cmd == "evans") return cmd_evans(c, exec);
    if (cmd == "winding") return cmd_winding(c, exec);
    if (cmd == "index") return cmd_index(c, exec);
    if (cmd == "scan") return cmd_scan(c, exec);
    if (cmd == "sweep") return cmd_sweep(c, exec);
    return cmd_converge(c, exec);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kConfigError;
  } catch (const DomainError& e) {
    spdlog::error("parameters: {}", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    spdlog::error("output: {}", e.what());
    return kConfigError;
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kNumericalError;
  } catch (const std::exception& e) {
    spdlog::error("failure: {}", e.what());
    return kNumericalError;
  }
}
