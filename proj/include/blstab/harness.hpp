#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "blstab/contour.hpp"
#include "blstab/evans.hpp"
#include "blstab/stability.hpp"

namespace blstab {

/// One JSON document drives every command. Single-point commands read
/// gamma/v_plus/v0/side; sweeps read the *_list fields.
struct SweepConfig {
  double gamma = 5.0 / 3.0;
  double v_plus = 1e-3;
  double v0 = 0.4;
  Side side = Side::Inflow;

  std::vector<double> gamma_list;
  std::vector<double> v0_list;
  std::vector<double> v_plus_list;
  bool ladder = false;  // prepend v+ = min(0.9, 0.9 v0) to each v0 row
  int workers = 0;      // 0: OpenMP default

  double radius = 10.0;
  std::size_t points = 60;
  std::optional<double> indent;  // empty: indent exactly when the variant has an origin root

  ShootingOptions shooting{};

  double scan_radius = 15.0;
  std::size_t scan_points = 50;

  std::vector<double> convergence_L{8, 10, 12, 14, 16, 18, 20};
  std::vector<std::pair<double, double>> convergence_tol{{1e-3, 1e-5}, {1e-4, 1e-6}, {1e-5, 1e-7}, {1e-6, 1e-8},
                                                         {1e-7, 1e-9}};

  bool shock_correction = false;
  std::vector<Complex> lambdas;  // `evans` points; empty means the contour
  std::string out_dir = "out";
};

/// Parses and validates; unknown keys and bad values raise ConfigError.
SweepConfig parse_config(const nlohmann::json& j);
SweepConfig load_config(const std::string& path);

/// Re-validates after command-line overrides.
void validate(const SweepConfig& c);

nlohmann::json to_json(const SweepConfig& c);

LayerParams point_params(const SweepConfig& c);

/// Indent radius used for a variant: the configured one, else 1e-4 for
/// variants with an origin root and 0 otherwise.
double indent_for(const SweepConfig& c, Variant v);

Contour contour_for(const SweepConfig& c, Variant v);

/// Evaluator for `d`, multiplied by the shock-limit factor (x0 = delta)
/// when the config asks for it.
BatchEvaluator evaluator(const SweepConfig& c, const EvansFunction& d, Execution exec = Execution::Parallel);

enum class Status { Ok, Skipped, Error };
const char* to_string(Status s);

struct SweepRecord {
  double gamma = 0.0, v0 = 0.0, v_plus = 0.0;
  Side side = Side::Inflow;
  Status status = Status::Ok;
  std::optional<long> winding;
  std::optional<int> stability_index;
  double max_arg_step = 0.0;
  std::size_t n_points = 0;
  double wall_time = 0.0;
  std::string reason;
};

/// Parameter triples in config order (gamma, then v0, then v+). Pairs that
/// break v+ < v0 come back as Skipped records.
std::vector<SweepRecord> sweep_grid(const SweepConfig& c);

/// Winding and index per admissible triple. Records run concurrently (each
/// contour serially inside); failures land in the record, never abort.
std::vector<SweepRecord> run_sweep(const SweepConfig& c, Execution exec = Execution::Parallel);

/// One row per non-skipped record, in config order. Excludes wall time so
/// the file is reproducible byte for byte.
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);

/// gamma,v0,v_plus,side,status,wall_time for every record.
void write_timing_csv(std::ostream& out, std::span<const SweepRecord> records);

struct ConvergenceRow {
  std::string study;  // "L" or "tol"
  double L = 0.0, abs_tol = 0.0, rel_tol = 0.0;
  double max_rel_error = 0.0;  // against the next level
};

/// Max relative error over the contour between successive L levels (at the
/// configured tolerances), then between successive tolerance levels (at the
/// configured L). The last level of each grid only serves as a baseline.
std::vector<ConvergenceRow> convergence_study(const SweepConfig& c, Execution exec = Execution::Parallel);

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

struct PlotSeries {
  std::string label;
  std::vector<Complex> values;
};

/// D-plane image curves (closed, legend by label) with the origin marked.
void emit_plot(std::span<const PlotSeries> curves, const std::string& path, const std::string& title);
void emit_plot(std::span<const EvansSample> samples, const std::string& path, const std::string& title);

/// Real-axis trace D(lambda) with the zero line.
void emit_plot(const RealAxisScan& scan, const std::string& path, const std::string& title);

}  // namespace blstab
