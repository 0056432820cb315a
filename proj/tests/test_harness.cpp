#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blstab/harness.hpp"

using namespace blstab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_of(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "blstab_test_harness";
  fs::create_directories(d);
  return d / name;
}

SweepConfig small_sweep() {
  return parse_config(json::parse(R"({
    "side": "inflow",
    "sweep": {"gamma": [1.6666666666666667], "v0": [0.4, 0.7], "v_plus": [0.5, 1e-2, 0]},
    "contour": {"points": 20}
  })"));
}

struct GoldenRow {
  Complex lambda, value;
  std::string variant;
};

std::vector<GoldenRow> read_golden(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "re_lambda,im_lambda,re_D,im_D,variant");
  std::vector<GoldenRow> rows;
  while (std::getline(in, line)) {
    std::stringstream s(line);
    std::string f[5];
    for (auto& x : f) std::getline(s, x, ',');
    rows.push_back({{std::stod(f[0]), std::stod(f[1])}, {std::stod(f[2]), std::stod(f[3])}, f[4]});
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const SweepConfig d = parse_config(json::object());
  CHECK(d.gamma == doctest::Approx(5.0 / 3.0));
  CHECK(d.radius == 10.0);
  CHECK(d.points == 60);
  CHECK_FALSE(d.indent.has_value());
  CHECK(d.shooting.L == 18.0);

  const SweepConfig c = parse_config(json::parse(R"({
    "gamma": 1.4, "v_plus": 0.01, "v0": 0.6, "side": "outflow",
    "contour": {"radius": 12, "points": 80, "indent": 1e-3},
    "shooting": {"L": 14, "abs_tol": 1e-7, "rel_tol": 1e-9},
    "scan": {"radius": 20, "points": 40},
    "convergence": {"L": [8, 10], "tolerances": [[1e-3, 1e-5], [1e-4, 1e-6]]},
    "lambdas": [1, [0, 2]],
    "out": "results"
  })"));
  CHECK(c.gamma == 1.4);
  CHECK(c.side == Side::Outflow);
  CHECK(c.points == 80);
  CHECK(*c.indent == 1e-3);
  CHECK(c.shooting.L == 14);
  CHECK(c.shooting.rel_tol == 1e-9);
  CHECK(c.scan_points == 40);
  CHECK(c.convergence_tol.size() == 2);
  REQUIRE(c.lambdas.size() == 2);
  CHECK(c.lambdas[1] == Complex(0.0, 2.0));
  CHECK(c.out_dir == "results");

  // round trip
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));
  CHECK(to_json(parse_config(to_json(d))) == to_json(d));
}

TEST_CASE("config errors") {
  for (const char* bad : {R"({"gama": 1.4})", R"({"contour": {"radius": 10, "pts": 60}})",
                          R"({"shooting": {"tol": 1}})", R"({"gamma": "1.4"})", R"({"side": "left"})",
                          R"({"gamma": 0.5})", R"({"v_plus": 0.5, "v0": 0.4})", R"({"contour": {"points": 10}})",
                          R"({"contour": {"points": 60.5}})", R"({"contour": {"indent": -1}})",
                          R"({"shooting": {"abs_tol": 0}})", R"({"convergence": {"L": [8]}})",
                          R"({"convergence": {"tolerances": [[1e-3]]}})", R"({"sweep": {"v0": [1.2]}})",
                          R"({"sweep": {"ladder": 1}})", R"({"lambdas": [[1, 2, 3]]})", R"({"out": ""})", R"([1, 2])"})
    CHECK_THROWS_AS(parse_config(json::parse(bad)), ConfigError);

  CHECK_THROWS_AS(load_config("/nonexistent/blstab.json"), ConfigError);
  const fs::path broken = scratch("broken.json");
  std::ofstream(broken) << "{ \"gamma\": ";
  CHECK_THROWS_AS(load_config(broken.string()), ConfigError);

  SweepConfig c;
  c.v0 = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("shipped configs parse") {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(BLSTAB_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path().string()));
    ++n;
  }
  CHECK(n >= 5);
}

TEST_CASE("indent policy") {
  SweepConfig c;
  CHECK(indent_for(c, Variant::In) == 0.0);
  CHECK(indent_for(c, Variant::Out) == 1e-4);
  CHECK(indent_for(c, Variant::LimIn) == 1e-4);
  CHECK(indent_for(c, Variant::LimOut) == 1e-4);
  c.indent = 0.0;
  CHECK(indent_for(c, Variant::Out) == 0.0);
  CHECK(contour_for(c, Variant::In).points.size() == 60);
}

TEST_CASE("sweep grid and skipped triples") {
  const SweepConfig c = small_sweep();
  const auto grid = sweep_grid(c);
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].status == Status::Skipped);  // v+ = 0.5 above v0 = 0.4
  CHECK_FALSE(grid[0].reason.empty());
  for (std::size_t i = 1; i < 6; ++i) CHECK(grid[i].status == Status::Ok);
  CHECK(grid[3].v0 == 0.7);
  CHECK(grid[3].v_plus == 0.5);

  SweepConfig ladder = c;
  ladder.ladder = true;
  const auto lg = sweep_grid(ladder);
  REQUIRE(lg.size() == 8);
  CHECK(lg[0].v_plus == doctest::Approx(0.36));
  CHECK(lg[4].v_plus == doctest::Approx(0.63));

  SweepConfig empty = c;
  empty.v_plus_list.clear();
  const auto none = run_sweep(empty);
  CHECK(none.empty());
  std::ostringstream out;
  write_sweep_csv(out, none);
  CHECK(out.str() == "gamma,v0,v_plus,side,status,winding,stability_index,max_arg_step,n_points,reason\n");
}

TEST_CASE("sweep results are deterministic") {
  const SweepConfig c = small_sweep();
  const auto a = run_sweep(c, Execution::Parallel);
  const auto b = run_sweep(c, Execution::Serial);
  REQUIRE(a.size() == 6);
  std::size_t admissible = 0;
  for (const auto& r : a) {
    if (r.status == Status::Skipped) continue;
    ++admissible;
    REQUIRE(r.status == Status::Ok);
    CHECK(r.winding.has_value());
    CHECK(*r.winding == 0);
    CHECK(*r.stability_index == 1);
    CHECK(r.max_arg_step < 1.5707963267948966);
  }
  std::ostringstream sa, sb, sc;
  write_sweep_csv(sa, a);
  write_sweep_csv(sb, b);
  write_sweep_csv(sc, run_sweep(c));
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() == sc.str());
  CHECK(lines(sa.str()) == admissible + 1);

  std::ostringstream t;
  write_timing_csv(t, a);
  CHECK(lines(t.str()) == a.size() + 1);
  CHECK(t.str().rfind("gamma,v0,v_plus,side,status,wall_time\n", 0) == 0);
}

TEST_CASE("sweep records errors without aborting") {
  // a huge contour drives |D| through 14 decades, which the winding count rejects
  SweepConfig c = small_sweep();
  c.radius = 5000.0;
  c.v0_list = {0.4};
  c.v_plus_list = {0.5, 1e-2};
  const auto r = run_sweep(c);
  REQUIRE(r.size() == 2);
  CHECK(r[0].status == Status::Skipped);
  REQUIRE(r[1].status == Status::Error);
  CHECK_FALSE(r[1].winding.has_value());
  CHECK_FALSE(r[1].stability_index.has_value());
  CHECK(r[1].reason.find("below 1e-12") != std::string::npos);
  std::ostringstream out;
  write_sweep_csv(out, r);
  CHECK(lines(out.str()) == 2);
  CHECK(out.str().find(",error,,,") != std::string::npos);
}

TEST_CASE("convergence rows") {
  SweepConfig c = parse_config(json::parse(R"({
    "gamma": 1.666, "v_plus": 1e-4, "v0": 0.6, "side": "inflow",
    "contour": {"points": 20},
    "convergence": {"L": [8, 10, 12], "tolerances": [[1e-3, 1e-5], [1e-5, 1e-7], [1e-7, 1e-9]]}
  })"));
  const auto rows = convergence_study(c);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].study == "L");
  CHECK(rows[0].L == 8);
  CHECK(rows[1].L == 10);
  CHECK(rows[2].study == "tol");
  CHECK(rows[2].abs_tol == 1e-3);
  CHECK(rows[1].max_rel_error < rows[0].max_rel_error);
  CHECK(rows[3].max_rel_error < rows[2].max_rel_error);
  for (const auto& r : rows) CHECK(r.max_rel_error > 0.0);

  std::ostringstream out;
  write_convergence_csv(out, rows);
  CHECK(out.str().rfind("study,L,abs_tol,rel_tol,max_rel_error\n", 0) == 0);
  CHECK(lines(out.str()) == 5);
}

TEST_CASE("SVG output") {
  std::vector<EvansSample> samples;
  for (int k = 0; k < 60; ++k) {
    const double t = 2.0 * 3.141592653589793 * k / 60.0;
    samples.push_back({Complex(0.0, t), Complex(2.0 + std::cos(t), std::sin(t)), Variant::In, {}});
  }
  const fs::path one = scratch("one.svg");
  emit_plot(samples, one.string(), "inflow gamma=5/3 <test>");
  const std::string s = slurp(one);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("<title>inflow gamma=5/3 &lt;test&gt;</title>") != std::string::npos);
  CHECK(s.find("id=\"origin\"") != std::string::npos);
  CHECK(count_of(s, "<polygon") == 1);
  CHECK(s.find("</svg>") != std::string::npos);

  std::vector<PlotSeries> family;
  for (double r : {1.0, 2.0, 3.0}) {
    PlotSeries p;
    p.label = "v+=" + std::to_string(r);
    for (const auto& e : samples) p.values.push_back(r * e.value);
    family.push_back(p);
  }
  const fs::path many = scratch("many.svg");
  emit_plot(family, many.string(), "family");
  const std::string m = slurp(many);
  CHECK(count_of(m, "<polygon") == 3);
  for (const auto& p : family) CHECK(m.find(">" + p.label + "</text>") != std::string::npos);

  const RealAxisScan scan = real_axis_scan(batch([](Complex l) { return 1.0 + l; }), false, 15.0, 20);
  const fs::path axis = scratch("axis.svg");
  emit_plot(scan, axis.string(), "scan");
  CHECK(count_of(slurp(axis), "<polyline") == 1);

  CHECK_THROWS_AS(emit_plot(std::vector<EvansSample>{}, scratch("empty.svg").string(), "x"), DomainError);
  CHECK_THROWS_AS(emit_plot(samples, "/nonexistent/dir/plot.svg", "x"), IoError);
}

TEST_CASE("golden contour values") {
  struct Family {
    const char* file;
    Side side;
    double v_plus, v0;
  };
  for (const Family& f : {Family{"inflow.csv", Side::Inflow, 1e-3, 0.2}, Family{"outflow.csv", Side::Outflow, 1e-2, 0.4},
                          Family{"lim_inflow.csv", Side::Inflow, 0.0, 0.2},
                          Family{"lim_outflow.csv", Side::Outflow, 0.0, 0.4}}) {
    CAPTURE(f.file);
    const auto golden = read_golden(fs::path(BLSTAB_DATA_DIR) / f.file);
    REQUIRE(golden.size() == 59);
    SweepConfig c;
    c.gamma = 1.6666666666666667;
    c.side = f.side;
    c.v_plus = f.v_plus;
    c.v0 = f.v0;
    const EvansFunction d(point_params(c), c.shooting);
    const Contour k = contour_for(c, d.variant());
    REQUIRE(k.points.size() == golden.size() + 1);
    double scale = 0.0;
    for (const auto& g : golden) scale = std::max(scale, std::abs(g.value));
    for (std::size_t i = 0; i < golden.size(); ++i) {
      CHECK(std::abs(k.points[i] - golden[i].lambda) < 1e-12);
      CHECK(golden[i].variant == to_string(d.variant()));
      CHECK(std::abs(d(golden[i].lambda) - golden[i].value) <= 1e-6 * scale);
    }
  }
}
