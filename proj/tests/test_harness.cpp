#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vsheet/harness.hpp"

using namespace vsheet;
using namespace vsheet::harness;
using nlohmann::json;

namespace {

json small_circle() {
  return json::parse(R"({
    "name": "small_circle",
    "curves": [{"type": "circle", "center": [0.0, 0.0], "radius": 1.0}],
    "strengths": [{"type": "constant", "gamma0": 1.0}],
    "omega": 0.0,
    "eps_sweep": [0.08, 0.04, 0.02],
    "resolutions": {"N_alpha": 64, "N_eta": 8, "N_res": 64}
  })");
}

std::string message_of(const json &j) {
  try {
    parse_scenario(j);
  } catch (const ScenarioError &e) {
    return e.what();
  }
  return {};
}

std::filesystem::path temp_dir(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("vsheet_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

} // namespace

TEST_CASE("bundled scenarios load") {
  const auto spec = load_scenario(scenario_path("concentric_two_circles"));
  CHECK(spec.curves.size() == 2);
  CHECK(spec.omega == 0.0);
  CHECK(spec.eps_sweep.size() == 4);
  for (const char *name : {"concentric_one_circle", "offcenter_circle_rotating", "nonconcentric_nested",
                           "fourier_noncircle", "nonconstant_gamma_circle", "rotating_segment",
                           "two_far_circles"})
    CHECK_NOTHROW(load_scenario(scenario_path(name)));
}

TEST_CASE("scenario validation") {
  auto j = small_circle();
  j["eps_sweep"] = {0.01, 0.02, 0.04};
  CHECK(message_of(j).find("strictly decreasing") != std::string::npos);

  j = small_circle();
  j["curves"][0] = {{"type", "segment"}, {"a", 1.0}};
  j["strengths"][0] = {{"type", "semicircle"}, {"omega", 1.0}, {"regularity", "closed_c2"}};
  CHECK(message_of(j).find("closed_c2") != std::string::npos);

  j = small_circle();
  j["curves"][0]["radius"] = "one";
  CHECK(message_of(j).find("curves[0].radius") != std::string::npos);

  j = small_circle();
  j["strengths"].push_back({{"type", "constant"}, {"gamma0", 1.0}});
  CHECK(message_of(j).find("equal length") != std::string::npos);

  j = small_circle();
  j["curves"].push_back({{"type", "circle"}, {"center", {0.5, 0.0}}, {"radius", 1.0}});
  j["strengths"].push_back({{"type", "constant"}, {"gamma0", 1.0}});
  CHECK_FALSE(message_of(j).empty());
}

TEST_CASE("parse errors report the line") {
  const auto dir = temp_dir("parse");
  std::filesystem::create_directories(dir);
  const auto path = dir / "broken.json";
  std::ofstream(path) << "{\n  \"name\": \"x\",\n  \"curves\": [,\n}\n";
  try {
    load_scenario(path);
    FAIL("expected a parse error");
  } catch (const ScenarioError &e) {
    const std::string what = e.what();
    CHECK(what.find("broken.json") != std::string::npos);
    CHECK(what.find("line 3") != std::string::npos);
  }
}

TEST_CASE("scenario echo round-trips") {
  for (const char *name : {"fourier_noncircle", "rotating_segment", "nonconstant_gamma_circle"}) {
    const auto spec = load_scenario(scenario_path(name));
    const auto echo = to_json(spec);
    CHECK(to_json(parse_scenario(echo)) == echo);
  }
}

TEST_CASE("rate fits") {
  const std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
  std::vector<double> lin, half_log, flat(4, 0.7);
  for (double e : eps) {
    lin.push_back(e);
    half_log.push_back(std::sqrt(e) * std::abs(std::log(e)));
  }
  CHECK(std::abs(fit_rate(eps, lin).exponent - 1.0) <= 1e-9);
  CHECK(std::abs(fit_rate(eps, half_log, true).exponent - 0.5) <= 0.02);
  CHECK(std::abs(fit_rate(eps, flat).exponent) <= 1e-9);
  CHECK(std::isinf(fit_rate(eps, std::vector<double>{1.0, 0.0, 1.0, 1.0}).exponent));
  CHECK_THROWS_AS(fit_rate(eps, std::vector<double>{1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{0.1, 0.05}, std::vector<double>{1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("run, emit and rerun are byte-identical") {
  const auto spec = parse_scenario(small_circle());
  const auto a = run_scenario(spec);
  REQUIRE(a.points.size() == 3);
  for (const auto &p : a.points)
    CHECK(p.ok);
  CHECK(a.verdict.verdict == functional::Verdict::EquilibriumConsistent);

  std::ostringstream csv;
  write_sweep_csv(csv, a);
  CHECK(csv.str().rfind("eps,I_eps,I_tilde,J_eps,A_1,residual_BR1,residual_BR2,defect_linearity,"
                        "talenti_int_gap\n",
                        0) == 0);

  const auto d1 = temp_dir("run1"), d2 = temp_dir("run2");
  const auto p1 = emit_results(a, d1);
  const auto p2 = emit_results(run_scenario(spec), d2);
  auto slurp = [](const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(p1.sweep) == slurp(p2.sweep));
  CHECK(slurp(p1.report) == slurp(p2.report));
  const auto report = json::parse(slurp(p1.report));
  CHECK(report["verdict"]["verdict"] == "EQUILIBRIUM_CONSISTENT");
  CHECK(report["sweep"].size() == 3);
  CHECK(parse_scenario(report["scenario"]).name == "small_circle");
}

TEST_CASE("failed sweep points are recorded and the sweep continues") {
  auto j = small_circle();
  j["eps_sweep"] = {12.0, 0.04, 0.02};
  const auto a = run_scenario(parse_scenario(j));
  REQUIRE(a.points.size() == 3);
  CHECK_FALSE(a.points[0].ok);
  CHECK(a.points[0].error.find("injectivity") != std::string::npos);
  CHECK(a.points[1].ok);
  CHECK(a.verdict.verdict == functional::Verdict::Inconclusive);
  std::ostringstream csv;
  write_sweep_csv(csv, a);
  CHECK(csv.str().find("\n12,nan,nan") != std::string::npos);
}

TEST_CASE("unwritable output directory names the path") {
  const auto a = run_scenario(parse_scenario(small_circle()));
  const auto dir = temp_dir("blocked");
  std::ofstream(dir.string()) << "a file, not a directory";
  try {
    emit_results(a, dir / "sub");
    FAIL("expected an error");
  } catch (const std::runtime_error &e) {
    CHECK(std::string(e.what()).find(dir.string()) != std::string::npos);
  }
  std::filesystem::remove(dir);
}
