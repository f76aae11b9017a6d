#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vsheet/functional.hpp"

using namespace vsheet;
using namespace vsheet::functional;
using br::constant_strength;
using geometry::make_circle;

constexpr double kPi = std::numbers::pi;

namespace {

struct Evaluated {
  IValues values;
  FunctionalReport report;
};

Evaluated evaluate(const SheetConfiguration &config, double eps, int na = 128) {
  const auto layers = layer::build_layers(config, eps, {na, na, 16});
  std::vector<PoissonSolution> sols;
  for (const auto &l : layers)
    sols.push_back(elliptic::assemble_and_solve(l));
  const layer::LayerVelocity lv(layers);
  std::vector<std::vector<Vec2>> vel;
  for (std::size_t i = 0; i < layers.size(); ++i)
    vel.push_back(lv.on_layer(i));
  Evaluated e;
  e.values = compute_I(config.omega(), layers, sols, vel);
  e.report = positivity_decomposition(config, layers, sols, e.values);
  return e;
}

} // namespace

TEST_CASE("single circle: I~ vanishes and I1 matches the area formula") {
  const SheetConfiguration config({{make_circle({}, 1.0), constant_strength(1.0)}}, 0.0);
  const auto e = evaluate(config, 0.02);
  CHECK(std::abs(e.values.I_tilde) < 1e-8);
  CHECK(e.values.I1_direct == doctest::Approx(e.values.I1_area).epsilon(1e-6));
  CHECK(std::abs(e.report.A[0]) < 1e-6);
  CHECK(std::abs(e.values.J_eps) < 1e-10);
}

TEST_CASE("off-centre rotating circle") {
  const double eps = 0.02, omega = -0.5;
  const SheetConfiguration config({{make_circle({0.3, 0.0}, 1.0), constant_strength(1.0)}}, omega);
  const auto e = evaluate(config, eps);
  const double exact = 0.5 * 0.09 * (2 * kPi + kPi * eps);
  CHECK(e.values.I_eps == doctest::Approx(exact).epsilon(1e-6));
  CHECK(e.values.consistency < 1e-12);
  CHECK(e.values.I_eps >= 2 * kPi * 0.09 * 0.5);
}

TEST_CASE("concentric circles") {
  const SheetConfiguration config({{make_circle({}, 1.0), constant_strength(1.0)},
                                   {make_circle({}, 2.0), constant_strength(1.0)}},
                                  0.0);
  const auto e = evaluate(config, 0.02);
  CHECK(std::abs(e.report.A[0]) < 1e-6);
  CHECK(std::abs(e.report.A[1]) < 1e-6);
  REQUIRE(e.report.B.size() == 1);
  CHECK(e.report.B[0].value == 0.0);
  CHECK(e.report.nesting[0][1]);
  CHECK_FALSE(e.report.nesting[1][0]);
  CHECK(std::abs(e.values.I_tilde) < 1e-8);
}

TEST_CASE("two far circles") {
  const double eps = 0.01;
  const SheetConfiguration config({{make_circle({}, 1.0), constant_strength(1.0)},
                                   {make_circle({3.0, 0.0}, 1.0), constant_strength(1.0)}},
                                  0.0);
  const auto e = evaluate(config, eps);
  CHECK(e.report.B[0].value == doctest::Approx(kPi).epsilon(2 * eps));
  CHECK(e.values.I_tilde >= e.report.lower_bound - 1e-6);
  CHECK(e.values.I_tilde == doctest::Approx(2 * kPi).epsilon(0.05));
}

TEST_CASE("fourier non-circle has a positive A") {
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{2, 0.1}};
  const auto curve = geometry::make_fourier_curve(1.0, modes);
  const SheetConfiguration config({{curve, constant_strength(1.0)}}, 0.0);
  const auto e = evaluate(config, 0.02, 256);
  const double iso = isoperimetric_gap(curve);
  CHECK(iso > 0.0);
  CHECK(e.report.iso_gap[0] == doctest::Approx(iso));
  const double bound = curve.length() * curve.length() / (4 * kPi) * iso;
  CHECK(e.report.surrogate[0] == doctest::Approx(bound).epsilon(1e-10));
  CHECK(e.report.A[0] > 0.0);
  CHECK(e.report.A[0] >= bound - 0.05);
  CHECK(e.values.I_tilde >= e.report.lower_bound - 1e-6);
}

TEST_CASE("dilation scales the floor by lambda squared") {
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{2, 0.1}};
  const double eps = 0.02;
  const SheetConfiguration small({{geometry::make_fourier_curve(1.0, modes), constant_strength(1.0)}},
                                 0.0);
  const SheetConfiguration large({{geometry::make_fourier_curve(2.0, modes), constant_strength(1.0)}},
                                 0.0);
  const double a = evaluate(small, eps, 256).values.I_tilde;
  const double b = evaluate(large, eps, 256).values.I_tilde;
  CHECK(b / a >= 3.5);
  CHECK(b / a <= 4.5);
}

TEST_CASE("cauchy-schwarz gap of a non-constant strength") {
  CHECK(cauchy_schwarz_gap(br::fourier_strength(1.0, {0.5})) ==
        doctest::Approx(1.0 / std::sqrt(0.75) - 1.0).epsilon(1e-10));
  CHECK(std::abs(cauchy_schwarz_gap(constant_strength(2.0))) < 1e-14);
}

TEST_CASE("rate fit and rank correlation") {
  const std::vector<double> x{0.08, 0.04, 0.02, 0.01};
  std::vector<double> y;
  for (double v : x)
    y.push_back(3.0 * std::pow(v, 0.5));
  CHECK(fit_log_slope(x, y).exponent == doctest::Approx(0.5));
  CHECK(fit_log_slope(x, y).residual < 1e-12);
  CHECK(spearman(x, y) == doctest::Approx(1.0));
  const std::vector<double> down{1.0, 2.0, 3.0, 4.0};
  CHECK(spearman(x, down) == doctest::Approx(-1.0));
}

TEST_CASE("verdicts") {
  const std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
  VerdictInputs floor{eps, {0.30, 0.29, 0.285, 0.283}, false, "normal velocity 0.1"};
  CHECK(rigidity_verdict(floor).verdict == Verdict::Obstructed);

  VerdictInputs decay{eps, {0.08, 0.04, 0.02, 0.01}, true, ""};
  const auto d = rigidity_verdict(decay);
  CHECK(d.verdict == Verdict::EquilibriumConsistent);
  CHECK(d.exponent == doctest::Approx(1.0));

  VerdictInputs zero{eps, {1e-12, -2e-12, 3e-13, 1e-12}, true, ""};
  CHECK(rigidity_verdict(zero).verdict == Verdict::EquilibriumConsistent);

  VerdictInputs moving{eps, {1e-12, -2e-12, 3e-13, 1e-12}, false, "concentricity residual 0.2"};
  const auto m = rigidity_verdict(moving);
  CHECK(m.verdict == Verdict::Inconclusive);
  CHECK(m.reason.find("concentricity") != std::string::npos);

  VerdictInputs rising{eps, {0.40, 0.35, 0.33, 0.32}, false, ""};
  CHECK(rigidity_verdict(rising).verdict == Verdict::Obstructed);

  CHECK_THROWS_AS(rigidity_verdict(VerdictInputs{{0.1, 0.05}, {1.0, 1.0}, true, ""}),
                  std::invalid_argument);
}
