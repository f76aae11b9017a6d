#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "vsheet/layer.hpp"

using namespace vsheet;
using namespace vsheet::layer;
using br::BREvaluator;
using br::constant_strength;
using geometry::make_circle;
using geometry::make_segment;

constexpr double kPi = std::numbers::pi;

namespace {

br::SheetConfiguration unit_circle() {
  return br::SheetConfiguration({{make_circle({}, 1.0), constant_strength(1.0)}}, 0.0);
}

double log_slope(const std::vector<double> &x, const std::vector<double> &y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= x.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

} // namespace

TEST_CASE("circle layer is an annulus") {
  const auto config = unit_circle();
  const double eps = 0.01;
  const auto grid = build_layer(config[0].curve, config[0].strength, eps, 64, 16);
  for (int j = 0; j < grid.n_alpha(); ++j)
    for (int k = 0; k < grid.n_eta(); ++k) {
      const auto &p = grid.at(j, k);
      const double eta = grid.eta()[k];
      CHECK(p.jacobian == doctest::Approx(2.0 * kPi * eps * (1.0 - eps * eta)).epsilon(1e-14));
      CHECK(norm(p.position) >= 1.0 - 1e-15);
      CHECK(norm(p.position) <= 1.01 + 1e-15);
    }
  for (int j = 0; j < grid.n_alpha(); ++j)
    CHECK(norm(grid.at(j, grid.n_eta() - 1).position - config[0].curve.position(grid.alpha()[j])) <
          1e-14);
  CHECK(layer_area(grid) == doctest::Approx(kPi * (1.01 * 1.01 - 1.0)).epsilon(1e-12));
}

TEST_CASE("segment layer area") {
  const double eps = 0.01;
  const auto gamma = br::semicircle_strength(1.0, 1.0);
  const auto grid = build_layer(make_segment(1.0), gamma, eps, 256, 8);
  for (int j = 0; j < grid.n_alpha(); ++j)
    CHECK(grid.at(j, 0).jacobian ==
          doctest::Approx(eps * 2.0 * gamma.value(grid.alpha()[j])).epsilon(1e-14));
  const double area = layer_area(grid);
  CHECK(area == doctest::Approx(eps * kPi / 2.0).epsilon(1e-10));

  // rejection sampling over the bounding box
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(-eps, 0.0);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double x = ux(rng), y = uy(rng);
    if (-y < eps * std::sqrt(1.0 - x * x))
      ++hits;
  }
  CHECK(std::abs(area - 2.0 * eps * hits / n) < 1e-4);

  const auto half = build_layer(make_segment(1.0), gamma, eps / 2, 256, 8);
  const double ratio = layer_area(half) / area;
  CHECK(ratio >= 0.5 - 5 * eps);
  CHECK(ratio <= 0.5 + 5 * eps);
}

TEST_CASE("metric matches finite differences") {
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{3, 0.1}};
  const auto curve = geometry::make_fourier_curve(1.0, modes);
  const auto gamma = br::fourier_strength(1.0, {0.2}, {0.1});
  const double eps = 0.05, h = 1e-5;
  for (double a : {0.1, 0.45, 0.8})
    for (double e : {-1.0, -0.3, 0.0}) {
      const LayerPoint p = layer_map(curve, gamma, eps, a, e);
      const Vec2 fa = (layer_map(curve, gamma, eps, a + h, e).position -
                       layer_map(curve, gamma, eps, a - h, e).position) /
                      (2 * h);
      const Vec2 fe = (layer_map(curve, gamma, eps, a, e + h).position -
                       layer_map(curve, gamma, eps, a, e - h).position) /
                      (2 * h);
      CHECK(norm(fa - p.d_alpha) < 1e-6);
      CHECK(norm(fe - p.d_eta) < 1e-8);
      CHECK(std::abs(cross(p.d_alpha, p.d_eta) - p.jacobian) < 1e-10);
    }
}

TEST_CASE("build_layer rejects folded layers and bad sizes") {
  const auto config = unit_circle();
  // a dented curve has negative curvature, where a thick layer folds outward
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{3, 0.2}};
  const auto dented = geometry::make_fourier_curve(1.0, modes);
  CHECK_THROWS_AS(build_layer(dented, constant_strength(1.0), 5.0, 64, 16), std::domain_error);
  CHECK_NOTHROW(build_layer(config[0].curve, config[0].strength, 2.0, 64, 16));
  CHECK_THROWS_AS(build_layer(config[0].curve, config[0].strength, 0.01, 4, 16),
                  std::invalid_argument);
}

TEST_CASE("injectivity certificates") {
  const auto config = unit_circle();
  const auto ok = injectivity_certificate(config[0].curve, config[0].strength, 0.01);
  CHECK(ok.passed);
  CHECK(ok.c0 == doctest::Approx(0.5));
  CHECK(ok.worst_pair_ratio >= 0.5);
  CHECK(ok.eps0 == doctest::Approx(2.0 * kPi / (64.0 * 0.25 * 4.0 * kPi * kPi)).epsilon(1e-3));
  CHECK_FALSE(injectivity_certificate(config[0].curve, config[0].strength, 10.0).passed);
  const auto seg =
      injectivity_certificate(make_segment(1.0), br::semicircle_strength(1.0, 1.0), 0.01);
  CHECK(seg.passed);
}

TEST_CASE("annulus velocity") {
  const auto config = unit_circle();
  const double eps = 0.01;
  const std::vector<LayerGrid> layers{build_layer(config[0].curve, config[0].strength, eps, 64, 16)};
  const LayerVelocity v(layers);
  CHECK(norm(v({0.0, 0.0})) < 1e-12);
  const double area = kPi * (1.01 * 1.01 - 1.0);
  const Vec2 far = v({2.0, 0.0});
  CHECK(std::abs(far.x) < 1e-12);
  CHECK(far.y == doctest::Approx(area / (eps * 4.0 * kPi)).epsilon(1e-12));
  // inside the annulus the field is (r^2 - 1) / (2 eps r) in the tangential direction
  for (double r : {1.0, 1.0025, 1.007, 1.01}) {
    const double a = 0.3;
    const Vec2 x = r * Vec2{std::cos(2 * kPi * a), std::sin(2 * kPi * a)};
    const Vec2 expected = (r * r - 1.0) / (2.0 * eps * r) * perp(x / r);
    CHECK(norm(v(x, TargetHint{0, a}) - expected) < 1e-9);
    CHECK(norm(v(x) - expected) < 1e-7);
  }
}

TEST_CASE("midpoint policy agrees away from the layer") {
  const auto config = unit_circle();
  const std::vector<LayerGrid> layers{build_layer(config[0].curve, config[0].strength, 0.02, 256, 16)};
  const Vec2 x{1.2, 0.3};
  const Vec2 a = layer_velocity(layers, x);
  const Vec2 b = layer_velocity(layers, x, SelfCellPolicy::MidpointDisk);
  CHECK(norm(a - b) < 1e-3 * norm(a));
}

TEST_CASE("linear profile identities") {
  const br::SheetConfiguration config(
      {{make_circle({}, 1.0), br::fourier_strength(1.0, {0.3})}}, 0.0);
  const BREvaluator br(config);
  for (double a : {0.2, 0.7}) {
    const auto sides = br::one_sided_velocities(br, 0, a);
    CHECK(norm(linear_profile(br, 0, a, 0.0) - sides.plus) < 1e-14);
    CHECK(norm(linear_profile(br, 0, a, -1.0) - sides.minus) < 1e-14);
    const Vec2 mean = 0.5 * (linear_profile(br, 0, a, 0.0) + linear_profile(br, 0, a, -1.0));
    CHECK(norm(mean - br.evaluate(0, a)) < 1e-14);
  }
}

TEST_CASE("parallel and serial layer velocity agree") {
  const auto config = unit_circle();
  const std::vector<LayerGrid> layers{build_layer(config[0].curve, config[0].strength, 0.02, 32, 8)};
  const LayerVelocity v(layers);
  const auto a = v.on_layer(0);
  const auto b = v.on_layer_serial(0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
}

TEST_CASE("linearity defect decays on the unit circle") {
  const auto config = unit_circle();
  const BREvaluator br(config);
  std::vector<double> eps{0.04, 0.02, 0.01}, defect;
  for (double e : eps) {
    const std::vector<LayerGrid> layers{build_layer(config[0].curve, config[0].strength, e, 64, 16)};
    const LayerVelocity v(layers);
    defect.push_back(linearity_defect(layers[0], v.on_layer(0), br, 0));
  }
  CHECK(defect[1] < defect[0]);
  CHECK(defect[2] < defect[1]);
  CHECK(log_slope(eps, defect) >= 0.8);
}

TEST_CASE("segment linearity defect is finite") {
  const double omega = 1.0;
  const br::SheetConfiguration config(
      {{make_segment(1.0), br::rotating_segment_strength(omega, 1.0)}}, omega);
  const BREvaluator br(config);
  std::vector<double> eps{0.04, 0.02}, defect;
  for (double e : eps) {
    const std::vector<LayerGrid> layers{build_layer(config[0].curve, config[0].strength, e, 96, 8)};
    const LayerVelocity v(layers);
    defect.push_back(linearity_defect(layers[0], v.on_layer(0), br, 0));
  }
  MESSAGE("segment defects " << defect[0] << " " << defect[1]);
  CHECK(std::isfinite(defect[0]));
  CHECK(defect[1] < defect[0]);
  CHECK(defect[1] <= 10.0 * std::sqrt(eps[1]) * std::abs(std::log(eps[1])));
}
