#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vsheet/birkhoff_rott.hpp"

using namespace vsheet;
using namespace vsheet::br;
using geometry::make_circle;
using geometry::make_segment;

constexpr double kPi = std::numbers::pi;

namespace {

SheetConfiguration one_circle(double omega = 0.0) {
  return SheetConfiguration({{make_circle({}, 1.0), constant_strength(1.0)}}, omega);
}

} // namespace

TEST_CASE("kernel") {
  const Vec2 k = kernel_K2({2.0, 0.0});
  CHECK(k.x == 0.0);
  CHECK(k.y == doctest::Approx(1.0 / (4.0 * kPi)));
  CHECK_THROWS_AS(kernel_K2({0.0, 0.0}), std::domain_error);
}

TEST_CASE("unit circle with constant strength") {
  const auto config = one_circle();
  const BREvaluator br(config);
  for (double a : {0.0, 0.1, 0.37, 0.5, 0.9}) {
    const Vec2 v = br.evaluate(0, a);
    const Frame f = config[0].curve.frame(a);
    CHECK(std::abs(dot(v, f.normal)) < 1e-12);
    CHECK(dot(v, f.tangent) == doctest::Approx(0.5).epsilon(1e-12));
    const OneSided sides = one_sided_velocities(br, 0, a);
    CHECK(norm(sides.plus) < 1e-12);
    CHECK(norm(sides.minus - f.tangent) < 1e-12);
  }
  const auto report = stationarity_residual(config);
  CHECK(report.max_normal() < 1e-12);
  CHECK(report.max_tangential() < 1e-12);
  CHECK(report.curves[0].constant == doctest::Approx(0.5));
}

TEST_CASE("refinement check passes on smooth data") {
  const auto config = SheetConfiguration(
      {{make_circle({}, 1.0), fourier_strength(1.0, {0.3}, {0.1})}}, 0.0);
  const Vec2 v = evaluate_BR(config, 0, 0.21, 1e-10);
  CHECK(std::isfinite(v.x));
  CHECK(std::isfinite(v.y));
}

TEST_CASE("circle acts as a point vortex outside") {
  const auto config = one_circle();
  const BREvaluator br(config, {256, 256});
  const Vec2 x{2.5, -1.0};
  const Vec2 expected = 2.0 * kPi * kernel_K2(x);
  CHECK(norm(br.induced(0, x) - expected) < 1e-13);
  CHECK(norm(br.induced(0, {0.3, 0.2})) < 1e-13);
}

TEST_CASE("concentric circles are stationary") {
  const SheetConfiguration config({{make_circle({}, 1.0), constant_strength(1.0)},
                                   {make_circle({}, 2.0), constant_strength(0.5)}},
                                  0.0);
  const auto report = stationarity_residual(config);
  CHECK(report.max_normal() < 1e-10);
  CHECK(report.max_tangential() < 1e-10);
  const auto conc = concentricity_residual(config);
  CHECK(conc[0] < 1e-12);
  CHECK(conc[1] < 1e-12);
  CHECK(config.separation() == doctest::Approx(1.0));
}

TEST_CASE("nested non-concentric circles are not concentric") {
  const SheetConfiguration config({{make_circle({}, 2.0), constant_strength(1.0)},
                                   {make_circle({0.5, 0.0}, 1.0), constant_strength(1.0)}},
                                  0.0);
  const auto conc = concentricity_residual(config);
  CHECK(conc[0] > 1e-2);
  CHECK(conc[1] == 0.0);
}

TEST_CASE("concentricity residual needs circles of constant strength") {
  const SheetConfiguration config({{make_circle({}, 1.0), fourier_strength(1.0, {0.2})}}, 0.0);
  CHECK_THROWS_AS(concentricity_residual(config), std::invalid_argument);
}

TEST_CASE("rotating segment") {
  const double omega = 0.7;
  const SheetConfiguration config({{make_segment(1.0), rotating_segment_strength(omega, 1.0)}},
                                  omega);
  const auto report = stationarity_residual(config);
  CHECK(report.max_vector() < 1e-4);
  CHECK(report.max_normal() < 1e-4);

  // the bare semicircle law rotates at half the rate
  const SheetConfiguration half({{make_segment(1.0), semicircle_strength(omega, 1.0)}}, omega);
  const BREvaluator br(half);
  for (double a : {0.05, 0.3, 0.5, 0.81}) {
    const Vec2 z = half[0].curve.position(a);
    CHECK(norm(br.evaluate(0, a) - 0.5 * omega * perp(z)) < 1e-6);
  }
}

TEST_CASE("rotation covariance") {
  const SheetConfiguration config({{make_circle({}, 1.0), fourier_strength(1.0, {0.2})},
                                   {make_circle({4.0, 0.0}, 1.0), constant_strength(1.0)}},
                                  0.0);
  const double angle = 0.6;
  const auto moved = config.transformed(angle, {0.0, 0.0});
  const BREvaluator a(config), b(moved);
  for (double alpha : {0.1, 0.6}) {
    const Vec2 v = rotate(a.evaluate(0, alpha), angle);
    CHECK(norm(v - b.evaluate(0, alpha)) < 1e-12);
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(SheetConfiguration({{make_segment(1.0), constant_strength(1.0)}}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SheetConfiguration({{make_circle({}, 1.0), semicircle_strength(1.0, 1.0)}}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SheetConfiguration({{make_circle({}, 1.0), constant_strength(-1.0)}}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SheetConfiguration({{make_circle({}, 1.0), constant_strength(1.0)},
                                      {make_circle({1.0, 0.0}, 1.0), constant_strength(1.0)}},
                                     0.0),
                  std::domain_error);
}

TEST_CASE("closed sheets are ordered first") {
  const SheetConfiguration config({{make_segment(0.5), semicircle_strength(1.0, 0.5)},
                                   {make_circle({0.0, 3.0}, 1.0), constant_strength(1.0)}},
                                  0.0);
  CHECK(config.closed_count() == 1);
  CHECK(config[0].curve.closed());
}

TEST_CASE("hoelder seminorm of the semicircle law") {
  const auto g = semicircle_strength(1.0, 1.0);
  const double h = holder_seminorm(g, 0.5);
  CHECK(h > 1.0);
  CHECK(h < 3.0);
}
