#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "vsheet/elliptic.hpp"

using namespace vsheet;
using namespace vsheet::elliptic;
using layer::build_layer;
using geometry::make_circle;

constexpr double kPi = std::numbers::pi;

namespace {

LayerGrid circle_layer(double eps, int na = 128, int ne = 16) {
  return build_layer(make_circle({}, 1.0), br::constant_strength(1.0), eps, na, ne);
}

LayerGrid fourier_layer(double eps, int na = 256, int ne = 16) {
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{2, 0.1}};
  return build_layer(geometry::make_fourier_curve(1.0, modes), br::constant_strength(1.0), eps, na,
                     ne);
}

} // namespace

TEST_CASE("annulus solution is reproduced at the nodes") {
  for (double eps : {0.08, 0.04, 0.02, 0.01}) {
    const auto grid = circle_layer(eps);
    const auto sol = assemble_and_solve(grid);
    CHECK(sol.c == doctest::Approx(eps + eps * eps / 2).epsilon(1e-10));
    double worst = 0.0;
    for (int j = 0; j < grid.n_alpha(); ++j)
      for (int k = 0; k < grid.n_eta(); ++k) {
        const double r = norm(grid.at(j, k).position);
        const double exact = -0.5 * r * r + 0.5 * (1 + eps) * (1 + eps);
        worst = std::max(worst, std::abs(sol.p[grid.index(j, k)] - exact));
      }
    const double h = grid.eta_step();
    CHECK(worst <= 5.0 * (h * h * eps * eps + 1e-10));
    CHECK(sol.flux_residual < 1e-10);
    CHECK(std::abs(sol.c / eps - 1.0) <= eps / 2 + 1e-9);
  }
}

TEST_CASE("annulus decomposition and Talenti equality") {
  const double eps = 0.01;
  const auto grid = circle_layer(eps);
  const auto sol = assemble_and_solve(grid);
  const auto dec = decompose_p(grid, sol);
  CHECK(dec.beta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.c_beta_defect == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(dec.q_max_over_eps2 <= 1.0);
  CHECK(dec.gradient_defect <= 2.0 * eps);
  const auto gaps = talenti_check(grid, sol);
  CHECK(std::abs(gaps.sup_gap) < 1e-10);
  CHECK(std::abs(gaps.int_gap) < 1e-10);
  CHECK(boundary_gradient_check(grid, dec) <= 2.0 * eps);
  // the gradient points along -r with magnitude r
  const auto &g = sol.gradient[grid.index(5, 3)];
  const Vec2 x = grid.at(5, 3).position;
  CHECK(norm(g + x) < 1e-6);
}

TEST_CASE("manufactured solution converges at second order") {
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{3, 0.05}};
  const auto curve = geometry::make_fourier_curve(1.0, modes);
  const auto gamma = br::fourier_strength(1.0, {0.2});
  const double eps = 0.2;
  auto exact = [](Vec2 x) { return std::sin(2.0 * x.x) * std::cos(x.y) + x.x * x.y; };
  std::vector<double> err;
  for (int level = 0; level < 2; ++level) {
    const int na = 32 << level, ne = (8 << level) + 1;
    const auto grid = build_layer(curve, gamma, eps, na, ne);
    auto at = [&](double a, double e) {
      return exact(layer::layer_map(curve, gamma, eps, a, e).position);
    };
    const auto u = solve_dirichlet(
        grid,
        [&](double a, double e) {
          const Vec2 x = layer::layer_map(curve, gamma, eps, a, e).position;
          return -5.0 * std::sin(2.0 * x.x) * std::cos(x.y);
        },
        [&](double a) { return at(a, -1.0); }, [&](double a) { return at(a, 0.0); });
    double worst = 0.0;
    for (int j = 0; j < grid.n_alpha(); ++j)
      for (int k = 0; k < grid.n_eta(); ++k)
        worst = std::max(worst, std::abs(u[grid.index(j, k)] -
                                         exact(grid.at(j, k).position)));
    err.push_back(worst);
  }
  const double order = std::log2(err[0] / err[1]);
  MESSAGE("manufactured errors " << err[0] << " " << err[1] << " order " << order);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
}

TEST_CASE("discrete maximum principle and flux") {
  const auto grid = fourier_layer(0.04);
  const auto sol = assemble_and_solve(grid);
  CHECK(*std::min_element(sol.p.begin(), sol.p.end()) >= -1e-14);
  CHECK(sol.flux_residual < 1e-9);
  const auto gaps = talenti_check(grid, sol);
  CHECK(gaps.int_gap > 0.0);
  CHECK(gaps.sup_gap > -1e-12);
}

TEST_CASE("fourier curve: q stays O(eps^2) and grad q is O(eps)") {
  std::vector<double> eps{0.04, 0.02, 0.01}, ratio, grad;
  for (double e : eps) {
    const auto grid = fourier_layer(e);
    const auto sol = assemble_and_solve(grid);
    const auto dec = decompose_p(grid, sol);
    ratio.push_back(dec.q_max_over_eps2);
    grad.push_back(boundary_gradient_check(grid, dec));
  }
  for (std::size_t i = 1; i < ratio.size(); ++i) {
    CHECK(ratio[i] / ratio[i - 1] >= 0.5);
    CHECK(ratio[i] / ratio[i - 1] <= 2.0);
  }
  const double slope = std::log(grad[0] / grad[2]) / std::log(eps[0] / eps[2]);
  MESSAGE("grad q " << grad[0] << " " << grad[1] << " " << grad[2] << " slope " << slope);
  CHECK(slope >= 0.8);
}

TEST_CASE("segment layer: p is O(eps^2)") {
  const double eps = 0.01, omega = 1.0;
  const auto gamma = br::rotating_segment_strength(omega, 1.0);
  const auto grid = build_layer(geometry::make_segment(1.0), gamma, eps, 256, 16);
  const auto sol = assemble_and_solve(grid);
  const double gmax = gamma.value(0.5);
  const double pmax = *std::max_element(sol.p.begin(), sol.p.end());
  CHECK(pmax > 0.0);
  CHECK(pmax <= 36.0 * gmax * gmax * 2.0 * eps * eps);
  const auto gaps = talenti_check(grid, sol);
  CHECK(gaps.sup_gap > 0.0);
  CHECK(gaps.int_gap > 0.0);
  CHECK_THROWS_AS(decompose_p(grid, sol), std::invalid_argument);
}

TEST_CASE("field dump") {
  const auto grid = circle_layer(0.02, 16, 8);
  const auto sol = assemble_and_solve(grid);
  std::ostringstream out;
  write_field_csv(out, grid, sol);
  const std::string s = out.str();
  CHECK(s.rfind("alpha,eta,x,y,p,q,grad_x,grad_y\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 16 * 8);
}
