#pragma once

// Poisson problem Delta p = -2 on each layer, solved on the parameter
// rectangle. In coordinates xi = (xi, eta) the operator becomes
//
//   d_i (A_ij d_j p) = -2 J,   A = (1/J) [ |b|^2  -a.b ; -a.b  |a|^2 ]
//
// with a = dR/dxi, b = dR/deta. Closed curves use xi = alpha (periodic);
// open curves use xi = theta with alpha = (1 - cos theta) / 2, which turns
// both tips into zero-flux edges.
//
// Boundary data: p = 0 on eta = -1. On eta = 0, p = 0 for open curves and
// p = c for closed curves, with c fixed by int grad p . n = 2 |U| (n the
// normal pointing into the enclosed region U).

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "vsheet/layer.hpp"
#include "vsheet/vec2.hpp"

namespace vsheet::elliptic {

using layer::LayerGrid;

struct PoissonOptions {
  double tolerance = 1e-10;
  /// Above this many unknowns the iterative solver is used.
  std::size_t direct_limit = 100000;
};

struct OperatorDiagnostics {
  /// Off-diagonal entries of the wrong sign.
  int wrong_sign_offdiagonal = 0;
  /// min_i (|a_ii| - sum_j |a_ij|) / |a_ii|; negative when rows are not dominant.
  double min_row_dominance = 0.0;
  bool m_matrix = false;
};

struct PoissonSolution {
  bool closed = true;
  /// p at every grid node, LayerGrid::index order (boundary rows included).
  std::vector<double> p;
  std::vector<Vec2> gradient;
  double c = 0.0;             ///< value on eta = 0 (closed curves)
  double enclosed_area = 0.0; ///< |U| (closed curves)
  double boundary_flux = 0.0; ///< int grad p . n over the sheet
  double flux_residual = 0.0; ///< |boundary_flux - 2 |U||
  double solve_residual = 0.0;
  OperatorDiagnostics diagnostics;
};

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

PoissonSolution assemble_and_solve(const LayerGrid &layer, PoissonOptions options = {});

using AlphaEtaFunction = std::function<double(double alpha, double eta)>;
using AlphaFunction = std::function<double(double alpha)>;

/// Delta u = source in the layer with u = bottom on eta = -1 and u = top on
/// eta = 0. Returns u at every node.
std::vector<double> solve_dirichlet(const LayerGrid &layer, const AlphaEtaFunction &source,
                                    const AlphaFunction &bottom, const AlphaFunction &top,
                                    PoissonOptions options = {});

/// Physical gradient at the nodes from differences on the parameter grid.
std::vector<Vec2> nodal_gradient(const LayerGrid &layer, std::span<const double> values);

/// int_D f dx for nodal values f.
double integrate(const LayerGrid &layer, std::span<const double> values);

struct Decomposition {
  std::vector<double> p_tilde; ///< c (1 + eta)
  std::vector<double> q;       ///< p - p_tilde
  std::vector<Vec2> q_gradient;
  double beta = 0.0;           ///< 2 |U| / (L int gamma^-1)
  double q_max_over_eps2 = 0.0;
  double c_beta_defect = 0.0;  ///< |c / eps - beta| / eps
  double gradient_defect = 0.0; ///< max |grad p_tilde - (beta / gamma) n|
};

Decomposition decompose_p(const LayerGrid &layer, const PoissonSolution &solution);

struct TalentiGaps {
  double sup_gap = 0.0; ///< |D| / 2 pi - sup p
  double int_gap = 0.0; ///< |D|^2 / 4 pi - int p
  double area = 0.0;
  double sup_p = 0.0;
  double integral_p = 0.0;
};

TalentiGaps talenti_check(const LayerGrid &layer, const PoissonSolution &solution);

/// max |grad q| over the sheet row eta = 0.
double boundary_gradient_check(const LayerGrid &layer, const Decomposition &decomposition);

/// CSV rows alpha,eta,x,y,p,q,grad_x,grad_y.
void write_field_csv(std::ostream &out, const LayerGrid &layer, const PoissonSolution &solution,
                     const Decomposition *decomposition = nullptr);

} // namespace vsheet::elliptic
