#include "vsheet/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "vsheet/quadrature.hpp"

namespace vsheet::elliptic {

namespace {

constexpr double kPi = std::numbers::pi;

using SpMat = Eigen::SparseMatrix<double>;

struct Metric {
  Vec2 a, b;
  double jacobian;
};

struct Term {
  int j, k;
  double coef;
};

// Finite-volume discretization of d_i(A_ij d_j u) on the (xi, eta) grid.
class MappedOperator {
public:
  explicit MappedOperator(const LayerGrid &layer)
      : layer_(layer), closed_(layer.closed()), n_(layer.n_alpha()), m_(layer.n_eta()),
        h1_(closed_ ? 1.0 / n_ : kPi / n_), h2_(layer.eta_step()) {
    east_.resize(static_cast<std::size_t>(n_) * m_);
    north_.resize(static_cast<std::size_t>(n_) * m_);
    half_jacobian_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const double xi = layer.theta()[j];
      for (int k = 0; k < m_; ++k) {
        const double eta = layer.eta()[k];
        if (closed_ || j + 1 < n_)
          east_[idx(j, k)] = coefficients(metric(xi + 0.5 * h1_, eta));
        if (k + 1 < m_)
          north_[idx(j, k)] = coefficients(metric(xi, eta + 0.5 * h2_));
      }
      half_jacobian_[j] = metric(xi, -0.25 * h2_).jacobian;
    }
  }

  int n() const { return n_; }
  int m() const { return m_; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }

  Metric metric(double xi, double eta) const {
    const double alpha = closed_ ? xi : 0.5 * (1.0 - std::cos(xi));
    const double chain = closed_ ? 1.0 : 0.5 * std::sin(xi);
    const layer::LayerPoint p =
        layer::layer_map(layer_.curve(), layer_.strength(), layer_.epsilon(), alpha, eta);
    return {chain * p.d_alpha, p.d_eta, chain * p.jacobian};
  }

  double node_jacobian(int j, int k) const {
    const double chain = closed_ ? 1.0 : 0.5 * std::sin(layer_.theta()[j]);
    return chain * layer_.at(j, k).jacobian;
  }

  // Flux through the face east of (j, k), in the +xi direction.
  std::vector<Term> east(int j, int k) const {
    if (!closed_ && (j < 0 || j >= n_ - 1))
      return {};
    const int jj = wrap(j);
    const auto &c = east_[idx(jj, k)];
    const double s = h2_ / h1_ * c[0], t = 0.25 * c[1];
    return {{j + 1, k, s},      {j, k, -s},         {j, k + 1, t},
            {j + 1, k + 1, t},  {j, k - 1, -t},     {j + 1, k - 1, -t}};
  }

  // Flux through the face north of (j, k), in the +eta direction.
  std::vector<Term> north(int j, int k) const {
    const auto &c = north_[idx(j, k)];
    const double s = h1_ / h2_ * c[2];
    std::vector<Term> out{{j, k + 1, s}, {j, k, -s}};
    int lo = j - 1, hi = j + 1;
    double scale = 0.25 * c[1];
    if (!closed_ && (j == 0 || j == n_ - 1)) {
      lo = j == 0 ? 0 : j - 1;
      hi = j == 0 ? 1 : j;
      scale = 0.5 * c[1];
    }
    out.push_back({hi, k, scale});
    out.push_back({hi, k + 1, scale});
    out.push_back({lo, k, -scale});
    out.push_back({lo, k + 1, -scale});
    return out;
  }

  int wrap(int j) const { return closed_ ? (j % n_ + n_) % n_ : j; }
  double cell_jacobian_integral(int j, int k) const { return node_jacobian(j, k) * h1_ * h2_; }
  double half_cell_jacobian_integral(int j) const { return half_jacobian_[j] * h1_ * 0.5 * h2_; }

private:
  std::size_t idx(int j, int k) const { return static_cast<std::size_t>(j) * m_ + k; }

  static std::array<double, 3> coefficients(const Metric &g) {
    if (!(g.jacobian > 0.0))
      throw SolverError("elliptic: metric is not positive definite");
    return {norm2(g.b) / g.jacobian, -dot(g.a, g.b) / g.jacobian, norm2(g.a) / g.jacobian};
  }

  const LayerGrid &layer_;
  bool closed_;
  int n_, m_;
  double h1_, h2_;
  std::vector<std::array<double, 3>> east_, north_;
  std::vector<double> half_jacobian_;
};

// Interior unknowns are rows k = 1 .. m - 2.
class DirichletSystem {
public:
  DirichletSystem(const MappedOperator &op, PoissonOptions options)
      : op_(op), options_(options), rows_(op.m() - 2), size_(op.n() * rows_) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int j = 0; j < op.n(); ++j)
      for (int k = 1; k < op.m() - 1; ++k) {
        const int row = unknown(j, k);
        auto add = [&](const std::vector<Term> &terms, double sign) {
          for (const Term &t : terms)
            if (t.k > 0 && t.k < op.m() - 1)
              triplets.emplace_back(row, unknown(op.wrap(t.j), t.k), sign * t.coef);
        };
        add(op.east(j, k), 1.0);
        add(op.east(j - 1, k), -1.0);
        add(op.north(j, k), 1.0);
        add(op.north(j, k - 1), -1.0);
      }
    matrix_.resize(size_, size_);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();
    diagnose();
    if (static_cast<std::size_t>(size_) <= options.direct_limit) {
      lu_.compute(matrix_);
      if (lu_.info() != Eigen::Success)
        throw SolverError("elliptic: sparse factorization failed");
    } else {
      iterative_.setTolerance(options.tolerance);
      iterative_.setMaxIterations(20 * size_);
      iterative_.compute(matrix_);
      if (iterative_.info() != Eigen::Success)
        throw SolverError("elliptic: preconditioner setup failed");
    }
  }

  const OperatorDiagnostics &diagnostics() const { return diagnostics_; }

  // Full nodal solution for nodal source values (per unit area) and boundary rows.
  std::vector<double> solve(std::span<const double> source, std::span<const double> bottom,
                            std::span<const double> top, double &residual) const {
    const int n = op_.n(), m = op_.m();
    std::vector<double> full(static_cast<std::size_t>(n) * m, 0.0);
    for (int j = 0; j < n; ++j) {
      full[node(j, 0)] = bottom[j];
      full[node(j, m - 1)] = top[j];
    }
    Eigen::VectorXd rhs(size_);
    for (int j = 0; j < n; ++j)
      for (int k = 1; k < m - 1; ++k) {
        double r = source[node(j, k)] * op_.cell_jacobian_integral(j, k);
        auto move = [&](const std::vector<Term> &terms, double sign) {
          for (const Term &t : terms)
            if (t.k == 0 || t.k == m - 1)
              r -= sign * t.coef * full[node(op_.wrap(t.j), t.k)];
        };
        move(op_.east(j, k), 1.0);
        move(op_.east(j - 1, k), -1.0);
        move(op_.north(j, k), 1.0);
        move(op_.north(j, k - 1), -1.0);
        rhs[unknown(j, k)] = r;
      }
    Eigen::VectorXd x;
    if (static_cast<std::size_t>(size_) <= options_.direct_limit) {
      x = lu_.solve(rhs);
    } else {
      x = iterative_.solve(rhs);
      if (iterative_.info() != Eigen::Success)
        throw SolverError("elliptic: iterative solver did not converge (error " +
                          std::to_string(iterative_.error()) + ")");
    }
    const double scale = std::max(rhs.norm(), 1e-300);
    residual = (matrix_ * x - rhs).norm() / scale;
    if (!(residual <= std::max(options_.tolerance, 1e-8)))
      throw SolverError("elliptic: linear solve residual " + std::to_string(residual));
    for (int j = 0; j < n; ++j)
      for (int k = 1; k < m - 1; ++k)
        full[node(j, k)] = x[unknown(j, k)];
    return full;
  }

  // Total flux through eta = 0 in the +eta direction.
  double top_flux(std::span<const double> full, std::span<const double> source) const {
    const int m = op_.m();
    std::vector<double> per(op_.n());
    for (int j = 0; j < op_.n(); ++j) {
      double f = 0.0;
      for (const Term &t : op_.north(j, m - 2))
        f += t.coef * full[node(op_.wrap(t.j), t.k)];
      per[j] = f + source[node(j, m - 1)] * op_.half_cell_jacobian_integral(j);
    }
    return quad::pairwise_sum(per);
  }

private:
  int unknown(int j, int k) const { return j * rows_ + (k - 1); }
  std::size_t node(int j, int k) const { return static_cast<std::size_t>(j) * op_.m() + k; }

  void diagnose() {
    diagnostics_.wrong_sign_offdiagonal = 0;
    diagnostics_.min_row_dominance = std::numeric_limits<double>::infinity();
    std::vector<double> diag(size_, 0.0), off(size_, 0.0);
    for (int col = 0; col < matrix_.outerSize(); ++col)
      for (SpMat::InnerIterator it(matrix_, col); it; ++it) {
        if (it.row() == it.col()) {
          diag[it.row()] = it.value();
        } else {
          off[it.row()] += std::abs(it.value());
          // the operator is negative definite, so off-diagonals should be >= 0
          if (it.value() < -1e-14 * std::abs(matrix_.coeff(it.row(), it.row())))
            ++diagnostics_.wrong_sign_offdiagonal;
        }
      }
    for (int i = 0; i < size_; ++i)
      diagnostics_.min_row_dominance =
          std::min(diagnostics_.min_row_dominance, (std::abs(diag[i]) - off[i]) / std::abs(diag[i]));
    diagnostics_.m_matrix =
        diagnostics_.wrong_sign_offdiagonal == 0 && diagnostics_.min_row_dominance >= -1e-12;
  }

  const MappedOperator &op_;
  PoissonOptions options_;
  int rows_, size_;
  SpMat matrix_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> iterative_;
  OperatorDiagnostics diagnostics_;
};

} // namespace

std::vector<Vec2> nodal_gradient(const LayerGrid &layer, std::span<const double> values) {
  const int n = layer.n_alpha(), m = layer.n_eta();
  if (values.size() != static_cast<std::size_t>(n) * m)
    throw std::invalid_argument("nodal_gradient: size mismatch");
  const bool closed = layer.closed();
  const double h1 = closed ? 1.0 / n : kPi / n, h2 = layer.eta_step();
  auto v = [&](int j, int k) { return values[layer.index(j, k)]; };
  std::vector<Vec2> out(values.size());
  for (int j = 0; j < n; ++j) {
    const double chain = closed ? 1.0 : 0.5 * std::sin(layer.theta()[j]);
    for (int k = 0; k < m; ++k) {
      double dxi;
      if (closed)
        dxi = (v((j + 1) % n, k) - v((j + n - 1) % n, k)) / (2 * h1);
      else if (j == 0)
        dxi = (-3 * v(0, k) + 4 * v(1, k) - v(2, k)) / (2 * h1);
      else if (j == n - 1)
        dxi = (3 * v(n - 1, k) - 4 * v(n - 2, k) + v(n - 3, k)) / (2 * h1);
      else
        dxi = (v(j + 1, k) - v(j - 1, k)) / (2 * h1);
      double deta;
      if (k == 0)
        deta = (-3 * v(j, 0) + 4 * v(j, 1) - v(j, 2)) / (2 * h2);
      else if (k == m - 1)
        deta = (3 * v(j, m - 1) - 4 * v(j, m - 2) + v(j, m - 3)) / (2 * h2);
      else
        deta = (v(j, k + 1) - v(j, k - 1)) / (2 * h2);
      const auto &p = layer.at(j, k);
      const Vec2 a = chain * p.d_alpha, b = p.d_eta;
      const double J = chain * p.jacobian;
      out[layer.index(j, k)] = (-dxi * perp(b) + deta * perp(a)) / J;
    }
  }
  return out;
}

double integrate(const LayerGrid &layer, std::span<const double> values) {
  std::vector<double> rows(layer.n_alpha());
  for (int j = 0; j < layer.n_alpha(); ++j) {
    double s = 0.0;
    for (int k = 0; k < layer.n_eta(); ++k)
      s += layer.eta_weight()[k] * layer.at(j, k).jacobian * values[layer.index(j, k)];
    rows[j] = s * layer.alpha_weight()[j];
  }
  return quad::pairwise_sum(rows);
}

PoissonSolution assemble_and_solve(const LayerGrid &layer, PoissonOptions options) {
  const MappedOperator op(layer);
  const DirichletSystem system(op, options);
  const int n = op.n(), m = op.m();
  const std::size_t total = static_cast<std::size_t>(n) * m;
  std::vector<double> source(total, -2.0), zero_source(total, 0.0);
  std::vector<double> zeros(n, 0.0), ones(n, 1.0);

  PoissonSolution sol;
  sol.closed = layer.closed();
  sol.diagnostics = system.diagnostics();
  double residual = 0.0;
  std::vector<double> part = system.solve(source, zeros, zeros, residual);
  sol.solve_residual = residual;
  if (!sol.closed) {
    sol.p = std::move(part);
  } else {
    const std::vector<double> harm = system.solve(zero_source, zeros, ones, residual);
    sol.solve_residual = std::max(sol.solve_residual, residual);
    sol.enclosed_area = geometry::enclosed_area(layer.curve());
    const double f_part = system.top_flux(part, source);
    const double f_harm = system.top_flux(harm, zero_source);
    if (!(std::abs(f_harm) > 0.0))
      throw SolverError("elliptic: harmonic flux vanishes");
    sol.c = (2.0 * sol.enclosed_area - f_part) / f_harm;
    sol.p.resize(total);
    for (std::size_t i = 0; i < total; ++i)
      sol.p[i] = part[i] + sol.c * harm[i];
    sol.boundary_flux = system.top_flux(sol.p, source);
    sol.flux_residual = std::abs(sol.boundary_flux - 2.0 * sol.enclosed_area);
  }
  sol.gradient = nodal_gradient(layer, sol.p);
  return sol;
}

std::vector<double> solve_dirichlet(const LayerGrid &layer, const AlphaEtaFunction &source,
                                    const AlphaFunction &bottom, const AlphaFunction &top,
                                    PoissonOptions options) {
  const MappedOperator op(layer);
  const DirichletSystem system(op, options);
  const int n = op.n(), m = op.m();
  std::vector<double> s(static_cast<std::size_t>(n) * m), lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    const double a = layer.alpha()[j];
    lo[j] = bottom(a);
    hi[j] = top(a);
    for (int k = 0; k < m; ++k)
      s[layer.index(j, k)] = source(a, layer.eta()[k]);
  }
  double residual = 0.0;
  return system.solve(s, lo, hi, residual);
}

Decomposition decompose_p(const LayerGrid &layer, const PoissonSolution &solution) {
  if (!layer.closed() || !solution.closed)
    throw std::invalid_argument("decompose_p: needs a closed-curve solution");
  const int n = layer.n_alpha(), m = layer.n_eta();
  const double eps = layer.epsilon();
  const double L = layer.curve().length();
  std::vector<double> inv_gamma(n);
  for (int j = 0; j < n; ++j)
    inv_gamma[j] = layer.alpha_weight()[j] / layer.strength().value(layer.alpha()[j]);

  Decomposition d;
  d.beta = 2.0 * solution.enclosed_area / (L * quad::pairwise_sum(inv_gamma));
  d.p_tilde.resize(solution.p.size());
  d.q.resize(solution.p.size());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m; ++k) {
      const std::size_t i = layer.index(j, k);
      d.p_tilde[i] = solution.c * (1.0 + layer.eta()[k]);
      d.q[i] = solution.p[i] - d.p_tilde[i];
      d.q_max_over_eps2 = std::max(d.q_max_over_eps2, std::abs(d.q[i]) / (eps * eps));
      // grad (1 + eta) = perp(dR/dalpha) / J
      const auto &pt = layer.at(j, k);
      const Vec2 grad_tilde = (solution.c / pt.jacobian) * perp(pt.d_alpha);
      const double g = layer.strength().value(layer.alpha()[j]);
      const Vec2 normal = pt.d_eta / norm(pt.d_eta);
      d.gradient_defect = std::max(d.gradient_defect, norm(grad_tilde - (d.beta / g) * normal));
    }
  d.c_beta_defect = std::abs(solution.c / eps - d.beta) / eps;
  d.q_gradient = nodal_gradient(layer, d.q);
  return d;
}

TalentiGaps talenti_check(const LayerGrid &layer, const PoissonSolution &solution) {
  TalentiGaps t;
  t.area = layer::layer_area(layer);
  t.sup_p = *std::max_element(solution.p.begin(), solution.p.end());
  t.integral_p = integrate(layer, solution.p);
  t.sup_gap = t.area / (2.0 * kPi) - t.sup_p;
  t.int_gap = t.area * t.area / (4.0 * kPi) - t.integral_p;
  return t;
}

double boundary_gradient_check(const LayerGrid &layer, const Decomposition &decomposition) {
  if (!layer.closed())
    throw std::invalid_argument("boundary_gradient_check: needs a closed-curve layer");
  double worst = 0.0;
  for (int j = 0; j < layer.n_alpha(); ++j)
    worst = std::max(worst, norm(decomposition.q_gradient[layer.index(j, layer.n_eta() - 1)]));
  return worst;
}

void write_field_csv(std::ostream &out, const LayerGrid &layer, const PoissonSolution &solution,
                     const Decomposition *decomposition) {
  out << "alpha,eta,x,y,p,q,grad_x,grad_y\n";
  out << std::setprecision(17);
  for (int j = 0; j < layer.n_alpha(); ++j)
    for (int k = 0; k < layer.n_eta(); ++k) {
      const std::size_t i = layer.index(j, k);
      const Vec2 x = layer.at(j, k).position;
      const double q = decomposition ? decomposition->q[i] : 0.0;
      out << layer.alpha()[j] << ',' << layer.eta()[k] << ',' << x.x << ',' << x.y << ','
          << solution.p[i] << ',' << q << ',' << solution.gradient[i].x << ','
          << solution.gradient[i].y << '\n';
    }
}

} // namespace vsheet::elliptic
