#include "tdr/carleman.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tdr {
namespace {

double max_radius(const Grid2D& grid, double x0, double y0) {
  double r = 0.0;
  for (int j = grid.omega_lo(); j <= grid.omega_hi(); ++j)
    for (int i = grid.omega_lo(); i <= grid.omega_hi(); ++i)
      r = std::max(r, std::hypot(grid.x(i) - x0, grid.y(j) - y0));
  return r;
}

}  // namespace

WeightField build_weight(const Grid2D& grid, const CarlemanConfig& config) {
  const double x0 = config.x0_x, y0 = config.x0_y;
  const double margin = 1e-12;
  if (x0 >= grid.omega_min() - margin && x0 <= grid.omega_max() + margin &&
      y0 >= grid.omega_min() - margin && y0 <= grid.omega_max() + margin)
    throw std::invalid_argument("weight center x0 must lie outside closure(Omega)");
  if (config.lam <= 0 || config.beta <= 0)
    throw std::invalid_argument("Carleman parameters lambda, beta must be positive");

  const double rmax = max_radius(grid, x0, y0);
  const double b = config.b > 0 ? config.b : 1.05 * rmax;
  if (b <= rmax)
    throw std::invalid_argument("normalization radius b must exceed max_Omega |x - x0|");

  WeightField w;
  const int n = grid.omega_node_count();
  w.logw.resize(n);
  w.b = b;
  for (int j = grid.omega_lo(); j <= grid.omega_hi(); ++j)
    for (int i = grid.omega_lo(); i <= grid.omega_hi(); ++i) {
      const double r = std::hypot(grid.x(i) - x0, grid.y(j) - y0);
      w.logw(grid.omega_index(i, j)) =
          2.0 * config.lam * std::pow(r / b, -config.beta);
    }
  w.max_logw = w.logw.maxCoeff();
  w.w_rel = (w.logw.array() - w.max_logw).exp();
  return w;
}

CarlemanSolver::CarlemanSolver(const Grid2D& grid, const TimeBasis& basis,
                               const CarlemanConfig& config)
    : grid_(grid),
      config_(config),
      weight_(build_weight(grid, config)),
      psi0_(basis.at_zero),
      dpsi0_(basis.d1_at_zero),
      S_(basis.S),
      D_(basis.D),
      N_(basis.N) {
  if (config.eps <= 0) throw std::invalid_argument("eps must be positive");
  if (config.reg_eta <= 0) throw std::invalid_argument("reg_eta must be positive");

  const int side = grid.omega_side();
  const int lo = grid.omega_lo(), hi = grid.omega_hi();
  const double dx = grid.dx();
  const int n_nodes = grid.omega_node_count();

  // unknowns: interior nodes only; Dirichlet values are eliminated exactly
  unknown_of_node_.assign(n_nodes, -1);
  for (int j = lo + 1; j <= hi - 1; ++j)
    for (int i = lo + 1; i <= hi - 1; ++i) {
      const int node = grid.omega_index(i, j);
      unknown_of_node_[node] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(node);
    }
  const int n_int = static_cast<int>(interior_nodes_.size());
  n_unknowns_ = n_int * N_;
  const int n_bnd = static_cast<int>(grid.boundary_nodes().size());

  // Row budget: PDE (interior), Neumann (non-corner boundary), then the
  // regularization blocks: value, two gradient components, Laplacian.
  std::vector<Eigen::Triplet<double>> trips, ktrips;
  const auto uk = [&](int node, int m) { return unknown_of_node_[node] * N_ + m; };
  // boundary nodes indexed by their position in the boundary enumeration
  std::vector<int> bidx_of_node(n_nodes, -1);
  for (int k = 0; k < n_bnd; ++k) {
    const auto& bn = grid.boundary_nodes()[k];
    bidx_of_node[grid.omega_index(bn.i, bn.j)] = k;
  }
  const auto kv = [&](int node, int m) { return bidx_of_node[node] * N_ + m; };

  // emits value*coeff either into the unknown block or the known block
  const auto emit = [&](int row, int i, int j, int m, double coeff) {
    const int node = grid_.omega_index(i, j);
    if (unknown_of_node_[node] >= 0)
      trips.emplace_back(row, uk(node, m), coeff);
    else
      ktrips.emplace_back(row, kv(node, m), coeff);
  };

  int row = 0;
  const double inv_dx2 = 1.0 / (dx * dx);

  // PDE rows: dx * sqrt(w_rel) * (Lap^dx phi - S phi)(node, m)
  pde_rows_begin_ = row;
  for (int idx = 0; idx < n_int; ++idx) {
    const int node = interior_nodes_[idx];
    const int i = lo + node % side;
    const int j = lo + node / side;
    const double wrow = dx * std::sqrt(weight_.w_rel(node));
    for (int m = 0; m < N_; ++m) {
      emit(row, i + 1, j, m, wrow * inv_dx2);
      emit(row, i - 1, j, m, wrow * inv_dx2);
      emit(row, i, j + 1, m, wrow * inv_dx2);
      emit(row, i, j - 1, m, wrow * inv_dx2);
      emit(row, i, j, m, -4.0 * wrow * inv_dx2);
      for (int n = 0; n < N_; ++n) emit(row, i, j, n, -wrow * S_(m, n));
      ++row;
    }
  }

  // Neumann rows: dx * ((3 phi_b - 4 phi_in + phi_in2)/(2 dx) - q_m); the
  // boundary value phi_b is known. Corner nodes touch only known values, so
  // they constrain nothing and are skipped.
  neumann_rows_begin_ = row;
  for (int k = 0; k < n_bnd; ++k) {
    const auto& bn = grid.boundary_nodes()[k];
    const bool corner = (bn.i == lo || bn.i == hi) && (bn.j == lo || bn.j == hi);
    if (corner) continue;
    int di, dj;
    Grid2D::outward_normal(bn.face, di, dj);
    const double wrow = dx;  // largest interior row weight: dx * sqrt(1)
    const double c = wrow / (2.0 * dx);
    for (int m = 0; m < N_; ++m) {
      emit(row, bn.i, bn.j, m, 3.0 * c);
      emit(row, bn.i - di, bn.j - dj, m, -4.0 * c);
      emit(row, bn.i - 2 * di, bn.j - 2 * dj, m, 1.0 * c);
      neumann_row_meta_.push_back({row, k, m, wrow});
      ++row;
    }
  }

  // Regularization rows, all scaled by sqrt(eps) * dx (discrete L2 measure).
  const double se = std::sqrt(config.eps) * dx;
  for (int idx = 0; idx < n_int; ++idx) {
    const int node = interior_nodes_[idx];
    const int i = lo + node % side;
    const int j = lo + node / side;
    for (int m = 0; m < N_; ++m) {
      emit(row, i, j, m, se);
      ++row;
      emit(row, i + 1, j, m, se / (2.0 * dx));
      emit(row, i - 1, j, m, -se / (2.0 * dx));
      ++row;
      emit(row, i, j + 1, m, se / (2.0 * dx));
      emit(row, i, j - 1, m, -se / (2.0 * dx));
      ++row;
      emit(row, i + 1, j, m, se * inv_dx2);
      emit(row, i - 1, j, m, se * inv_dx2);
      emit(row, i, j + 1, m, se * inv_dx2);
      emit(row, i, j - 1, m, se * inv_dx2);
      emit(row, i, j, m, -4.0 * se * inv_dx2);
      ++row;
    }
  }
  n_rows_ = row;

  A_.resize(n_rows_, n_unknowns_);
  A_.setFromTriplets(trips.begin(), trips.end());
  A_.makeCompressed();
  A_known_.resize(n_rows_, n_bnd * N_);
  A_known_.setFromTriplets(ktrips.begin(), ktrips.end());
  A_known_.makeCompressed();

  const Eigen::SparseMatrix<double> AtA = A_.transpose() * A_;
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  ldlt_->compute(AtA);
  if (ldlt_->info() != Eigen::Success)
    throw std::runtime_error(
        "normal-equations factorization failed; the step system lost positive "
        "definiteness");
}

Eigen::VectorXd CarlemanSolver::assemble_rhs(
    const Eigen::MatrixXd* load, const CoefficientBoundary& boundary) const {
  const double dx = grid_.dx();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows_);

  if (load) {
    // PDE rows: residual is w (L phi - load), so the right side carries
    // w * load
    const int n_int = static_cast<int>(interior_nodes_.size());
    for (int idx = 0; idx < n_int; ++idx) {
      const int node = interior_nodes_[idx];
      const double wrow = dx * std::sqrt(weight_.w_rel(node));
      for (int m = 0; m < N_; ++m)
        b(pde_rows_begin_ + idx * N_ + m) = wrow * (*load)(node, m);
    }
  }

  for (const auto& meta : neumann_row_meta_)
    b(meta.row) = meta.weight * boundary.neumann(meta.bnode, meta.mode);

  // move the known Dirichlet columns to the right side
  Eigen::VectorXd known(static_cast<int>(grid_.boundary_nodes().size()) * N_);
  for (int k = 0; k < static_cast<int>(grid_.boundary_nodes().size()); ++k)
    for (int m = 0; m < N_; ++m)
      known(k * N_ + m) = boundary.dirichlet(k, m);
  b -= A_known_ * known;
  return b;
}

CoefficientField CarlemanSolver::solve_with_rhs(
    const Eigen::VectorXd& rhs, const CoefficientBoundary& boundary) const {
  const Eigen::VectorXd x = ldlt_->solve(A_.transpose() * rhs);
  if (ldlt_->info() != Eigen::Success)
    throw std::runtime_error("normal-equations solve failed");

  CoefficientField U;
  U.values.setZero(grid_.omega_node_count(), N_);
  const int n_int = static_cast<int>(interior_nodes_.size());
  for (int idx = 0; idx < n_int; ++idx)
    for (int m = 0; m < N_; ++m)
      U.values(interior_nodes_[idx], m) = x(idx * N_ + m);
  for (int k = 0; k < static_cast<int>(grid_.boundary_nodes().size()); ++k) {
    const auto& bn = grid_.boundary_nodes()[k];
    const int node = grid_.omega_index(bn.i, bn.j);
    for (int m = 0; m < N_; ++m) U.values(node, m) = boundary.dirichlet(k, m);
  }
  return U;
}

namespace {

Eigen::MatrixXd nonlinearity_field(const CoefficientField& V,
                                   const Eigen::VectorXd& psi0,
                                   const Eigen::VectorXd& dpsi0,
                                   const Eigen::MatrixXd& D, double reg_eta) {
  const Couplings c{psi0, dpsi0, D};
  Eigen::MatrixXd F(V.values.rows(), V.values.cols());
  for (int node = 0; node < V.values.rows(); ++node)
    F.row(node) =
        evaluate_F(V.values.row(node).transpose(), c, reg_eta).transpose();
  return F;
}

}  // namespace

CoefficientField CarlemanSolver::solve_linear(
    const Eigen::MatrixXd* load, const CoefficientBoundary& boundary) const {
  if (load && (load->rows() != grid_.omega_node_count() || load->cols() != N_))
    throw std::invalid_argument("load shape does not match grid/basis");
  return solve_with_rhs(assemble_rhs(load, boundary), boundary);
}

CoefficientField CarlemanSolver::step(const CoefficientField& V,
                                      const CoefficientBoundary& boundary) const {
  if (!V.values.allFinite())
    throw std::invalid_argument("iterate passed to the step contains non-finite values");
  if (V.node_count() != grid_.omega_node_count() || V.mode_count() != N_)
    throw std::invalid_argument("iterate shape does not match grid/basis");
  const Eigen::MatrixXd F =
      nonlinearity_field(V, psi0_, dpsi0_, D_, config_.reg_eta);
  return solve_linear(&F, boundary);
}

CoefficientField CarlemanSolver::initial_guess(
    const CoefficientBoundary& boundary) const {
  return solve_linear(nullptr, boundary);
}

double CarlemanSolver::residual_norm(const CoefficientField& U,
                                     const CoefficientField& V,
                                     const CoefficientBoundary& boundary) const {
  Eigen::VectorXd x(n_unknowns_);
  const int n_int = static_cast<int>(interior_nodes_.size());
  for (int idx = 0; idx < n_int; ++idx)
    for (int m = 0; m < N_; ++m)
      x(idx * N_ + m) = U.values(interior_nodes_[idx], m);
  const Eigen::MatrixXd F =
      nonlinearity_field(V, psi0_, dpsi0_, D_, config_.reg_eta);
  return (A_ * x - assemble_rhs(&F, boundary)).norm();
}

double CarlemanSolver::smallest_normal_eigenvalue_estimate(int iterations) const {
  // inverse power iteration through the cached factorization
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n_unknowns_).normalized();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = ldlt_->solve(v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda = 1.0 / norm;  // Rayleigh-style estimate of the smallest eigenvalue
  }
  return lambda;
}

std::pair<CoefficientField, IterationHistory> CarlemanSolver::fixed_point_solve(
    const CoefficientBoundary& boundary,
    const std::optional<CoefficientField>& U0) const {
  using clock = std::chrono::steady_clock;
  CoefficientField U = U0 ? *U0 : initial_guess(boundary);
  if (config_.clamp_M > 0)
    U.values = U.values.cwiseMax(-config_.clamp_M).cwiseMin(config_.clamp_M);

  IterationHistory history;
  for (int it = 0; it < config_.max_iters; ++it) {
    const auto t0 = clock::now();
    CoefficientField next = step(U, boundary);
    if (config_.clamp_M > 0)
      next.values = next.values.cwiseMax(-config_.clamp_M).cwiseMin(config_.clamp_M);

    const double denom_l2 = std::max(U.values.norm(), 1e-300);
    const double denom_sup = std::max(U.values.cwiseAbs().maxCoeff(), 1e-300);
    IterationRecord rec;
    rec.rel_diff_l2 = (next.values - U.values).norm() / denom_l2;
    rec.rel_diff_sup = (next.values - U.values).cwiseAbs().maxCoeff() / denom_sup;
    rec.residual = residual_norm(next, U, boundary);
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    history.records.push_back(rec);

    U = std::move(next);
    if (rec.rel_diff_l2 <= config_.kappa0) {
      history.converged = true;
      break;
    }
  }
  return {std::move(U), std::move(history)};
}

Eigen::VectorXd reconstruct_f(const CoefficientField& U, const TimeBasis& basis) {
  if (!U.values.allFinite())
    throw std::invalid_argument("coefficient field contains non-finite values");
  return U.values * basis.at_zero;
}

Eigen::VectorXd reconstruct_a(const CoefficientField& U, const TimeBasis& basis,
                              double reg_eta) {
  if (reg_eta <= 0) throw std::invalid_argument("reg_eta must be positive");
  const Eigen::VectorXd w = U.values * basis.at_zero;
  const Eigen::VectorXd wp = U.values * basis.d1_at_zero;
  return (-(wp.array() * w.array()) / (w.array().square() + reg_eta * reg_eta))
      .matrix();
}

}  // namespace tdr
