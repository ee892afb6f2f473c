#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>
#include <memory>
#include <optional>
#include <vector>

#include "tdr/grid.hpp"
#include "tdr/time_basis.hpp"
#include "tdr/time_reduction.hpp"

namespace tdr {

/// Inversion parameters. The weight center x0 must lie outside the closed
/// Omega; b normalizes the radius so exp(2 lambda (r/b)^{-beta}) stays
/// representable (b = 0 selects 1.05 * max_Omega r).
struct CarlemanConfig {
  double x0_x = 0.0;
  double x0_y = 5.5;
  double beta = 3.0;
  double lam = 3.0;
  double b = 0.0;
  double eps = 1e-5;
  double kappa0 = 1e-5;
  int max_iters = 50;
  double clamp_M = 0.0;  ///< entrywise bound on iterates; 0 disables
  double reg_eta = 1e-11;
};

/// Carleman weight sampled on the Omega block.
struct WeightField {
  Eigen::VectorXd logw;   ///< 2 lambda (r/b)^{-beta} per node
  Eigen::VectorXd w_rel;  ///< exp(logw - max logw), in (0,1]
  double b = 0.0;
  double max_logw = 0.0;
};

/// Throws if x0 lies in the closed Omega or b <= max_Omega r.
WeightField build_weight(const Grid2D& grid, const CarlemanConfig& config);

struct IterationRecord {
  double rel_diff_l2 = 0.0;   ///< ||U_{n+1}-U_n||_L2 / ||U_n||_L2
  double rel_diff_sup = 0.0;  ///< same in the sup norm
  double residual = 0.0;      ///< weighted least-squares residual norm
  double seconds = 0.0;
};

struct IterationHistory {
  std::vector<IterationRecord> records;
  bool converged = false;
};

/// One Carleman-weighted quasi-reversibility solve and its fixed-point
/// iteration.
///
/// Each step minimizes, over fields that match the Dirichlet data exactly,
///
///   sum_int w_rel |Lap^dx phi - S phi - F(x,V)|^2 dx^2
///   + sum_bnd |d_nu^dx phi - q|^2 dx^2
///   + eps (||phi||^2 + ||grad^dx phi||^2 + ||Lap^dx phi||^2),
///
/// a strictly convex quadratic: its normal equations are SPD and factored
/// once (the iterate V only moves the right-hand side). Dirichlet rows are
/// eliminated exactly; the Neumann rows carry the largest interior row
/// weight; norms are discrete L2 with the dx^2 cell measure.
class CarlemanSolver {
 public:
  CarlemanSolver(const Grid2D& grid, const TimeBasis& basis,
                 const CarlemanConfig& config);

  /// Minimizer with the nonlinearity frozen at V.
  CoefficientField step(const CoefficientField& V,
                        const CoefficientBoundary& boundary) const;

  /// Minimizer of the linear problem (nonlinearity dropped).
  CoefficientField initial_guess(const CoefficientBoundary& boundary) const;

  /// Minimizer with a prescribed load in the PDE rows:
  /// Lap phi - S phi = load at each interior node (omega nodes x N, rows
  /// outside the interior ignored). step() is solve_linear(F(V));
  /// initial_guess() is solve_linear(nullptr).
  CoefficientField solve_linear(const Eigen::MatrixXd* load,
                                const CoefficientBoundary& boundary) const;

  /// Inverse-power estimate of the smallest eigenvalue of the normal matrix;
  /// positive for every eps > 0 (strict convexity of the step objective).
  double smallest_normal_eigenvalue_estimate(int iterations = 40) const;

  /// Iterate step() from U0 (or from initial_guess when absent) until the
  /// consecutive relative L2 difference drops to kappa0 or max_iters is hit.
  /// Never throws on non-convergence; the history carries the flag.
  std::pair<CoefficientField, IterationHistory> fixed_point_solve(
      const CoefficientBoundary& boundary,
      const std::optional<CoefficientField>& U0 = std::nullopt) const;

  const WeightField& weight() const { return weight_; }
  const CarlemanConfig& config() const { return config_; }
  int unknown_count() const { return n_unknowns_; }

  /// Weighted residual norm ||A u - b(V)|| of a candidate field.
  double residual_norm(const CoefficientField& U, const CoefficientField& V,
                       const CoefficientBoundary& boundary) const;

 private:
  Eigen::VectorXd assemble_rhs(const Eigen::MatrixXd* load,
                               const CoefficientBoundary& boundary) const;
  CoefficientField solve_with_rhs(const Eigen::VectorXd& rhs,
                                  const CoefficientBoundary& boundary) const;

  struct NeumannRow {
    int row;
    int bnode;
    int mode;
    double weight;
  };

  const Grid2D grid_;
  CarlemanConfig config_;
  WeightField weight_;
  Eigen::VectorXd psi0_, dpsi0_;
  Eigen::MatrixXd S_, D_;
  int N_ = 0;
  int n_unknowns_ = 0;
  int n_rows_ = 0;
  int pde_rows_begin_ = 0;
  int neumann_rows_begin_ = 0;

  std::vector<int> interior_nodes_;      // omega_index of each interior node
  std::vector<int> unknown_of_node_;     // omega_index -> unknown block or -1
  std::vector<NeumannRow> neumann_row_meta_;
  Eigen::SparseMatrix<double> A_;        // rows x unknowns
  Eigen::SparseMatrix<double> A_known_;  // rows x boundary values
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

/// f(x) = sum_n u_n(x) Psi_n(0).
Eigen::VectorXd reconstruct_f(const CoefficientField& U,
                              const TimeBasis& basis);

/// Damping readout a(x) = -(w' w)/(w^2 + reg_eta^2) from the coefficients.
/// Reliable only when the underlying f is smooth; the caller is expected to
/// treat it as a secondary diagnostic.
Eigen::VectorXd reconstruct_a(const CoefficientField& U, const TimeBasis& basis,
                              double reg_eta);

}  // namespace tdr
