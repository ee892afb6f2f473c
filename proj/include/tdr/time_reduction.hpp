#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "tdr/time_basis.hpp"
#include "tdr/wave_forward.hpp"

namespace tdr {

/// Basis coefficients of the boundary traces: row per boundary node, column
/// per basis index.
struct CoefficientBoundary {
  Eigen::MatrixXd dirichlet;  ///< int p(x,t) Psi_m(t) dt
  Eigen::MatrixXd neumann;    ///< int q(x,t) Psi_m(t) dt
  std::string warning;        ///< nonempty when Nt is small relative to N
};

/// The vector U = (u_1..u_N) sampled on the closed Omega block, row per node
/// in Grid2D::omega_index order.
struct CoefficientField {
  Eigen::MatrixXd values;  ///< omega nodes x N

  int node_count() const { return static_cast<int>(values.rows()); }
  int mode_count() const { return static_cast<int>(values.cols()); }
};

/// Project sampled traces onto the basis. The time integrals use the
/// trapezoid rule on the data's own grid with a Gram correction (the sampled
/// basis is reorthogonalized against the trapezoid inner product), so data
/// that lies in the span of the first N members is recovered to roundoff.
CoefficientBoundary project_boundary(const BoundaryData& data,
                                     const TimeBasis& basis);

struct CutoffResult {
  int N = 0;
  std::vector<double> residuals;  ///< residual curve, index n-1 -> eta(n)
  bool reached_tol = true;
  std::string diagnostic;
};

/// Smallest N whose relative sup-norm reconstruction residual
///   eta(N) = ||p - sum_{n<=N} p_n Psi_n|| / ||p||   (sup over nodes x times)
/// drops to tol. Returns the cap with a diagnostic when tol is unreachable.
CutoffResult choose_cutoff(const BoundaryData& data, double T, double tol,
                           int cap = kBasisConditioningCap,
                           const QuadratureGrid* quad = nullptr);

/// Nonlinearity of the reduced elliptic system at one node:
///   F_m(U) = -(w' w)/(w^2 + reg_eta^2) * (D U)_m,
/// with w = sum u_l Psi_l(0) and w' = sum u_l Psi_l'(0). reg_eta > 0 keeps
/// the quotient finite where w crosses zero.
Eigen::VectorXd evaluate_F(const Eigen::VectorXd& U, const Couplings& c,
                           double reg_eta);

/// Max relative deviation between the analytic directional derivative of F
/// and central finite differences over seeded random directions. Test aid.
double evaluate_F_jacobian_check(const Eigen::VectorXd& U, const Couplings& c,
                                 double reg_eta, double h, int directions = 8,
                                 std::uint64_t seed = 7);

}  // namespace tdr
