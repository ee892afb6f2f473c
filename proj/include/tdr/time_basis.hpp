#pragma once

#include <Eigen/Core>
#include <vector>

#include "tdr/quadrature.hpp"

namespace tdr {

/// Orthonormal basis of L^2(0,T) built from the family t^{n-1} e^t.
///
/// Every member factors as Psi_n(t) = pi_{n-1}(t) e^t where {pi_k} are the
/// orthonormal polynomials for the weight e^{2t} dt on (0,T). The pi_k are
/// generated by a Stieltjes three-term recurrence against the quadrature
/// measure; first and second derivatives come from the differentiated
/// recurrences, so they are exact linear combinations of the raw family's
/// analytic derivatives rather than numerical differences. The recurrence is
/// run in extended precision: the naive Gram-Schmidt realization loses the
/// derivative/value consistency once the family's conditioning exceeds
/// double range (around n = 22).
struct TimeBasis {
  int N = 0;
  QuadratureGrid quad;

  Eigen::MatrixXd values;  ///< N x Q samples of Psi_n at the quadrature nodes
  Eigen::MatrixXd d1;      ///< N x Q samples of Psi_n'
  Eigen::MatrixXd d2;      ///< N x Q samples of Psi_n''

  Eigen::VectorXd at_zero;     ///< Psi_n(0)
  Eigen::VectorXd d1_at_zero;  ///< Psi_n'(0)

  Eigen::MatrixXd S;  ///< S(m,n) = int Psi_n'' Psi_m dt
  Eigen::MatrixXd D;  ///< D(m,n) = int Psi_n'  Psi_m dt

  /// Recurrence coefficients (monic-normalized), kept so the basis can be
  /// re-evaluated on any sample grid bit-consistently with `values`.
  std::vector<long double> alpha;
  std::vector<long double> beta;

  /// Samples of Psi_n (rows) at arbitrary times via the stored recurrence.
  Eigen::MatrixXd evaluate(const std::vector<double>& times) const;
  /// Same for first derivatives.
  Eigen::MatrixXd evaluate_d1(const std::vector<double>& times) const;
};

/// Maximum cutoff the construction accepts before conditioning makes the
/// derivative samples untrustworthy.
inline constexpr int kBasisConditioningCap = 50;

/// Samples of the raw family phi_n(t) = t^{n-1} e^t and its analytic first
/// and second derivatives at the quadrature nodes (rows n = 1..N).
struct RawFamily {
  Eigen::MatrixXd values;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
};

/// Evaluate the raw family on the quadrature grid. Throws std::invalid_argument
/// when N < 1 or N exceeds the conditioning cap.
RawFamily build_raw_family(double T, int N, const QuadratureGrid& quad,
                           int conditioning_cap = kBasisConditioningCap);

/// Orthonormalize the family on (0,T) under the quadrature inner product.
/// Throws std::runtime_error if the result fails the orthonormality check
/// (1e-8 after construction), which indicates N is too large for the rule.
TimeBasis orthonormalize(double T, int N, const QuadratureGrid& quad,
                         int conditioning_cap = kBasisConditioningCap);

/// The scalars the reduced system's nonlinearity needs, packaged as views of
/// the TimeBasis fields (no recomputation).
struct Couplings {
  const Eigen::VectorXd& psi_at_zero;
  const Eigen::VectorXd& dpsi_at_zero;
  const Eigen::MatrixXd& D;
};

Couplings nonlinear_couplings(const TimeBasis& basis);

}  // namespace tdr
