#include "tdr/time_reduction.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tdr {
namespace {

// Least-squares projection of sampled traces onto the sampled basis under
// trapezoid weights. The Gram solve corrects the discrete loss of
// orthogonality, so traces inside the span come back to roundoff.
Eigen::MatrixXd project_rows(const Eigen::MatrixXd& traces,
                             const Eigen::MatrixXd& basis_samples,
                             const Eigen::VectorXd& tw) {
  const Eigen::MatrixXd BW = basis_samples * tw.asDiagonal();   // N x Nt
  const Eigen::MatrixXd G = BW * basis_samples.transpose();     // N x N
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("projection Gram matrix is not positive definite");
  return ldlt.solve(BW * traces.transpose()).transpose();  // nodes x N
}

}  // namespace

CoefficientBoundary project_boundary(const BoundaryData& data,
                                     const TimeBasis& basis) {
  const int Nt = data.time_count();
  if (Nt < 2) throw std::invalid_argument("boundary data has no time axis");

  CoefficientBoundary out;
  if (Nt < 4 * basis.N) {
    std::ostringstream os;
    os << "only " << Nt << " time samples for N = " << basis.N
       << " modes; recommend Nt >= 4N, higher modes may alias";
    out.warning = os.str();
  }

  const Eigen::MatrixXd E = basis.evaluate(data.times);  // N x Nt
  const std::vector<double> twv = trapezoid_weights(data.times);
  const Eigen::VectorXd tw =
      Eigen::Map<const Eigen::VectorXd>(twv.data(), twv.size());

  out.dirichlet = project_rows(data.p, E, tw);
  out.neumann = project_rows(data.q, E, tw);
  return out;
}

CutoffResult choose_cutoff(const BoundaryData& data, double T, double tol,
                           int cap, const QuadratureGrid* quad) {
  if (tol <= 0) throw std::invalid_argument("cutoff tolerance must be positive");
  QuadratureGrid local;
  if (!quad) {
    local = QuadratureGrid::lobatto_panels(T, cap <= 20 ? 64 : 312);
    quad = &local;
  }
  const TimeBasis basis = orthonormalize(T, cap, *quad);
  const Eigen::MatrixXd E = basis.evaluate(data.times);  // cap x Nt
  const std::vector<double> twv = trapezoid_weights(data.times);
  const Eigen::VectorXd tw =
      Eigen::Map<const Eigen::VectorXd>(twv.data(), twv.size());

  const double p_sup = data.p.cwiseAbs().maxCoeff();
  if (p_sup == 0.0)
    throw std::invalid_argument("cutoff selection needs nonzero Dirichlet data");

  CutoffResult res;
  res.residuals.resize(cap);
  int chosen = 0;
  for (int n = 1; n <= cap; ++n) {
    const Eigen::MatrixXd En = E.topRows(n);
    const Eigen::MatrixXd coef = project_rows(data.p, En, tw);  // nodes x n
    const double err = (data.p - coef * En).cwiseAbs().maxCoeff();
    res.residuals[n - 1] = err / p_sup;
    if (chosen == 0 && res.residuals[n - 1] <= tol) chosen = n;
  }
  if (chosen == 0) {
    res.N = cap;
    res.reached_tol = false;
    std::ostringstream os;
    os << "residual stayed above tol = " << tol << " up to the cap " << cap
       << " (best " << *std::min_element(res.residuals.begin(), res.residuals.end())
       << "); returning the cap";
    res.diagnostic = os.str();
  } else {
    res.N = chosen;
  }
  return res;
}

Eigen::VectorXd evaluate_F(const Eigen::VectorXd& U, const Couplings& c,
                           double reg_eta) {
  if (reg_eta <= 0) throw std::invalid_argument("reg_eta must be positive");
  const double w = c.psi_at_zero.dot(U);
  const double wp = c.dpsi_at_zero.dot(U);
  const double pref = -(wp * w) / (w * w + reg_eta * reg_eta);
  return pref * (c.D * U);
}

double evaluate_F_jacobian_check(const Eigen::VectorXd& U, const Couplings& c,
                                 double reg_eta, double h, int directions,
                                 std::uint64_t seed) {
  if (h < 1e-7 || h > 1e-4)
    throw std::invalid_argument("finite-difference step outside [1e-7, 1e-4]");
  const int N = static_cast<int>(U.size());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double w = c.psi_at_zero.dot(U);
  const double wp = c.dpsi_at_zero.dot(U);
  const double s = w * w + reg_eta * reg_eta;
  const double g = -(wp * w) / s;
  const Eigen::VectorXd DU = c.D * U;

  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    Eigen::VectorXd V(N);
    for (int i = 0; i < N; ++i) V(i) = normal(gen);
    V.normalize();
    const double dw = c.psi_at_zero.dot(V);
    const double dwp = c.dpsi_at_zero.dot(V);
    // derivative of g = -(wp w)/s with s = w^2 + eta^2
    const double dg = -((dwp * w + wp * dw) * s - wp * w * 2.0 * w * dw) / (s * s);
    const Eigen::VectorXd analytic = dg * DU + g * (c.D * V);
    const Eigen::VectorXd fd =
        (evaluate_F(U + h * V, c, reg_eta) - evaluate_F(U - h * V, c, reg_eta)) /
        (2.0 * h);
    const double scale = std::max(analytic.norm(), 1e-12);
    worst = std::max(worst, (analytic - fd).norm() / scale);
  }
  return worst;
}

}  // namespace tdr
