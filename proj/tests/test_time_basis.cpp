#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "tdr/quadrature.hpp"
#include "tdr/time_basis.hpp"

using namespace tdr;

namespace {

double quad_dot_row(const QuadratureGrid& q, const Eigen::MatrixXd& A, int ra,
                    const Eigen::MatrixXd& B, int rb) {
  std::vector<double> a(q.size()), b(q.size());
  for (int i = 0; i < q.size(); ++i) {
    a[i] = A(ra, i);
    b[i] = B(rb, i);
  }
  return q.dot(a, b);
}

}  // namespace

TEST_CASE("lobatto panel quadrature satisfies the grid contract") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 64, 8);
  CHECK(q.nodes.front() == 0.0);
  CHECK(q.nodes.back() == 1.0);
  for (int i = 1; i < q.size(); ++i) CHECK(q.nodes[i] > q.nodes[i - 1]);
  double wmin = 1e300, wsum = 0;
  for (double w : q.weights) {
    wmin = std::min(wmin, w);
    wsum += w;
  }
  CHECK(wmin > 0.0);
  CHECK(std::abs(wsum - 1.0) < 1e-12);

  // exactness sanity on a smooth integrand: int_0^1 e^{2t} = (e^2 - 1)/2
  std::vector<double> f(q.size()), one(q.size(), 1.0);
  for (int i = 0; i < q.size(); ++i) f[i] = std::exp(2.0 * q.nodes[i]);
  CHECK(q.dot(f, one) == doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("raw family values and derivatives at t = 0") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 8, 8);
  const RawFamily fam = build_raw_family(1.0, 4, q);
  // phi_1 = e^t
  CHECK(fam.values(0, 0) == doctest::Approx(1.0));
  CHECK(fam.d1(0, 0) == doctest::Approx(1.0));
  // phi_2 = t e^t
  CHECK(fam.values(1, 0) == doctest::Approx(0.0));
  CHECK(fam.d1(1, 0) == doctest::Approx(1.0));
  // phi_3 = t^2 e^t
  CHECK(fam.d1(2, 0) == doctest::Approx(0.0));
  CHECK(fam.d2(2, 0) == doctest::Approx(2.0));
  // interior consistency: phi_2'(t) = (1 + t) e^t at an interior node
  const double t = q.nodes[10];
  CHECK(fam.d1(1, 10) == doctest::Approx((1.0 + t) * std::exp(t)));
}

TEST_CASE("raw family rejects N beyond the conditioning cap") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 8, 8);
  CHECK_THROWS_WITH_AS(build_raw_family(1.0, 51, q),
                       doctest::Contains("50"), std::invalid_argument);
  CHECK_THROWS_AS(build_raw_family(1.0, 0, q), std::invalid_argument);
  CHECK_THROWS_AS(orthonormalize(1.0, 51, q), std::invalid_argument);
}

TEST_CASE("first basis member matches the closed form") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 64, 8);
  const TimeBasis basis = orthonormalize(1.0, 1, q);
  // Psi_1(0) = 1 / sqrt(int_0^1 e^{2t} dt); confirm the closed-form integral
  // (e^2 - 1)/2 against the quadrature before using it.
  std::vector<double> e2t(q.size()), one(q.size(), 1.0);
  for (int i = 0; i < q.size(); ++i) e2t[i] = std::exp(2.0 * q.nodes[i]);
  const double integral = q.dot(e2t, one);
  REQUIRE(integral == doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-14));
  CHECK(basis.at_zero(0) == doctest::Approx(1.0 / std::sqrt(integral)).epsilon(1e-14));
  CHECK(basis.at_zero(0) == doctest::Approx(0.55950).epsilon(1e-4));
}

TEST_CASE("orthonormality, by-parts identities, completeness at N = 35") {
  const int N = 35;
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 312, 8);
  REQUIRE(q.size() >= 2000);
  const TimeBasis basis = orthonormalize(1.0, N, q);

  double gram_worst = 0;
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      const double g = quad_dot_row(q, basis.values, m, basis.values, n);
      gram_worst = std::max(gram_worst, std::abs(g - (m == n ? 1.0 : 0.0)));
    }
  CHECK(gram_worst <= 1e-10);

  const int last = q.size() - 1;
  double dparts = 0, sparts = 0;
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      const double lhs = basis.D(m, n) + basis.D(n, m);
      const double rhs = basis.values(m, last) * basis.values(n, last) -
                         basis.values(m, 0) * basis.values(n, 0);
      dparts = std::max(dparts, std::abs(lhs - rhs));
      const double ibp = basis.d1(n, last) * basis.values(m, last) -
                         basis.d1(n, 0) * basis.values(m, 0) -
                         quad_dot_row(q, basis.d1, n, basis.d1, m);
      sparts = std::max(sparts, std::abs(basis.S(m, n) - ibp));
    }
  CHECK(dparts <= 1e-8);
  CHECK(sparts <= 1e-8);

  // completeness proxy: each raw member reproduced by its projection
  const RawFamily fam = build_raw_family(1.0, N, q);
  double residual_worst = 0;
  for (int k = 0; k < N; ++k) {
    Eigen::RowVectorXd res = fam.values.row(k);
    for (int n = 0; n < N; ++n) {
      const double c = quad_dot_row(q, fam.values, k, basis.values, n);
      res -= c * basis.values.row(n);
    }
    Eigen::MatrixXd rmat = res;
    const double rnorm = std::sqrt(quad_dot_row(q, rmat, 0, rmat, 0));
    const double fnorm = std::sqrt(quad_dot_row(q, fam.values, k, fam.values, k));
    residual_worst = std::max(residual_worst, rnorm / fnorm);
  }
  CHECK(residual_worst <= 1e-9);
}

TEST_CASE("D_11 obeys integration by parts at N = 1") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 64, 8);
  const TimeBasis basis = orthonormalize(1.0, 1, q);
  const int last = q.size() - 1;
  const double expected =
      0.5 * (basis.values(0, last) * basis.values(0, last) -
             basis.values(0, 0) * basis.values(0, 0));
  CHECK(basis.D(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("construction is deterministic") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 64, 8);
  const TimeBasis a = orthonormalize(1.0, 12, q);
  const TimeBasis b = orthonormalize(1.0, 12, q);
  CHECK(std::memcmp(a.values.data(), b.values.data(),
                    sizeof(double) * a.values.size()) == 0);
  CHECK(std::memcmp(a.S.data(), b.S.data(), sizeof(double) * a.S.size()) == 0);
  CHECK(std::memcmp(a.D.data(), b.D.data(), sizeof(double) * a.D.size()) == 0);
  CHECK(a.at_zero == b.at_zero);
}

TEST_CASE("couplings are views of the stored fields") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 64, 8);
  const TimeBasis basis = orthonormalize(1.0, 8, q);
  const Couplings c = nonlinear_couplings(basis);
  CHECK(c.psi_at_zero.data() == basis.at_zero.data());
  CHECK(c.dpsi_at_zero.data() == basis.d1_at_zero.data());
  CHECK(c.D.data() == basis.D.data());

  // every member has a nonzero derivative at t = 0; a trigonometric-style
  // basis would lose its first mode here
  for (int n = 0; n < basis.N; ++n) CHECK(basis.d1_at_zero(n) != 0.0);
  CHECK(std::abs(basis.d1_at_zero(0)) > 0.1);

  // N = 1 reduces to the scalar triple
  const TimeBasis b1 = orthonormalize(1.0, 1, q);
  const Couplings c1 = nonlinear_couplings(b1);
  CHECK(c1.psi_at_zero.size() == 1);
  CHECK(c1.D.rows() == 1);
}

TEST_CASE("evaluate() reproduces the quadrature samples") {
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 64, 8);
  const TimeBasis basis = orthonormalize(1.0, 10, q);
  const Eigen::MatrixXd again = basis.evaluate(q.nodes);
  CHECK((again - basis.values).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd d1_again = basis.evaluate_d1(q.nodes);
  CHECK((d1_again - basis.d1).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rank collapse is reported as a conditioning error") {
  // 8 quadrature nodes cannot carry 12 independent members
  const QuadratureGrid q = QuadratureGrid::lobatto_panels(1.0, 1, 8);
  CHECK_THROWS_AS(orthonormalize(1.0, 12, q), std::runtime_error);
}
