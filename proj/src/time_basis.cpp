#include "tdr/time_basis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tdr {
namespace {

typedef long double ld;

// phi_n(t) = t^{n-1} e^t = P(t) e^t with P = t^{n-1}; the derivatives are
// (P' + P) e^t and (P'' + 2P' + P) e^t. n is 1-based.
void raw_eval(int n, ld t, ld& v, ld& dv, ld& d2v) {
  const int m = n - 1;
  const ld e = expl(t);
  auto tpow = [&](int k) -> ld {
    if (k < 0) return 0.0L;
    ld r = 1.0L;
    for (int i = 0; i < k; ++i) r *= t;
    return r;
  };
  const ld P = tpow(m);
  const ld Pp = m >= 1 ? static_cast<ld>(m) * tpow(m - 1) : 0.0L;
  const ld Ppp = m >= 2 ? static_cast<ld>(m) * (m - 1) * tpow(m - 2) : 0.0L;
  v = P * e;
  dv = (Pp + P) * e;
  d2v = (Ppp + 2.0L * Pp + P) * e;
}

void check_cap(int N, int cap) {
  if (N < 1) throw std::invalid_argument("basis cutoff N must be >= 1");
  if (N > cap) {
    std::ostringstream os;
    os << "basis cutoff N = " << N << " exceeds the conditioning cap " << cap
       << "; the raw family t^{n-1} e^t is too ill-conditioned beyond it";
    throw std::invalid_argument(os.str());
  }
}

// Orthonormal-polynomial workspace for weight e^{2t} on the quadrature grid,
// evaluated together with first and second derivatives. All arithmetic in
// long double; see the header for why.
struct Recurrence {
  int N;
  int Q;
  std::vector<ld> t, mu;                // nodes, e^{2t}-weighted measure
  std::vector<std::vector<ld>> P, P1, P2;  // pi_k and derivatives at nodes
  std::vector<ld> alpha, beta;

  Recurrence(int N_, const QuadratureGrid& quad) : N(N_), Q(quad.size()) {
    t.resize(Q);
    mu.resize(Q);
    for (int i = 0; i < Q; ++i) {
      t[i] = quad.nodes[i];
      mu[i] = static_cast<ld>(quad.weights[i]) * expl(2.0L * t[i]);
    }
    P.assign(N, std::vector<ld>(Q, 0.0L));
    P1.assign(N, std::vector<ld>(Q, 0.0L));
    P2.assign(N, std::vector<ld>(Q, 0.0L));
    alpha.assign(N, 0.0L);
    beta.assign(N + 1, 0.0L);

    ld total = 0.0L;
    for (int i = 0; i < Q; ++i) total += mu[i];
    beta[0] = sqrtl(total);
    for (int i = 0; i < Q; ++i) P[0][i] = 1.0L / beta[0];

    for (int k = 0; k + 1 < N; ++k) {
      ld a = 0.0L;
      for (int i = 0; i < Q; ++i) a += t[i] * P[k][i] * P[k][i] * mu[i];
      alpha[k] = a;
      std::vector<ld> v(Q), v1(Q), v2(Q);
      for (int i = 0; i < Q; ++i) {
        const ld tm = t[i] - a;
        v[i] = tm * P[k][i];
        v1[i] = P[k][i] + tm * P1[k][i];
        v2[i] = 2.0L * P1[k][i] + tm * P2[k][i];
        if (k > 0) {
          v[i] -= beta[k] * P[k - 1][i];
          v1[i] -= beta[k] * P1[k - 1][i];
          v2[i] -= beta[k] * P2[k - 1][i];
        }
      }
      ld norm2 = 0.0L;
      for (int i = 0; i < Q; ++i) norm2 += v[i] * v[i] * mu[i];
      const ld nb = sqrtl(norm2);
      if (!(nb > 0.0L) || !std::isfinite(static_cast<double>(nb)))
        throw std::runtime_error("orthonormalization broke down: family lost rank");
      beta[k + 1] = nb;
      for (int i = 0; i < Q; ++i) {
        P[k + 1][i] = v[i] / nb;
        P1[k + 1][i] = v1[i] / nb;
        P2[k + 1][i] = v2[i] / nb;
      }
    }
    if (N >= 2) {
      // keep alpha for the last index defined (used only by diagnostics)
      ld a = 0.0L;
      for (int i = 0; i < Q; ++i) a += t[i] * P[N - 1][i] * P[N - 1][i] * mu[i];
      alpha[N - 1] = a;
    }
  }
};

}  // namespace

RawFamily build_raw_family(double T, int N, const QuadratureGrid& quad,
                           int conditioning_cap) {
  check_cap(N, conditioning_cap);
  if (quad.size() < 2 || quad.T != T)
    throw std::invalid_argument("quadrature grid does not match the interval");
  RawFamily fam;
  fam.values.resize(N, quad.size());
  fam.d1.resize(N, quad.size());
  fam.d2.resize(N, quad.size());
  for (int n = 1; n <= N; ++n)
    for (int i = 0; i < quad.size(); ++i) {
      ld v, dv, d2v;
      raw_eval(n, quad.nodes[i], v, dv, d2v);
      fam.values(n - 1, i) = static_cast<double>(v);
      fam.d1(n - 1, i) = static_cast<double>(dv);
      fam.d2(n - 1, i) = static_cast<double>(d2v);
    }
  return fam;
}

TimeBasis orthonormalize(double T, int N, const QuadratureGrid& quad,
                         int conditioning_cap) {
  check_cap(N, conditioning_cap);
  if (quad.nodes.empty() || quad.nodes.front() != 0.0 ||
      quad.nodes.back() != T)
    throw std::invalid_argument("quadrature must span [0, T] with endpoint nodes");

  Recurrence rec(N, quad);
  const int Q = rec.Q;

  TimeBasis basis;
  basis.N = N;
  basis.quad = quad;
  basis.values.resize(N, Q);
  basis.d1.resize(N, Q);
  basis.d2.resize(N, Q);
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < Q; ++i) {
      const ld e = expl(rec.t[i]);
      basis.values(n, i) = static_cast<double>(rec.P[n][i] * e);
      basis.d1(n, i) = static_cast<double>((rec.P1[n][i] + rec.P[n][i]) * e);
      basis.d2(n, i) =
          static_cast<double>((rec.P2[n][i] + 2.0L * rec.P1[n][i] + rec.P[n][i]) * e);
    }
  basis.at_zero = basis.values.col(0);
  basis.d1_at_zero = basis.d1.col(0);
  basis.alpha = rec.alpha;
  basis.beta = rec.beta;

  basis.S.resize(N, N);
  basis.D.resize(N, N);

  // Eigen rows are not contiguous on column-major storage; copy once so the
  // quadrature dot can run over plain buffers.
  std::vector<std::vector<double>> v_rows(N), d1_rows(N), d2_rows(N);
  for (int n = 0; n < N; ++n) {
    v_rows[n].resize(Q);
    d1_rows[n].resize(Q);
    d2_rows[n].resize(Q);
    for (int i = 0; i < Q; ++i) {
      v_rows[n][i] = basis.values(n, i);
      d1_rows[n][i] = basis.d1(n, i);
      d2_rows[n][i] = basis.d2(n, i);
    }
  }
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      basis.S(m, n) = quad.dot(d2_rows[n], v_rows[m]);
      basis.D(m, n) = quad.dot(d1_rows[n], v_rows[m]);
    }

  // post-construction orthonormality check
  double worst = 0.0;
  for (int m = 0; m < N; ++m)
    for (int n = m; n < N; ++n) {
      const double g = quad.dot(v_rows[m], v_rows[n]) - (m == n ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  if (worst > 1e-8) {
    std::ostringstream os;
    os << "orthonormality residual " << worst
       << " exceeds 1e-8; reduce N (currently " << N
       << ") or refine the quadrature";
    throw std::runtime_error(os.str());
  }
  return basis;
}

Eigen::MatrixXd TimeBasis::evaluate(const std::vector<double>& times) const {
  const int K = static_cast<int>(times.size());
  Eigen::MatrixXd out(N, K);
  for (int c = 0; c < K; ++c) {
    const ld t = times[c];
    const ld e = expl(t);
    ld pm1 = 0.0L, pk = 1.0L / beta[0];
    out(0, c) = static_cast<double>(pk * e);
    for (int k = 0; k + 1 < N; ++k) {
      ld pn = (t - alpha[k]) * pk - (k > 0 ? beta[k] * pm1 : 0.0L);
      pn /= beta[k + 1];
      pm1 = pk;
      pk = pn;
      out(k + 1, c) = static_cast<double>(pk * e);
    }
  }
  return out;
}

Eigen::MatrixXd TimeBasis::evaluate_d1(const std::vector<double>& times) const {
  const int K = static_cast<int>(times.size());
  Eigen::MatrixXd out(N, K);
  for (int c = 0; c < K; ++c) {
    const ld t = times[c];
    const ld e = expl(t);
    ld pm1 = 0.0L, pk = 1.0L / beta[0];
    ld qm1 = 0.0L, qk = 0.0L;  // derivatives of pi
    out(0, c) = static_cast<double>((qk + pk) * e);
    for (int k = 0; k + 1 < N; ++k) {
      ld pn = (t - alpha[k]) * pk - (k > 0 ? beta[k] * pm1 : 0.0L);
      ld qn = pk + (t - alpha[k]) * qk - (k > 0 ? beta[k] * qm1 : 0.0L);
      pn /= beta[k + 1];
      qn /= beta[k + 1];
      pm1 = pk;
      pk = pn;
      qm1 = qk;
      qk = qn;
      out(k + 1, c) = static_cast<double>((qk + pk) * e);
    }
  }
  return out;
}

Couplings nonlinear_couplings(const TimeBasis& basis) {
  return Couplings{basis.at_zero, basis.d1_at_zero, basis.D};
}

}  // namespace tdr
