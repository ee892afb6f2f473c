#include "tdr/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace tdr {
namespace {

// Gauss-Lobatto nodes/weights on [-1,1]: endpoints plus the roots of P'_{p-1},
// found by Newton from Chebyshev-Lobatto starting points.
void lobatto_reference(int p, std::vector<double>& x, std::vector<double>& w) {
  if (p < 2) throw std::invalid_argument("lobatto rule needs >= 2 points");
  x.assign(p, 0.0);
  w.assign(p, 0.0);
  const int n = p - 1;
  for (int i = 0; i < p; ++i) {
    double xi = -std::cos(M_PI * i / n);
    if (i == 0) {
      xi = -1.0;
    } else if (i == n) {
      xi = 1.0;
    } else {
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        // P''_n from the Legendre ODE
        double d2p = (2 * xi * dp - n * (n + 1) * p1) / (1.0 - xi * xi);
        double step = dp / d2p;
        xi -= step;
        if (std::abs(step) < 1e-15) break;
      }
    }
    x[i] = xi;
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    w[i] = 2.0 / (n * (n + 1) * p1 * p1);
  }
}

}  // namespace

QuadratureGrid QuadratureGrid::lobatto_panels(double T, int panels,
                                              int points_per_panel) {
  if (T <= 0) throw std::invalid_argument("final time must be positive");
  if (panels < 1) throw std::invalid_argument("need at least one panel");
  std::vector<double> xr, wr;
  lobatto_reference(points_per_panel, xr, wr);

  QuadratureGrid q;
  q.T = T;
  const double h = T / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < points_per_panel; ++i) {
      const double t = a + 0.5 * h * (xr[i] + 1.0);
      const double w = 0.5 * h * wr[i];
      if (i == 0 && p > 0) {
        q.weights.back() += w;  // joint node shared with the previous panel
      } else {
        q.nodes.push_back(i == 0 ? a : (i == points_per_panel - 1 ? a + h : t));
        q.weights.push_back(w);
      }
    }
  }
  q.nodes.front() = 0.0;
  q.nodes.back() = T;
  return q;
}

double QuadratureGrid::dot(const std::vector<double>& a,
                           const std::vector<double>& b) const {
  return dot(a.data(), b.data());
}

double QuadratureGrid::dot(const double* a, const double* b) const {
  long double s = 0.0L;
  const int n = size();
  for (int i = 0; i < n; ++i)
    s += static_cast<long double>(a[i]) * b[i] * weights[i];
  return static_cast<double>(s);
}

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
  const int n = static_cast<int>(times.size());
  if (n < 2) throw std::invalid_argument("trapezoid rule needs >= 2 samples");
  std::vector<double> w(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double h = times[i + 1] - times[i];
    if (h <= 0) throw std::invalid_argument("sample times must increase");
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace tdr
