#pragma once

#include <vector>

namespace tdr {

/// Quadrature rule on [0, T]. Nodes are strictly increasing, include both
/// endpoints, and the weights are positive and sum to T.
struct QuadratureGrid {
  double T = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }

  /// Composite Gauss-Lobatto panels. Shared panel-joint nodes are merged so
  /// the node sequence stays strictly increasing while endpoint nodes keep
  /// positive weight.
  static QuadratureGrid lobatto_panels(double T, int panels = 64,
                                       int points_per_panel = 8);

  /// Weighted inner product of two sample vectors. Accumulates in extended
  /// precision; the integrands here reach magnitudes ~1e6 and plain double
  /// accumulation costs two digits.
  double dot(const std::vector<double>& a, const std::vector<double>& b) const;
  double dot(const double* a, const double* b) const;
};

/// Trapezoid weights for an arbitrary strictly increasing sample grid.
std::vector<double> trapezoid_weights(const std::vector<double>& times);

}  // namespace tdr
