#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdr/grid.hpp"
#include "tdr/phantom.hpp"

namespace tdr {

/// Full space-time field of one forward simulation.
struct WaveField {
  std::vector<Eigen::MatrixXd> levels;  ///< one nx-by-nx matrix per time step
  double dt = 0.0;
  int Nt = 0;
  double max_abs = 0.0;  ///< sup |u| over the run

  double time(int l) const { return l * dt; }
};

/// Lateral Cauchy traces on the Omega boundary nodes.
struct BoundaryData {
  std::vector<BoundaryNode> nodes;  ///< same order as Grid2D::boundary_nodes
  std::vector<double> xs, ys;       ///< node coordinates
  std::vector<double> times;
  Eigen::MatrixXd p;  ///< Dirichlet trace, nodes x times
  Eigen::MatrixXd q;  ///< outward normal derivative, nodes x times
  double noise_level = 0.0;
  std::optional<std::uint64_t> seed;
  double dt = 0.0;
  int grid_nx = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int time_count() const { return static_cast<int>(times.size()); }
};

/// Explicit second-order-in-space scheme for u_tt + a u_t = Lap u on the box,
/// with homogeneous Dirichlet walls. Levels 1 and 2 are set from the initial
/// conditions u = f, u_t = -a f. Throws on CFL violation (message carries the
/// largest stable dt) and on non-finite growth (message names the first bad
/// level).
WaveField simulate(const Phantom& phantom, const Grid2D& grid, double dt,
                   int Nt);

/// Noiseless traces p*, q* on the Omega boundary. The normal derivative uses
/// the second-order one-sided stencil through the two nodes just inside
/// Omega, matching the discretization the inversion enforces.
BoundaryData extract_boundary(const WaveField& field, const Grid2D& grid);

/// Multiplicative noise p -> p (1 + delta r), r uniform on [-1,1], drawn per
/// sample. Draw order: all of p (node-major, time-minor), then all of q.
/// The generator mapping is fixed (mt19937_64, 53-bit mantissa) so equal
/// seeds give byte-equal data everywhere. Requires 0 <= delta < 1.
BoundaryData add_noise(const BoundaryData& data, double delta,
                       std::uint64_t seed);

/// CSV + JSON sidecar serialization (see README for the exact layout).
void save_boundary_data(const BoundaryData& data, const std::string& dir);
BoundaryData load_boundary_data(const std::string& dir);

}  // namespace tdr
