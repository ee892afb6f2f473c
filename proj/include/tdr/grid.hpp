#pragma once

#include <vector>

namespace tdr {

/// Outward face a boundary node belongs to. Corner nodes are assigned to the
/// x faces, so every boundary node carries exactly one normal direction.
enum class Face { XMin, XMax, YMin, YMax };

struct BoundaryNode {
  int i = 0;  ///< grid index along x (over the full box)
  int j = 0;  ///< grid index along y
  Face face = Face::XMin;
};

/// Uniform grid over the simulation box G with an embedded computational
/// square Omega whose corners coincide with grid nodes.
///
/// Omega nodes are enumerated row-major (j outer, i inner); boundary nodes are
/// enumerated face by face: XMin top-to-bottom in j, then XMax, then YMin and
/// YMax without the corners. This ordering is part of the on-disk data layout
/// and of the noise draw order, so it must not change.
class Grid2D {
 public:
  static Grid2D make(int nx, double box_min = -3.0, double box_max = 3.0,
                     double omega_min = -1.0, double omega_max = 1.0);

  double box_min() const { return box_min_; }
  double box_max() const { return box_max_; }
  double omega_min() const { return omega_min_; }
  double omega_max() const { return omega_max_; }
  int nx() const { return nx_; }
  double dx() const { return dx_; }

  double x(int i) const { return box_min_ + i * dx_; }
  double y(int j) const { return box_min_ + j * dx_; }

  /// Inclusive index range of the Omega block along each axis.
  int omega_lo() const { return lo_; }
  int omega_hi() const { return hi_; }
  /// Nodes per side of the Omega block.
  int omega_side() const { return hi_ - lo_ + 1; }
  /// Total nodes in the closed Omega block.
  int omega_node_count() const { return omega_side() * omega_side(); }
  /// Interior nodes (Omega block minus its boundary ring).
  int interior_node_count() const {
    int s = omega_side() - 2;
    return s * s;
  }

  bool in_omega_block(int i, int j) const {
    return i >= lo_ && i <= hi_ && j >= lo_ && j <= hi_;
  }
  bool is_omega_boundary(int i, int j) const {
    return in_omega_block(i, j) &&
           (i == lo_ || i == hi_ || j == lo_ || j == hi_);
  }
  bool is_omega_interior(int i, int j) const {
    return in_omega_block(i, j) && !is_omega_boundary(i, j);
  }

  /// Index of (i,j) in the row-major enumeration of Omega-block nodes.
  int omega_index(int i, int j) const {
    return (j - lo_) * omega_side() + (i - lo_);
  }

  const std::vector<BoundaryNode>& boundary_nodes() const { return bnodes_; }
  int boundary_node_count() const { return static_cast<int>(bnodes_.size()); }

  /// Unit outward normal of a boundary node as integer steps (nx_i, nx_j).
  static void outward_normal(Face f, int& di, int& dj);

 private:
  double box_min_ = 0, box_max_ = 0, omega_min_ = 0, omega_max_ = 0;
  int nx_ = 0;
  double dx_ = 0;
  int lo_ = 0, hi_ = 0;
  std::vector<BoundaryNode> bnodes_;
};

}  // namespace tdr
