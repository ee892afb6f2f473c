#include "tdr/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdr {

Grid2D Grid2D::make(int nx, double box_min, double box_max, double omega_min,
                    double omega_max) {
  if (nx < 5) throw std::invalid_argument("grid needs at least 5 nodes per axis");
  if (!(box_min < omega_min && omega_min < omega_max && omega_max < box_max))
    throw std::invalid_argument("Omega must sit strictly inside the box");

  Grid2D g;
  g.box_min_ = box_min;
  g.box_max_ = box_max;
  g.omega_min_ = omega_min;
  g.omega_max_ = omega_max;
  g.nx_ = nx;
  g.dx_ = (box_max - box_min) / (nx - 1);

  const double lo_f = (omega_min - box_min) / g.dx_;
  const double hi_f = (omega_max - box_min) / g.dx_;
  g.lo_ = static_cast<int>(std::lround(lo_f));
  g.hi_ = static_cast<int>(std::lround(hi_f));
  if (std::abs(lo_f - g.lo_) > 1e-9 || std::abs(hi_f - g.hi_) > 1e-9) {
    std::ostringstream os;
    os << "Omega corners do not coincide with grid nodes: nx = " << nx
       << " puts the nearest nodes at " << box_min + g.lo_ * g.dx_ << " and "
       << box_min + g.hi_ * g.dx_ << "; pick nx with (box span)/(Omega offset) "
       << "resolving to whole steps";
    throw std::invalid_argument(os.str());
  }
  if (g.hi_ - g.lo_ < 4)
    throw std::invalid_argument("Omega block too small for the interior stencils");
  // normal-derivative stencils need two nodes outside Omega as well
  if (g.lo_ < 2 || g.hi_ > nx - 3)
    throw std::invalid_argument("Omega block too close to the box walls");

  // Face-by-face boundary enumeration; corners belong to the x faces.
  for (int j = g.lo_; j <= g.hi_; ++j)
    g.bnodes_.push_back({g.lo_, j, Face::XMin});
  for (int j = g.lo_; j <= g.hi_; ++j)
    g.bnodes_.push_back({g.hi_, j, Face::XMax});
  for (int i = g.lo_ + 1; i <= g.hi_ - 1; ++i)
    g.bnodes_.push_back({i, g.lo_, Face::YMin});
  for (int i = g.lo_ + 1; i <= g.hi_ - 1; ++i)
    g.bnodes_.push_back({i, g.hi_, Face::YMax});
  return g;
}

void Grid2D::outward_normal(Face f, int& di, int& dj) {
  switch (f) {
    case Face::XMin: di = -1; dj = 0; break;
    case Face::XMax: di = 1; dj = 0; break;
    case Face::YMin: di = 0; dj = -1; break;
    case Face::YMax: di = 0; dj = 1; break;
  }
}

}  // namespace tdr
