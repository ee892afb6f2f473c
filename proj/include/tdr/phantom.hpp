#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tdr {

/// A named subregion of Omega where the true field takes a known value;
/// reconstructions are scored by their peak inside it.
struct Inclusion {
  std::string name;
  double true_value = 0.0;
  std::function<bool(double, double)> inside;
};

/// Synthetic ground truth: initial condition f and damping a, both defined on
/// the whole simulation box, plus the inclusion geometry used for scoring.
struct Phantom {
  std::string name;
  std::function<double(double, double)> f;
  std::function<double(double, double)> a;
  std::vector<Inclusion> f_inclusions;
  std::vector<Inclusion> a_inclusions;
  double f_background = 1.0;
};

/// Catalog: donut, sigma, omega_letter, two_bars, smooth_square_void,
/// three_disks, and the test helper constant (f == const_f, a == const_a).
Phantom make_phantom(const std::string& name, double const_f = 1.0,
                     double const_a = 0.5);

std::vector<std::string> phantom_names();

}  // namespace tdr
