#include "tdr/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace tdr {
namespace {

double sq(double v) { return v * v; }

// Distance from (x,y) to the segment (x1,y1)-(x2,y2).
double segment_distance(double x, double y, double x1, double y1, double x2,
                        double y2) {
  const double vx = x2 - x1, vy = y2 - y1;
  const double wx = x - x1, wy = y - y1;
  const double c1 = vx * wx + vy * wy;
  const double c2 = vx * vx + vy * vy;
  double t = c2 > 0 ? c1 / c2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(x - (x1 + t * vx), y - (y1 + t * vy));
}

bool donut_region(double x, double y) {
  const double r2 = sq(x - 0.35) + sq(y);
  return r2 > sq(0.15) && r2 < sq(0.6);
}

// Sigma drawn with four strokes: top bar, two diagonals meeting mid-left of
// center, bottom bar. Bounding box roughly (-0.45, 0.45)^2.
bool sigma_region(double x, double y) {
  const double w = 0.09;
  return segment_distance(x, y, -0.40, 0.45, 0.40, 0.45) < w ||
         segment_distance(x, y, -0.40, 0.45, 0.10, 0.00) < w ||
         segment_distance(x, y, 0.10, 0.00, -0.40, -0.45) < w ||
         segment_distance(x, y, -0.40, -0.45, 0.40, -0.45) < w;
}

// Capital omega: an annular arc opening downward plus two feet.
bool omega_region(double x, double y) {
  const double r = std::hypot(x, y - 0.05);
  const bool arc = r > 0.28 && r < 0.48 && (y - 0.05 > -0.18);
  const bool feet = std::abs(y + 0.40) < 0.08 &&
                    (std::abs(x - 0.33) < 0.15 || std::abs(x + 0.33) < 0.15);
  return arc || feet;
}

bool top_bar(double x, double y) {
  return std::abs(x) <= 0.5 && std::abs(y - 0.4) <= 0.1;
}
bool bottom_bar(double x, double y) {
  return std::abs(x) <= 0.5 && std::abs(y + 0.4) <= 0.1;
}

// Square ring: inside the outer box max{sqrt(2)|x-0.4|, |y|} <= 0.5 but
// outside the void max{|x-0.4|, |y|} < 0.12.
bool square_void_region(double x, double y) {
  const bool outside = std::max(std::sqrt(2.0) * std::abs(x - 0.4), std::abs(y)) > 0.5;
  const bool in_void = std::max(std::abs(x - 0.4), std::abs(y)) < 0.12;
  return !outside && !in_void;
}

bool disk(double x, double y, double cx, double cy, double r) {
  return sq(x - cx) + sq(y - cy) < sq(r);
}

}  // namespace

Phantom make_phantom(const std::string& name, double const_f, double const_a) {
  Phantom ph;
  ph.name = name;

  if (name == "donut") {
    ph.f = [](double x, double y) { return donut_region(x, y) ? 2.0 : 1.0; };
    ph.a = ph.f;
    ph.f_inclusions = {{"donut", 2.0, donut_region}};
    ph.a_inclusions = {{"donut", 2.0, donut_region}};
    return ph;
  }
  if (name == "sigma") {
    ph.f = [](double x, double y) { return sigma_region(x, y) ? 2.0 : 1.0; };
    ph.a = [](double x, double y) { return std::abs(y * y - x); };
    ph.f_inclusions = {{"sigma", 2.0, sigma_region}};
    return ph;
  }
  if (name == "omega_letter") {
    ph.f = [](double x, double y) { return omega_region(x, y) ? 2.0 : 1.0; };
    ph.a = [](double x, double) { return x * x; };
    ph.f_inclusions = {{"omega", 2.0, omega_region}};
    return ph;
  }
  if (name == "two_bars") {
    ph.f = [](double x, double y) {
      if (top_bar(x, y)) return 4.0;
      if (bottom_bar(x, y)) return 3.0;
      return 1.0;
    };
    ph.a = [](double x, double y) {
      const double r2 = sq(x / 0.5) + sq(y / 0.25);
      if (r2 < 1.0) return 2.0 * std::exp(r2 / (r2 - 1.0));
      return 1.0;
    };
    ph.f_inclusions = {{"top", 4.0, top_bar}, {"bottom", 3.0, bottom_bar}};
    return ph;
  }
  if (name == "smooth_square_void") {
    ph.f = [](double x, double y) { return y * y - x + 5.0; };
    ph.f_background = 0.0;  // smooth field, no background plateau
    ph.a = [](double x, double y) { return square_void_region(x, y) ? 2.0 : 0.0; };
    ph.a_inclusions = {{"square_void", 2.0, square_void_region}};
    return ph;
  }
  if (name == "three_disks") {
    ph.f = [](double x, double y) { return x - y + 7.0; };
    ph.f_background = 0.0;
    auto top_right = [](double x, double y) { return disk(x, y, 0.55, 0.55, 0.4); };
    auto top_left = [](double x, double y) { return disk(x, y, -0.55, 0.55, 0.4); };
    auto bottom_left = [](double x, double y) { return disk(x, y, -0.55, -0.55, 0.4); };
    ph.a = [=](double x, double y) {
      if (top_right(x, y)) return 2.0;
      if (top_left(x, y)) return 4.0;
      if (bottom_left(x, y)) return 3.0;
      return 1.0;
    };
    ph.a_inclusions = {{"top_right", 2.0, top_right},
                       {"top_left", 4.0, top_left},
                       {"bottom_left", 3.0, bottom_left}};
    return ph;
  }
  if (name == "constant") {
    if (const_f == 0.0)
      throw std::invalid_argument("constant phantom needs f != 0 on Omega");
    if (const_a < 0.0)
      throw std::invalid_argument("damping must be nonnegative");
    ph.f = [const_f](double, double) { return const_f; };
    ph.a = [const_a](double, double) { return const_a; };
    ph.f_background = const_f;
    return ph;
  }
  throw std::invalid_argument("unknown phantom '" + name + "'");
}

std::vector<std::string> phantom_names() {
  return {"donut",    "sigma",              "omega_letter", "two_bars",
          "smooth_square_void", "three_disks", "constant"};
}

}  // namespace tdr
