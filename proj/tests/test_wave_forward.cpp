#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "tdr/grid.hpp"
#include "tdr/phantom.hpp"
#include "tdr/wave_forward.hpp"

using namespace tdr;

namespace {

Phantom uniform_phantom(double f, double a) {
  Phantom ph;
  ph.name = "uniform";
  ph.f = [f](double, double) { return f; };
  ph.a = [a](double, double) { return a; };
  return ph;
}

}  // namespace

TEST_CASE("grid construction and masks") {
  const Grid2D g = Grid2D::make(79);
  CHECK(g.dx() == doctest::Approx(6.0 / 78));
  CHECK(g.omega_side() == 27);
  CHECK(g.x(g.omega_lo()) == doctest::Approx(-1.0));
  CHECK(g.x(g.omega_hi()) == doctest::Approx(1.0));
  CHECK(g.boundary_node_count() == 4 * 27 - 4);
  CHECK(g.interior_node_count() == 25 * 25);
  // paper-scale block: 241 nodes, Omega spans indices 80..160
  const Grid2D p = Grid2D::make(241);
  CHECK(p.dx() == doctest::Approx(0.025));
  CHECK(p.omega_lo() == 80);
  CHECK(p.omega_hi() == 160);
  CHECK(p.omega_side() == 81);
  // misaligned corner is rejected
  CHECK_THROWS_AS(Grid2D::make(80), std::invalid_argument);
}

TEST_CASE("zero initial data stays zero") {
  const Grid2D g = Grid2D::make(37);
  const WaveField field = simulate(uniform_phantom(0.0, 1.0), g, 0.01, 50);
  for (const auto& level : field.levels)
    CHECK(level.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant field with no damping is exact inside the light cone") {
  const Grid2D g = Grid2D::make(79);
  const int Nt = 30;  // wall influence travels one node per step
  const WaveField field = simulate(uniform_phantom(3.0, 0.0), g, 0.005, Nt);
  const int c = 39;  // center node, L1 distance 39 from the walls
  for (int l = 0; l < Nt; ++l)
    CHECK(field.levels[l](c, c) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("uniform damping follows the scalar decay law on the data window") {
  // u'' + a0 u' = 0, u(0) = c, u'(0) = -a0 c has solution c e^{-a0 t};
  // boundary traces must match before wall reflections reach Omega (t < 2)
  const Grid2D g = Grid2D::make(79);
  const double a0 = 0.5, c = 2.0;
  const WaveField field = simulate(uniform_phantom(c, a0), g, 0.005, 201);
  const BoundaryData data = extract_boundary(field, g);
  double worst = 0;
  for (int k = 0; k < data.node_count(); ++k)
    for (int l = 0; l < data.time_count(); ++l) {
      const double exact = c * std::exp(-a0 * data.times[l]);
      worst = std::max(worst, std::abs(data.p(k, l) - exact) / exact);
    }
  CHECK(worst <= 0.02);
  CHECK(data.q.cwiseAbs().maxCoeff() < 1e-10);  // spatially uniform field
  CHECK(field.max_abs == doctest::Approx(c));
}

TEST_CASE("CFL violation is rejected with the stable bound") {
  const Grid2D g = Grid2D::make(79);
  const double dt_max = g.dx() / std::sqrt(2.0);
  try {
    simulate(uniform_phantom(1.0, 0.0), g, 2.0 * dt_max, 10);
    FAIL("expected CFL rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("CFL") != std::string::npos);
    // the message names the largest stable step
    CHECK(std::string(e.what()).find("0.05") != std::string::npos);
  }
  CHECK_THROWS_AS(simulate(uniform_phantom(1.0, -0.5), g, 0.005, 10),
                  std::invalid_argument);
}

TEST_CASE("boundary extraction on crafted fields") {
  const Grid2D g = Grid2D::make(37);
  WaveField field;
  field.dt = 0.01;
  field.Nt = 2;

  SUBCASE("constant field: p = c, q = 0") {
    field.levels.assign(2, Eigen::MatrixXd::Constant(g.nx(), g.nx(), 5.0));
    const BoundaryData data = extract_boundary(field, g);
    CHECK((data.p.array() - 5.0).abs().maxCoeff() == 0.0);
    CHECK(data.q.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }

  SUBCASE("linear field u = x: q = +-1 on the x faces, 0 on the y faces") {
    Eigen::MatrixXd level(g.nx(), g.nx());
    for (int j = 0; j < g.nx(); ++j)
      for (int i = 0; i < g.nx(); ++i) level(i, j) = g.x(i);
    field.levels.assign(2, level);
    const BoundaryData data = extract_boundary(field, g);
    for (int k = 0; k < data.node_count(); ++k) {
      const Face f = data.nodes[k].face;
      const double expected = f == Face::XMin ? -1.0 : f == Face::XMax ? 1.0 : 0.0;
      CHECK(data.q(k, 0) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(data.p(k, 0) == doctest::Approx(g.x(data.nodes[k].i)));
    }
  }
}

TEST_CASE("noise model") {
  const Grid2D g = Grid2D::make(37);
  const WaveField field = simulate(uniform_phantom(1.0, 0.3), g, 0.01, 60);
  const BoundaryData clean = extract_boundary(field, g);

  SUBCASE("delta = 0 returns bit-equal data") {
    const BoundaryData same = add_noise(clean, 0.0, 42);
    CHECK(same.p == clean.p);
    CHECK(same.q == clean.q);
    CHECK(same.noise_level == 0.0);
  }

  SUBCASE("entrywise bound |p^d - p| <= delta |p|") {
    const double delta = 0.10;
    const BoundaryData noisy = add_noise(clean, delta, 7);
    CHECK(((noisy.p - clean.p).cwiseAbs().array() <=
           delta * clean.p.cwiseAbs().array() + 1e-15)
              .all());
    CHECK(((noisy.q - clean.q).cwiseAbs().array() <=
           delta * clean.q.cwiseAbs().array() + 1e-15)
              .all());
  }

  SUBCASE("fixed seed reproduces, fresh seed differs") {
    const BoundaryData n1 = add_noise(clean, 0.1, 9);
    const BoundaryData n2 = add_noise(clean, 0.1, 9);
    const BoundaryData n3 = add_noise(clean, 0.1, 10);
    CHECK(n1.p == n2.p);
    CHECK(n1.q == n2.q);
    CHECK(n1.p != n3.p);
  }

  SUBCASE("delta >= 1 is rejected") {
    CHECK_THROWS_AS(add_noise(clean, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(add_noise(clean, -0.1, 1), std::invalid_argument);
  }
}

TEST_CASE("boundary data round-trips through the CSV layout") {
  const Grid2D g = Grid2D::make(37);
  const WaveField field = simulate(uniform_phantom(1.5, 0.4), g, 0.01, 40);
  BoundaryData data = add_noise(extract_boundary(field, g), 0.05, 11);

  const std::string dir = std::filesystem::temp_directory_path() /
                          "tdr_test_boundary_roundtrip";
  save_boundary_data(data, dir);
  const BoundaryData back = load_boundary_data(dir);
  CHECK(back.p == data.p);  // 17 significant digits round-trip exactly
  CHECK(back.q == data.q);
  CHECK(back.noise_level == data.noise_level);
  REQUIRE(back.seed.has_value());
  CHECK(*back.seed == 11);
  CHECK(back.dt == data.dt);
  CHECK(back.grid_nx == data.grid_nx);
  CHECK(back.nodes.size() == data.nodes.size());
  CHECK(back.xs == data.xs);
  std::filesystem::remove_all(dir);
}

TEST_CASE("halving the grid shrinks the boundary-trace error by >= 3x") {
  // smooth phantom, no damping; traces compared against the finest grid at
  // shared nodes and times
  Phantom ph;
  ph.name = "smooth";
  ph.f = [](double x, double y) { return y * y - x + 5.0; };
  ph.a = [](double, double) { return 0.0; };

  const Grid2D g1 = Grid2D::make(79);
  const Grid2D g2 = Grid2D::make(157);
  const Grid2D g3 = Grid2D::make(313);
  const BoundaryData d1 = extract_boundary(simulate(ph, g1, 0.005, 201), g1);
  const BoundaryData d2 = extract_boundary(simulate(ph, g2, 0.0025, 401), g2);
  const BoundaryData d3 = extract_boundary(simulate(ph, g3, 0.00125, 801), g3);

  auto err_against_fine = [&](const BoundaryData& coarse, int tstride,
                              const BoundaryData& fine) {
    double worst = 0;
    for (int k = 0; k < coarse.node_count(); ++k) {
      int match = -1;
      for (int kk = 0; kk < fine.node_count(); ++kk)
        if (std::abs(fine.xs[kk] - coarse.xs[k]) < 1e-12 &&
            std::abs(fine.ys[kk] - coarse.ys[k]) < 1e-12 &&
            fine.nodes[kk].face == coarse.nodes[k].face) {
          match = kk;
          break;
        }
      REQUIRE(match >= 0);
      for (int l = 0; l < coarse.time_count(); ++l)
        worst = std::max(worst,
                         std::abs(coarse.p(k, l) - fine.p(match, l * tstride)));
    }
    return worst;
  };
  const double e1 = err_against_fine(d1, 4, d3);
  const double e2 = err_against_fine(d2, 2, d3);
  CHECK(e1 / e2 >= 3.0);
}
