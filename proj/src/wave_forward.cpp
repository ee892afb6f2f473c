#include "tdr/wave_forward.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tdr/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tdr {

WaveField simulate(const Phantom& phantom, const Grid2D& grid, double dt,
                   int Nt) {
  if (Nt < 3) throw std::invalid_argument("need at least 3 time levels");
  const double dx = grid.dx();
  const double dt_max = dx / std::sqrt(2.0);
  if (dt > dt_max) {
    std::ostringstream os;
    os << "CFL violated: dt = " << dt << " exceeds the stable bound dx/sqrt(2) = "
       << dt_max;
    throw std::invalid_argument(os.str());
  }

  const int nx = grid.nx();
  Eigen::MatrixXd f(nx, nx), a(nx, nx);
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      f(i, j) = phantom.f(grid.x(i), grid.y(j));
      const double av = phantom.a(grid.x(i), grid.y(j));
      if (av < 0)
        throw std::invalid_argument("damping coefficient must be nonnegative");
      a(i, j) = av;
    }

  WaveField field;
  field.dt = dt;
  field.Nt = Nt;
  field.levels.reserve(Nt);
  field.levels.push_back(f);
  field.levels.push_back(f - dt * (a.array() * f.array()).matrix());
  field.max_abs = std::max(field.levels[0].cwiseAbs().maxCoeff(),
                           field.levels[1].cwiseAbs().maxCoeff());

  const double inv_dt2 = 1.0 / (dt * dt);
  const double inv_dx2 = 1.0 / (dx * dx);
  const double growth_cap = 1e6 * std::max(1.0, field.max_abs);

  for (int l = 2; l < Nt; ++l) {
    const Eigen::MatrixXd& u1 = field.levels[l - 1];  // current
    const Eigen::MatrixXd& u0 = field.levels[l - 2];  // previous
    Eigen::MatrixXd u2 = Eigen::MatrixXd::Zero(nx, nx);  // walls stay zero
    for (int j = 1; j < nx - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const double lap = (u1(i + 1, j) + u1(i - 1, j) + u1(i, j - 1) +
                            u1(i, j + 1) - 4.0 * u1(i, j)) * inv_dx2;
        const double aij = a(i, j);
        u2(i, j) = (inv_dt2 * (2.0 * u1(i, j) - u0(i, j)) +
                    (aij / dt) * u1(i, j) + lap) /
                   (inv_dt2 + aij / dt);
      }
    const double level_max = u2.cwiseAbs().maxCoeff();
    if (!std::isfinite(level_max) || level_max > growth_cap) {
      std::ostringstream os;
      os << "simulation became unstable at time level " << l + 1
         << " (|u| reached " << level_max << ")";
      throw std::runtime_error(os.str());
    }
    field.max_abs = std::max(field.max_abs, level_max);
    field.levels.push_back(std::move(u2));
  }
  return field;
}

BoundaryData extract_boundary(const WaveField& field, const Grid2D& grid) {
  const int Nt = field.Nt;
  const auto& nodes = grid.boundary_nodes();
  const int nb = static_cast<int>(nodes.size());
  const double dx = grid.dx();

  BoundaryData data;
  data.nodes = nodes;
  data.dt = field.dt;
  data.grid_nx = grid.nx();
  data.times.resize(Nt);
  for (int l = 0; l < Nt; ++l) data.times[l] = field.time(l);
  data.xs.resize(nb);
  data.ys.resize(nb);
  data.p.resize(nb, Nt);
  data.q.resize(nb, Nt);

  for (int k = 0; k < nb; ++k) {
    const auto& bn = nodes[k];
    data.xs[k] = grid.x(bn.i);
    data.ys[k] = grid.y(bn.j);
    int di, dj;
    Grid2D::outward_normal(bn.face, di, dj);
    for (int l = 0; l < Nt; ++l) {
      const Eigen::MatrixXd& u = field.levels[l];
      data.p(k, l) = u(bn.i, bn.j);
      // d_nu u ~ (3 u_b - 4 u_{b-nu} + u_{b-2nu}) / (2 dx): one-sided through
      // the two nodes just inside Omega, second order.
      data.q(k, l) = (3.0 * u(bn.i, bn.j) - 4.0 * u(bn.i - di, bn.j - dj) +
                      u(bn.i - 2 * di, bn.j - 2 * dj)) /
                     (2.0 * dx);
    }
  }
  return data;
}

namespace {

// Uniform on [-1, 1] from the top 53 bits; fixed mapping so data is
// reproducible across standard libraries.
double uniform_pm1(std::mt19937_64& gen) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

BoundaryData add_noise(const BoundaryData& data, double delta,
                       std::uint64_t seed) {
  if (delta < 0.0 || delta >= 1.0)
    throw std::invalid_argument(
        "noise level must lie in [0, 1): multiplicative noise with delta >= 1 "
        "can flip signs");
  BoundaryData noisy = data;
  noisy.noise_level = delta;
  noisy.seed = seed;
  if (delta == 0.0) return noisy;

  std::mt19937_64 gen(seed);
  const int nb = data.node_count();
  const int Nt = data.time_count();
  for (int k = 0; k < nb; ++k)
    for (int l = 0; l < Nt; ++l)
      noisy.p(k, l) = data.p(k, l) * (1.0 + delta * uniform_pm1(gen));
  for (int k = 0; k < nb; ++k)
    for (int l = 0; l < Nt; ++l)
      noisy.q(k, l) = data.q(k, l) * (1.0 + delta * uniform_pm1(gen));
  return noisy;
}

namespace {

std::string trace_csv(const BoundaryData& d, const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << "node";
  for (int k = 0; k < d.node_count(); ++k) os << ',' << k;
  os << "\nx";
  for (int k = 0; k < d.node_count(); ++k) os << ',' << format_full(d.xs[k]);
  os << "\ny";
  for (int k = 0; k < d.node_count(); ++k) os << ',' << format_full(d.ys[k]);
  os << '\n';
  for (int l = 0; l < d.time_count(); ++l) {
    os << format_full(d.times[l]);
    for (int k = 0; k < d.node_count(); ++k) os << ',' << format_full(m(k, l));
    os << '\n';
  }
  return os.str();
}

Eigen::MatrixXd parse_trace_csv(const std::string& path, int nb, int nt,
                                std::vector<double>& times) {
  // three header rows (node, x, y), then one row per time level
  auto rows = read_csv_rows(path, 3);
  if (static_cast<int>(rows.size()) != nt)
    throw std::runtime_error("unexpected row count in '" + path + "'");
  Eigen::MatrixXd m(nb, nt);
  times.resize(nt);
  for (int l = 0; l < nt; ++l) {
    if (static_cast<int>(rows[l].size()) != nb + 1)
      throw std::runtime_error("unexpected column count in '" + path + "'");
    times[l] = rows[l][0];
    for (int k = 0; k < nb; ++k) m(k, l) = rows[l][k + 1];
  }
  return m;
}

}  // namespace

void save_boundary_data(const BoundaryData& data, const std::string& dir) {
  fs::create_directories(dir);
  write_text_file(dir + "/p.csv", trace_csv(data, data.p));
  write_text_file(dir + "/q.csv", trace_csv(data, data.q));

  json meta;
  meta["delta"] = data.noise_level;
  if (data.seed) meta["seed"] = *data.seed;
  meta["dt"] = data.dt;
  meta["nt"] = data.time_count();
  meta["grid_nx"] = data.grid_nx;
  meta["nodes"] = json::array();
  for (const auto& bn : data.nodes)
    meta["nodes"].push_back({{"i", bn.i}, {"j", bn.j},
                             {"face", static_cast<int>(bn.face)}});
  write_text_file(dir + "/boundary_meta.json", meta.dump(2) + "\n");
}

BoundaryData load_boundary_data(const std::string& dir) {
  const json meta = json::parse(read_text_file(dir + "/boundary_meta.json"));
  BoundaryData data;
  data.noise_level = meta.at("delta").get<double>();
  if (meta.contains("seed")) data.seed = meta.at("seed").get<std::uint64_t>();
  data.dt = meta.at("dt").get<double>();
  data.grid_nx = meta.at("grid_nx").get<int>();
  const int nt = meta.at("nt").get<int>();
  for (const auto& jn : meta.at("nodes"))
    data.nodes.push_back({jn.at("i").get<int>(), jn.at("j").get<int>(),
                          static_cast<Face>(jn.at("face").get<int>())});
  const int nb = data.node_count();

  data.p = parse_trace_csv(dir + "/p.csv", nb, nt, data.times);
  std::vector<double> times2;
  data.q = parse_trace_csv(dir + "/q.csv", nb, nt, times2);

  // coordinate header rows
  {
    std::istringstream in(read_text_file(dir + "/p.csv"));
    std::string node_line, x_line, y_line;
    std::getline(in, node_line);
    std::getline(in, x_line);
    std::getline(in, y_line);
    auto parse_line = [&](const std::string& line, std::vector<double>& out) {
      out.clear();
      size_t pos = line.find(',');
      while (pos != std::string::npos) {
        size_t next = line.find(',', pos + 1);
        out.push_back(std::stod(line.substr(pos + 1, next - pos - 1)));
        pos = next;
      }
    };
    parse_line(x_line, data.xs);
    parse_line(y_line, data.ys);
  }
  if (static_cast<int>(data.xs.size()) != nb)
    throw std::runtime_error("boundary data header does not match node count");
  return data;
}

}  // namespace tdr
