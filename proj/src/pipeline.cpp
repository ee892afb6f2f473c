#include "tdr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tdr/csv.hpp"
#include "tdr/wave_forward.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tdr {

const char* version_string() { return "tdr 0.1.0"; }

namespace {

json carleman_to_json(const CarlemanConfig& c) {
  return json{{"x0", {c.x0_x, c.x0_y}}, {"beta", c.beta},   {"lambda", c.lam},
              {"b", c.b},               {"eps", c.eps},     {"kappa0", c.kappa0},
              {"max_iters", c.max_iters}, {"clamp_m", c.clamp_M},
              {"reg_eta", c.reg_eta}};
}

CarlemanConfig carleman_from_json(const json& j) {
  CarlemanConfig c;
  if (j.contains("x0")) {
    c.x0_x = j["x0"][0].get<double>();
    c.x0_y = j["x0"][1].get<double>();
  }
  if (j.contains("beta")) c.beta = j["beta"].get<double>();
  if (j.contains("lambda")) c.lam = j["lambda"].get<double>();
  if (j.contains("b")) c.b = j["b"].get<double>();
  if (j.contains("eps")) c.eps = j["eps"].get<double>();
  if (j.contains("kappa0")) c.kappa0 = j["kappa0"].get<double>();
  if (j.contains("max_iters")) c.max_iters = j["max_iters"].get<int>();
  if (j.contains("clamp_m")) c.clamp_M = j["clamp_m"].get<double>();
  if (j.contains("reg_eta")) c.reg_eta = j["reg_eta"].get<double>();
  return c;
}

}  // namespace

std::string to_json(const RunConfig& c) {
  json j;
  j["phantom"] = c.phantom;
  j["const_f"] = c.const_f;
  j["const_a"] = c.const_a;
  j["data_dir"] = c.data_dir;
  j["out_dir"] = c.out_dir;
  j["paper_scale"] = c.paper_scale;
  j["nx"] = c.nx;
  j["nt"] = c.Nt;
  j["t_final"] = c.T;
  j["delta"] = c.delta;
  j["seed"] = c.seed;
  j["cutoff_n"] = c.cutoff_N;
  j["cutoff_auto"] = c.cutoff_auto;
  j["cutoff_tol"] = c.cutoff_tol;
  j["carleman"] = carleman_to_json(c.carleman);
  j["u0_zero"] = c.u0_zero;
  j["reconstruct_a"] = c.reconstruct_damping;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunConfig c;
  if (j.contains("phantom")) c.phantom = j["phantom"].get<std::string>();
  if (j.contains("const_f")) c.const_f = j["const_f"].get<double>();
  if (j.contains("const_a")) c.const_a = j["const_a"].get<double>();
  if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("paper_scale")) c.paper_scale = j["paper_scale"].get<bool>();
  if (j.contains("nx")) c.nx = j["nx"].get<int>();
  if (j.contains("nt")) c.Nt = j["nt"].get<int>();
  if (j.contains("t_final")) c.T = j["t_final"].get<double>();
  if (j.contains("delta")) c.delta = j["delta"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("cutoff_n")) c.cutoff_N = j["cutoff_n"].get<int>();
  if (j.contains("cutoff_auto")) c.cutoff_auto = j["cutoff_auto"].get<bool>();
  if (j.contains("cutoff_tol")) c.cutoff_tol = j["cutoff_tol"].get<double>();
  if (j.contains("carleman")) c.carleman = carleman_from_json(j["carleman"]);
  if (j.contains("u0_zero")) c.u0_zero = j["u0_zero"].get<bool>();
  if (j.contains("reconstruct_a"))
    c.reconstruct_damping = j["reconstruct_a"].get<bool>();
  return c;
}

std::string config_hash(const RunConfig& config) {
  // FNV-1a 64 over the canonical JSON form
  const std::string text = to_json(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

ErrorTable metrics(const Eigen::VectorXd& computed, const Eigen::VectorXd& truth,
                   const Grid2D& grid, const std::vector<Inclusion>& inclusions) {
  if (computed.size() != truth.size() ||
      computed.size() != grid.omega_node_count())
    throw std::invalid_argument("metrics: field sizes do not match the grid");

  ErrorTable table;
  const double denom = truth.norm();
  table.rel_l2 = denom > 0 ? (computed - truth).norm() / denom
                           : (computed - truth).norm();
  table.sup = (computed - truth).cwiseAbs().maxCoeff();

  for (const auto& inc : inclusions) {
    InclusionScore score;
    score.name = inc.name;
    score.true_value = inc.true_value;
    double best = -std::numeric_limits<double>::infinity();
    for (int j = grid.omega_lo(); j <= grid.omega_hi(); ++j)
      for (int i = grid.omega_lo(); i <= grid.omega_hi(); ++i)
        if (inc.inside(grid.x(i), grid.y(j)))
          best = std::max(best, computed(grid.omega_index(i, j)));
    score.computed_max = best;
    score.rel_error = inc.true_value != 0
                          ? std::abs(best - inc.true_value) / std::abs(inc.true_value)
                          : std::abs(best);
    table.inclusions.push_back(std::move(score));
  }
  return table;
}

double localization_score(const Eigen::VectorXd& field, double background,
                          const std::vector<bool>& mask, const Grid2D& grid,
                          int dilate_px) {
  const int side = grid.omega_side();
  const int n = grid.omega_node_count();
  if (static_cast<int>(mask.size()) != n || field.size() != n)
    throw std::invalid_argument("localization: sizes do not match the grid");

  std::vector<bool> dilated(n, false);
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i) {
      bool hit = false;
      for (int dj = -dilate_px; dj <= dilate_px && !hit; ++dj)
        for (int di = -dilate_px; di <= dilate_px && !hit; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < side && jj >= 0 && jj < side &&
              mask[jj * side + ii])
            hit = true;
        }
      dilated[j * side + i] = hit;
    }

  std::vector<double> excess(n);
  for (int k = 0; k < n; ++k) excess[k] = field(k) - background;
  std::vector<double> sorted = excess;
  std::nth_element(sorted.begin(), sorted.begin() + (3 * n) / 4, sorted.end());
  const double threshold = sorted[(3 * n) / 4];

  int total = 0, inside = 0;
  for (int k = 0; k < n; ++k)
    if (excess[k] >= threshold) {
      ++total;
      if (dilated[k]) ++inside;
    }
  return total > 0 ? static_cast<double>(inside) / total : 0.0;
}

std::string RunReport::to_json() const {
  json j;
  j["phantom"] = phantom;
  j["config"] = json::parse(config_json);
  j["config_hash"] = hash;
  j["n"] = N;
  j["nx"] = nx;
  j["converged"] = converged;
  j["iterations"] = iterations;
  j["final_rel_diff"] = final_rel_diff;
  auto table_json = [](const ErrorTable& t) {
    json tj;
    tj["rel_l2"] = t.rel_l2;
    tj["sup"] = t.sup;
    tj["inclusions"] = json::array();
    for (const auto& inc : t.inclusions)
      tj["inclusions"].push_back({{"name", inc.name},
                                  {"true_value", inc.true_value},
                                  {"computed_max", inc.computed_max},
                                  {"rel_error", inc.rel_error}});
    return tj;
  };
  j["f_errors"] = table_json(f_errors);
  if (a_errors) j["a_errors"] = table_json(*a_errors);
  j["seconds_total"] = seconds_total;
  j["stage_seconds"] = stage_seconds;
  j["version"] = version;
  return j.dump(2);
}

RunReport RunReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunReport r;
  r.phantom = j.at("phantom").get<std::string>();
  r.config_json = j.at("config").dump(2);
  r.hash = j.at("config_hash").get<std::string>();
  r.N = j.at("n").get<int>();
  r.nx = j.at("nx").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.final_rel_diff = j.at("final_rel_diff").get<double>();
  auto table_from = [](const json& tj) {
    ErrorTable t;
    t.rel_l2 = tj.at("rel_l2").get<double>();
    t.sup = tj.at("sup").get<double>();
    for (const auto& ij : tj.at("inclusions"))
      t.inclusions.push_back({ij.at("name").get<std::string>(),
                              ij.at("true_value").get<double>(),
                              ij.at("computed_max").get<double>(),
                              ij.at("rel_error").get<double>()});
    return t;
  };
  r.f_errors = table_from(j.at("f_errors"));
  if (j.contains("a_errors")) r.a_errors = table_from(j.at("a_errors"));
  r.seconds_total = j.at("seconds_total").get<double>();
  if (j.contains("stage_seconds"))
    r.stage_seconds = j.at("stage_seconds").get<std::map<std::string, double>>();
  r.version = j.at("version").get<std::string>();
  return r;
}

double RunReport::value(const std::string& key) const {
  if (key == "f_rel_l2") return f_errors.rel_l2;
  if (key == "f_sup") return f_errors.sup;
  if (key == "a_rel_l2") return a_errors ? a_errors->rel_l2 : std::nan("");
  if (key == "iterations") return iterations;
  if (key == "final_rel_diff") return final_rel_diff;
  if (key == "seconds_total") return seconds_total;
  if (key == "n") return N;
  if (key == "nx") return nx;
  if (key == "converged") return converged ? 1.0 : 0.0;
  return std::nan("");
}

namespace {

struct StageTimer {
  std::map<std::string, double>& sink;
  std::string current;
  std::chrono::steady_clock::time_point t0;

  explicit StageTimer(std::map<std::string, double>& s) : sink(s) {}
  void begin(const std::string& name) {
    current = name;
    t0 = std::chrono::steady_clock::now();
  }
  void end() {
    sink[current] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  }
};

void validate(const RunConfig& config, const Grid2D& grid) {
  const double dt = config.T / (config.Nt - 1);
  if (dt > grid.dx() / std::sqrt(2.0)) {
    std::ostringstream os;
    os << "config fails CFL: dt = " << dt << " > dx/sqrt(2) = "
       << grid.dx() / std::sqrt(2.0) << "; raise nt or lower nx";
    throw std::invalid_argument(os.str());
  }
  const auto& cc = config.carleman;
  if (cc.x0_x >= grid.omega_min() && cc.x0_x <= grid.omega_max() &&
      cc.x0_y >= grid.omega_min() && cc.x0_y <= grid.omega_max())
    throw std::invalid_argument("weight center x0 must lie outside closure(Omega)");
  if (config.effective_N() > kBasisConditioningCap) {
    std::ostringstream os;
    os << "cutoff N = " << config.effective_N() << " exceeds the cap "
       << kBasisConditioningCap;
    throw std::invalid_argument(os.str());
  }
  if (config.delta < 0 || config.delta >= 1)
    throw std::invalid_argument("noise level must lie in [0, 1)");
}

struct ManifestEntry {
  std::string name;
  std::string schema;
};

void write_manifest(const std::string& dir, const RunConfig& config,
                    const std::vector<ManifestEntry>& files, bool complete,
                    const std::string& error) {
  json j;
  j["config_hash"] = config_hash(config);
  j["version"] = version_string();
  j["complete"] = complete;
  if (!error.empty()) j["error"] = error;
  j["files"] = json::array();
  for (const auto& f : files)
    j["files"].push_back({{"name", f.name}, {"schema", f.schema}});
  write_text_file(dir + "/MANIFEST.json", j.dump(2) + "\n");
}

Eigen::VectorXd sample_on_omega(const Grid2D& grid,
                                const std::function<double(double, double)>& fn) {
  Eigen::VectorXd out(grid.omega_node_count());
  for (int j = grid.omega_lo(); j <= grid.omega_hi(); ++j)
    for (int i = grid.omega_lo(); i <= grid.omega_hi(); ++i)
      out(grid.omega_index(i, j)) = fn(grid.x(i), grid.y(j));
  return out;
}

}  // namespace

void simulate_to_dir(const RunConfig& config) {
  const Grid2D grid = Grid2D::make(config.effective_nx());
  validate(config, grid);
  if (config.phantom.empty())
    throw std::invalid_argument("simulate needs a phantom name");
  const Phantom phantom =
      make_phantom(config.phantom, config.const_f, config.const_a);
  const double dt = config.T / (config.Nt - 1);
  const WaveField field = simulate(phantom, grid, dt, config.Nt);
  BoundaryData data = extract_boundary(field, grid);
  if (config.delta > 0) data = add_noise(data, config.delta, config.seed);
  fs::create_directories(config.out_dir);
  save_boundary_data(data, config.out_dir);
}

RunReport run(const RunConfig& config) {
  const auto run_start = std::chrono::steady_clock::now();
  fs::create_directories(config.out_dir);

  RunReport report;
  report.version = version_string();
  report.config_json = to_json(config);
  report.hash = config_hash(config);
  report.phantom = config.phantom;

  std::vector<ManifestEntry> files;
  StageTimer timer(report.stage_seconds);
  std::string stage = "setup";

  try {
    // ---- data ----
    stage = "simulate";
    timer.begin(stage);
    BoundaryData data;
    Grid2D grid = Grid2D::make(config.effective_nx());
    validate(config, grid);
    if (config.data_dir.empty()) {
      const Phantom phantom =
          make_phantom(config.phantom, config.const_f, config.const_a);
      const double dt = config.T / (config.Nt - 1);
      const WaveField field = simulate(phantom, grid, dt, config.Nt);
      data = extract_boundary(field, grid);
      if (config.delta > 0) data = add_noise(data, config.delta, config.seed);
      save_boundary_data(data, config.out_dir + "/boundary");
      files.push_back({"boundary/p.csv", "trace: 3 header rows (node,x,y), then time,value..."});
      files.push_back({"boundary/q.csv", "trace: 3 header rows (node,x,y), then time,value..."});
      files.push_back({"boundary/boundary_meta.json", "delta, seed, dt, grid"});
    } else {
      data = load_boundary_data(config.data_dir);
      if (data.grid_nx != grid.nx()) {
        if (config.nx > 0 || config.paper_scale)
          throw std::invalid_argument(
              "ingested data was produced on a different grid than configured");
        grid = Grid2D::make(data.grid_nx);
        validate(config, grid);
      }
    }
    timer.end();

    // ---- basis + cutoff ----
    stage = "basis";
    timer.begin(stage);
    int N = config.effective_N();
    const QuadratureGrid quad =
        QuadratureGrid::lobatto_panels(config.T, config.quad_panels());
    if (config.cutoff_auto) {
      const CutoffResult cut =
          choose_cutoff(data, config.T, config.cutoff_tol,
                        kBasisConditioningCap, &quad);
      N = cut.N;
      std::vector<std::vector<double>> rows;
      for (size_t k = 0; k < cut.residuals.size(); ++k)
        rows.push_back({static_cast<double>(k + 1), cut.residuals[k]});
      write_csv(config.out_dir + "/cutoff_curve.csv", "n,residual", rows);
      files.push_back({"cutoff_curve.csv", "n,residual"});
    }
    const TimeBasis basis = orthonormalize(config.T, N, quad);
    report.N = N;
    report.nx = grid.nx();
    timer.end();

    // ---- projection ----
    stage = "project";
    timer.begin(stage);
    const CoefficientBoundary cb = project_boundary(data, basis);
    {
      std::vector<std::vector<double>> rows;
      for (int k = 0; k < cb.dirichlet.rows(); ++k)
        for (int m = 0; m < cb.dirichlet.cols(); ++m)
          rows.push_back({static_cast<double>(k), static_cast<double>(m + 1),
                          cb.dirichlet(k, m), cb.neumann(k, m)});
      write_csv(config.out_dir + "/coefficient_boundary.csv",
                "node,m,dirichlet,neumann", rows);
      files.push_back({"coefficient_boundary.csv", "node,m,dirichlet,neumann"});
    }
    timer.end();

    // ---- inversion ----
    stage = "invert";
    timer.begin(stage);
    const CarlemanSolver solver(grid, basis, config.carleman);
    std::optional<CoefficientField> U0;
    if (config.u0_zero) {
      CoefficientField zero;
      zero.values.setZero(grid.omega_node_count(), N);
      U0 = std::move(zero);
    }
    auto [U, history] = solver.fixed_point_solve(cb, U0);
    report.converged = history.converged;
    report.iterations = static_cast<int>(history.records.size());
    report.final_rel_diff =
        history.records.empty() ? 0.0 : history.records.back().rel_diff_l2;
    {
      std::vector<std::vector<double>> rows;
      for (size_t k = 0; k < history.records.size(); ++k) {
        const auto& r = history.records[k];
        rows.push_back({static_cast<double>(k + 1), r.rel_diff_l2,
                        r.rel_diff_sup, r.residual, r.seconds});
      }
      write_csv(config.out_dir + "/decay.csv",
                "iter,consecutive_relative_difference,"
                "consecutive_relative_difference_sup,residual,seconds",
                rows);
      files.push_back({"decay.csv", "iter,rel_diff_l2,rel_diff_sup,residual,seconds"});
    }
    timer.end();

    // ---- reconstruction ----
    stage = "reconstruct";
    timer.begin(stage);
    const Eigen::VectorXd f_comp = reconstruct_f(U, basis);
    write_grid_csv(config.out_dir + "/f_comp.csv", f_comp, grid);
    files.push_back({"f_comp.csv", "i,j,x,y,value"});
    {
      std::vector<std::vector<double>> rows;
      for (int node = 0; node < U.node_count(); ++node)
        for (int m = 0; m < U.mode_count(); ++m)
          rows.push_back({static_cast<double>(node), static_cast<double>(m + 1),
                          U.values(node, m)});
      write_csv(config.out_dir + "/u_comp.csv", "node,m,value", rows);
      files.push_back({"u_comp.csv", "node,m,value"});
    }
    Eigen::VectorXd a_comp;
    if (config.reconstruct_damping) {
      a_comp = reconstruct_a(U, basis, config.carleman.reg_eta);
      write_grid_csv(config.out_dir + "/a_comp.csv", a_comp, grid);
      files.push_back({"a_comp.csv", "i,j,x,y,value"});
    }
    timer.end();

    // ---- scoring ----
    stage = "metrics";
    timer.begin(stage);
    if (!config.phantom.empty()) {
      const Phantom phantom =
          make_phantom(config.phantom, config.const_f, config.const_a);
      const Eigen::VectorXd f_true = sample_on_omega(grid, phantom.f);
      write_grid_csv(config.out_dir + "/f_true.csv", f_true, grid);
      files.push_back({"f_true.csv", "i,j,x,y,value"});
      report.f_errors = metrics(f_comp, f_true, grid, phantom.f_inclusions);
      if (config.reconstruct_damping) {
        const Eigen::VectorXd a_true = sample_on_omega(grid, phantom.a);
        write_grid_csv(config.out_dir + "/a_true.csv", a_true, grid);
        files.push_back({"a_true.csv", "i,j,x,y,value"});
        report.a_errors = metrics(a_comp, a_true, grid, phantom.a_inclusions);
      }
    }
    timer.end();
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "stage '" << stage << "': " << e.what();
    write_manifest(config.out_dir, config, files, false, os.str());
    throw std::runtime_error(os.str());
  }

  report.seconds_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start)
          .count();
  write_text_file(config.out_dir + "/report.json", report.to_json() + "\n");
  files.push_back({"report.json", "run report"});
  write_manifest(config.out_dir, config, files, true, "");
  return report;
}

}  // namespace tdr
