#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdr/carleman.hpp"
#include "tdr/grid.hpp"
#include "tdr/phantom.hpp"
#include "tdr/time_reduction.hpp"

namespace tdr {

/// Everything one end-to-end run needs. Serializes to/from JSON; the manifest
/// records a hash of the canonical serialization.
struct RunConfig {
  std::string phantom = "donut";
  double const_f = 1.0;  ///< only for the constant phantom
  double const_a = 0.5;
  std::string data_dir;  ///< when set, boundary data is loaded, not simulated
  std::string out_dir = "out";

  bool paper_scale = false;
  int nx = 0;   ///< 0 selects 79 (desk) or 241 (paper scale)
  int Nt = 201;
  double T = 1.0;

  double delta = 0.10;
  std::uint64_t seed = 1;

  int cutoff_N = 0;  ///< 0 selects 15 (desk) or 35 (paper scale)
  bool cutoff_auto = false;
  double cutoff_tol = 0.1;

  CarlemanConfig carleman;
  bool u0_zero = false;  ///< start the iteration from 0 instead of the linear solve
  bool reconstruct_damping = false;

  int effective_nx() const { return nx > 0 ? nx : (paper_scale ? 241 : 79); }
  int effective_N() const { return cutoff_N > 0 ? cutoff_N : (paper_scale ? 35 : 15); }
  int quad_panels() const { return effective_N() <= 20 ? 64 : 312; }
};

std::string to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& json_text);
/// FNV-1a over the canonical JSON form; changes iff some field changes.
std::string config_hash(const RunConfig& config);

struct InclusionScore {
  std::string name;
  double true_value = 0.0;
  double computed_max = 0.0;
  double rel_error = 0.0;
};

struct ErrorTable {
  double rel_l2 = 0.0;
  double sup = 0.0;
  std::vector<InclusionScore> inclusions;
};

struct RunReport {
  std::string phantom;
  std::string config_json;
  std::string hash;
  int N = 0;
  int nx = 0;
  bool converged = false;
  int iterations = 0;
  double final_rel_diff = 0.0;
  ErrorTable f_errors;
  std::optional<ErrorTable> a_errors;
  double seconds_total = 0.0;
  std::map<std::string, double> stage_seconds;
  std::string version;

  std::string to_json() const;
  static RunReport from_json(const std::string& text);
  /// Flat numeric view ("f_rel_l2", "iterations", ...) for the C API.
  double value(const std::string& key) const;
};

/// Relative L2 / sup errors plus per-inclusion maxima of `computed` against
/// `truth`, both sampled on the Omega block.
ErrorTable metrics(const Eigen::VectorXd& computed, const Eigen::VectorXd& truth,
                   const Grid2D& grid, const std::vector<Inclusion>& inclusions);

/// Fraction of the top-quartile set of (field - background) that falls inside
/// a `dilate_px` Chebyshev dilation of the mask. Localization score used to
/// judge inclusion placement.
double localization_score(const Eigen::VectorXd& field, double background,
                          const std::vector<bool>& mask, const Grid2D& grid,
                          int dilate_px);

/// Full pipeline: simulate (or ingest) -> project -> iterate -> reconstruct
/// -> score -> emit artifacts under config.out_dir.
RunReport run(const RunConfig& config);

/// Only the data-manufacturing stages; writes boundary data + sidecar.
void simulate_to_dir(const RunConfig& config);

const char* version_string();

}  // namespace tdr
