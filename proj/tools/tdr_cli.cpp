// Command-line front end. Talks to the solver library exclusively through the
// C API in tdr/tdr.h.
#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "tdr/tdr.h"

namespace {

struct ConfigDeleter {
  void operator()(tdr_config* c) const { tdr_config_free(c); }
};
struct ReportDeleter {
  void operator()(tdr_report* r) const { tdr_report_free(r); }
};
using ConfigPtr = std::unique_ptr<tdr_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<tdr_report, ReportDeleter>;

// Flags shared by simulate/invert/run; only explicitly passed options are
// forwarded so JSON-file settings survive.
struct CommonFlags {
  std::map<std::string, std::string> values;
  std::string config_file;

  void add_to(CLI::App* app, bool with_phantom, bool with_data) {
    app->add_option("--config", config_file, "JSON config file");
    auto opt = [&](const char* flag, const char* key, const char* help) {
      app->add_option_function<std::string>(
          flag, [this, key](const std::string& v) { values[key] = v; }, help);
    };
    if (with_phantom) {
      opt("--phantom", "phantom",
          "phantom name (donut, sigma, omega_letter, two_bars, "
          "smooth_square_void, three_disks, constant)");
      opt("--const-f", "const_f", "constant phantom: f value");
      opt("--const-a", "const_a", "constant phantom: damping value");
      opt("--delta", "delta", "multiplicative noise level in [0,1)");
      opt("--seed", "seed", "noise seed");
    }
    if (with_data) opt("--data", "data_dir", "directory with saved boundary data");
    opt("--out", "out_dir", "output directory");
    opt("--nx", "nx", "grid nodes per axis over the box");
    opt("--nt", "nt", "time levels");
    opt("--lambda", "lambda", "Carleman parameter lambda");
    opt("--beta", "beta", "Carleman exponent beta");
    opt("--x0", "x0", "weight center 'x,y' (outside Omega)");
    opt("--b", "b", "weight normalization radius (0 = auto)");
    opt("--eps", "eps", "regularization weight");
    opt("--kappa0", "kappa0", "stopping threshold");
    opt("--max-iters", "max_iters", "iteration cap");
    opt("--clamp-m", "clamp_m", "entrywise iterate bound (0 = off)");
    opt("--reg-eta", "reg_eta", "regularizer in the damping quotient");
    opt("--cutoff", "cutoff", "basis cutoff: integer or 'auto'");
    opt("--cutoff-tol", "cutoff_tol", "relative residual target for 'auto'");
    opt("--u0", "u0", "iteration start: 'linear' (default) or 'zero'");
    app->add_flag_function(
        "--paper-scale",
        [this](int64_t) { values["paper_scale"] = "true"; },
        "241-node grid with N = 35");
    app->add_flag_function(
        "--recon-a", [this](int64_t) { values["reconstruct_a"] = "true"; },
        "also reconstruct the damping coefficient");
  }

  ConfigPtr build() const {
    ConfigPtr cfg(tdr_config_new());
    if (!cfg) throw std::runtime_error("out of memory");
    if (!config_file.empty() &&
        tdr_config_load_file(cfg.get(), config_file.c_str()) != TDR_OK)
      throw std::runtime_error(tdr_last_error());
    for (const auto& [key, value] : values)
      if (tdr_config_set(cfg.get(), key.c_str(), value.c_str()) != TDR_OK)
        throw std::runtime_error(tdr_last_error());
    return cfg;
  }
};

void print_summary(const tdr_report* rep) {
  std::printf("converged:        %s\n", tdr_report_converged(rep) ? "yes" : "no");
  std::printf("iterations:       %.0f\n", tdr_report_value(rep, "iterations"));
  std::printf("final rel diff:   %.3e\n", tdr_report_value(rep, "final_rel_diff"));
  const double f_err = tdr_report_value(rep, "f_rel_l2");
  if (f_err == f_err)  // not NaN
    std::printf("f rel L2 error:   %.4f\n", f_err);
  const double a_err = tdr_report_value(rep, "a_rel_l2");
  if (a_err == a_err) std::printf("a rel L2 error:   %.4f\n", a_err);
  std::printf("total seconds:    %.2f\n", tdr_report_value(rep, "seconds_total"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tdr: recover the initial state of a damped acoustic field "
               "from lateral Cauchy data"};
  app.set_version_flag("--version", tdr_version());
  app.require_subcommand(1);

  CommonFlags sim_flags, run_flags, inv_flags;
  std::string report_dir;

  auto* cmd_sim = app.add_subcommand(
      "simulate", "simulate a phantom and write boundary data");
  sim_flags.add_to(cmd_sim, true, false);

  auto* cmd_run = app.add_subcommand(
      "run", "full pipeline: simulate (or ingest), invert, score");
  run_flags.add_to(cmd_run, true, true);

  auto* cmd_inv = app.add_subcommand(
      "invert", "invert previously saved boundary data");
  inv_flags.add_to(cmd_inv, true, true);

  auto* cmd_rep = app.add_subcommand("report", "print the report of a finished run");
  cmd_rep->add_option("--run", report_dir, "run output directory")->required();
  cmd_rep->add_flag("--json", "print the full JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_sim->parsed()) {
      ConfigPtr cfg = sim_flags.build();
      if (tdr_simulate(cfg.get()) != TDR_OK) {
        std::fprintf(stderr, "error: %s\n", tdr_last_error());
        return 2;
      }
      std::printf("boundary data written\n");
      return 0;
    }
    if (cmd_run->parsed() || cmd_inv->parsed()) {
      const CommonFlags& flags = cmd_run->parsed() ? run_flags : inv_flags;
      ConfigPtr cfg = flags.build();
      tdr_report* raw = nullptr;
      const tdr_status st = cmd_run->parsed() ? tdr_run(cfg.get(), &raw)
                                              : tdr_invert(cfg.get(), &raw);
      ReportPtr rep(raw);
      if (st != TDR_OK) {
        std::fprintf(stderr, "error: %s\n", tdr_last_error());
        return 2;
      }
      print_summary(rep.get());
      return tdr_report_converged(rep.get()) ? 0 : 1;
    }
    if (cmd_rep->parsed()) {
      tdr_report* raw = nullptr;
      if (tdr_report_open(report_dir.c_str(), &raw) != TDR_OK) {
        std::fprintf(stderr, "error: %s\n", tdr_last_error());
        return 2;
      }
      ReportPtr rep(raw);
      if (cmd_rep->count("--json"))
        std::printf("%s\n", tdr_report_json(rep.get()));
      else
        print_summary(rep.get());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
