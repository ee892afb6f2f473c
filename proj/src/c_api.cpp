#include "tdr/tdr.h"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "tdr/csv.hpp"
#include "tdr/pipeline.hpp"

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const std::string& msg) { g_last_error = msg; }

tdr_status classify(const std::exception& e) {
  // invalid_argument maps to config/argument problems, runtime to numeric/io
  if (dynamic_cast<const std::invalid_argument*>(&e)) return TDR_ERR_CONFIG;
  const std::string what = e.what();
  if (what.find("cannot read") != std::string::npos ||
      what.find("cannot write") != std::string::npos ||
      what.find("no such") != std::string::npos)
    return TDR_ERR_IO;
  return TDR_ERR_NUMERIC;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

}  // namespace

struct tdr_config {
  tdr::RunConfig cfg;
  std::string json_buffer;
};

struct tdr_report {
  tdr::RunReport report;
  std::string json_buffer;
};

extern "C" {

const char* tdr_version(void) { return tdr::version_string(); }

const char* tdr_last_error(void) { return g_last_error.c_str(); }

tdr_config* tdr_config_new(void) { return new (std::nothrow) tdr_config(); }

void tdr_config_free(tdr_config* config) { delete config; }

tdr_status tdr_config_load_file(tdr_config* config, const char* path) {
  if (!config || !path) {
    set_error("null handle or path");
    return TDR_ERR_ARGUMENT;
  }
  try {
    config->cfg = tdr::run_config_from_json(tdr::read_text_file(path));
    return TDR_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return TDR_ERR_IO;
  }
}

tdr_status tdr_config_set(tdr_config* config, const char* key,
                          const char* value) {
  if (!config || !key || !value) {
    set_error("null handle, key, or value");
    return TDR_ERR_ARGUMENT;
  }
  try {
    tdr::RunConfig& c = config->cfg;
    const std::string k = key, v = value;
    if (k == "phantom") c.phantom = v;
    else if (k == "data_dir") c.data_dir = v;
    else if (k == "out_dir") c.out_dir = v;
    else if (k == "delta") c.delta = std::stod(v);
    else if (k == "seed") c.seed = std::stoull(v);
    else if (k == "lambda") c.carleman.lam = std::stod(v);
    else if (k == "beta") c.carleman.beta = std::stod(v);
    else if (k == "b") c.carleman.b = std::stod(v);
    else if (k == "eps") c.carleman.eps = std::stod(v);
    else if (k == "kappa0") c.carleman.kappa0 = std::stod(v);
    else if (k == "max_iters") c.carleman.max_iters = std::stoi(v);
    else if (k == "clamp_m") c.carleman.clamp_M = std::stod(v);
    else if (k == "reg_eta") c.carleman.reg_eta = std::stod(v);
    else if (k == "x0") {
      const auto comma = v.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("x0 expects 'x,y'");
      c.carleman.x0_x = std::stod(v.substr(0, comma));
      c.carleman.x0_y = std::stod(v.substr(comma + 1));
    } else if (k == "cutoff") {
      if (v == "auto") {
        c.cutoff_auto = true;
        c.cutoff_N = 0;
      } else {
        c.cutoff_auto = false;
        c.cutoff_N = std::stoi(v);
      }
    } else if (k == "cutoff_tol") c.cutoff_tol = std::stod(v);
    else if (k == "paper_scale") c.paper_scale = parse_bool(v);
    else if (k == "nx") c.nx = std::stoi(v);
    else if (k == "nt") c.Nt = std::stoi(v);
    else if (k == "u0") {
      if (v == "zero") c.u0_zero = true;
      else if (v == "linear") c.u0_zero = false;
      else throw std::invalid_argument("u0 expects 'linear' or 'zero'");
    } else if (k == "reconstruct_a") c.reconstruct_damping = parse_bool(v);
    else if (k == "const_f") c.const_f = std::stod(v);
    else if (k == "const_a") c.const_a = std::stod(v);
    else {
      set_error("unknown config key '" + k + "'");
      return TDR_ERR_ARGUMENT;
    }
    return TDR_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return TDR_ERR_ARGUMENT;
  }
}

const char* tdr_config_json(tdr_config* config) {
  if (!config) return "";
  config->json_buffer = tdr::to_json(config->cfg);
  return config->json_buffer.c_str();
}

tdr_status tdr_simulate(const tdr_config* config) {
  if (!config) {
    set_error("null config");
    return TDR_ERR_ARGUMENT;
  }
  try {
    tdr::simulate_to_dir(config->cfg);
    return TDR_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return classify(e);
  }
}

tdr_status tdr_run(const tdr_config* config, tdr_report** out_report) {
  if (!config || !out_report) {
    set_error("null config or output pointer");
    return TDR_ERR_ARGUMENT;
  }
  *out_report = nullptr;
  try {
    auto* rep = new tdr_report();
    rep->report = tdr::run(config->cfg);
    *out_report = rep;
    return TDR_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return classify(e);
  }
}

tdr_status tdr_invert(const tdr_config* config, tdr_report** out_report) {
  if (!config || !out_report) {
    set_error("null config or output pointer");
    return TDR_ERR_ARGUMENT;
  }
  if (config->cfg.data_dir.empty()) {
    set_error("invert requires data_dir");
    return TDR_ERR_CONFIG;
  }
  return tdr_run(config, out_report);
}

tdr_status tdr_report_open(const char* run_dir, tdr_report** out_report) {
  if (!run_dir || !out_report) {
    set_error("null run_dir or output pointer");
    return TDR_ERR_ARGUMENT;
  }
  *out_report = nullptr;
  try {
    auto* rep = new tdr_report();
    rep->report = tdr::RunReport::from_json(
        tdr::read_text_file(std::string(run_dir) + "/report.json"));
    *out_report = rep;
    return TDR_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return TDR_ERR_IO;
  }
}

double tdr_report_value(const tdr_report* report, const char* key) {
  if (!report || !key) return std::nan("");
  return report->report.value(key);
}

int tdr_report_converged(const tdr_report* report) {
  return report && report->report.converged ? 1 : 0;
}

const char* tdr_report_json(const tdr_report* report) {
  if (!report) return "";
  auto* mut = const_cast<tdr_report*>(report);
  mut->json_buffer = report->report.to_json();
  return mut->json_buffer.c_str();
}

void tdr_report_free(tdr_report* report) { delete report; }

}  // extern "C"
