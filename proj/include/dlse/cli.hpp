#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlse/sf.hpp"

namespace dlse::cli {

// Command implementations behind the dlse executable; they print
// machine-readable JSON lines to stdout and return process exit codes
// (0 ok, 2 data error, 3 numerical failure). Usage errors are the
// argument parser's job.

struct GenArgs {
  std::string oracle;  // example1 | diet5
  int count = 100;
  std::uint64_t seed = 0;
  std::string out;
};
int cmd_gen(const GenArgs& args);

struct FitArgs {
  std::string data_path;
  int terms = 10;
  std::optional<double> temperature;  // empty = auto
  std::uint64_t seed = 0;
  int epochs = 500;
  double tol_loss = 1e-12;
  double holdout_fraction = 0.0;
  std::string out_model;
};
int cmd_fit(const FitArgs& args);

struct PredictArgs {
  std::string model_path;
  std::string data_path;
  std::string out;  // empty = stdout
};
int cmd_predict(const PredictArgs& args);

struct MetricsArgs {
  std::string model_path;
  std::string data_path;
};
int cmd_metrics(const MetricsArgs& args);

struct OptimizeArgs {
  std::string model_path;
  std::string set_spec;  // box:l1,u1,..  or  simplex:total
  double tol = 1e-6;
  int starts = 1;
  std::uint64_t seed = 0;
  std::vector<double> x0;      // empty = default start
  std::string trace_out = "dlsea_trace.csv";
  std::optional<std::string> trace_json;
};
int cmd_optimize(const OptimizeArgs& args);

struct EmitSfArgs {
  std::string model_path;
  double tol = 1e-4;
  double radius = 1.0;
  bool expand_powers = false;
  std::optional<std::string> out;  // expression file; sidecar gets .json
};
int cmd_emit_sf(const EmitSfArgs& args);

struct CheckArgs {
  std::uint64_t seed = 0;
  // Test hook: "grad-sign" flips the analytic gradient inside the gradient
  // property so the harness itself can be exercised.
  std::string inject;
};
int cmd_check(const CheckArgs& args);

}  // namespace dlse::cli
