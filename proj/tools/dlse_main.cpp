#include <CLI11.hpp>
#include <iostream>

#include "dlse/cli.hpp"
#include "dlse/errors.hpp"

// Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical failure.

int main(int argc, char** argv) {
  CLI::App app{
      "Difference-of-log-sum-exp surrogate models: data generation, "
      "training, prediction, optimization, and subtraction-free emission.\n"
      "Set DLSE_LOG=info|debug for progress output on stderr."};
  app.require_subcommand(1);

  dlse::cli::GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a benchmark dataset CSV");
  gen_cmd->add_option("oracle", gen.oracle, "example1 | diet5")->required();
  gen_cmd->add_option("--m,--count", gen.count, "Samples to draw");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

  dlse::cli::FitArgs fit;
  double fit_temperature = 0.0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a dataset CSV");
  fit_cmd->add_option("data", fit.data_path, "Dataset CSV")->required();
  fit_cmd->add_option("--K", fit.terms, "Terms per component");
  auto* t_opt = fit_cmd->add_option(
      "--T", fit_temperature, "Temperature (omit for 2 / target range)");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");
  fit_cmd->add_option("--epochs", fit.epochs, "Max epochs");
  fit_cmd->add_option("--tol", fit.tol_loss, "Stop when the MSE drops below");
  fit_cmd->add_option("--holdout", fit.holdout_fraction,
                      "Holdout fraction in [0,1)");
  fit_cmd->add_option("--out", fit.out_model, "Output model JSON")->required();

  dlse::cli::PredictArgs predict;
  auto* predict_cmd =
      app.add_subcommand("predict", "Evaluate a model over a CSV of inputs");
  predict_cmd->add_option("model", predict.model_path, "Model JSON")->required();
  predict_cmd->add_option("data", predict.data_path, "Input CSV")->required();
  predict_cmd->add_option("--out", predict.out, "Output CSV (default stdout)");

  dlse::cli::MetricsArgs metrics;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "Prediction-error metrics on labeled data");
  metrics_cmd->add_option("model", metrics.model_path, "Model JSON")->required();
  metrics_cmd->add_option("data", metrics.data_path, "Labeled CSV")->required();

  dlse::cli::OptimizeArgs optimize;
  auto* optimize_cmd =
      app.add_subcommand("optimize", "Minimize a model over a feasible set");
  optimize_cmd->add_option("model", optimize.model_path, "Model JSON")->required();
  optimize_cmd->add_option("--set", optimize.set_spec,
                           "box:l1,u1,.. or simplex:total")->required();
  optimize_cmd->add_option("--tol", optimize.tol, "Relative-step tolerance");
  optimize_cmd->add_option("--starts", optimize.starts, "Restart count");
  optimize_cmd->add_option("--seed", optimize.seed, "Restart RNG seed");
  optimize_cmd->add_option("--x0", optimize.x0, "Start point coordinates");
  optimize_cmd->add_option("--out", optimize.trace_out, "Trace CSV path");
  std::string trace_json;
  auto* tj_opt = optimize_cmd->add_option("--trace-json", trace_json,
                                          "Also export the trace as JSON");

  dlse::cli::EmitSfArgs emit;
  std::string emit_out;
  auto* emit_cmd = app.add_subcommand(
      "emit-sf", "Print the model as a subtraction-free expression");
  emit_cmd->add_option("model", emit.model_path, "Model JSON")->required();
  emit_cmd->add_option("--tol", emit.tol, "Rationalization tolerance (kappa)");
  emit_cmd->add_option("--radius", emit.radius,
                       "Input radius the certificate covers");
  emit_cmd->add_flag("--expand-pow", emit.expand_powers,
                     "Write powers as repeated multiplication instead of ^");
  auto* emit_out_opt =
      emit_cmd->add_option("--out", emit_out, "Expression file (+ .json sidecar)");

  dlse::cli::CheckArgs check;
  auto* check_cmd =
      app.add_subcommand("check", "Run the seeded invariant suite");
  check_cmd->add_option("--seed", check.seed, "RNG seed");
  check_cmd->add_option("--inject", check.inject, "Fault injection (testing)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return dlse::cli::cmd_gen(gen);
    if (fit_cmd->parsed()) {
      if (t_opt->count() > 0) fit.temperature = fit_temperature;
      return dlse::cli::cmd_fit(fit);
    }
    if (predict_cmd->parsed()) return dlse::cli::cmd_predict(predict);
    if (metrics_cmd->parsed()) return dlse::cli::cmd_metrics(metrics);
    if (optimize_cmd->parsed()) {
      if (tj_opt->count() > 0) optimize.trace_json = trace_json;
      return dlse::cli::cmd_optimize(optimize);
    }
    if (emit_cmd->parsed()) {
      if (emit_out_opt->count() > 0) emit.out = emit_out;
      return dlse::cli::cmd_emit_sf(emit);
    }
    if (check_cmd->parsed()) return dlse::cli::cmd_check(check);
  } catch (const dlse::data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dlse::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
