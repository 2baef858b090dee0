#include "dlse/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>

#include "dlse/dca.hpp"
#include "dlse/errors.hpp"
#include "dlse/gpos.hpp"
#include "dlse/io.hpp"
#include "dlse/oracles.hpp"
#include "dlse/random_models.hpp"
#include "dlse/training.hpp"

namespace dlse::cli {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

FeasibleSet parse_set_spec(const std::string& spec, Eigen::Index n) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw data_error("set spec must look like box:l1,u1,.. or simplex:total");
  }
  const std::string kind = spec.substr(0, colon);
  std::vector<double> values;
  {
    std::string rest = spec.substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const std::size_t comma = rest.find(',', start);
      const std::string cell =
          rest.substr(start, comma == std::string::npos ? comma : comma - start);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw data_error("set spec: cannot parse '" + cell + "' as a number");
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (kind == "simplex") {
    if (values.size() != 1) throw data_error("simplex spec takes one total");
    return ScaledSimplex{values[0], n};
  }
  if (kind != "box") throw data_error("unknown set kind '" + kind + "'");
  if (values.size() == 2 && n > 1) {
    // One interval broadcast across all coordinates.
    Box b;
    b.lower = Eigen::VectorXd::Constant(n, values[0]);
    b.upper = Eigen::VectorXd::Constant(n, values[1]);
    return b;
  }
  if (values.size() != static_cast<std::size_t>(2 * n)) {
    throw data_error("box spec needs l,u per coordinate (" +
                     std::to_string(2 * n) + " numbers)");
  }
  Box b;
  b.lower.resize(n);
  b.upper.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b.lower(i) = values[static_cast<std::size_t>(2 * i)];
    b.upper(i) = values[static_cast<std::size_t>(2 * i + 1)];
  }
  return b;
}

}  // namespace

int cmd_gen(const GenArgs& args) {
  Dataset d;
  if (args.oracle == "example1") {
    d = gen_example1(args.count, args.seed);
  } else if (args.oracle == "diet5") {
    d = gen_diet5(args.count, args.seed);
  } else {
    throw data_error("unknown oracle '" + args.oracle +
                     "' (expected example1 or diet5)");
  }
  write_dataset_csv(d, args.out);
  log_info("wrote " + std::to_string(d.size()) + " samples to " + args.out);
  std::cout << json{{"oracle", args.oracle},
                    {"count", d.size()},
                    {"seed", args.seed},
                    {"path", args.out}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_fit(const FitArgs& args) {
  const Dataset d = read_dataset_csv(args.data_path);
  TrainConfig cfg;
  cfg.terms = args.terms;
  cfg.temperature = args.temperature;
  cfg.rng_seed = args.seed;
  cfg.max_epochs = args.epochs;
  cfg.tol_loss = args.tol_loss;
  cfg.holdout_fraction = args.holdout_fraction;
  const auto started = std::chrono::steady_clock::now();
  const TrainReport report = fit(d, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_model(report.model, args.out_model);
  json out{{"train_mse", report.final_train_loss},
           {"epochs", report.epochs},
           {"termination", report.termination},
           {"T", report.model.plus.temperature},
           {"K", report.model.plus.terms()},
           {"seconds", seconds},
           {"model_path", args.out_model}};
  if (report.holdout_loss) out["holdout_mse"] = *report.holdout_loss;
  std::cout << out.dump() << '\n';
  return 0;
}

namespace {

struct PredictionInput {
  Eigen::MatrixXd points;
  std::optional<Eigen::VectorXd> truth;
};

PredictionInput load_prediction_input(const std::string& path,
                                      Eigen::Index dim) {
  const Table t = read_csv(path);
  PredictionInput in;
  if (static_cast<Eigen::Index>(t.header.size()) == dim + 1 &&
      t.header.back() == "y") {
    in.points = t.values.leftCols(dim);
    in.truth = Eigen::VectorXd(t.values.rightCols(1));
  } else if (static_cast<Eigen::Index>(t.header.size()) == dim) {
    in.points = t.values;
  } else {
    throw data_error(path + ": expected " + std::to_string(dim) +
                     " input columns (optionally followed by y), got " +
                     std::to_string(t.header.size()));
  }
  return in;
}

}  // namespace

int cmd_predict(const PredictArgs& args) {
  const DlseModel model = read_model(args.model_path);
  const PredictionInput in = load_prediction_input(args.data_path, model.dim());

  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw data_error("cannot open '" + args.out + "' for writing");
  }
  std::ostream& out = args.out.empty() ? std::cout : file;

  for (Eigen::Index j = 0; j < model.dim(); ++j) out << 'x' << (j + 1) << ',';
  if (in.truth) out << "y_true,";
  out << "y_pred";
  if (in.truth) out << ",abs_err";
  out << '\n';
  for (Eigen::Index i = 0; i < in.points.rows(); ++i) {
    const Eigen::VectorXd x = in.points.row(i).transpose();
    const double pred = eval_dlse(model, x);
    for (Eigen::Index j = 0; j < model.dim(); ++j) {
      out << format_double(in.points(i, j)) << ',';
    }
    if (in.truth) {
      out << format_double((*in.truth)(i)) << ',' << format_double(pred) << ','
          << format_double(std::abs(pred - (*in.truth)(i)));
    } else {
      out << format_double(pred);
    }
    out << '\n';
  }
  if (!out) throw data_error("failed writing predictions");
  return 0;
}

int cmd_metrics(const MetricsArgs& args) {
  const DlseModel model = read_model(args.model_path);
  const Dataset d = read_dataset_csv(args.data_path);
  if (d.dim() != model.dim()) {
    throw data_error("metrics: model expects dimension " +
                     std::to_string(model.dim()) + ", data has " +
                     std::to_string(d.dim()));
  }
  const Eigen::Index m = d.size();
  double sq_sum = 0.0, rel_sum = 0.0, max_abs = 0.0, max_rel = 0.0;
  const double mean_y = d.targets.mean();
  double ss_tot = 0.0, ss_res = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double pred = eval_dlse(model, d.points.row(i).transpose());
    const double err = pred - d.targets(i);
    const double rel = std::abs(err) / std::abs(d.targets(i));
    sq_sum += err * err;
    rel_sum += rel;
    max_abs = std::max(max_abs, std::abs(err));
    max_rel = std::max(max_rel, rel);
    ss_res += err * err;
    ss_tot += (d.targets(i) - mean_y) * (d.targets(i) - mean_y);
  }
  const double r2 =
      ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  std::cout << json{{"mean_sq", sq_sum / static_cast<double>(m)},
                    {"mean_rel", rel_sum / static_cast<double>(m)},
                    {"max_abs", max_abs},
                    {"max_rel", max_rel},
                    {"r2", r2},
                    {"count", m}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_optimize(const OptimizeArgs& args) {
  const DlseModel model = read_model(args.model_path);
  const FeasibleSet set = parse_set_spec(args.set_spec, model.dim());
  DcaConfig cfg;
  cfg.tol = args.tol;
  if (!args.x0.empty()) {
    if (static_cast<Eigen::Index>(args.x0.size()) != model.dim()) {
      throw data_error("x0 has wrong dimension");
    }
    cfg.start = Eigen::Map<const Eigen::VectorXd>(
        args.x0.data(), static_cast<Eigen::Index>(args.x0.size()));
  }
  const DcaResult result = multistart(model, set, cfg, args.starts, args.seed);
  write_trace_csv(result.trace, args.trace_out);
  if (args.trace_json) {
    std::ofstream tj(*args.trace_json);
    if (!tj) throw data_error("cannot open '" + *args.trace_json + "'");
    tj << trace_to_json(result.trace).dump(2) << '\n';
  }
  json x_star = json::array();
  for (Eigen::Index i = 0; i < result.x.size(); ++i) x_star.push_back(result.x(i));
  std::cout << json{{"x_star", std::move(x_star)},
                    {"objective", result.objective},
                    {"iterations", result.trace.outer_iterations},
                    {"termination", result.trace.termination},
                    {"trace_path", args.trace_out}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_emit_sf(const EmitSfArgs& args) {
  const DlseModel model = read_model(args.model_path);
  RationalizeOptions opts;
  opts.tol = args.tol;
  opts.radius = args.radius;
  const RationalDlse rational = rationalize(model, opts);
  const SfEmission emission = emit_sf(rational);
  const std::string text = to_string(
      emission.expr, args.expand_powers ? PowStyle::Expand : PowStyle::Caret);
  std::cout << text << '\n';
  const json sidecar{{"p", emission.p},
                     {"q", emission.q},
                     {"kappa", rational.kappa},
                     {"n", rational.dim}};
  std::cout << sidecar.dump() << '\n';
  if (args.out) {
    std::ofstream ef(*args.out);
    if (!ef) throw data_error("cannot open '" + *args.out + "'");
    ef << text << '\n';
    std::ofstream sj(*args.out + ".json");
    if (!sj) throw data_error("cannot open '" + *args.out + ".json'");
    sj << sidecar.dump(2) << '\n';
  }
  return 0;
}

namespace {

// Central finite differences with per-coordinate steps 1e-5 * (1 + |x_i|).
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(x(i)));
    Eigen::VectorXd hi = x, lo = x;
    hi(i) += h;
    lo(i) -= h;
    g(i) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

struct PropertyResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

Eigen::VectorXd random_point(Rng& rng, Eigen::Index n, double scale) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.uniform(-scale, scale);
  return x;
}

RandomModelSpec random_spec(Rng& rng) {
  RandomModelSpec spec;
  spec.dim = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
  spec.terms = static_cast<Eigen::Index>(rng.uniform_int(1, 12));
  spec.temperature = std::exp(rng.uniform(std::log(1e-3), 0.0));
  spec.alpha_scale = 2.0;
  spec.beta_scale = 1.0;
  return spec;
}

PropertyResult check_tropical(Rng& rng) {
  constexpr int kInstances = 1000;
  PropertyResult r{"tropical_sandwich", true,
                   std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    const RandomModelSpec spec = random_spec(rng);
    const LseParams p = random_lse(rng, spec);
    const Eigen::VectorXd x = random_point(rng, spec.dim, 3.0);
    const double lo = eval_tropical_limit(p, x);
    const double hi =
        lo + p.temperature * std::log(static_cast<double>(p.terms()));
    const double f = eval_lse(p, x);
    r.pass = (f >= lo - 1e-10) && (f <= hi + 1e-10);
  }
  return r;
}

PropertyResult check_gradient_x(Rng& rng, bool inject_sign_flip) {
  constexpr int kInstances = 100;
  PropertyResult r{"gradient_x", true, std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    RandomModelSpec spec = random_spec(rng);
    spec.temperature = std::max(spec.temperature, 0.05);  // keep FD well posed
    const LseParams p = random_lse(rng, spec);
    const Eigen::VectorXd x = random_point(rng, spec.dim, 2.0);
    Eigen::VectorXd g = grad_x_lse(p, x);
    if (inject_sign_flip) g = -g;
    const Eigen::VectorXd fd =
        fd_gradient([&](const Eigen::VectorXd& q) { return eval_lse(p, q); }, x);
    r.pass = (g - fd).norm() <= 1e-6 * (1.0 + fd.norm());
  }
  return r;
}

PropertyResult check_param_gradients(Rng& rng) {
  constexpr int kInstances = 100;
  PropertyResult r{"param_gradients", true,
                   std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    RandomModelSpec spec = random_spec(rng);
    spec.terms = static_cast<Eigen::Index>(rng.uniform_int(1, 5));
    spec.temperature = std::max(spec.temperature, 0.05);
    Rng model_rng(rng.next_u64());
    DlseModel m = random_dlse(model_rng, spec);
    const Eigen::VectorXd x = random_point(rng, spec.dim, 2.0);
    const ParamGradients g = param_gradients(m, x);
    double worst = 0.0;
    auto fd_param = [&](double* slot) {
      const double h = 1e-5 * (1.0 + std::abs(*slot));
      const double saved = *slot;
      *slot = saved + h;
      const double up = eval_dlse(m, x);
      *slot = saved - h;
      const double down = eval_dlse(m, x);
      *slot = saved;
      return (up - down) / (2.0 * h);
    };
    for (Eigen::Index k = 0; k < m.plus.terms(); ++k) {
      for (Eigen::Index j = 0; j < spec.dim; ++j) {
        const double fd = fd_param(&m.plus.alphas(k, j));
        worst = std::max(worst, std::abs(g.dalpha(k, j) - fd) / (1.0 + std::abs(fd)));
      }
      const double fd = fd_param(&m.plus.betas(k));
      worst = std::max(worst, std::abs(g.dbeta(k) - fd) / (1.0 + std::abs(fd)));
    }
    for (Eigen::Index k = 0; k < m.minus.terms(); ++k) {
      for (Eigen::Index j = 0; j < spec.dim; ++j) {
        const double fd = fd_param(&m.minus.alphas(k, j));
        worst = std::max(worst, std::abs(g.dgamma(k, j) - fd) / (1.0 + std::abs(fd)));
      }
      const double fd = fd_param(&m.minus.betas(k));
      worst = std::max(worst, std::abs(g.ddelta(k) - fd) / (1.0 + std::abs(fd)));
    }
    r.pass = worst <= 1e-6;
  }
  return r;
}

PropertyResult check_softmax_sums(Rng& rng) {
  constexpr int kInstances = 100;
  PropertyResult r{"softmax_sums", true, std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    const RandomModelSpec spec = random_spec(rng);
    Rng model_rng(rng.next_u64());
    const DlseModel m = random_dlse(model_rng, spec);
    const Eigen::VectorXd x = random_point(rng, spec.dim, 2.0);
    const ParamGradients g = param_gradients(m, x);
    r.pass = std::abs(g.dbeta.sum() - 1.0) <= 1e-12 &&
             std::abs(g.ddelta.sum() + 1.0) <= 1e-12;
  }
  return r;
}

PropertyResult check_scaling(Rng& rng) {
  constexpr int kInstances = 100;
  PropertyResult r{"scaling_identity", true,
                   std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    const RandomModelSpec spec = random_spec(rng);
    const LseParams p = random_lse(rng, spec);
    const LseParams unit = rescale_to_unit_T(p);
    const Eigen::VectorXd x = random_point(rng, spec.dim, 2.0);
    const double direct = eval_lse(p, x);
    const double scaled = p.temperature * eval_lse(unit, x / p.temperature);
    r.pass = std::abs(direct - scaled) <= 1e-12 * (1.0 + std::abs(direct));
  }
  return r;
}

PropertyResult check_correspondence(Rng& rng) {
  constexpr int kInstances = 100;
  PropertyResult r{"correspondence", true,
                   std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    RandomModelSpec spec = random_spec(rng);
    spec.alpha_scale = 1.0;
    const LseParams p = random_lse(rng, spec);
    const GposParams g = lse_to_gpos(p);
    Eigen::VectorXd z(spec.dim);
    for (Eigen::Index j = 0; j < spec.dim; ++j) z(j) = rng.uniform(0.1, 10.0);
    const double via_lse = std::exp(eval_lse(p, z.array().log()));
    const double via_gpos = eval_gpos(g, z);
    r.pass = relative_error(via_lse, via_gpos) <= 1e-10;
  }
  return r;
}

PropertyResult check_sf(Rng& rng) {
  constexpr int kModels = 5;
  constexpr int kPoints = 200;
  PropertyResult r{"sf_equivalence", true,
                   std::to_string(kModels) + " models x " +
                       std::to_string(kPoints) + " points"};
  for (int i = 0; i < kModels && r.pass; ++i) {
    RandomModelSpec spec;
    spec.dim = static_cast<Eigen::Index>(rng.uniform_int(1, 3));
    spec.terms = static_cast<Eigen::Index>(rng.uniform_int(1, 4));
    spec.temperature = 1.0 / static_cast<double>(rng.uniform_int(2, 5));
    spec.alpha_scale = 1.5;
    spec.beta_scale = 0.5;
    const DlseModel m = random_dlse(rng, spec);
    RationalizeOptions opts;
    opts.tol = 1e-3;
    opts.radius = 2.31 * std::sqrt(static_cast<double>(spec.dim));
    const RationalDlse rational = rationalize(m, opts);
    const SfEmission emission = emit_sf(rational);

    bool subtraction_free = true;
    for_each_node(emission.expr, [&](const SfExpr& node) {
      if (node.kind == SfExpr::Kind::Const && node.value <= 0) {
        subtraction_free = false;
      }
    });
    if (!subtraction_free) {
      r.pass = false;
      break;
    }

    const DlseModel rounded = to_dlse_model(rational);
    for (int s = 0; s < kPoints && r.pass; ++s) {
      Eigen::VectorXd x(spec.dim);
      for (Eigen::Index j = 0; j < spec.dim; ++j) x(j) = rng.uniform(0.1, 10.0);
      const double via_sf = eval_sf(emission.expr, emission.p, emission.q, x);
      const double via_rounded = std::exp(eval_dlse(rounded, x.array().log()));
      const double via_source = std::exp(eval_dlse(m, x.array().log()));
      r.pass = relative_error(via_rounded, via_sf) <= 1e-9 &&
               std::abs(std::log(via_sf) - std::log(via_source)) <=
                   rational.kappa + 1e-9;
    }
  }
  return r;
}

PropertyResult check_dca(Rng& rng) {
  constexpr int kInstances = 10;
  PropertyResult r{"dca_descent", true, std::to_string(kInstances) + " instances"};
  for (int i = 0; i < kInstances && r.pass; ++i) {
    RandomModelSpec spec;
    spec.dim = static_cast<Eigen::Index>(rng.uniform_int(1, 3));
    spec.terms = static_cast<Eigen::Index>(rng.uniform_int(2, 6));
    spec.temperature = 0.2;
    const DlseModel m = random_dlse(rng, spec);
    FeasibleSet set;
    if (i % 2 == 0) {
      set = Box{Eigen::VectorXd::Constant(spec.dim, -2.0),
                Eigen::VectorXd::Constant(spec.dim, 2.0)};
    } else {
      set = ScaledSimplex{1.0, spec.dim};
    }
    DcaConfig cfg;
    cfg.max_outer = 50;
    const DcaResult result = dlsea(m, set, cfg);
    for (std::size_t k = 1; k < result.trace.objectives.size() && r.pass; ++k) {
      r.pass = result.trace.objectives[k] <=
               result.trace.objectives[k - 1] + 2.0 * cfg.inner_tol;
    }
    for (const Eigen::VectorXd& x : result.trace.iterates) {
      if (!contains(set, x, 1e-10)) r.pass = false;
    }
  }
  return r;
}

}  // namespace

int cmd_check(const CheckArgs& args) {
  Rng rng(args.seed);
  const bool inject_sign_flip = args.inject == "grad-sign";
  if (!args.inject.empty() && !inject_sign_flip) {
    throw data_error("unknown fault '" + args.inject + "'");
  }
  std::vector<PropertyResult> results;
  results.push_back(check_tropical(rng));
  results.push_back(check_gradient_x(rng, inject_sign_flip));
  results.push_back(check_param_gradients(rng));
  results.push_back(check_softmax_sums(rng));
  results.push_back(check_scaling(rng));
  results.push_back(check_correspondence(rng));
  results.push_back(check_sf(rng));
  results.push_back(check_dca(rng));

  int passed = 0;
  for (const PropertyResult& r : results) {
    std::cout << r.name << ": " << (r.pass ? "pass" : "FAIL") << " ("
              << r.detail << ")\n";
    if (r.pass) ++passed;
  }
  std::cout << "check: " << passed << "/" << results.size()
            << " properties passed\n";
  return passed == static_cast<int>(results.size()) ? 0 : 3;
}

}  // namespace dlse::cli
