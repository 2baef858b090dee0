#include "dlse/training.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dlse/errors.hpp"
#include "dlse/rng.hpp"

namespace dlse {

void validate(const Dataset& d) {
  if (d.points.rows() < 1) throw data_error("dataset: empty");
  if (d.points.cols() < 1) throw data_error("dataset: zero-dimensional points");
  if (d.targets.size() != d.points.rows()) {
    throw data_error("dataset: target count does not match point count");
  }
  if (!d.points.allFinite() || !d.targets.allFinite()) {
    throw data_error("dataset: non-finite values");
  }
}

double default_temperature(const Dataset& d) {
  validate(d);
  if (d.size() < 2) throw data_error("default temperature: need at least two samples");
  const double range = d.targets.maxCoeff() - d.targets.minCoeff();
  if (range == 0.0) {
    throw data_error(
        "default temperature: targets are constant; supply the temperature "
        "explicitly");
  }
  return 2.0 / std::abs(range);
}

ParamGradients param_gradients(const DlseModel& m, const Eigen::VectorXd& x) {
  validate(m);
  const Eigen::VectorXd w = softmax_weights(m.plus, x);
  const Eigen::VectorXd v = softmax_weights(m.minus, x);
  ParamGradients g;
  g.dalpha = w * x.transpose();
  g.dbeta = w;
  g.dgamma = -v * x.transpose();
  g.ddelta = -v;
  return g;
}

DlseModel init_params(const Dataset& d, const TrainConfig& cfg) {
  validate(d);
  if (cfg.terms < 1) throw data_error("init: terms per component must be >= 1");

  double input_spread = 0.0;
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    input_spread = std::max(
        input_spread, d.points.col(j).maxCoeff() - d.points.col(j).minCoeff());
  }
  if (input_spread == 0.0) {
    throw data_error("init: all input points coincide");
  }
  const double target_spread = d.targets.maxCoeff() - d.targets.minCoeff();
  const double scale = target_spread / input_spread;

  const double temperature =
      cfg.temperature ? *cfg.temperature : default_temperature(d);
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw data_error("init: temperature must be positive and finite");
  }

  const Eigen::VectorXd centroid = d.points.colwise().mean();
  Rng rng(cfg.rng_seed);
  auto component = [&](int terms) {
    LseParams p;
    p.temperature = temperature;
    p.alphas.resize(terms, d.dim());
    for (Eigen::Index k = 0; k < terms; ++k) {
      for (Eigen::Index j = 0; j < d.dim(); ++j) {
        p.alphas(k, j) = rng.uniform(-scale, scale);
      }
    }
    // Every affine term vanishes at the centroid.
    p.betas = -(p.alphas * centroid);
    return p;
  };
  DlseModel model;
  model.plus = component(cfg.terms);
  model.minus = component(cfg.terms);
  return model;
}

namespace {

constexpr double kDampingLimit = 1e12;

Eigen::Index parameter_count(const DlseModel& m, bool with_temperature) {
  const Eigen::Index n = m.dim();
  return (m.plus.terms() + m.minus.terms()) * (n + 1) +
         (with_temperature ? 1 : 0);
}

Eigen::VectorXd pack(const DlseModel& m, bool with_temperature) {
  const Eigen::Index n = m.dim();
  Eigen::VectorXd theta(parameter_count(m, with_temperature));
  Eigen::Index at = 0;
  for (Eigen::Index k = 0; k < m.plus.terms(); ++k, at += n) {
    theta.segment(at, n) = m.plus.alphas.row(k);
  }
  theta.segment(at, m.plus.terms()) = m.plus.betas;
  at += m.plus.terms();
  for (Eigen::Index k = 0; k < m.minus.terms(); ++k, at += n) {
    theta.segment(at, n) = m.minus.alphas.row(k);
  }
  theta.segment(at, m.minus.terms()) = m.minus.betas;
  at += m.minus.terms();
  if (with_temperature) theta(at) = m.plus.temperature;
  return theta;
}

DlseModel unpack(const Eigen::VectorXd& theta, const DlseModel& shape,
                 bool with_temperature) {
  const Eigen::Index n = shape.dim();
  DlseModel m = shape;
  Eigen::Index at = 0;
  for (Eigen::Index k = 0; k < m.plus.terms(); ++k, at += n) {
    m.plus.alphas.row(k) = theta.segment(at, n);
  }
  m.plus.betas = theta.segment(at, m.plus.terms());
  at += m.plus.terms();
  for (Eigen::Index k = 0; k < m.minus.terms(); ++k, at += n) {
    m.minus.alphas.row(k) = theta.segment(at, n);
  }
  m.minus.betas = theta.segment(at, m.minus.terms());
  at += m.minus.terms();
  if (with_temperature) {
    m.plus.temperature = theta(at);
    m.minus.temperature = theta(at);
  }
  return m;
}

double mse(const DlseModel& m, const Eigen::MatrixXd& x,
           const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double r = eval_dlse(m, x.row(i).transpose()) - y(i);
    acc += r * r;
  }
  return acc / static_cast<double>(x.rows());
}

// Residuals r_i = d(x_i) - y_i and their Jacobian in packed parameter order.
void residuals_and_jacobian(const DlseModel& m, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y, bool with_temperature,
                            Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index n = x.cols();
  const Eigen::Index kp = m.plus.terms();
  const Eigen::Index km = m.minus.terms();
  r.resize(rows);
  jac.resize(rows, parameter_count(m, with_temperature));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    const Eigen::VectorXd w = softmax_weights(m.plus, xi);
    const Eigen::VectorXd v = softmax_weights(m.minus, xi);
    r(i) = eval_dlse(m, xi) - y(i);
    Eigen::Index at = 0;
    for (Eigen::Index k = 0; k < kp; ++k, at += n) {
      jac.row(i).segment(at, n) = w(k) * xi.transpose();
    }
    jac.row(i).segment(at, kp) = w.transpose();
    at += kp;
    for (Eigen::Index k = 0; k < km; ++k, at += n) {
      jac.row(i).segment(at, n) = -v(k) * xi.transpose();
    }
    jac.row(i).segment(at, km) = -v.transpose();
  }
  if (with_temperature) {
    // No closed form for the temperature sensitivity; central differences.
    const double t = m.plus.temperature;
    const double h = std::max(1e-9, 1e-6 * t);
    DlseModel lo = m, hi = m;
    lo.plus.temperature = lo.minus.temperature = t - h;
    hi.plus.temperature = hi.minus.temperature = t + h;
    const Eigen::Index col = jac.cols() - 1;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Eigen::VectorXd xi = x.row(i).transpose();
      jac(i, col) = (eval_dlse(hi, xi) - eval_dlse(lo, xi)) / (2.0 * h);
    }
  }
}

}  // namespace

namespace {

struct LmOutcome {
  DlseModel model;
  std::vector<double> losses;  // after each epoch
  double final_loss = 0.0;
  int epochs = 0;
  std::string termination;  // tol_loss | max_epochs | damping_limit
};

// One damped Gauss-Newton run: (JtJ + lambda I) delta = -Jt r each epoch,
// lambda shrinking on accepted steps and growing on rejections.
LmOutcome lm_run(DlseModel model, const Eigen::MatrixXd& xt,
                 const Eigen::VectorXd& yt, const TrainConfig& cfg,
                 int epoch_budget) {
  const bool with_t = cfg.train_temperature;
  Eigen::VectorXd theta = pack(model, with_t);
  LmOutcome out;
  out.final_loss = mse(model, xt, yt);
  if (!std::isfinite(out.final_loss)) {
    throw numeric_error("fit: non-finite loss at initialization");
  }
  double damping = cfg.damping_init;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  if (out.final_loss <= cfg.tol_loss) out.termination = "tol_loss";

  for (int epoch = 0; out.termination.empty() && epoch < epoch_budget; ++epoch) {
    residuals_and_jacobian(model, xt, yt, with_t, r, jac);
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(jac.cols(), jac.cols());
    h.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = h;
      damped.diagonal().array() += damping;
      const Eigen::VectorXd delta =
          damped.selfadjointView<Eigen::Lower>().ldlt().solve(-g);
      double candidate_loss = std::numeric_limits<double>::infinity();
      DlseModel candidate;
      if (delta.allFinite()) {
        candidate = unpack(theta + delta, model, with_t);
        const bool t_ok = !with_t || candidate.plus.temperature > 0.0;
        if (t_ok) {
          try {
            candidate_loss = mse(candidate, xt, yt);
          } catch (const numeric_error&) {
            // Overflowing step; treat as rejected.
          }
        }
      }
      if (std::isfinite(candidate_loss) && candidate_loss < out.final_loss) {
        theta += delta;
        model = std::move(candidate);
        out.final_loss = candidate_loss;
        damping *= cfg.damping_down;
        accepted = true;
      } else {
        damping *= cfg.damping_up;
        if (damping > kDampingLimit) {
          out.termination = "damping_limit";
          break;
        }
      }
    }
    out.losses.push_back(out.final_loss);
    out.epochs = epoch + 1;
    if (out.termination.empty() && out.final_loss <= cfg.tol_loss) {
      out.termination = "tol_loss";
    }
  }
  if (out.termination.empty()) out.termination = "max_epochs";
  out.model = std::move(model);
  return out;
}

}  // namespace

TrainReport fit(const Dataset& d, const TrainConfig& cfg) {
  validate(d);
  if (cfg.holdout_fraction < 0.0 || cfg.holdout_fraction >= 1.0) {
    throw data_error("fit: holdout fraction must lie in [0, 1)");
  }
  if (cfg.max_epochs < 0) throw data_error("fit: negative epoch budget");
  if (cfg.anneal_stages < 1) throw data_error("fit: anneal_stages must be >= 1");
  if (!(cfg.damping_init > 0.0) || !(cfg.damping_up > 1.0) ||
      !(cfg.damping_down > 0.0) || !(cfg.damping_down < 1.0)) {
    throw data_error("fit: invalid damping schedule");
  }

  // Holdout split: seeded shuffle, last rows held out.
  const Eigen::Index m_all = d.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m_all));
  std::iota(order.begin(), order.end(), 0);
  const auto holdout =
      static_cast<Eigen::Index>(std::floor(cfg.holdout_fraction * m_all));
  if (holdout > 0) {
    Rng shuffle_rng(derive_seed(cfg.rng_seed, 1));
    for (Eigen::Index i = m_all - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(
          shuffle_rng.uniform_int(0, static_cast<std::uint64_t>(i)));
      std::swap(order[i], order[j]);
    }
  }
  const Eigen::Index m_train = m_all - holdout;
  if (m_train < 1) throw data_error("fit: holdout leaves no training data");
  Eigen::MatrixXd xt(m_train, d.dim()), xh(holdout, d.dim());
  Eigen::VectorXd yt(m_train), yh(holdout);
  for (Eigen::Index i = 0; i < m_train; ++i) {
    xt.row(i) = d.points.row(order[i]);
    yt(i) = d.targets(order[i]);
  }
  for (Eigen::Index i = 0; i < holdout; ++i) {
    xh.row(i) = d.points.row(order[m_train + i]);
    yh(i) = d.targets(order[m_train + i]);
  }
  const Dataset train{xt, yt};

  DlseModel model;
  int stages = 1;
  if (cfg.init) {
    model = *cfg.init;
    validate(model);
    if (model.dim() != d.dim()) {
      throw data_error("fit: initial model dimension does not match data");
    }
    if (cfg.temperature && *cfg.temperature != model.plus.temperature) {
      throw data_error("fit: explicit temperature conflicts with initial model");
    }
  } else {
    model = init_params(train, cfg);
    stages = cfg.anneal_stages;
  }
  const double target_temperature = model.plus.temperature;

  // Continuation warm-up at geometrically shrinking temperatures; each stage
  // hands its model to the next. Only the final solve at the target
  // temperature is reported.
  const int warmup_budget = std::max(50, cfg.max_epochs / 2);
  for (int stage = 0; stage < stages - 1; ++stage) {
    const double mult = std::ldexp(1.0, stages - 1 - stage);  // 2^(stages-1-stage)
    model.plus.temperature = target_temperature * mult;
    model.minus.temperature = model.plus.temperature;
    model = lm_run(std::move(model), xt, yt, cfg, warmup_budget).model;
  }
  model.plus.temperature = target_temperature;
  model.minus.temperature = target_temperature;

  LmOutcome outcome = lm_run(std::move(model), xt, yt, cfg, cfg.max_epochs);

  TrainReport report;
  report.model = std::move(outcome.model);
  report.train_loss = std::move(outcome.losses);
  report.final_train_loss = outcome.final_loss;
  report.epochs = outcome.epochs;
  report.termination = std::move(outcome.termination);
  if (holdout > 0) report.holdout_loss = mse(report.model, xh, yh);
  return report;
}

}  // namespace dlse
