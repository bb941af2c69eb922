#include "olma/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "olma/rng.hpp"

namespace olma {

namespace {

void affine_apply(const std::vector<double>& weights, const std::vector<double>& bias,
                  const Tensor3& features, Tensor3& out) {
  const std::size_t l_in = features.steps;
  const std::size_t l_out = out.steps;
  const std::size_t c = features.channels;
  const auto items = static_cast<std::ptrdiff_t>(features.items);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < items; ++bi) {
    const auto b = static_cast<std::size_t>(bi);
    for (std::size_t t = 0; t < l_out; ++t) {
      const double* row = weights.data() + t * l_in;
      for (std::size_t ch = 0; ch < c; ++ch) {
        double acc = bias[t];
        for (std::size_t s = 0; s < l_in; ++s) acc += row[s] * features(b, s, ch);
        out(b, t, ch) += acc;
      }
    }
  }
}

Tensor3 forward_from_features(const LinearForecaster& model, const Tensor3& trend,
                              const Tensor3* seasonal) {
  Tensor3 out(trend.items, model.l_out, trend.channels);
  affine_apply(model.trend_weights, model.trend_bias, trend, out);
  if (seasonal) {
    affine_apply(model.seasonal_weights, model.seasonal_bias, *seasonal, out);
  }
  return out;
}

void check_input_shape(const LinearForecaster& model, const Tensor3& inputs) {
  if (inputs.steps != model.l_in || inputs.channels != model.channels) {
    throw std::invalid_argument("forward: input window shape does not match the model");
  }
}

double objective_value(const TrainObjective& objective, const Tensor3& pred,
                       const Tensor3& label) {
  const PredictionPair pair(pred, label);
  switch (objective.kind) {
    case TrainObjective::Kind::time_mse:
      return time_domain_loss(pair, TimeLoss::mse);
    case TrainObjective::Kind::time_mae:
      return time_domain_loss(pair, TimeLoss::mae);
    case TrainObjective::Kind::olma:
      return olma_total(pair, objective.spec);
  }
  throw std::logic_error("objective_value: unknown kind");
}

LossValueGrad objective_value_grad(const TrainObjective& objective, const Tensor3& pred,
                                   const Tensor3& label) {
  const PredictionPair pair(pred, label);
  switch (objective.kind) {
    case TrainObjective::Kind::time_mse:
      return {time_domain_loss(pair, TimeLoss::mse),
              time_domain_gradient(pair, TimeLoss::mse)};
    case TrainObjective::Kind::time_mae:
      return {time_domain_loss(pair, TimeLoss::mae),
              time_domain_gradient(pair, TimeLoss::mae)};
    case TrainObjective::Kind::olma:
      return olma_value_and_gradient(pair, objective.spec);
  }
  throw std::logic_error("objective_value_grad: unknown kind");
}

// dL/dW[t][s] = sum_{b,ch} G(b,t,ch) * F(b,s,ch), dL/dbias[t] = sum_{b,ch} G(b,t,ch).
// Each (t, s) cell reduces over the batch in index order, so the result does
// not depend on how the cells are distributed over threads.
void accumulate_affine_grads(const Tensor3& out_grad, const Tensor3& features,
                             std::vector<double>& w_grad, std::vector<double>& b_grad) {
  const std::size_t l_in = features.steps;
  const std::size_t l_out = out_grad.steps;
  const std::size_t c = features.channels;
  const std::size_t items = features.items;
  const auto cells = static_cast<std::ptrdiff_t>(l_out * l_in);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
    const std::size_t t = static_cast<std::size_t>(cell) / l_in;
    const std::size_t s = static_cast<std::size_t>(cell) % l_in;
    double acc = 0.0;
    for (std::size_t b = 0; b < items; ++b) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        acc += out_grad(b, t, ch) * features(b, s, ch);
      }
    }
    w_grad[static_cast<std::size_t>(cell)] = acc;
  }
  const auto rows = static_cast<std::ptrdiff_t>(l_out);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ti = 0; ti < rows; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    double acc = 0.0;
    for (std::size_t b = 0; b < items; ++b) {
      for (std::size_t ch = 0; ch < c; ++ch) acc += out_grad(b, t, ch);
    }
    b_grad[t] = acc;
  }
}

struct ParamState {
  std::vector<double>* param = nullptr;
  std::vector<double> grad;
  std::vector<double> m1;
  std::vector<double> m2;
};

void optimizer_step(std::vector<ParamState>& params, const TrainConfig& cfg, int step) {
  for (ParamState& p : params) {
    std::vector<double>& w = *p.param;
    if (cfg.optimizer == Optimizer::sgd) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] -= cfg.learning_rate * p.grad[i];
      }
      continue;
    }
    const double c1 = 1.0 - std::pow(cfg.moment_decay1, step);
    const double c2 = 1.0 - std::pow(cfg.moment_decay2, step);
    for (std::size_t i = 0; i < w.size(); ++i) {
      p.m1[i] = cfg.moment_decay1 * p.m1[i] + (1.0 - cfg.moment_decay1) * p.grad[i];
      p.m2[i] = cfg.moment_decay2 * p.m2[i] +
                (1.0 - cfg.moment_decay2) * p.grad[i] * p.grad[i];
      const double m_hat = p.m1[i] / c1;
      const double v_hat = p.m2[i] / c2;
      w[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.moment_eps);
    }
  }
}

Tensor3 gather_rows(const Tensor3& src, const std::vector<std::size_t>& order,
                    std::size_t first, std::size_t count) {
  Tensor3 out(count, src.steps, src.channels);
  const std::size_t row = src.steps * src.channels;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t b = order[first + i];
    std::copy(src.data.begin() + static_cast<std::ptrdiff_t>(b * row),
              src.data.begin() + static_cast<std::ptrdiff_t>((b + 1) * row),
              out.data.begin() + static_cast<std::ptrdiff_t>(i * row));
  }
  return out;
}

// Chunked full-set loss so validation never materializes one huge prediction
// tensor. Chunks weight the mean by item count, in fixed order.
double full_set_loss(const LinearForecaster& model, const WindowSet& windows,
                     const TrainObjective& objective) {
  const std::size_t total = windows.inputs.items;
  const std::size_t chunk = 256;
  double acc = 0.0;
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  for (std::size_t start = 0; start < total; start += chunk) {
    const std::size_t n = std::min(chunk, total - start);
    const Tensor3 x = gather_rows(windows.inputs, order, start, n);
    const Tensor3 y = gather_rows(windows.labels, order, start, n);
    const Tensor3 pred = forward(model, x);
    acc += objective_value(objective, pred, y) * static_cast<double>(n);
  }
  return acc / static_cast<double>(total);
}

}  // namespace

std::pair<Tensor3, Tensor3> moving_average_decompose(const Tensor3& x, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw std::invalid_argument("moving_average_decompose: kernel must be odd and >= 1");
  }
  if (static_cast<std::size_t>(kernel) > 2 * x.steps - 1) {
    throw std::invalid_argument("moving_average_decompose: kernel larger than 2l-1");
  }
  Tensor3 trend(x.items, x.steps, x.channels);
  Tensor3 seasonal(x.items, x.steps, x.channels);
  const int l = static_cast<int>(x.steps);
  const int half = kernel / 2;
  const double inv_k = 1.0 / static_cast<double>(kernel);
  const auto items = static_cast<std::ptrdiff_t>(x.items);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < items; ++bi) {
    const auto b = static_cast<std::size_t>(bi);
    for (int t = 0; t < l; ++t) {
      for (std::size_t ch = 0; ch < x.channels; ++ch) {
        double acc = 0.0;
        for (int j = t - half; j <= t + half; ++j) {
          const int idx = j < 0 ? 0 : (j >= l ? l - 1 : j);
          acc += x(b, static_cast<std::size_t>(idx), ch);
        }
        trend(b, static_cast<std::size_t>(t), ch) = acc * inv_k;
        seasonal(b, static_cast<std::size_t>(t), ch) =
            x(b, static_cast<std::size_t>(t), ch) -
            trend(b, static_cast<std::size_t>(t), ch);
      }
    }
  }
  return {std::move(trend), std::move(seasonal)};
}

LinearForecaster init_model(ModelKind kind, std::size_t l_in, std::size_t l_out,
                            std::size_t channels, int ma_kernel, std::uint64_t) {
  if (l_in < 1 || l_out < 1 || channels < 1) {
    throw std::invalid_argument("init_model: dimensions must be >= 1");
  }
  if (kind == ModelKind::decomposed) {
    if (ma_kernel < 1 || ma_kernel % 2 == 0) {
      throw std::invalid_argument("init_model: ma_kernel must be odd and >= 1");
    }
    if (static_cast<std::size_t>(ma_kernel) > 2 * l_in - 1) {
      throw std::invalid_argument("init_model: ma_kernel larger than 2*l_in-1");
    }
  }
  LinearForecaster m;
  m.kind = kind;
  m.l_in = l_in;
  m.l_out = l_out;
  m.channels = channels;
  m.ma_kernel = ma_kernel;
  const double w0 = 1.0 / static_cast<double>(l_in);
  m.trend_weights.assign(l_out * l_in, w0);
  m.trend_bias.assign(l_out, 0.0);
  if (kind == ModelKind::decomposed) {
    m.seasonal_weights.assign(l_out * l_in, w0);
    m.seasonal_bias.assign(l_out, 0.0);
  }
  return m;
}

Tensor3 forward(const LinearForecaster& model, const Tensor3& inputs) {
  check_input_shape(model, inputs);
  if (model.kind == ModelKind::plain) {
    return forward_from_features(model, inputs, nullptr);
  }
  const auto [trend, seasonal] = moving_average_decompose(inputs, model.ma_kernel);
  return forward_from_features(model, trend, &seasonal);
}

std::pair<LinearForecaster, TrainHistory> train(const LinearForecaster& model,
                                                const WindowSet& train_windows,
                                                const WindowSet& val_windows,
                                                const TrainObjective& objective,
                                                const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate <= 0");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (cfg.patience < 0) throw std::invalid_argument("train: patience must be >= 0");
  check_input_shape(model, train_windows.inputs);
  check_input_shape(model, val_windows.inputs);
  if (train_windows.inputs.items == 0 || val_windows.inputs.items == 0) {
    throw std::invalid_argument("train: empty window set");
  }
  if (train_windows.labels.steps != model.l_out ||
      val_windows.labels.steps != model.l_out) {
    throw std::invalid_argument("train: label horizon does not match the model");
  }

  LinearForecaster current = model;
  LinearForecaster best = model;
  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  int step = 0;

  const bool decomposed = current.kind == ModelKind::decomposed;
  std::vector<ParamState> params;
  params.push_back({&current.trend_weights, {}, {}, {}});
  params.push_back({&current.trend_bias, {}, {}, {}});
  if (decomposed) {
    params.push_back({&current.seasonal_weights, {}, {}, {}});
    params.push_back({&current.seasonal_bias, {}, {}, {}});
  }
  for (ParamState& p : params) {
    p.grad.assign(p.param->size(), 0.0);
    p.m1.assign(p.param->size(), 0.0);
    p.m2.assign(p.param->size(), 0.0);
  }

  const std::size_t n = train_windows.inputs.items;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(cfg.seed);
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      const Tensor3 x = gather_rows(train_windows.inputs, order, start, count);
      const Tensor3 y = gather_rows(train_windows.labels, order, start, count);

      Tensor3 trend = x;
      Tensor3 seasonal;
      if (decomposed) {
        auto parts = moving_average_decompose(x, current.ma_kernel);
        trend = std::move(parts.first);
        seasonal = std::move(parts.second);
      }
      const Tensor3 pred =
          forward_from_features(current, trend, decomposed ? &seasonal : nullptr);
      LossValueGrad vg = objective_value_grad(objective, pred, y);
      if (!std::isfinite(vg.value)) {
        throw std::runtime_error("train: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batches));
      }
      epoch_loss += vg.value;
      ++batches;

      accumulate_affine_grads(vg.gradient, trend, params[0].grad, params[1].grad);
      if (decomposed) {
        accumulate_affine_grads(vg.gradient, seasonal, params[2].grad, params[3].grad);
      }
      ++step;
      optimizer_step(params, cfg, step);
    }

    history.epoch_train_loss.push_back(epoch_loss / static_cast<double>(batches));
    const double val = full_set_loss(current, val_windows, objective);
    history.epoch_val_loss.push_back(val);

    if (val < best_val) {
      best_val = val;
      best = current;
      history.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
      if (cfg.patience > 0 && since_best >= cfg.patience) break;
    }
  }
  return {std::move(best), std::move(history)};
}

std::pair<double, double> evaluate(const LinearForecaster& model,
                                   const WindowSet& windows) {
  check_input_shape(model, windows.inputs);
  const std::size_t total = windows.inputs.items;
  if (total == 0) throw std::invalid_argument("evaluate: empty window set");
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  const std::size_t chunk = 256;
  double sq = 0.0;
  double ab = 0.0;
  std::size_t count = 0;
  for (std::size_t start = 0; start < total; start += chunk) {
    const std::size_t m = std::min(chunk, total - start);
    const Tensor3 x = gather_rows(windows.inputs, order, start, m);
    const Tensor3 y = gather_rows(windows.labels, order, start, m);
    const Tensor3 pred = forward(model, x);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred.data[i] - y.data[i];
      sq += d * d;
      ab += std::abs(d);
    }
    count += pred.size();
  }
  return {sq / static_cast<double>(count), ab / static_cast<double>(count)};
}

void save_checkpoint(const LinearForecaster& model, const std::string& path) {
  nlohmann::json j{
      {"kind", model.kind == ModelKind::plain ? "plain" : "decomposed"},
      {"l_in", model.l_in},
      {"l_out", model.l_out},
      {"channels", model.channels},
      {"ma_kernel", model.ma_kernel},
      {"trend_weights", model.trend_weights},
      {"trend_bias", model.trend_bias},
      {"seasonal_weights", model.seasonal_weights},
      {"seasonal_bias", model.seasonal_bias},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

LinearForecaster load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  LinearForecaster m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "plain") {
    m.kind = ModelKind::plain;
  } else if (kind == "decomposed") {
    m.kind = ModelKind::decomposed;
  } else {
    throw std::runtime_error("load_checkpoint: unknown kind '" + kind + "'");
  }
  m.l_in = j.at("l_in").get<std::size_t>();
  m.l_out = j.at("l_out").get<std::size_t>();
  m.channels = j.at("channels").get<std::size_t>();
  m.ma_kernel = j.at("ma_kernel").get<int>();
  m.trend_weights = j.at("trend_weights").get<std::vector<double>>();
  m.trend_bias = j.at("trend_bias").get<std::vector<double>>();
  m.seasonal_weights = j.at("seasonal_weights").get<std::vector<double>>();
  m.seasonal_bias = j.at("seasonal_bias").get<std::vector<double>>();
  if (m.trend_weights.size() != m.l_out * m.l_in || m.trend_bias.size() != m.l_out) {
    throw std::runtime_error("load_checkpoint: weight shapes are inconsistent");
  }
  if (m.kind == ModelKind::decomposed &&
      (m.seasonal_weights.size() != m.l_out * m.l_in ||
       m.seasonal_bias.size() != m.l_out)) {
    throw std::runtime_error("load_checkpoint: seasonal shapes are inconsistent");
  }
  return m;
}

}  // namespace olma
