#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "olma/core_data.hpp"
#include "olma/loss.hpp"
#include "olma/tensor.hpp"

namespace olma {

enum class ModelKind { plain, decomposed };

/**
 * Linear map from lookback window to forecast horizon, applied to every
 * channel with shared weights. The plain kind is a single affine map held
 * in the trend arrays. The decomposed kind splits each input window into a
 * moving-average trend and a seasonal remainder and gives each branch its
 * own affine map; the forecast is the sum of both branches.
 */
struct LinearForecaster {
  ModelKind kind = ModelKind::plain;
  std::size_t l_in = 0;
  std::size_t l_out = 0;
  std::size_t channels = 0;
  int ma_kernel = 25;

  std::vector<double> trend_weights;  // row-major l_out x l_in
  std::vector<double> trend_bias;     // l_out
  std::vector<double> seasonal_weights;
  std::vector<double> seasonal_bias;
};

enum class Optimizer { sgd, adaptive_moments };

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 20;
  int batch_size = 32;
  int patience = 3;  // 0 disables early stopping
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::adaptive_moments;
  double moment_decay1 = 0.9;
  double moment_decay2 = 0.999;
  double moment_eps = 1e-8;
};

/** What the trainer minimizes: a time-domain baseline or the spectral loss. */
struct TrainObjective {
  enum class Kind { time_mse, time_mae, olma };
  Kind kind = Kind::time_mse;
  LossSpec spec;  // consulted only when kind == olma

  static TrainObjective mse() { return {Kind::time_mse, {}}; }
  static TrainObjective mae() { return {Kind::time_mae, {}}; }
  static TrainObjective olma_loss(const LossSpec& s) { return {Kind::olma, s}; }
};

struct TrainHistory {
  std::vector<double> epoch_train_loss;  // mean of mini-batch losses, pre-step
  std::vector<double> epoch_val_loss;    // full validation loss after the epoch
  int best_epoch = 0;                    // index of the minimum val loss
};

/**
 * Splits each (item, channel) series into a centered moving-average trend
 * and the seasonal remainder x - trend. Windows past the ends replicate
 * the edge value. kernel must be odd and at most 2*steps - 1.
 */
std::pair<Tensor3, Tensor3> moving_average_decompose(const Tensor3& x, int kernel);

/**
 * Fresh model with every weight set to 1/l_in and zero biases, so the
 * initial predictor is the window average and runs are reproducible
 * without a weight RNG. The seed is accepted for interface stability and
 * currently unused.
 */
LinearForecaster init_model(ModelKind kind, std::size_t l_in, std::size_t l_out,
                            std::size_t channels, int ma_kernel = 25,
                            std::uint64_t seed = 0);

/** Applies the model to a batch of input windows. */
Tensor3 forward(const LinearForecaster& model, const Tensor3& inputs);

/**
 * Mini-batch gradient descent on the objective. Batches are drawn in a
 * seeded shuffled order each epoch; gradients are hand-derived through the
 * affine maps. Early stopping watches the validation loss with the given
 * patience, and the returned model carries the best-validation-epoch
 * weights. Identical configs and seeds give bit-identical histories for
 * any thread count.
 */
std::pair<LinearForecaster, TrainHistory> train(const LinearForecaster& model,
                                                const WindowSet& train_windows,
                                                const WindowSet& val_windows,
                                                const TrainObjective& objective,
                                                const TrainConfig& cfg);

/** (mse, mae) over all elements of all windows. */
std::pair<double, double> evaluate(const LinearForecaster& model,
                                   const WindowSet& windows);

/** JSON checkpoint round-trip; layout documented in the README. */
void save_checkpoint(const LinearForecaster& model, const std::string& path);
LinearForecaster load_checkpoint(const std::string& path);

}  // namespace olma
