#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <vector>

#include "olma/analysis.hpp"
#include "olma/core_data.hpp"
#include "olma/entropy.hpp"
#include "olma/forecaster.hpp"
#include "olma/loss.hpp"
#include "olma/rng.hpp"
#include "olma/theorem.hpp"

// The OpenMP kernels must produce results bit-identical to their serial
// reference twins, and identical to themselves under any thread count.
// Every kernel writes per-slot results and reduces in a fixed serial order,
// so equality here is ==, never a tolerance.

using olma::Tensor3;

namespace {

Tensor3 random_tensor(olma::Rng& rng, std::size_t b, std::size_t l, std::size_t c) {
  Tensor3 t(b, l, c);
  for (double& x : t.data) x = rng.normal();
  return t;
}

olma::TimeSeriesFrame random_frame(olma::Rng& rng, std::size_t steps, std::size_t c) {
  olma::TimeSeriesFrame f(steps, c);
  for (double& v : f.values) v = rng.normal();
  return f;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool both_nan = std::isnan(a[i]) && std::isnan(b[i]);
    if (!both_nan && a[i] != b[i]) return false;
  }
  return true;
}

struct ThreadCountGuard {
  int saved;
  explicit ThreadCountGuard(int n) : saved(omp_get_max_threads()) {
    omp_set_num_threads(n);
  }
  ~ThreadCountGuard() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("loss value and gradient match the serial twin bit for bit") {
  olma::Rng rng(3);
  const Tensor3 pred = random_tensor(rng, 24, 32, 5);
  const Tensor3 label = random_tensor(rng, 24, 32, 5);
  const olma::PredictionPair pair(pred, label);
  const olma::LossSpec spec;

  const olma::LossValueGrad serial_vg = olma::serial::olma_value_and_gradient(pair, spec);
  for (const int threads : {1, 2, 5}) {
    ThreadCountGuard guard(threads);
    const olma::LossValueGrad parallel_vg = olma::olma_value_and_gradient(pair, spec);
    CHECK(parallel_vg.value == serial_vg.value);
    CHECK(same_bits(parallel_vg.gradient.data, serial_vg.gradient.data));
    CHECK(olma::olma_total(pair, spec) == olma::serial::olma_total(pair, spec));
  }
}

TEST_CASE("entropy scan matches the serial twin bit for bit") {
  olma::Rng rng(5);
  const olma::TimeSeriesFrame frame = random_frame(rng, 8 * 64, 6);
  const olma::EntropyReport serial_report = olma::serial::segment_entropy_scan(frame, 64, 16);
  for (const int threads : {1, 3, 7}) {
    ThreadCountGuard guard(threads);
    const olma::EntropyReport parallel_report = olma::segment_entropy_scan(frame, 64, 16);
    CHECK(parallel_report.segment_starts == serial_report.segment_starts);
    CHECK(same_bits(parallel_report.original_entropy, serial_report.original_entropy));
    CHECK(same_bits(parallel_report.transformed_entropy, serial_report.transformed_entropy));
  }
}

TEST_CASE("theorem verification matches the serial twin bit for bit") {
  olma::Rng rng(7);
  Eigen::MatrixXcd g(6, 80);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      g(i, j) = std::complex<double>(rng.normal(), rng.normal());
    }
  }
  const Eigen::MatrixXcd cov = olma::empirical_covariance(g);
  const olma::Theorem1Report serial_report = olma::serial::verify_theorem1(cov, 101);
  for (const int threads : {1, 4}) {
    ThreadCountGuard guard(threads);
    const olma::Theorem1Report parallel_report = olma::verify_theorem1(cov, 101);
    CHECK(parallel_report.diag_product_original == serial_report.diag_product_original);
    CHECK(parallel_report.determinant == serial_report.determinant);
    CHECK(same_bits(parallel_report.diag_product_at_lambda,
                    serial_report.diag_product_at_lambda));
    CHECK(parallel_report.witness_lambda == serial_report.witness_lambda);
  }
}

TEST_CASE("causal matrix matches the serial twin bit for bit") {
  olma::Rng rng(11);
  std::vector<double> x(6000);
  x[0] = rng.normal();
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = 0.7 * x[i - 1] + rng.normal();
  const olma::CausalEffectMatrix serial_m =
      olma::serial::causal_matrix(x, 2, 5, 12, olma::CausalDomain::time);
  for (const int threads : {1, 6}) {
    ThreadCountGuard guard(threads);
    const olma::CausalEffectMatrix parallel_m =
        olma::causal_matrix(x, 2, 5, 12, olma::CausalDomain::time);
    CHECK(same_bits(parallel_m.effects, serial_m.effects));
  }
}

TEST_CASE("band errors are stable across thread counts") {
  olma::Rng rng(13);
  const Tensor3 pred = random_tensor(rng, 40, 48, 3);
  const Tensor3 label = random_tensor(rng, 40, 48, 3);
  ThreadCountGuard one(1);
  const olma::BandErrorReport base =
      olma::band_errors(olma::PredictionPair(pred, label), 4);
  for (const int threads : {2, 5}) {
    ThreadCountGuard guard(threads);
    const olma::BandErrorReport again =
        olma::band_errors(olma::PredictionPair(pred, label), 4);
    CHECK(same_bits(again.band_error, base.band_error));
  }
}

TEST_CASE("training is bit-reproducible across thread counts") {
  olma::Rng rng(17);
  olma::WindowSet train_w, val_w;
  train_w.inputs = random_tensor(rng, 40, 12, 3);
  train_w.labels = random_tensor(rng, 40, 4, 3);
  val_w.inputs = random_tensor(rng, 10, 12, 3);
  val_w.labels = random_tensor(rng, 10, 4, 3);
  const olma::LinearForecaster fresh =
      olma::init_model(olma::ModelKind::decomposed, 12, 4, 3, 5);
  olma::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 23;

  olma::LinearForecaster first_model;
  olma::TrainHistory first_history;
  bool have_first = false;
  for (const int threads : {1, 4}) {
    ThreadCountGuard guard(threads);
    auto [model, history] = olma::train(fresh, train_w, val_w,
                                        olma::TrainObjective::olma_loss({}), cfg);
    if (!have_first) {
      first_model = model;
      first_history = history;
      have_first = true;
      continue;
    }
    CHECK(model.trend_weights == first_model.trend_weights);
    CHECK(model.trend_bias == first_model.trend_bias);
    CHECK(model.seasonal_weights == first_model.seasonal_weights);
    CHECK(model.seasonal_bias == first_model.seasonal_bias);
    CHECK(history.epoch_train_loss == first_history.epoch_train_loss);
    CHECK(history.epoch_val_loss == first_history.epoch_val_loss);
  }
}

TEST_CASE("forward passes are stable across thread counts") {
  olma::Rng rng(19);
  const olma::LinearForecaster model = olma::init_model(olma::ModelKind::plain, 16, 8, 4);
  const Tensor3 inputs = random_tensor(rng, 64, 16, 4);
  ThreadCountGuard one(1);
  const Tensor3 base = olma::forward(model, inputs);
  for (const int threads : {3, 8}) {
    ThreadCountGuard guard(threads);
    const Tensor3 again = olma::forward(model, inputs);
    CHECK(same_bits(again.data, base.data));
  }
}
