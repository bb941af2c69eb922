#pragma once

#include <cstddef>

#include "olma/tensor.hpp"

namespace olma {

enum class TimeLoss { mse, mae };

/**
 * Weights and switches for the frequency-domain loss
 *
 *   L = alpha * L_channel + beta * L_fourier + gamma * L_wavelet
 *
 * where L_channel measures spectral misalignment across channels at each
 * step, and L_fourier / L_wavelet measure it along time per channel. The
 * three weights must be non-negative and sum to 1 (within 1e-9) when both
 * the channel and temporal terms are enabled; a disabled term contributes
 * nothing and lifts the constraint. smoothing_eps regularizes the modulus
 * in gradients only: |z|_eps = sqrt(|z|^2 + eps^2).
 */
struct LossSpec {
  double alpha = 0.34;
  double beta = 0.33;
  double gamma = 0.33;
  bool include_channel = true;
  bool include_temporal = true;
  double smoothing_eps = 1e-12;

  // Alternative weighting for data whose channel spectrum carries more
  // entropy than its time series, shifting mass to the temporal terms.
  static LossSpec high_entropy_preset() {
    LossSpec s;
    s.alpha = 0.1;
    s.beta = 0.45;
    s.gamma = 0.45;
    return s;
  }

  void validate() const;  // throws std::invalid_argument on violation
};

/** Shape-checked view over a (prediction, label) tensor pair. */
struct PredictionPair {
  const Tensor3& prediction;
  const Tensor3& label;

  PredictionPair(const Tensor3& pred, const Tensor3& lab);
};

struct TemporalTerms {
  double fourier = 0.0;
  double wavelet = 0.0;
};

struct LossValueGrad {
  double value = 0.0;
  Tensor3 gradient;
};

/** Mean squared or absolute error over every element of the pair. */
double time_domain_loss(const PredictionPair& pair, TimeLoss kind);

/** Gradient of time_domain_loss with respect to the prediction. */
Tensor3 time_domain_gradient(const PredictionPair& pair, TimeLoss kind);

/**
 * Channel-axis spectral L1: at every step the unnormalized DFT is taken
 * across channels and the complex moduli of the coefficient differences are
 * summed. Sum within a batch item, mean over items; the caller applies
 * alpha.
 */
double olma_channel_loss(const PredictionPair& pair);

/**
 * Temporal-axis terms per channel: L1 of the unnormalized DFT coefficient
 * differences (fourier) and L1 of the single-level Haar coefficient
 * differences (wavelet). Sum within item, mean over items; beta and gamma
 * applied by the caller. The wavelet term requires an even horizon.
 */
TemporalTerms olma_temporal_loss(const PredictionPair& pair);

/** The weighted combination alpha*channel + beta*fourier + gamma*wavelet. */
double olma_total(const PredictionPair& pair, const LossSpec& spec);

/**
 * Gradient of olma_total with respect to the prediction. Each term's
 * gradient is the transform adjoint applied to the elementwise subgradient
 * z / |z|_eps of its coefficients, so it agrees with central finite
 * differences away from (and smoothly through) the kinks at zero.
 */
Tensor3 olma_gradient(const PredictionPair& pair, const LossSpec& spec);

/** olma_total and olma_gradient in one pass over the transforms. */
LossValueGrad olma_value_and_gradient(const PredictionPair& pair, const LossSpec& spec);

namespace serial {
double olma_total(const PredictionPair& pair, const LossSpec& spec);
LossValueGrad olma_value_and_gradient(const PredictionPair& pair, const LossSpec& spec);
}  // namespace serial

}  // namespace olma
