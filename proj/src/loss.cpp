#include "olma/loss.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "olma/transforms.hpp"

namespace olma {

namespace {

using cplx = std::complex<double>;

struct ItemTerms {
  double channel = 0.0;
  double fourier = 0.0;
  double wavelet = 0.0;
};

// Evaluates one batch item of the difference tensor. Values use the exact
// modulus; gradients use the eps-smoothed modulus and land in grad scaled by
// grad_w = {alpha/B, beta/B, gamma/B}. grad may be null for value-only runs.
ItemTerms eval_item(const Tensor3& diff, std::size_t b, const LossSpec& spec,
                    const double* grad_w, Tensor3* grad) {
  const std::size_t l = diff.steps;
  const std::size_t c = diff.channels;
  const double eps2 = spec.smoothing_eps * spec.smoothing_eps;
  ItemTerms out;

  if (spec.include_channel) {
    const DftPlan& plan = plan_for(c);
    std::vector<cplx> in(c), z(c), adj(c);
    for (std::size_t t = 0; t < l; ++t) {
      for (std::size_t ch = 0; ch < c; ++ch) in[ch] = {diff(b, t, ch), 0.0};
      plan.forward(in.data(), z.data());
      for (std::size_t k = 0; k < c; ++k) out.channel += std::abs(z[k]);
      if (grad) {
        // d/dx sum_k |(Ax)_k|_eps = Re(A^H g) with g_k = z_k / |z_k|_eps,
        // and A^H g = conj(A conj(g)) for the symmetric DFT matrix A.
        for (std::size_t k = 0; k < c; ++k) {
          const double m = std::sqrt(std::norm(z[k]) + eps2);
          in[k] = std::conj(z[k]) / m;
        }
        plan.forward(in.data(), adj.data());
        for (std::size_t ch = 0; ch < c; ++ch) {
          (*grad)(b, t, ch) += grad_w[0] * adj[ch].real();
        }
      }
    }
  }

  if (spec.include_temporal) {
    const DftPlan& plan = plan_for(l);
    std::vector<cplx> in(l), z(l), adj(l);
    std::vector<double> seq(l);
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t t = 0; t < l; ++t) {
        seq[t] = diff(b, t, ch);
        in[t] = {seq[t], 0.0};
      }
      plan.forward(in.data(), z.data());
      for (std::size_t k = 0; k < l; ++k) out.fourier += std::abs(z[k]);
      if (grad) {
        for (std::size_t k = 0; k < l; ++k) {
          const double m = std::sqrt(std::norm(z[k]) + eps2);
          in[k] = std::conj(z[k]) / m;
        }
        plan.forward(in.data(), adj.data());
        for (std::size_t t = 0; t < l; ++t) {
          (*grad)(b, t, ch) += grad_w[1] * adj[t].real();
        }
      }

      WaveletCoeffs w = haar_dwt(seq);
      for (const double v : w.cA) out.wavelet += std::abs(v);
      for (const double v : w.cD) out.wavelet += std::abs(v);
      if (grad) {
        // The Haar transform is orthogonal, so its adjoint is the inverse.
        for (double& v : w.cA) v /= std::sqrt(v * v + eps2);
        for (double& v : w.cD) v /= std::sqrt(v * v + eps2);
        const std::vector<double> rec = haar_idwt(w);
        for (std::size_t t = 0; t < l; ++t) {
          (*grad)(b, t, ch) += grad_w[2] * rec[t];
        }
      }
    }
  }
  return out;
}

Tensor3 difference(const PredictionPair& pair) {
  const Tensor3& p = pair.prediction;
  Tensor3 d(p.items, p.steps, p.channels);
  for (std::size_t i = 0; i < d.size(); ++i) d.data[i] = p.data[i] - pair.label.data[i];
  return d;
}

void check_temporal_shape(const LossSpec& spec, const Tensor3& diff) {
  if (spec.include_temporal && diff.steps % 2 != 0) {
    throw std::invalid_argument(
        "olma loss: the wavelet term needs an even horizon, got " +
        std::to_string(diff.steps));
  }
}

struct BatchResult {
  ItemTerms mean;  // per-term batch means
  Tensor3 gradient;

  double weighted(const LossSpec& spec) const {
    return spec.alpha * mean.channel + spec.beta * mean.fourier +
           spec.gamma * mean.wavelet;
  }
};

// Shared batch loop: per-item terms go into slots, the slot reduction runs
// serially in item order, so the result is the same for any thread count.
BatchResult run_batch(const PredictionPair& pair, const LossSpec& spec,
                      bool with_grad, bool parallel) {
  spec.validate();
  const Tensor3 diff = difference(pair);
  if (diff.items == 0 || diff.steps == 0 || diff.channels == 0) {
    throw std::invalid_argument("olma loss: empty prediction tensor");
  }
  check_temporal_shape(spec, diff);

  const std::size_t items = diff.items;
  BatchResult out;
  if (with_grad) out.gradient = Tensor3(items, diff.steps, diff.channels);
  const double inv_b = 1.0 / static_cast<double>(items);
  const double grad_w[3] = {spec.alpha * inv_b, spec.beta * inv_b, spec.gamma * inv_b};
  Tensor3* grad = with_grad ? &out.gradient : nullptr;

  std::vector<ItemTerms> terms(items);
  const auto count = static_cast<std::ptrdiff_t>(items);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < count; ++b) {
      terms[static_cast<std::size_t>(b)] =
          eval_item(diff, static_cast<std::size_t>(b), spec, grad_w, grad);
    }
  } else {
    for (std::ptrdiff_t b = 0; b < count; ++b) {
      terms[static_cast<std::size_t>(b)] =
          eval_item(diff, static_cast<std::size_t>(b), spec, grad_w, grad);
    }
  }

  for (const ItemTerms& t : terms) {
    out.mean.channel += t.channel;
    out.mean.fourier += t.fourier;
    out.mean.wavelet += t.wavelet;
  }
  out.mean.channel *= inv_b;
  out.mean.fourier *= inv_b;
  out.mean.wavelet *= inv_b;
  return out;
}

}  // namespace

void LossSpec::validate() const {
  if (!(smoothing_eps > 0.0)) {
    throw std::invalid_argument("LossSpec: smoothing_eps must be positive");
  }
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
    throw std::invalid_argument("LossSpec: weights must be non-negative");
  }
  if (include_channel && include_temporal &&
      std::abs(alpha + beta + gamma - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "LossSpec: alpha + beta + gamma must equal 1 when all terms are enabled");
  }
}

PredictionPair::PredictionPair(const Tensor3& pred, const Tensor3& lab)
    : prediction(pred), label(lab) {
  require_same_shape(pred, lab, "prediction/label");
}

double time_domain_loss(const PredictionPair& pair, TimeLoss kind) {
  const Tensor3& p = pair.prediction;
  const Tensor3& y = pair.label;
  if (p.size() == 0) throw std::invalid_argument("time_domain_loss: empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.data[i] - y.data[i];
    acc += kind == TimeLoss::mse ? d * d : std::abs(d);
  }
  return acc / static_cast<double>(p.size());
}

Tensor3 time_domain_gradient(const PredictionPair& pair, TimeLoss kind) {
  const Tensor3& p = pair.prediction;
  if (p.size() == 0) throw std::invalid_argument("time_domain_gradient: empty tensors");
  Tensor3 g(p.items, p.steps, p.channels);
  const double inv_n = 1.0 / static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.data[i] - pair.label.data[i];
    if (kind == TimeLoss::mse) {
      g.data[i] = 2.0 * d * inv_n;
    } else {
      g.data[i] = d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
    }
  }
  return g;
}

double olma_channel_loss(const PredictionPair& pair) {
  LossSpec spec;
  spec.include_channel = true;
  spec.include_temporal = false;
  return run_batch(pair, spec, false, true).mean.channel;
}

TemporalTerms olma_temporal_loss(const PredictionPair& pair) {
  LossSpec spec;
  spec.include_channel = false;
  spec.include_temporal = true;
  const BatchResult r = run_batch(pair, spec, false, true);
  return {r.mean.fourier, r.mean.wavelet};
}

double olma_total(const PredictionPair& pair, const LossSpec& spec) {
  return run_batch(pair, spec, false, true).weighted(spec);
}

Tensor3 olma_gradient(const PredictionPair& pair, const LossSpec& spec) {
  return run_batch(pair, spec, true, true).gradient;
}

LossValueGrad olma_value_and_gradient(const PredictionPair& pair, const LossSpec& spec) {
  BatchResult r = run_batch(pair, spec, true, true);
  return {r.weighted(spec), std::move(r.gradient)};
}

namespace serial {

double olma_total(const PredictionPair& pair, const LossSpec& spec) {
  return run_batch(pair, spec, false, false).weighted(spec);
}

LossValueGrad olma_value_and_gradient(const PredictionPair& pair, const LossSpec& spec) {
  BatchResult r = run_batch(pair, spec, true, false);
  return {r.weighted(spec), std::move(r.gradient)};
}

}  // namespace serial

}  // namespace olma
