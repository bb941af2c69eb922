#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace olma {

/**
 * Dense row-major rank-3 tensor indexed as (item, step, channel).
 * Batches of forecasting windows are stored this way throughout:
 * inputs are B x l_in x c, predictions and labels B x l_out x c.
 */
struct Tensor3 {
  std::size_t items = 0;
  std::size_t steps = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t b, std::size_t l, std::size_t c)
      : items(b), steps(l), channels(c), data(b * l * c, 0.0) {}

  double& operator()(std::size_t b, std::size_t t, std::size_t ch) {
    return data[(b * steps + t) * channels + ch];
  }
  double operator()(std::size_t b, std::size_t t, std::size_t ch) const {
    return data[(b * steps + t) * channels + ch];
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor3& o) const {
    return items == o.items && steps == o.steps && channels == o.channels;
  }
};

inline void require_same_shape(const Tensor3& a, const Tensor3& b,
                               const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": tensor shapes differ");
  }
}

}  // namespace olma
