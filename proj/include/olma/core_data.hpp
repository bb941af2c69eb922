#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "olma/tensor.hpp"

namespace olma {

/**
 * A c-channel, T-step real-valued series. Values are stored row-major
 * (step-major), every cell is finite after ingestion, and start_index
 * records the position of row 0 inside the source series so that split
 * segments keep their original step numbering.
 */
struct TimeSeriesFrame {
  std::size_t steps = 0;     // T
  std::size_t channels = 0;  // c
  std::vector<double> values;
  std::vector<std::string> channel_names;
  std::vector<std::string> timestamps;  // optional, from the date column
  std::size_t start_index = 0;

  TimeSeriesFrame() = default;
  TimeSeriesFrame(std::size_t t, std::size_t c)
      : steps(t), channels(c), values(t * c, 0.0) {}

  double& at(std::size_t t, std::size_t ch) { return values[t * channels + ch]; }
  double at(std::size_t t, std::size_t ch) const { return values[t * channels + ch]; }
};

/** Per-channel z-score statistics fitted on the training split. */
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;  // population (1/N) standard deviation, > 0
};

/**
 * Supervised (lookback, horizon) window pairs cut from one frame.
 * Window b covers input steps [origin, origin + l_in) and label steps
 * [origin + l_in, origin + l_in + l_out) with origin = origin_indices[b].
 */
struct WindowSet {
  Tensor3 inputs;  // B x l_in x c
  Tensor3 labels;  // B x l_out x c
  std::vector<std::size_t> origin_indices;
};

/**
 * Reads a comma-separated UTF-8 file with an optional single header row and
 * an optional date column (excluded from the values, kept as timestamps).
 * Any cell that does not parse as a finite real is an error naming the
 * offending row and column; the supported benchmark files are complete, so
 * missing values are never imputed.
 */
TimeSeriesFrame load_csv(const std::string& path, bool has_header,
                         std::optional<std::size_t> date_column);

/**
 * Splits into contiguous train/val/test segments of lengths floor(r*T),
 * with the flooring remainder assigned to test. Each ratio must lie in
 * (0,1) and each resulting segment must be non-empty.
 */
std::array<TimeSeriesFrame, 3> chronological_split(const TimeSeriesFrame& frame,
                                                   const std::array<double, 3>& ratios);

/**
 * Fits per-channel z-score statistics on the training frame (population
 * standard deviation) and applies them to the training frame and every
 * other frame. Returned frames are ordered train first, then the others.
 * A zero-variance training channel is an error naming the channel.
 */
std::pair<NormStats, std::vector<TimeSeriesFrame>> zscore_fit_apply(
    const TimeSeriesFrame& train, const std::vector<TimeSeriesFrame>& others);

TimeSeriesFrame apply_zscore(const TimeSeriesFrame& frame, const NormStats& stats);
TimeSeriesFrame invert_zscore(const TimeSeriesFrame& frame, const NormStats& stats);

/**
 * Cuts B = floor((T - l_in - l_out) / stride) + 1 window pairs, the b-th
 * starting at step b * stride.
 */
WindowSet make_windows(const TimeSeriesFrame& frame, std::size_t l_in,
                       std::size_t l_out, std::size_t stride);

/**
 * Prepends the last l_in rows of the preceding split to a frame, so that
 * every window cut from the result has its label entirely inside the
 * original frame while its input may reach back across the split boundary.
 */
TimeSeriesFrame with_context(const TimeSeriesFrame& prev, const TimeSeriesFrame& frame,
                             std::size_t l_in);

}  // namespace olma
