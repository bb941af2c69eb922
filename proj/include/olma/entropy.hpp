#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "olma/core_data.hpp"

namespace olma {

/// Per-segment entropies of a frame before and after the channel-wise DFT.
/// All entropies are in nats.
struct EntropyReport {
  std::vector<std::size_t> segment_starts;
  std::vector<double> original_entropy;
  std::vector<double> transformed_entropy;
  int bins = 0;
  std::size_t segment_length = 0;
};

void to_json(nlohmann::json& j, const EntropyReport& report);

/// Histogram entropy H = -sum p_k ln p_k with p_k = n_k / l over M
/// equal-width bins spanning [min, max] of the sequence; the maximum falls
/// into the last bin and a constant sequence has entropy 0 by convention.
double histogram_entropy(const std::vector<double>& seq, int bins);

/// Joint histogram entropy over an M x M grid with per-axis [min, max]
/// ranges. A degenerate axis collapses to a single bin, so pairs with a
/// constant second coordinate reproduce histogram_entropy of the first
/// coordinate exactly.
double joint_entropy_2d(const std::vector<std::pair<double, double>>& pairs, int bins);

/// Scans non-overlapping segments of length seg_len. Per segment, the
/// original entropy sums histogram_entropy over channels; the transformed
/// entropy applies the orthonormal DFT along the channel axis at each step
/// and sums joint_entropy_2d of each frequency index's (re, im) sequence.
EntropyReport segment_entropy_scan(const TimeSeriesFrame& frame, std::size_t seg_len,
                                   int bins);

/// Sum of the marginal differential entropies of a length-l stationary
/// Gaussian process with channel covariance cov:
/// (l/2) * ln((2*pi*e)^c * prod_i cov[i][i]) nats.
double gaussian_marginal_entropy_sum(const Eigen::MatrixXd& cov, std::size_t l);

/// Conversion helper for base-2 reporting.
inline double nats_to_bits(double nats) { return nats / 0.6931471805599453; }

namespace serial {
/// Single-threaded reference for the segment scan.
EntropyReport segment_entropy_scan(const TimeSeriesFrame& frame, std::size_t seg_len,
                                   int bins);
}  // namespace serial

}  // namespace olma
