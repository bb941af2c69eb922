#include "olma/entropy.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "olma/transforms.hpp"

namespace olma {

namespace {

// Equal-width bin index over [lo, hi]; the maximum lands in the last bin.
// A zero-width range collapses to a single occupied bin.
int bin_index(double x, double lo, double hi, int bins) {
  if (!(hi > lo)) return 0;
  const double pos = (x - lo) / (hi - lo) * static_cast<double>(bins);
  int idx = static_cast<int>(pos);
  if (idx < 0) idx = 0;
  if (idx >= bins) idx = bins - 1;
  return idx;
}

double entropy_of_counts(const std::vector<std::int64_t>& counts, std::size_t total) {
  const double l = static_cast<double>(total);
  double h = 0.0;
  for (const std::int64_t n : counts) {
    if (n == 0) continue;
    const double p = static_cast<double>(n) / l;
    h -= p * std::log(p);
  }
  return h;
}

struct SegmentEntropies {
  double original = 0.0;
  double transformed = 0.0;
};

SegmentEntropies scan_segment(const TimeSeriesFrame& frame, std::size_t start,
                              std::size_t seg_len, int bins) {
  SegmentEntropies out;
  std::vector<double> seq(seg_len);
  for (std::size_t ch = 0; ch < frame.channels; ++ch) {
    for (std::size_t t = 0; t < seg_len; ++t) seq[t] = frame.at(start + t, ch);
    out.original += histogram_entropy(seq, bins);
  }

  // Unitary DFT across channels at every step; frequency index k then owns
  // one complex sequence of length seg_len.
  const std::size_t c = frame.channels;
  std::vector<std::vector<std::pair<double, double>>> by_freq(
      c, std::vector<std::pair<double, double>>(seg_len));
  std::vector<double> col(c);
  for (std::size_t t = 0; t < seg_len; ++t) {
    for (std::size_t ch = 0; ch < c; ++ch) col[ch] = frame.at(start + t, ch);
    const Spectrum spec = dft(col, DftNorm::orthonormal);
    for (std::size_t k = 0; k < c; ++k) by_freq[k][t] = {spec.re[k], spec.im[k]};
  }
  for (std::size_t k = 0; k < c; ++k) {
    out.transformed += joint_entropy_2d(by_freq[k], bins);
  }
  return out;
}

EntropyReport scan_impl(const TimeSeriesFrame& frame, std::size_t seg_len, int bins,
                        bool parallel) {
  if (seg_len < 1) throw std::invalid_argument("segment_entropy_scan: seg_len must be >= 1");
  if (frame.steps < seg_len) {
    throw std::invalid_argument("segment_entropy_scan: frame shorter than one segment");
  }
  if (bins < 1) throw std::invalid_argument("segment_entropy_scan: bins must be >= 1");

  const std::size_t n_segments = frame.steps / seg_len;
  std::vector<SegmentEntropies> results(n_segments);
  const auto count = static_cast<std::ptrdiff_t>(n_segments);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      results[static_cast<std::size_t>(s)] =
          scan_segment(frame, static_cast<std::size_t>(s) * seg_len, seg_len, bins);
    }
  } else {
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      results[static_cast<std::size_t>(s)] =
          scan_segment(frame, static_cast<std::size_t>(s) * seg_len, seg_len, bins);
    }
  }

  EntropyReport report;
  report.bins = bins;
  report.segment_length = seg_len;
  report.segment_starts.reserve(n_segments);
  report.original_entropy.reserve(n_segments);
  report.transformed_entropy.reserve(n_segments);
  for (std::size_t s = 0; s < n_segments; ++s) {
    report.segment_starts.push_back(s * seg_len);
    report.original_entropy.push_back(results[s].original);
    report.transformed_entropy.push_back(results[s].transformed);
  }
  return report;
}

}  // namespace

double histogram_entropy(const std::vector<double>& seq, int bins) {
  if (seq.empty()) throw std::invalid_argument("histogram_entropy: empty sequence");
  if (bins < 1) throw std::invalid_argument("histogram_entropy: bins must be >= 1");
  double lo = seq[0];
  double hi = seq[0];
  for (const double x : seq) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  for (const double x : seq) ++counts[static_cast<std::size_t>(bin_index(x, lo, hi, bins))];
  return entropy_of_counts(counts, seq.size());
}

double joint_entropy_2d(const std::vector<std::pair<double, double>>& pairs, int bins) {
  if (pairs.empty()) throw std::invalid_argument("joint_entropy_2d: empty sequence");
  if (bins < 1) throw std::invalid_argument("joint_entropy_2d: bins must be >= 1");
  double lo_a = pairs[0].first, hi_a = pairs[0].first;
  double lo_b = pairs[0].second, hi_b = pairs[0].second;
  for (const auto& [a, b] : pairs) {
    lo_a = std::min(lo_a, a);
    hi_a = std::max(hi_a, a);
    lo_b = std::min(lo_b, b);
    hi_b = std::max(hi_b, b);
  }
  // First-axis-major cells keep the summation order identical to the 1-D
  // estimator when the second axis is degenerate, so the collapse property
  // holds to the last bit.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0);
  for (const auto& [a, b] : pairs) {
    const auto row = static_cast<std::size_t>(bin_index(a, lo_a, hi_a, bins));
    const auto col = static_cast<std::size_t>(bin_index(b, lo_b, hi_b, bins));
    ++counts[row * static_cast<std::size_t>(bins) + col];
  }
  return entropy_of_counts(counts, pairs.size());
}

EntropyReport segment_entropy_scan(const TimeSeriesFrame& frame, std::size_t seg_len,
                                   int bins) {
  return scan_impl(frame, seg_len, bins, true);
}

namespace serial {

EntropyReport segment_entropy_scan(const TimeSeriesFrame& frame, std::size_t seg_len,
                                   int bins) {
  return scan_impl(frame, seg_len, bins, false);
}

}  // namespace serial

double gaussian_marginal_entropy_sum(const Eigen::MatrixXd& cov, std::size_t l) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw std::invalid_argument("gaussian_marginal_entropy_sum: covariance must be square");
  }
  const auto c = cov.rows();
  double log_diag = 0.0;
  for (Eigen::Index i = 0; i < c; ++i) {
    const double v = cov(i, i);
    if (!(v > 0.0)) {
      throw std::invalid_argument(
          "gaussian_marginal_entropy_sum: non-positive variance on the diagonal");
    }
    log_diag += std::log(v);
  }
  const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
  return 0.5 * static_cast<double>(l) *
         (static_cast<double>(c) * std::log(two_pi_e) + log_diag);
}

void to_json(nlohmann::json& j, const EntropyReport& report) {
  nlohmann::json segments = nlohmann::json::array();
  for (std::size_t s = 0; s < report.segment_starts.size(); ++s) {
    segments.push_back({{"start", report.segment_starts[s]},
                        {"original", report.original_entropy[s]},
                        {"transformed", report.transformed_entropy[s]}});
  }
  j = nlohmann::json{{"segment_length", report.segment_length},
                     {"bins", report.bins},
                     {"segments", std::move(segments)}};
}

}  // namespace olma
