#include "olma/core_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace olma {

namespace {

// Splits one CSV line on commas. Leading/trailing whitespace and a trailing
// carriage return are trimmed per cell; quoting is not supported (none of
// the supported datasets use it).
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string cell = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ' || cell.back() == '\t')) {
      cell.pop_back();
    }
    std::size_t lead = 0;
    while (lead < cell.size() && (cell[lead] == ' ' || cell[lead] == '\t')) ++lead;
    cells.push_back(cell.substr(lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::runtime_error("load_csv: cell at row " + std::to_string(row) +
                             ", column " + std::to_string(col) + " is not a real number: '" +
                             cell + "'");
  }
  if (!std::isfinite(value)) {
    throw std::runtime_error("load_csv: non-finite value at row " + std::to_string(row) +
                             ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace

TimeSeriesFrame load_csv(const std::string& path, bool has_header,
                         std::optional<std::size_t> date_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  TimeSeriesFrame frame;
  std::string line;
  std::size_t row = 0;
  std::size_t n_cols = 0;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    if (row == 0) {
      n_cols = cells.size();
      if (date_column && *date_column >= n_cols) {
        throw std::runtime_error("load_csv: date column index out of range");
      }
      if (has_header) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (date_column && c == *date_column) continue;
          frame.channel_names.push_back(cells[c]);
        }
        ++row;
        continue;
      }
    }
    if (cells.size() != n_cols) {
      throw std::runtime_error("load_csv: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(n_cols));
    }
    std::vector<double> parsed;
    parsed.reserve(n_cols);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (date_column && c == *date_column) {
        frame.timestamps.push_back(cells[c]);
        continue;
      }
      parsed.push_back(parse_cell(cells[c], row, c));
    }
    rows.push_back(std::move(parsed));
    ++row;
  }

  if (rows.empty()) throw std::runtime_error("load_csv: '" + path + "' holds no data rows");
  frame.steps = rows.size();
  frame.channels = rows.front().size();
  if (frame.channels == 0) throw std::runtime_error("load_csv: no value columns");
  frame.values.resize(frame.steps * frame.channels);
  for (std::size_t t = 0; t < frame.steps; ++t) {
    for (std::size_t c = 0; c < frame.channels; ++c) frame.at(t, c) = rows[t][c];
  }
  if (frame.channel_names.empty()) {
    for (std::size_t c = 0; c < frame.channels; ++c) {
      frame.channel_names.push_back("c" + std::to_string(c));
    }
  }
  return frame;
}

std::array<TimeSeriesFrame, 3> chronological_split(const TimeSeriesFrame& frame,
                                                   const std::array<double, 3>& ratios) {
  for (const double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw std::invalid_argument("chronological_split: each ratio must lie in (0,1)");
    }
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("chronological_split: ratios must sum to 1");
  }
  const std::size_t t = frame.steps;
  const auto n_train = static_cast<std::size_t>(ratios[0] * static_cast<double>(t));
  const auto n_val = static_cast<std::size_t>(ratios[1] * static_cast<double>(t));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= t) {
    throw std::invalid_argument("chronological_split: a split segment would be empty");
  }
  const std::array<std::size_t, 3> begin = {0, n_train, n_train + n_val};
  const std::array<std::size_t, 3> length = {n_train, n_val, t - n_train - n_val};

  std::array<TimeSeriesFrame, 3> out;
  for (std::size_t s = 0; s < 3; ++s) {
    TimeSeriesFrame seg(length[s], frame.channels);
    seg.channel_names = frame.channel_names;
    seg.start_index = frame.start_index + begin[s];
    for (std::size_t i = 0; i < length[s]; ++i) {
      for (std::size_t c = 0; c < frame.channels; ++c) {
        seg.at(i, c) = frame.at(begin[s] + i, c);
      }
      if (!frame.timestamps.empty()) {
        seg.timestamps.push_back(frame.timestamps[begin[s] + i]);
      }
    }
    out[s] = std::move(seg);
  }
  return out;
}

std::pair<NormStats, std::vector<TimeSeriesFrame>> zscore_fit_apply(
    const TimeSeriesFrame& train, const std::vector<TimeSeriesFrame>& others) {
  NormStats stats;
  stats.mean.resize(train.channels, 0.0);
  stats.std.resize(train.channels, 0.0);
  const auto n = static_cast<double>(train.steps);
  for (std::size_t c = 0; c < train.channels; ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < train.steps; ++t) sum += train.at(t, c);
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t t = 0; t < train.steps; ++t) {
      const double d = train.at(t, c) - mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / n);
    if (sd <= 0.0) {
      throw std::invalid_argument("zscore_fit_apply: channel '" +
                               (c < train.channel_names.size() ? train.channel_names[c]
                                                               : std::to_string(c)) +
                               "' has zero variance in the training split");
    }
    stats.mean[c] = mean;
    stats.std[c] = sd;
  }

  std::vector<TimeSeriesFrame> normalized;
  normalized.push_back(apply_zscore(train, stats));
  for (const auto& f : others) normalized.push_back(apply_zscore(f, stats));
  return {std::move(stats), std::move(normalized)};
}

TimeSeriesFrame apply_zscore(const TimeSeriesFrame& frame, const NormStats& stats) {
  if (stats.mean.size() != frame.channels) {
    throw std::invalid_argument("apply_zscore: channel count mismatch");
  }
  TimeSeriesFrame out = frame;
  for (std::size_t t = 0; t < frame.steps; ++t) {
    for (std::size_t c = 0; c < frame.channels; ++c) {
      out.at(t, c) = (frame.at(t, c) - stats.mean[c]) / stats.std[c];
    }
  }
  return out;
}

TimeSeriesFrame invert_zscore(const TimeSeriesFrame& frame, const NormStats& stats) {
  if (stats.mean.size() != frame.channels) {
    throw std::invalid_argument("invert_zscore: channel count mismatch");
  }
  TimeSeriesFrame out = frame;
  for (std::size_t t = 0; t < frame.steps; ++t) {
    for (std::size_t c = 0; c < frame.channels; ++c) {
      out.at(t, c) = frame.at(t, c) * stats.std[c] + stats.mean[c];
    }
  }
  return out;
}

WindowSet make_windows(const TimeSeriesFrame& frame, std::size_t l_in,
                       std::size_t l_out, std::size_t stride) {
  if (l_in == 0 || l_out == 0 || stride == 0) {
    throw std::invalid_argument("make_windows: l_in, l_out, stride must be >= 1");
  }
  if (frame.steps < l_in + l_out) {
    throw std::invalid_argument("make_windows: frame has " + std::to_string(frame.steps) +
                                " steps, need at least " + std::to_string(l_in + l_out));
  }
  const std::size_t b = (frame.steps - l_in - l_out) / stride + 1;
  WindowSet w;
  w.inputs = Tensor3(b, l_in, frame.channels);
  w.labels = Tensor3(b, l_out, frame.channels);
  w.origin_indices.resize(b);
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t origin = i * stride;
    w.origin_indices[i] = origin;
    for (std::size_t t = 0; t < l_in; ++t) {
      for (std::size_t c = 0; c < frame.channels; ++c) {
        w.inputs(i, t, c) = frame.at(origin + t, c);
      }
    }
    for (std::size_t t = 0; t < l_out; ++t) {
      for (std::size_t c = 0; c < frame.channels; ++c) {
        w.labels(i, t, c) = frame.at(origin + l_in + t, c);
      }
    }
  }
  return w;
}

TimeSeriesFrame with_context(const TimeSeriesFrame& prev, const TimeSeriesFrame& frame,
                             std::size_t l_in) {
  if (prev.channels != frame.channels) {
    throw std::invalid_argument("with_context: channel count mismatch");
  }
  if (prev.steps < l_in) {
    throw std::invalid_argument("with_context: preceding split shorter than the lookback");
  }
  TimeSeriesFrame out(l_in + frame.steps, frame.channels);
  out.channel_names = frame.channel_names;
  out.start_index = frame.start_index >= l_in ? frame.start_index - l_in : 0;
  for (std::size_t t = 0; t < l_in; ++t) {
    for (std::size_t c = 0; c < frame.channels; ++c) {
      out.at(t, c) = prev.at(prev.steps - l_in + t, c);
    }
  }
  for (std::size_t t = 0; t < frame.steps; ++t) {
    for (std::size_t c = 0; c < frame.channels; ++c) {
      out.at(l_in + t, c) = frame.at(t, c);
    }
  }
  return out;
}

}  // namespace olma
