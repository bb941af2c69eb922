// Command-line front end: reproducible experiment runs with JSON/CSV
// artifacts. Every artifact embeds the resolved configuration and the seed
// it ran under. On failure the process exits with code 1, names the stage
// that failed, and removes any partially written outputs.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "olma/analysis.hpp"
#include "olma/core_data.hpp"
#include "olma/entropy.hpp"
#include "olma/forecaster.hpp"
#include "olma/loss.hpp"
#include "olma/rng.hpp"
#include "olma/theorem.hpp"
#include "olma/transforms.hpp"

namespace {

using nlohmann::json;

// Named sub-seed streams, so each consumer of randomness is independently
// reproducible from the one top-level seed.
constexpr std::uint64_t kStreamShuffle = 1;
constexpr std::uint64_t kStreamTheorem = 2;

struct StageFailure : std::runtime_error {
  StageFailure(const std::string& stage, const std::string& what)
      : std::runtime_error("error in stage '" + stage + "': " + what) {}
};

// Collects the files written by one command so they can all be removed if a
// later stage fails; partial artifact sets are worse than none.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_of(const std::string& name) const { return dir_ / name; }

  void prepare() { std::filesystem::create_directories(dir_); }

  void write_text(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir_);
    const std::filesystem::path p = dir_ / name;
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + p.string());
    written_.push_back(p);
  }

  void write_json(const std::string& name, const json& j) {
    write_text(name, j.dump(2) + "\n");
  }

  void track(const std::filesystem::path& p) { written_.push_back(p); }

  void discard_all() {
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
    written_.clear();
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

struct DataOpts {
  std::string data;
  std::string date_column = "auto";  // auto | none | <index>
  bool no_header = false;
  std::vector<double> split = {0.6, 0.2, 0.2};
  std::size_t lookback = 96;
  std::size_t horizon = 96;
  std::size_t stride = 1;
};

struct LossOpts {
  std::string loss = "olma";  // mse | mae | olma
  double alpha = 0.34;
  double beta = 0.33;
  double gamma = 0.33;
  double eps = 1e-12;
};

struct TrainOpts {
  double lr = 0.01;
  int epochs = 20;
  int batch_size = 32;
  int patience = 3;
  std::string optimizer = "adaptive_moments";  // sgd | adaptive_moments
  std::string kind = "decomposed";             // plain | decomposed
  int ma_kernel = 25;
};

std::optional<std::size_t> resolve_date_column(const DataOpts& d) {
  if (d.date_column == "none") return std::nullopt;
  if (d.date_column != "auto") {
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(
        d.date_column.data(), d.date_column.data() + d.date_column.size(), idx);
    if (ec != std::errc{} || ptr != d.date_column.data() + d.date_column.size()) {
      throw std::invalid_argument("--date-column must be 'auto', 'none', or an index");
    }
    return idx;
  }
  // Auto: a leading column that is literally named "date" (or whose first
  // cell fails to parse as a number, when there is no header) is the date.
  std::ifstream in(d.data);
  if (!in) throw std::runtime_error("cannot open " + d.data);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file " + d.data);
  const std::string first = line.substr(0, line.find(','));
  if (!d.no_header) {
    std::string lower = first;
    for (char& ch : lower) ch = static_cast<char>(std::tolower(ch));
    if (lower == "date" || lower == "\"date\"") return 0;
    return std::nullopt;
  }
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(first.data(), first.data() + first.size(), value);
  if (ec != std::errc{} || ptr != first.data() + first.size()) return 0;
  return std::nullopt;
}

struct Windowed {
  olma::NormStats stats;
  olma::WindowSet train_w;
  olma::WindowSet val_w;
  olma::WindowSet test_w;
  std::size_t channels = 0;
  std::vector<std::string> channel_names;
};

Windowed build_windows(const DataOpts& d) {
  const olma::TimeSeriesFrame frame =
      olma::load_csv(d.data, !d.no_header, resolve_date_column(d));
  if (d.split.size() != 3) {
    throw std::invalid_argument("--split needs exactly three ratios");
  }
  const auto parts = olma::chronological_split(
      frame, {d.split[0], d.split[1], d.split[2]});
  auto [stats, normed] = olma::zscore_fit_apply(parts[0], {parts[1], parts[2]});
  const olma::TimeSeriesFrame val_ctx =
      olma::with_context(normed[0], normed[1], d.lookback);
  const olma::TimeSeriesFrame test_ctx =
      olma::with_context(normed[1], normed[2], d.lookback);

  Windowed out;
  out.stats = std::move(stats);
  out.channels = frame.channels;
  out.channel_names = frame.channel_names;
  out.train_w = olma::make_windows(normed[0], d.lookback, d.horizon, d.stride);
  out.val_w = olma::make_windows(val_ctx, d.lookback, d.horizon, d.stride);
  out.test_w = olma::make_windows(test_ctx, d.lookback, d.horizon, d.stride);
  return out;
}

olma::LossSpec make_loss_spec(const LossOpts& l) {
  olma::LossSpec spec;
  spec.alpha = l.alpha;
  spec.beta = l.beta;
  spec.gamma = l.gamma;
  spec.smoothing_eps = l.eps;
  spec.validate();
  return spec;
}

olma::TrainObjective make_objective(const LossOpts& l) {
  if (l.loss == "mse") return olma::TrainObjective::mse();
  if (l.loss == "mae") return olma::TrainObjective::mae();
  return olma::TrainObjective::olma_loss(make_loss_spec(l));
}

olma::TrainConfig make_train_config(const TrainOpts& t, std::uint64_t seed) {
  olma::TrainConfig cfg;
  cfg.learning_rate = t.lr;
  cfg.epochs = t.epochs;
  cfg.batch_size = t.batch_size;
  cfg.patience = t.patience;
  cfg.seed = olma::derive_seed(seed, kStreamShuffle);
  cfg.optimizer = t.optimizer == "sgd" ? olma::Optimizer::sgd
                                       : olma::Optimizer::adaptive_moments;
  return cfg;
}

olma::LinearForecaster make_model(const TrainOpts& t, const DataOpts& d,
                                  std::size_t channels) {
  const olma::ModelKind kind =
      t.kind == "plain" ? olma::ModelKind::plain : olma::ModelKind::decomposed;
  return olma::init_model(kind, d.lookback, d.horizon, channels, t.ma_kernel);
}

json data_config_json(const DataOpts& d) {
  return json{{"data", d.data},         {"date_column", d.date_column},
              {"has_header", !d.no_header}, {"split", d.split},
              {"lookback", d.lookback}, {"horizon", d.horizon},
              {"stride", d.stride}};
}

json loss_config_json(const LossOpts& l) {
  return json{{"loss", l.loss}, {"alpha", l.alpha},        {"beta", l.beta},
              {"gamma", l.gamma}, {"smoothing_eps", l.eps}};
}

json train_config_json(const TrainOpts& t) {
  return json{{"lr", t.lr},
              {"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"patience", t.patience},
              {"optimizer", t.optimizer},
              {"kind", t.kind},
              {"ma_kernel", t.ma_kernel}};
}

json history_json(const olma::TrainHistory& h) {
  return json{{"train_loss", h.epoch_train_loss},
              {"val_loss", h.epoch_val_loss},
              {"best_epoch", h.best_epoch}};
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each runs inside run_guarded so a failure anywhere
// names its stage and clears partial outputs.

template <typename Fn>
void run_guarded(ArtifactWriter& writer, std::string& stage, Fn&& body) {
  try {
    body();
  } catch (const StageFailure&) {
    writer.discard_all();
    throw;
  } catch (const std::exception& e) {
    writer.discard_all();
    throw StageFailure(stage, e.what());
  }
}

void cmd_entropy_scan(const DataOpts& d, std::size_t seg_len, int bins, bool raw,
                      std::uint64_t seed, const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load data";
    olma::TimeSeriesFrame frame =
        olma::load_csv(d.data, !d.no_header, resolve_date_column(d));
    if (!raw) {
      auto [stats, normed] = olma::zscore_fit_apply(frame, {});
      frame = std::move(normed[0]);
    }

    stage = "entropy scan";
    const olma::EntropyReport report =
        olma::segment_entropy_scan(frame, seg_len, bins);
    std::size_t reduced = 0;
    for (std::size_t i = 0; i < report.segment_starts.size(); ++i) {
      if (report.transformed_entropy[i] < report.original_entropy[i]) ++reduced;
    }

    stage = "write artifacts";
    json j;
    to_json(j, report);
    j["segments_with_reduction"] = reduced;
    j["config"] = data_config_json(d);
    j["config"]["seg_len"] = seg_len;
    j["config"]["bins"] = bins;
    j["config"]["normalized"] = !raw;
    j["seed"] = seed;
    writer.write_json("entropy.json", j);
    std::cout << "entropy-scan: " << reduced << "/" << report.segment_starts.size()
              << " segments reduced; wrote " << writer.path_of("entropy.json").string()
              << "\n";
  });
}

void cmd_theorem_check(int trials, std::size_t grid, std::uint64_t seed,
                       const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "theorem trials";
    olma::Rng rng(olma::derive_seed(seed, kStreamTheorem));
    json records = json::array();
    int witnesses = 0;
    double worst_det_mismatch = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const auto c = static_cast<Eigen::Index>(2 + trial % 7);
      Eigen::MatrixXd m(c, c);
      for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
      }
      const Eigen::MatrixXd s =
          m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(c, c);
      const olma::Theorem1Report report = olma::verify_theorem1(s, grid);
      const double rel_mismatch =
          std::abs(report.diag_product_at_lambda.back() - report.determinant) /
          report.determinant;
      worst_det_mismatch = std::max(worst_det_mismatch, rel_mismatch);
      if (report.witness_lambda) ++witnesses;
      records.push_back(
          {{"channels", c},
           {"diag_product", report.diag_product_original},
           {"determinant", report.determinant},
           {"gap", report.diag_product_original - report.determinant},
           {"witness_lambda",
            report.witness_lambda ? json(*report.witness_lambda) : json(nullptr)},
           {"product_at_1", report.diag_product_at_lambda.back()}});
    }

    stage = "write artifacts";
    const json j{{"config", {{"trials", trials}, {"grid", grid}}},
                 {"seed", seed},
                 {"witnesses_found", witnesses},
                 {"worst_rel_det_mismatch", worst_det_mismatch},
                 {"trials", records}};
    writer.write_json("theorem.json", j);
    std::cout << "theorem-check: " << witnesses << "/" << trials
              << " trials produced a witness; wrote "
              << writer.path_of("theorem.json").string() << "\n";
  });
}

void cmd_train(const DataOpts& d, const LossOpts& l, const TrainOpts& t,
               std::uint64_t seed, const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load data";
    const Windowed w = build_windows(d);

    stage = "train model";
    const olma::LinearForecaster fresh = make_model(t, d, w.channels);
    auto [model, history] = olma::train(fresh, w.train_w, w.val_w,
                                        make_objective(l), make_train_config(t, seed));

    stage = "evaluate";
    const auto [mse, mae] = olma::evaluate(model, w.test_w);

    stage = "write artifacts";
    writer.prepare();
    olma::save_checkpoint(model, writer.path_of("checkpoint.json").string());
    writer.track(writer.path_of("checkpoint.json"));
    const json j{{"config",
                  {{"data", data_config_json(d)},
                   {"loss", loss_config_json(l)},
                   {"train", train_config_json(t)}}},
                 {"seed", seed},
                 {"metrics", {{"horizon", d.horizon}, {"mse", mse}, {"mae", mae}}},
                 {"history", history_json(history)}};
    writer.write_json("metrics.json", j);
    std::cout << "train: test mse " << mse << ", mae " << mae << "; wrote "
              << writer.path_of("metrics.json").string() << " and "
              << writer.path_of("checkpoint.json").string() << "\n";
  });
}

void cmd_eval(const DataOpts& d_in, const std::string& checkpoint, std::uint64_t seed,
              const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load checkpoint";
    const olma::LinearForecaster model = olma::load_checkpoint(checkpoint);

    stage = "load data";
    DataOpts d = d_in;
    d.lookback = model.l_in;  // window dims come from the checkpoint
    d.horizon = model.l_out;
    const Windowed w = build_windows(d);

    stage = "evaluate";
    const auto [mse, mae] = olma::evaluate(model, w.test_w);

    stage = "write artifacts";
    const json j{{"config",
                  {{"data", data_config_json(d)}, {"checkpoint", checkpoint}}},
                 {"seed", seed},
                 {"metrics", {{"horizon", d.horizon}, {"mse", mse}, {"mae", mae}}}};
    writer.write_json("metrics.json", j);
    std::cout << "eval: test mse " << mse << ", mae " << mae << "; wrote "
              << writer.path_of("metrics.json").string() << "\n";
  });
}

void cmd_bands(const DataOpts& d_in, const std::string& checkpoint,
               std::size_t n_bands, std::uint64_t seed, const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load checkpoint";
    const olma::LinearForecaster model = olma::load_checkpoint(checkpoint);

    stage = "load data";
    DataOpts d = d_in;
    d.lookback = model.l_in;
    d.horizon = model.l_out;
    const Windowed w = build_windows(d);

    stage = "band errors";
    const olma::Tensor3 pred = olma::forward(model, w.test_w.inputs);
    const olma::BandErrorReport report =
        olma::band_errors(olma::PredictionPair(pred, w.test_w.labels), n_bands);

    stage = "write artifacts";
    json j;
    to_json(j, report);
    j["config"] = {{"data", data_config_json(d)},
                   {"checkpoint", checkpoint},
                   {"n_bands", n_bands}};
    j["seed"] = seed;
    writer.write_json("bands.json", j);
    writer.write_text("bands.csv", olma::band_report_csv(report));
    std::cout << "bands: wrote " << writer.path_of("bands.json").string() << " and "
              << writer.path_of("bands.csv").string() << "\n";
  });
}

void cmd_causal(const DataOpts& d, std::size_t channel, std::size_t w_size,
                std::size_t max_offset, std::size_t t_vis, const std::string& domain,
                std::uint64_t seed, const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load data";
    const olma::TimeSeriesFrame frame =
        olma::load_csv(d.data, !d.no_header, resolve_date_column(d));
    if (channel >= frame.channels) {
      throw std::invalid_argument("--channel out of range; the file has " +
                                  std::to_string(frame.channels) + " channels");
    }
    std::vector<double> series(frame.steps);
    for (std::size_t t = 0; t < frame.steps; ++t) series[t] = frame.at(t, channel);

    stage = "causal matrix";
    const olma::CausalDomain dom = domain == "time" ? olma::CausalDomain::time
                                   : domain == "frequency_real"
                                       ? olma::CausalDomain::frequency_real
                                       : olma::CausalDomain::frequency_imag;
    const olma::CausalEffectMatrix matrix =
        olma::causal_matrix(series, w_size, max_offset, t_vis, dom);

    stage = "write artifacts";
    json j;
    to_json(j, matrix);
    j["config"] = {{"data", data_config_json(d)},
                   {"channel", channel},
                   {"w", w_size},
                   {"max_offset", max_offset},
                   {"T_vis", t_vis},
                   {"domain", domain}};
    j["seed"] = seed;
    writer.write_json("causal.json", j);
    std::cout << "causal: wrote " << writer.path_of("causal.json").string() << "\n";
  });
}

void cmd_ablate(const DataOpts& d, const LossOpts& l, const TrainOpts& t,
                std::uint64_t seed, const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load data";
    const Windowed w = build_windows(d);

    stage = "ablation runs";
    json runs = json::array();
    const bool toggles[4][2] = {{true, true}, {true, false}, {false, true},
                                {false, false}};
    for (const auto& toggle : toggles) {
      const bool channel_on = toggle[0];
      const bool temporal_on = toggle[1];
      olma::TrainObjective objective;
      std::string label;
      if (!channel_on && !temporal_on) {
        // With every frequency term switched off the loss degenerates to the
        // plain time-domain baseline.
        objective = olma::TrainObjective::mse();
        label = "mse_baseline";
      } else {
        olma::LossSpec spec = make_loss_spec(l);
        spec.include_channel = channel_on;
        spec.include_temporal = temporal_on;
        objective = olma::TrainObjective::olma_loss(spec);
        label = std::string(channel_on ? "channel" : "") +
                (channel_on && temporal_on ? "+" : "") +
                (temporal_on ? "temporal" : "");
      }
      const olma::LinearForecaster fresh = make_model(t, d, w.channels);
      auto [model, history] = olma::train(fresh, w.train_w, w.val_w, objective,
                                          make_train_config(t, seed));
      const auto [mse, mae] = olma::evaluate(model, w.test_w);
      runs.push_back({{"label", label},
                      {"channel_term", channel_on},
                      {"temporal_term", temporal_on},
                      {"mse", mse},
                      {"mae", mae},
                      {"best_epoch", history.best_epoch}});
    }

    stage = "write artifacts";
    const json j{{"config",
                  {{"data", data_config_json(d)},
                   {"loss", loss_config_json(l)},
                   {"train", train_config_json(t)}}},
                 {"seed", seed},
                 {"runs", runs}};
    writer.write_json("ablation.json", j);
    std::cout << "ablate: wrote " << writer.path_of("ablation.json").string() << "\n";
  });
}

void cmd_sweep(const DataOpts& d, const LossOpts& l, const TrainOpts& t,
               std::vector<double> proportions, std::uint64_t seed,
               const std::string& out_dir) {
  ArtifactWriter writer(out_dir);
  std::string stage = "setup";
  run_guarded(writer, stage, [&] {
    stage = "load data";
    const Windowed w = build_windows(d);

    stage = "weight sweep";
    json runs = json::array();
    double best_mse = 0.0, worst_mse = 0.0;
    bool first = true;
    for (const double p : proportions) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("sweep proportions must lie in [0, 1]");
      }
      olma::LossSpec spec = make_loss_spec(l);
      spec.alpha = p;
      spec.beta = (1.0 - p) / 2.0;
      spec.gamma = (1.0 - p) / 2.0;
      const olma::LinearForecaster fresh = make_model(t, d, w.channels);
      auto [model, history] =
          olma::train(fresh, w.train_w, w.val_w,
                      olma::TrainObjective::olma_loss(spec), make_train_config(t, seed));
      const auto [mse, mae] = olma::evaluate(model, w.test_w);
      if (first || mse < best_mse) best_mse = mse;
      if (first || mse > worst_mse) worst_mse = mse;
      first = false;
      runs.push_back({{"channel_proportion", p},
                      {"alpha", spec.alpha},
                      {"beta", spec.beta},
                      {"gamma", spec.gamma},
                      {"mse", mse},
                      {"mae", mae}});
    }

    stage = "write artifacts";
    const json j{{"config",
                  {{"data", data_config_json(d)},
                   {"loss", loss_config_json(l)},
                   {"train", train_config_json(t)},
                   {"proportions", proportions}}},
                 {"seed", seed},
                 {"max_over_min_mse", best_mse > 0.0 ? worst_mse / best_mse : 0.0},
                 {"runs", runs}};
    writer.write_json("sweep.json", j);
    std::cout << "sweep: max/min mse ratio "
              << (best_mse > 0.0 ? worst_mse / best_mse : 0.0) << "; wrote "
              << writer.path_of("sweep.json").string() << "\n";
  });
}

void add_data_options(CLI::App* sub, DataOpts& d, bool with_dims = true) {
  sub->add_option("--data", d.data, "Input CSV file")->required();
  sub->add_option("--date-column", d.date_column,
                  "'auto', 'none', or the index of the date column");
  sub->add_flag("--no-header", d.no_header, "Treat the first row as data");
  if (with_dims) {
    sub->add_option("--split", d.split, "Train/val/test ratios")->expected(3);
    sub->add_option("--lookback", d.lookback, "Input window length");
    sub->add_option("--horizon", d.horizon, "Forecast length");
    sub->add_option("--stride", d.stride, "Window stride");
  }
}

void add_loss_options(CLI::App* sub, LossOpts& l, bool with_kind = true) {
  if (with_kind) {
    sub->add_option("--loss", l.loss, "Training objective")
        ->check(CLI::IsMember({"mse", "mae", "olma"}));
  }
  sub->add_option("--alpha", l.alpha, "Channel-term weight");
  sub->add_option("--beta", l.beta, "Temporal Fourier-term weight");
  sub->add_option("--gamma", l.gamma, "Temporal wavelet-term weight");
  sub->add_option("--eps", l.eps, "Gradient smoothing epsilon");
}

void add_train_options(CLI::App* sub, TrainOpts& t) {
  sub->add_option("--lr", t.lr, "Learning rate");
  sub->add_option("--epochs", t.epochs, "Maximum epochs");
  sub->add_option("--batch-size", t.batch_size, "Mini-batch size");
  sub->add_option("--patience", t.patience, "Early-stopping patience; 0 disables");
  sub->add_option("--optimizer", t.optimizer, "Optimizer")
      ->check(CLI::IsMember({"sgd", "adaptive_moments"}));
  sub->add_option("--kind", t.kind, "Model kind")
      ->check(CLI::IsMember({"plain", "decomposed"}));
  sub->add_option("--ma-kernel", t.ma_kernel,
                  "Moving-average kernel (decomposed kind)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain loss toolkit for time-series forecasting"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI config with one [subcommand] section per command; "
                 "explicit flags win");

  std::uint64_t seed = 0;
  std::string out_dir = "out";

  // entropy-scan
  auto* scan = app.add_subcommand("entropy-scan",
                                  "Per-segment entropy before and after the "
                                  "channel-wise DFT");
  DataOpts scan_data;
  std::size_t scan_seg_len = 96;
  int scan_bins = 16;
  bool scan_raw = false;
  add_data_options(scan, scan_data, false);
  scan->add_option("--seg-len", scan_seg_len, "Segment length");
  scan->add_option("--bins", scan_bins, "Histogram bins per axis");
  scan->add_flag("--raw", scan_raw, "Scan the unnormalized series");

  // theorem-check
  auto* theorem = app.add_subcommand("theorem-check",
                                     "Diagonal-product reduction along the "
                                     "unitary path on random covariances");
  int theorem_trials = 200;
  std::size_t theorem_grid = 101;
  theorem->add_option("--trials", theorem_trials, "Number of random covariances");
  theorem->add_option("--grid", theorem_grid, "Lambda grid size");

  // train
  auto* train = app.add_subcommand("train", "Train a linear forecaster");
  DataOpts train_data;
  LossOpts train_loss;
  TrainOpts train_cfg;
  bool high_entropy = false;
  add_data_options(train, train_data);
  add_loss_options(train, train_loss);
  add_train_options(train, train_cfg);
  train->add_flag("--high-entropy-preset", high_entropy,
                  "Use loss weights 0.1/0.45/0.45");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  DataOpts eval_data;
  std::string eval_checkpoint;
  add_data_options(eval_cmd, eval_data);
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint JSON")->required();

  // bands
  auto* bands = app.add_subcommand("bands",
                                   "Forecast error split across frequency bands");
  DataOpts bands_data;
  std::string bands_checkpoint;
  std::size_t bands_count = 4;
  add_data_options(bands, bands_data);
  bands->add_option("--checkpoint", bands_checkpoint, "Checkpoint JSON")->required();
  bands->add_option("--bands", bands_count, "Number of frequency bands");

  // causal
  auto* causal = app.add_subcommand("causal",
                                    "Confounder-adjusted offset-to-offset effects");
  DataOpts causal_data;
  std::size_t causal_channel = 0;
  std::size_t causal_w = 2;
  std::size_t causal_max_offset = 8;
  std::size_t causal_t_vis = 96;
  std::string causal_domain = "time";
  add_data_options(causal, causal_data, false);
  causal->add_option("--channel", causal_channel, "Channel index to analyze");
  causal->add_option("--w", causal_w, "Confounder half-window");
  causal->add_option("--max-offset", causal_max_offset, "Largest offset pair");
  causal->add_option("--t-vis", causal_t_vis, "Visible range");
  causal->add_option("--domain", causal_domain, "Analysis domain")
      ->check(CLI::IsMember({"time", "frequency_real", "frequency_imag"}));

  // ablate
  auto* ablate = app.add_subcommand("ablate",
                                    "Train under all channel/temporal term toggles");
  DataOpts ablate_data;
  LossOpts ablate_loss;
  TrainOpts ablate_cfg;
  add_data_options(ablate, ablate_data);
  add_loss_options(ablate, ablate_loss, false);
  add_train_options(ablate, ablate_cfg);

  // sweep
  auto* sweep = app.add_subcommand("sweep",
                                   "Train across channel-loss proportions");
  DataOpts sweep_data;
  LossOpts sweep_loss;
  TrainOpts sweep_cfg;
  std::vector<double> sweep_props = {0.1, 0.3, 0.5, 0.7, 0.9};
  add_data_options(sweep, sweep_data);
  add_loss_options(sweep, sweep_loss, false);
  add_train_options(sweep, sweep_cfg);
  sweep->add_option("--proportions", sweep_props, "Channel-loss proportions");

  for (CLI::App* sub : {scan, theorem, train, eval_cmd, bands, causal, ablate, sweep}) {
    sub->add_option("--seed", seed, "Top-level random seed");
    sub->add_option("--out", out_dir, "Output directory");
    // Lets --config appear after the subcommand name; the option itself
    // lives on the root app because that is where config parsing runs.
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scan) {
      cmd_entropy_scan(scan_data, scan_seg_len, scan_bins, scan_raw, seed, out_dir);
    } else if (*theorem) {
      cmd_theorem_check(theorem_trials, theorem_grid, seed, out_dir);
    } else if (*train) {
      if (high_entropy) {
        const olma::LossSpec preset = olma::LossSpec::high_entropy_preset();
        if (train->count("--alpha") == 0) train_loss.alpha = preset.alpha;
        if (train->count("--beta") == 0) train_loss.beta = preset.beta;
        if (train->count("--gamma") == 0) train_loss.gamma = preset.gamma;
      }
      cmd_train(train_data, train_loss, train_cfg, seed, out_dir);
    } else if (*eval_cmd) {
      cmd_eval(eval_data, eval_checkpoint, seed, out_dir);
    } else if (*bands) {
      cmd_bands(bands_data, bands_checkpoint, bands_count, seed, out_dir);
    } else if (*causal) {
      cmd_causal(causal_data, causal_channel, causal_w, causal_max_offset,
                 causal_t_vis, causal_domain, seed, out_dir);
    } else if (*ablate) {
      cmd_ablate(ablate_data, ablate_loss, ablate_cfg, seed, out_dir);
    } else if (*sweep) {
      cmd_sweep(sweep_data, sweep_loss, sweep_cfg, sweep_props, seed, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
