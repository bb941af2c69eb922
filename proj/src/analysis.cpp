#include "olma/analysis.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "olma/transforms.hpp"

namespace olma {

namespace {

using cplx = std::complex<double>;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> confounder_offsets(std::size_t w, std::size_t t) {
  // Offsets of the confounder window relative to the anchor i, spanning
  // [-w, w] without the anchor itself and without the treatment position.
  std::vector<std::size_t> out;
  const auto iw = static_cast<std::ptrdiff_t>(w);
  for (std::ptrdiff_t d = -iw; d <= iw; ++d) {
    if (d == 0) continue;
    if (d > 0 && static_cast<std::size_t>(d) == t) continue;
    out.push_back(static_cast<std::size_t>(d + iw));  // shifted to [0, 2w]
  }
  return out;
}

struct Residuals {
  Eigen::VectorXd treatment;
  Eigen::VectorXd outcome;
};

Residuals dml_residuals(const std::vector<double>& series, std::size_t w, std::size_t t,
                        std::size_t t_prime, std::size_t t_vis) {
  if (w < 1) throw std::invalid_argument("causal_effect: w must be >= 1");
  if (t >= t_prime) throw std::invalid_argument("causal_effect: need t < t_prime");
  if (t_vis < 1 || t_prime > t_vis) {
    throw std::invalid_argument("causal_effect: offsets must fit inside T_vis");
  }
  if (w > t_vis) {
    throw std::invalid_argument("causal_effect: w must not exceed T_vis");
  }
  const std::size_t n_series = series.size();
  if (n_series < w + t_vis) {
    throw std::invalid_argument("causal_effect: series too short");
  }
  const std::size_t n = n_series - t_vis - w;  // anchors i in [w, N - T_vis)
  if (n < 2 * (2 * w + 1)) {
    throw std::invalid_argument("causal_effect: series too short");
  }

  const std::vector<std::size_t> offs = confounder_offsets(w, t);
  const auto p = static_cast<Eigen::Index>(offs.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd treat(static_cast<Eigen::Index>(n));
  Eigen::VectorXd outc(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = w + r;
    for (Eigen::Index col = 0; col < p; ++col) {
      x(static_cast<Eigen::Index>(r), col) =
          series[i - w + offs[static_cast<std::size_t>(col)]];
    }
    treat(static_cast<Eigen::Index>(r)) = series[i + t];
    outc(static_cast<Eigen::Index>(r)) = series[i + t_prime];
  }

  const Eigen::VectorXd beta_t = ols_fit(x, treat);
  const Eigen::VectorXd beta_o = ols_fit(x, outc);
  Residuals res;
  res.treatment = treat - x * beta_t.head(p) -
                  Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), beta_t(p));
  res.outcome = outc - x * beta_o.head(p) -
                Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), beta_o(p));
  return res;
}

std::vector<double> frequency_series(const std::vector<double>& series,
                                     std::size_t t_vis, bool imag_part) {
  const std::size_t n_windows = series.size() / t_vis;
  if (n_windows == 0) {
    throw std::invalid_argument("causal_matrix: series shorter than one T_vis window");
  }
  std::vector<double> out;
  out.reserve(n_windows * t_vis);
  std::vector<double> window(t_vis);
  for (std::size_t j = 0; j < n_windows; ++j) {
    std::copy(series.begin() + static_cast<std::ptrdiff_t>(j * t_vis),
              series.begin() + static_cast<std::ptrdiff_t>((j + 1) * t_vis),
              window.begin());
    const Spectrum spec = dft(window, DftNorm::unnormalized);
    for (std::size_t k = 0; k < t_vis; ++k) {
      out.push_back(imag_part ? spec.im[k] : spec.re[k]);
    }
  }
  return out;
}

CausalEffectMatrix matrix_impl(const std::vector<double>& series, std::size_t w,
                               std::size_t max_offset, std::size_t t_vis,
                               CausalDomain domain, bool parallel) {
  if (max_offset >= t_vis) {
    throw std::invalid_argument("causal_matrix: max_offset must be below T_vis");
  }
  if (w < 1 || w > t_vis) {
    throw std::invalid_argument("causal_matrix: w must lie in [1, T_vis]");
  }
  const std::vector<double>* analyzed = &series;
  std::vector<double> mapped;
  if (domain != CausalDomain::time) {
    mapped = frequency_series(series, t_vis, domain == CausalDomain::frequency_imag);
    analyzed = &mapped;
  }
  // Shared-length preconditions checked once here; any throw left inside the
  // cell loop is then a per-pair degeneracy and marks that cell missing.
  if (analyzed->size() < w + t_vis ||
      analyzed->size() - t_vis - w < 2 * (2 * w + 1)) {
    throw std::invalid_argument("causal_matrix: series too short");
  }

  CausalEffectMatrix m;
  m.w = w;
  m.t_vis = t_vis;
  m.max_offset = max_offset;
  m.domain = domain;
  const std::size_t side = max_offset + 1;
  m.effects.assign(side * side, kNan);

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t t = 0; t <= max_offset; ++t) {
    for (std::size_t tp = t + 1; tp <= max_offset; ++tp) cells.emplace_back(t, tp);
  }

  const auto count = static_cast<std::ptrdiff_t>(cells.size());
  auto eval_cell = [&](std::ptrdiff_t idx) {
    const auto [t, tp] = cells[static_cast<std::size_t>(idx)];
    double value = kNan;
    try {
      value = causal_effect(*analyzed, w, t, tp, t_vis);
    } catch (const std::exception&) {
      // Degenerate pair (for example a treatment fully explained by its
      // confounders); leave the cell missing.
    }
    m.effects[t * side + tp] = value;
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) eval_cell(i);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) eval_cell(i);
  }
  return m;
}

const char* domain_name(CausalDomain d) {
  switch (d) {
    case CausalDomain::time:
      return "time";
    case CausalDomain::frequency_real:
      return "frequency_real";
    case CausalDomain::frequency_imag:
      return "frequency_imag";
  }
  return "unknown";
}

}  // namespace

BandErrorReport band_errors(const PredictionPair& pair, std::size_t n_bands) {
  const Tensor3& p = pair.prediction;
  if (p.items == 0 || p.steps == 0 || p.channels == 0) {
    throw std::invalid_argument("band_errors: empty prediction tensor");
  }
  const std::size_t bins = p.steps / 2 + 1;
  if (n_bands < 1 || n_bands > bins) {
    throw std::invalid_argument("band_errors: n_bands must lie in [1, " +
                                std::to_string(bins) + "]");
  }

  BandErrorReport report;
  report.n_bands = n_bands;
  const std::size_t base = bins / n_bands;
  const std::size_t extra = bins % n_bands;  // leftover bins feed the low bands
  std::size_t cursor = 0;
  for (std::size_t band = 0; band < n_bands; ++band) {
    const std::size_t width = base + (band < extra ? 1 : 0);
    report.band_edges.emplace_back(cursor, cursor + width);
    cursor += width;
  }

  // Per-item modulus sums per bin, then a fixed-order reduction over items.
  const std::size_t items = p.items;
  std::vector<std::vector<double>> per_item(items, std::vector<double>(bins, 0.0));
  const auto count = static_cast<std::ptrdiff_t>(items);
  const DftPlan& plan = plan_for(p.steps);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < count; ++bi) {
    const auto b = static_cast<std::size_t>(bi);
    std::vector<cplx> in(p.steps), z(p.steps);
    for (std::size_t ch = 0; ch < p.channels; ++ch) {
      for (std::size_t t = 0; t < p.steps; ++t) {
        in[t] = {p(b, t, ch) - pair.label(b, t, ch), 0.0};
      }
      plan.forward(in.data(), z.data());
      for (std::size_t k = 0; k < bins; ++k) per_item[b][k] += std::abs(z[k]);
    }
  }

  std::vector<double> bin_sums(bins, 0.0);
  for (std::size_t b = 0; b < items; ++b) {
    for (std::size_t k = 0; k < bins; ++k) bin_sums[k] += per_item[b][k];
  }

  const double denom_items =
      static_cast<double>(items) * static_cast<double>(p.channels);
  for (std::size_t band = 0; band < n_bands; ++band) {
    const auto [first, last] = report.band_edges[band];
    double acc = 0.0;
    for (std::size_t k = first; k < last; ++k) acc += bin_sums[k];
    report.band_error.push_back(acc /
                                (denom_items * static_cast<double>(last - first)));
  }
  return report;
}

Eigen::VectorXd ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        double ridge) {
  if (x.rows() != y.size() || x.rows() < 1 || x.cols() < 1) {
    throw std::invalid_argument("ols_fit: design and target sizes disagree");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd a(n, p + 1);
  a.leftCols(p) = x;
  a.col(p).setOnes();

  Eigen::MatrixXd gram = a.transpose() * a;
  for (Eigen::Index i = 0; i < p; ++i) gram(i, i) += ridge;
  const Eigen::VectorXd rhs = a.transpose() * y;

  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw std::invalid_argument("ols_fit: normal equations are singular");
  }
  const Eigen::VectorXd beta = solver.solve(rhs);
  if (!beta.allFinite()) {
    throw std::invalid_argument("ols_fit: normal equations are singular");
  }
  return beta;
}

double causal_effect(const std::vector<double>& series, std::size_t w, std::size_t t,
                     std::size_t t_prime, std::size_t t_vis) {
  const Residuals res = dml_residuals(series, w, t, t_prime, t_vis);
  const auto n = static_cast<double>(res.treatment.size());
  const double mean_t = res.treatment.mean();
  const double mean_o = res.outcome.mean();
  double cov = 0.0;
  double var = 0.0;
  for (Eigen::Index i = 0; i < res.treatment.size(); ++i) {
    const double dt = res.treatment(i) - mean_t;
    cov += dt * (res.outcome(i) - mean_o);
    var += dt * dt;
  }
  cov /= n;
  var /= n;
  if (var < 1e-12) {
    throw std::invalid_argument("causal_effect: treatment fully explained by confounders");
  }
  return std::abs(cov / var);
}

CausalEffectMatrix causal_matrix(const std::vector<double>& series, std::size_t w,
                                 std::size_t max_offset, std::size_t t_vis,
                                 CausalDomain domain) {
  return matrix_impl(series, w, max_offset, t_vis, domain, true);
}

namespace serial {

CausalEffectMatrix causal_matrix(const std::vector<double>& series, std::size_t w,
                                 std::size_t max_offset, std::size_t t_vis,
                                 CausalDomain domain) {
  return matrix_impl(series, w, max_offset, t_vis, domain, false);
}

}  // namespace serial

void to_json(nlohmann::json& j, const BandErrorReport& report) {
  nlohmann::json bands = nlohmann::json::array();
  for (std::size_t i = 0; i < report.n_bands; ++i) {
    bands.push_back({{"band", i},
                     {"first_bin", report.band_edges[i].first},
                     {"last_bin", report.band_edges[i].second},
                     {"error", report.band_error[i]}});
  }
  j = nlohmann::json{{"n_bands", report.n_bands}, {"bands", std::move(bands)}};
}

std::string band_report_csv(const BandErrorReport& report) {
  std::ostringstream out;
  out << "band_index,error\n";
  out.precision(17);
  for (std::size_t i = 0; i < report.n_bands; ++i) {
    out << i << "," << report.band_error[i] << "\n";
  }
  return out.str();
}

void to_json(nlohmann::json& j, const CausalEffectMatrix& m) {
  const std::size_t side = m.max_offset + 1;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t t = 0; t < side; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t tp = 0; tp < side; ++tp) {
      const double v = m.effects[t * side + tp];
      if (std::isnan(v)) {
        row.push_back(nullptr);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"w", m.w},
                     {"T_vis", m.t_vis},
                     {"max_offset", m.max_offset},
                     {"domain", domain_name(m.domain)},
                     {"effects", std::move(rows)}};
}

}  // namespace olma
