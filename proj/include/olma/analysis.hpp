#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "olma/loss.hpp"

namespace olma {

// Forecast error split across contiguous ranges of non-negative frequency
// bins. band_edges[i] is the half-open bin range [first, second) of band i.
struct BandErrorReport {
  std::vector<std::pair<std::size_t, std::size_t>> band_edges;
  std::vector<double> band_error;
  std::size_t n_bands = 0;
};

void to_json(nlohmann::json& j, const BandErrorReport& report);
std::string band_report_csv(const BandErrorReport& report);

// Splits the floor(l/2)+1 non-negative temporal-frequency bins into n_bands
// contiguous near-equal ranges (leftover bins go to the lowest bands) and
// reports, per band, the mean coefficient-difference modulus over batch
// items, channels, and the band's bins.
BandErrorReport band_errors(const PredictionPair& pair, std::size_t n_bands);

// Least squares with an intercept column appended after the p predictors.
// Minimizes |X b - y|^2 + ridge * |slopes|^2; the intercept is not shrunk.
// Returns p+1 coefficients, intercept last.
Eigen::VectorXd ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        double ridge = 1e-8);

enum class CausalDomain { time, frequency_real, frequency_imag };

// Effects for all offset pairs 0 <= t < t' <= max_offset, stored row-major
// in a (max_offset+1)^2 grid. Cells off the strict upper triangle, and
// pairs whose regression degenerated, hold NaN.
struct CausalEffectMatrix {
  std::size_t w = 0;
  std::size_t t_vis = 0;
  std::size_t max_offset = 0;
  CausalDomain domain = CausalDomain::time;
  std::vector<double> effects;

  double at(std::size_t t, std::size_t t_prime) const {
    return effects[t * (max_offset + 1) + t_prime];
  }
};

void to_json(nlohmann::json& j, const CausalEffectMatrix& m);

// Double machine learning estimate of how strongly x_{i+t} drives
// x_{i+t_prime}: both are regressed on the 2w neighbors of x_i (x_i itself
// excluded, and the treatment index excluded when it falls inside that
// window), and the result is |Cov(t_res, o_res) / Var(t_res)| over all
// admissible anchors i in [w, N - T_vis). Population covariance throughout.
double causal_effect(const std::vector<double>& series, std::size_t w, std::size_t t,
                     std::size_t t_prime, std::size_t t_vis);

// causal_effect over every pair with t < t' <= max_offset. The frequency
// domains first cut the series into non-overlapping length-T_vis windows,
// transform each, and analyze the concatenated real or imaginary
// coefficient parts as an ordinary series.
CausalEffectMatrix causal_matrix(const std::vector<double>& series, std::size_t w,
                                 std::size_t max_offset, std::size_t t_vis,
                                 CausalDomain domain);

namespace serial {
CausalEffectMatrix causal_matrix(const std::vector<double>& series, std::size_t w,
                                 std::size_t max_offset, std::size_t t_vis,
                                 CausalDomain domain);
}

}  // namespace olma
