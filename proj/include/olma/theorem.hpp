#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace olma {

// Record of one grid search along the unitary path phi(lambda): the product
// of marginal variances at each lambda, the original diagonal product at
// lambda=0, the determinant reached at lambda=1, and the first lambda where
// the product strictly drops below the original.
struct Theorem1Report {
  double diag_product_original = 0.0;
  double determinant = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> diag_product_at_lambda;
  std::optional<double> witness_lambda;
};

void to_json(nlohmann::json& j, const Theorem1Report& report);

struct HadamardGap {
  double diag_product = 0.0;
  double determinant = 0.0;
  double gap = 0.0;  // diag_product - determinant, >= 0 for Hermitian PSD
};

// Draws G in R^{c x l} whose columns are i.i.d. N(0, cov), via the Cholesky
// factor of cov applied to standard normals. Column-major draw order (all c
// normals of column 0 first), so the result is reproducible from the seed.
Eigen::MatrixXd sample_correlated_gaussian(const Eigen::MatrixXd& cov, std::size_t l,
                                           std::uint64_t seed);

// S = (1/l) G G^adjoint.
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& g);
Eigen::MatrixXcd empirical_covariance(const Eigen::MatrixXcd& g);

// Diagonal product, determinant, and their difference for a Hermitian PSD
// matrix. The determinant comes from a Cholesky factor when the matrix is
// positive definite and from eigenvalues otherwise.
HadamardGap hadamard_gap(const Eigen::MatrixXcd& s);
HadamardGap hadamard_gap(const Eigen::MatrixXd& s);

// Checks that a correlated covariance admits a unitary conjugation that
// strictly shrinks the product of diagonal entries. Diagonalizes S = U L U*,
// walks phi(lambda) from the identity (lambda=0) to the diagonalizer U*
// (lambda=1) on a uniform grid, and records the diagonal product of
// phi S phi* at every point. Throws if S has no off-diagonal mass, and if
// the product at lambda=1 misses det(S) by more than 1e-8 relative.
Theorem1Report verify_theorem1(const Eigen::MatrixXcd& s, std::size_t grid_size = 101);
Theorem1Report verify_theorem1(const Eigen::MatrixXd& s, std::size_t grid_size = 101);

namespace serial {
Theorem1Report verify_theorem1(const Eigen::MatrixXcd& s, std::size_t grid_size = 101);
}

}  // namespace olma
