#include "olma/theorem.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "olma/rng.hpp"
#include "olma/transforms.hpp"

namespace olma {

namespace {

using cplx = std::complex<double>;

void require_hermitian(const Eigen::MatrixXcd& s, const char* what) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
  double scale = 1.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      scale = std::max(scale, std::abs(s(i, j)));
    }
  }
  const double tol = 1e-9 * scale;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (std::abs(s(i, j) - std::conj(s(j, i))) > tol) {
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
      }
    }
  }
}

double hermitian_determinant(const Eigen::MatrixXcd& s) {
  Eigen::LLT<Eigen::MatrixXcd> llt(s);
  if (llt.info() == Eigen::Success) {
    double det = 1.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const double d = std::abs(l(i, i));
      det *= d * d;
    }
    return det;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("hadamard_gap: eigenvalue computation failed");
  }
  double det = 1.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) det *= eig.eigenvalues()(i);
  return det;
}

UnitaryMatrix to_unitary(const Eigen::MatrixXcd& m) {
  UnitaryMatrix u(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    }
  }
  return u;
}

Eigen::MatrixXcd to_eigen(const UnitaryMatrix& u) {
  const auto n = static_cast<Eigen::Index>(u.n);
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = u(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return m;
}

// Eigenvectors of S, columns ordered by descending eigenvalue, each scaled so
// its first nonzero component is real and positive. This pins down the basis
// (up to degenerate eigenvalues) so reports are stable run to run.
Eigen::MatrixXcd canonical_eigenbasis(const Eigen::MatrixXcd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("verify_theorem1: eigendecomposition failed");
  }
  const Eigen::Index n = s.rows();
  Eigen::MatrixXcd u(n, n);
  // SelfAdjointEigenSolver sorts ascending; reverse the columns.
  for (Eigen::Index j = 0; j < n; ++j) {
    u.col(j) = eig.eigenvectors().col(n - 1 - j);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx v = u(i, j);
      if (std::abs(v) > 1e-12) {
        u.col(j) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return u;
}

double diag_product(const Eigen::MatrixXcd& s) {
  double p = 1.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) p *= s(i, i).real();
  return p;
}

Theorem1Report verify_impl(const Eigen::MatrixXcd& s, std::size_t grid_size,
                           bool parallel) {
  require_hermitian(s, "verify_theorem1");
  if (grid_size < 2) {
    throw std::invalid_argument("verify_theorem1: grid needs at least both endpoints");
  }

  double max_corr = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (i == j) continue;
      const double denom = std::sqrt(s(i, i).real() * s(j, j).real());
      if (denom > 0.0) max_corr = std::max(max_corr, std::abs(s(i, j)) / denom);
    }
  }
  if (!(max_corr > 1e-6)) {
    throw std::invalid_argument("Theorem 1 precondition violated: matrix has no "
                                "off-diagonal correlation");
  }

  const Eigen::MatrixXcd basis = canonical_eigenbasis(s);
  const UnitaryMatrix f_v = to_unitary(basis.adjoint());

  Theorem1Report report;
  report.diag_product_original = diag_product(s);
  report.determinant = hermitian_determinant(s);
  report.lambda_grid.resize(grid_size);
  report.diag_product_at_lambda.resize(grid_size);
  const auto count = static_cast<std::ptrdiff_t>(grid_size);
  const double denom = static_cast<double>(grid_size - 1);

  auto eval_point = [&](std::ptrdiff_t g) {
    const double lambda = static_cast<double>(g) / denom;
    const Eigen::MatrixXcd phi = to_eigen(unitary_log_path(f_v, lambda));
    const Eigen::MatrixXcd rotated = phi * s * phi.adjoint();
    report.lambda_grid[static_cast<std::size_t>(g)] = lambda;
    report.diag_product_at_lambda[static_cast<std::size_t>(g)] = diag_product(rotated);
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t g = 0; g < count; ++g) eval_point(g);
  } else {
    for (std::ptrdiff_t g = 0; g < count; ++g) eval_point(g);
  }

  const double tol = 1e-9 * report.diag_product_original;
  for (std::size_t g = 0; g < grid_size; ++g) {
    if (report.diag_product_at_lambda[g] < report.diag_product_original - tol) {
      report.witness_lambda = report.lambda_grid[g];
      break;
    }
  }

  const double end_product = report.diag_product_at_lambda[grid_size - 1];
  if (std::abs(end_product - report.determinant) > 1e-8 * report.determinant) {
    throw std::runtime_error(
        "verify_theorem1: diagonal product at lambda=1 does not match the determinant");
  }
  return report;
}

}  // namespace

Eigen::MatrixXd sample_correlated_gaussian(const Eigen::MatrixXd& cov, std::size_t l,
                                           std::uint64_t seed) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw std::invalid_argument("sample_correlated_gaussian: covariance must be square");
  }
  if (l < 1) throw std::invalid_argument("sample_correlated_gaussian: need l >= 1");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "sample_correlated_gaussian: covariance is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  const Eigen::Index c = cov.rows();
  Rng rng(seed);
  Eigen::MatrixXd z(c, static_cast<Eigen::Index>(l));
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < c; ++i) z(i, j) = rng.normal();
  }
  return chol * z;
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& g) {
  if (g.cols() < 1) throw std::invalid_argument("empirical_covariance: need l >= 1");
  return (g * g.transpose()) / static_cast<double>(g.cols());
}

Eigen::MatrixXcd empirical_covariance(const Eigen::MatrixXcd& g) {
  if (g.cols() < 1) throw std::invalid_argument("empirical_covariance: need l >= 1");
  return (g * g.adjoint()) / static_cast<double>(g.cols());
}

HadamardGap hadamard_gap(const Eigen::MatrixXcd& s) {
  require_hermitian(s, "hadamard_gap");
  HadamardGap out;
  out.diag_product = diag_product(s);
  out.determinant = hermitian_determinant(s);
  out.gap = out.diag_product - out.determinant;
  return out;
}

HadamardGap hadamard_gap(const Eigen::MatrixXd& s) {
  return hadamard_gap(Eigen::MatrixXcd(s.cast<cplx>()));
}

Theorem1Report verify_theorem1(const Eigen::MatrixXcd& s, std::size_t grid_size) {
  return verify_impl(s, grid_size, true);
}

Theorem1Report verify_theorem1(const Eigen::MatrixXd& s, std::size_t grid_size) {
  return verify_impl(s.cast<cplx>(), grid_size, true);
}

namespace serial {

Theorem1Report verify_theorem1(const Eigen::MatrixXcd& s, std::size_t grid_size) {
  return verify_impl(s, grid_size, false);
}

}  // namespace serial

void to_json(nlohmann::json& j, const Theorem1Report& report) {
  j = nlohmann::json{{"diag_product_original", report.diag_product_original},
                     {"determinant", report.determinant},
                     {"lambda_grid", report.lambda_grid},
                     {"diag_product_at_lambda", report.diag_product_at_lambda}};
  if (report.witness_lambda) {
    j["witness_lambda"] = *report.witness_lambda;
  } else {
    j["witness_lambda"] = nullptr;
  }
}

}  // namespace olma
