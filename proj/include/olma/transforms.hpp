#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace olma {

enum class DftNorm { unnormalized, orthonormal };

/**
 * Complex DFT coefficients, split into real and imaginary parts, together
 * with the normalization the transform was taken under. For real input in
 * unnormalized mode the coefficients obey the conjugate symmetry
 * X[k] = conj(X[n-k]).
 */
struct Spectrum {
  std::vector<double> re;
  std::vector<double> im;
  DftNorm normalization = DftNorm::unnormalized;

  std::size_t size() const { return re.size(); }
  std::complex<double> coeff(std::size_t k) const { return {re[k], im[k]}; }
};

/** Single-level Haar approximation (cA) and detail (cD) coefficients. */
struct WaveletCoeffs {
  std::vector<double> cA;
  std::vector<double> cD;
};

/** Row-major complex square matrix expected to satisfy U * U^H = I. */
struct UnitaryMatrix {
  std::size_t n = 0;
  std::vector<std::complex<double>> entries;

  UnitaryMatrix() = default;
  explicit UnitaryMatrix(std::size_t dim) : n(dim), entries(dim * dim) {}

  std::complex<double>& operator()(std::size_t i, std::size_t j) {
    return entries[i * n + j];
  }
  std::complex<double> operator()(std::size_t i, std::size_t j) const {
    return entries[i * n + j];
  }

  static UnitaryMatrix identity(std::size_t dim);
};

// Largest per-entry deviation of U * U^H from the identity.
double unitarity_defect(const UnitaryMatrix& u);

// Forward DFT, X[k] = s * sum_m x[m] e^{-2*pi*i*m*k/n} with s = 1
// (unnormalized) or 1/sqrt(n) (orthonormal). Dispatches to a radix-2 FFT for
// power-of-two lengths and to Bluestein's chirp-z algorithm otherwise; tiny
// non-power-of-two lengths are evaluated directly.
Spectrum dft(const std::vector<double>& seq, DftNorm norm);
Spectrum dft(const std::vector<std::complex<double>>& seq, DftNorm norm);

// Inverse of dft, honoring the normalization tag of the spectrum.
std::vector<std::complex<double>> idft(const Spectrum& spec);

// Single-level Haar transform over consecutive disjoint pairs:
// cA_k = (x[2k] + x[2k+1]) / sqrt(2), cD_k = (x[2k] - x[2k+1]) / sqrt(2).
// Odd-length input is an error; every supported horizon is even and silent
// padding would corrupt the loss.
WaveletCoeffs haar_dwt(const std::vector<double>& seq);
std::vector<double> haar_idwt(const WaveletCoeffs& coeffs);

// Continuous path from the identity to U inside the unitary group:
// eigendecompose U = V diag(e^{i*theta_j}) V^H with theta_j in (-pi, pi]
// (ties at -pi resolved to +pi) and return V diag(e^{i*lambda*theta_j}) V^H.
UnitaryMatrix unitary_log_path(const UnitaryMatrix& u, double lambda);

// Reusable transform plan for one length: twiddle tables plus, for
// non-power-of-two lengths, the precomputed Bluestein chirp and filter
// spectrum. Immutable after construction and safe to share across threads.
class DftPlan {
 public:
  explicit DftPlan(std::size_t n);
  ~DftPlan();
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;

  std::size_t length() const;

  // out[k] = sum_m in[m] e^{-2*pi*i*m*k/n}; out must not alias in.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  struct Impl;
  Impl* impl_;
};

// Process-wide plan cache; the returned reference stays valid for the
// lifetime of the process. Thread-safe.
const DftPlan& plan_for(std::size_t n);

namespace reference {

// Textbook O(n^2) evaluation of the transform sum. Kept as the oracle the
// FFT paths are tested and benchmarked against.
Spectrum dft(const std::vector<double>& seq, DftNorm norm);
Spectrum dft(const std::vector<std::complex<double>>& seq, DftNorm norm);

}  // namespace reference

}  // namespace olma
