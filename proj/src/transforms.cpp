#include "olma/transforms.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace olma {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative decimation-in-time radix-2 kernel with a precomputed
// bit-reversal permutation and twiddle table. Transforms in place.
struct Pow2Kernel {
  std::size_t n = 0;
  std::vector<std::size_t> rev;
  std::vector<cplx> twiddle;  // e^{-2*pi*i*j/n}, j < n/2

  explicit Pow2Kernel(std::size_t len) : n(len), rev(len) {
    std::size_t lg = 0;
    while ((std::size_t{1} << lg) < n) ++lg;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < lg; ++b) {
        r |= ((i >> b) & 1u) << (lg - 1 - b);
      }
      rev[i] = r;
    }
    twiddle.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
      const double ang = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
      twiddle[j] = {std::cos(ang), std::sin(ang)};
    }
  }

  void run(cplx* a) const {
    for (std::size_t i = 0; i < n; ++i) {
      if (i < rev[i]) std::swap(a[i], a[rev[i]]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n / len;
      for (std::size_t start = 0; start < n; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const cplx w = twiddle[k * step];
          const cplx u = a[start + k];
          const cplx v = a[start + k + half] * w;
          a[start + k] = u + v;
          a[start + k + half] = u - v;
        }
      }
    }
  }
};

}  // namespace

// DftPlan picks one of three methods per length:
//  - power of two: the radix-2 kernel directly;
//  - small non-power-of-two: direct evaluation from a dense twiddle matrix
//    (cheaper than Bluestein below ~64 points);
//  - everything else: Bluestein's chirp-z trick. Writing mk as
//    (m^2 + k^2 - (k-m)^2)/2 turns the DFT into a linear convolution of
//    a_m = x_m e^{-i*pi*m^2/n} with b_m = e^{+i*pi*m^2/n}, evaluated by a
//    power-of-two cyclic convolution of size >= 2n-1. The chirp phases use
//    m^2 mod 2n in exact integer arithmetic to keep the angle arguments
//    small and accurate for large m.
struct DftPlan::Impl {
  enum class Method { pow2, direct, bluestein };

  std::size_t n = 0;
  Method method = Method::direct;

  std::unique_ptr<Pow2Kernel> pow2;       // pow2 and bluestein
  std::vector<cplx> twiddle_matrix;       // direct: row-major n x n
  std::vector<cplx> chirp;                // bluestein: e^{-i*pi*m^2/n}
  std::vector<cplx> filter_spectrum;      // bluestein: FFT of the b sequence
  std::size_t conv_len = 0;               // bluestein: cyclic convolution size
};

DftPlan::DftPlan(std::size_t n) : impl_(new Impl) {
  if (n == 0) throw std::invalid_argument("dft: empty input");
  impl_->n = n;
  if (is_pow2(n)) {
    impl_->method = Impl::Method::pow2;
    impl_->pow2 = std::make_unique<Pow2Kernel>(n);
    return;
  }
  if (n < 64) {
    impl_->method = Impl::Method::direct;
    impl_->twiddle_matrix.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t m = 0; m < n; ++m) {
        const std::size_t e = (k * m) % n;
        const double ang = -2.0 * kPi * static_cast<double>(e) / static_cast<double>(n);
        impl_->twiddle_matrix[k * n + m] = {std::cos(ang), std::sin(ang)};
      }
    }
    return;
  }
  impl_->method = Impl::Method::bluestein;
  impl_->conv_len = next_pow2(2 * n - 1);
  impl_->pow2 = std::make_unique<Pow2Kernel>(impl_->conv_len);
  impl_->chirp.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t e = (m * m) % (2 * n);
    const double ang = -kPi * static_cast<double>(e) / static_cast<double>(n);
    impl_->chirp[m] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cplx> b(impl_->conv_len, cplx{0.0, 0.0});
  for (std::size_t m = 0; m < n; ++m) {
    const cplx v = std::conj(impl_->chirp[m]);
    b[m] = v;
    if (m != 0) b[impl_->conv_len - m] = v;
  }
  impl_->pow2->run(b.data());
  impl_->filter_spectrum = std::move(b);
}

DftPlan::~DftPlan() { delete impl_; }

std::size_t DftPlan::length() const { return impl_->n; }

void DftPlan::forward(const cplx* in, cplx* out) const {
  const std::size_t n = impl_->n;
  switch (impl_->method) {
    case Impl::Method::pow2: {
      std::copy(in, in + n, out);
      impl_->pow2->run(out);
      return;
    }
    case Impl::Method::direct: {
      const cplx* w = impl_->twiddle_matrix.data();
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        const cplx* row = w + k * n;
        for (std::size_t m = 0; m < n; ++m) acc += row[m] * in[m];
        out[k] = acc;
      }
      return;
    }
    case Impl::Method::bluestein: {
      const std::size_t len = impl_->conv_len;
      std::vector<cplx> a(len, cplx{0.0, 0.0});
      for (std::size_t m = 0; m < n; ++m) a[m] = in[m] * impl_->chirp[m];
      impl_->pow2->run(a.data());
      for (std::size_t j = 0; j < len; ++j) {
        a[j] = std::conj(a[j] * impl_->filter_spectrum[j]);
      }
      impl_->pow2->run(a.data());
      // The two conjugations around the second pass make it an inverse
      // transform up to the 1/len scale folded in below.
      const double scale = 1.0 / static_cast<double>(len);
      for (std::size_t k = 0; k < n; ++k) {
        out[k] = impl_->chirp[k] * std::conj(a[k]) * scale;
      }
      return;
    }
  }
}

const DftPlan& plan_for(std::size_t n) {
  static std::mutex mu;
  static std::unordered_map<std::size_t, std::unique_ptr<DftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DftPlan>(n);
  return *slot;
}

namespace {

Spectrum spectrum_from(std::vector<cplx> coeffs, DftNorm norm) {
  Spectrum s;
  s.normalization = norm;
  s.re.resize(coeffs.size());
  s.im.resize(coeffs.size());
  const double scale =
      norm == DftNorm::orthonormal ? 1.0 / std::sqrt(static_cast<double>(coeffs.size())) : 1.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    s.re[k] = coeffs[k].real() * scale;
    s.im[k] = coeffs[k].imag() * scale;
  }
  return s;
}

std::vector<cplx> complexify(const std::vector<double>& seq) {
  std::vector<cplx> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = {seq[i], 0.0};
  return out;
}

}  // namespace

Spectrum dft(const std::vector<std::complex<double>>& seq, DftNorm norm) {
  if (seq.empty()) throw std::invalid_argument("dft: empty input");
  std::vector<cplx> out(seq.size());
  plan_for(seq.size()).forward(seq.data(), out.data());
  return spectrum_from(std::move(out), norm);
}

Spectrum dft(const std::vector<double>& seq, DftNorm norm) {
  return dft(complexify(seq), norm);
}

std::vector<std::complex<double>> idft(const Spectrum& spec) {
  const std::size_t n = spec.size();
  if (n == 0) throw std::invalid_argument("idft: empty input");
  // Inverse through the forward plan: IDFT(X) = conj(DFT(conj(X))) / n,
  // with the 1/n replaced by 1/sqrt(n) in orthonormal mode.
  std::vector<cplx> tmp(n);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = {spec.re[k], -spec.im[k]};
  std::vector<cplx> out(n);
  plan_for(n).forward(tmp.data(), out.data());
  const double scale = spec.normalization == DftNorm::orthonormal
                           ? 1.0 / std::sqrt(static_cast<double>(n))
                           : 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) out[m] = std::conj(out[m]) * scale;
  return out;
}

WaveletCoeffs haar_dwt(const std::vector<double>& seq) {
  const std::size_t n = seq.size();
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("haar_dwt: input length must be even and >= 2");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  WaveletCoeffs c;
  c.cA.resize(n / 2);
  c.cD.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    c.cA[k] = (seq[2 * k] + seq[2 * k + 1]) * inv_sqrt2;
    c.cD[k] = (seq[2 * k] - seq[2 * k + 1]) * inv_sqrt2;
  }
  return c;
}

std::vector<double> haar_idwt(const WaveletCoeffs& coeffs) {
  if (coeffs.cA.size() != coeffs.cD.size()) {
    throw std::invalid_argument("haar_idwt: cA and cD lengths differ");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<double> out(2 * coeffs.cA.size());
  for (std::size_t k = 0; k < coeffs.cA.size(); ++k) {
    out[2 * k] = (coeffs.cA[k] + coeffs.cD[k]) * inv_sqrt2;
    out[2 * k + 1] = (coeffs.cA[k] - coeffs.cD[k]) * inv_sqrt2;
  }
  return out;
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim) {
  UnitaryMatrix u(dim);
  for (std::size_t i = 0; i < dim; ++i) u(i, i) = {1.0, 0.0};
  return u;
}

double unitarity_defect(const UnitaryMatrix& u) {
  const std::size_t n = u.n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) acc += u(i, k) * std::conj(u(j, k));
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

UnitaryMatrix unitary_log_path(const UnitaryMatrix& u, double lambda) {
  if (u.n == 0) throw std::invalid_argument("unitary_log_path: empty matrix");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("unitary_log_path: lambda must lie in [0, 1]");
  }
  if (unitarity_defect(u) > 1e-6) {
    throw std::invalid_argument("unitary_log_path: input is not unitary");
  }
  const auto n = static_cast<Eigen::Index>(u.n);
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = u(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  // A unitary matrix is normal, so its Schur form is diagonal and the Schur
  // vectors are an orthonormal eigenbasis.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m);
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("unitary_log_path: Schur decomposition failed");
  }
  const Eigen::MatrixXcd& q = schur.matrixU();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double theta = std::arg(schur.matrixT()(j, j));
    if (theta <= -kPi) theta = kPi;
    phases(j) = std::polar(1.0, lambda * theta);
  }
  const Eigen::MatrixXcd phi = q * phases.asDiagonal() * q.adjoint();
  UnitaryMatrix out(u.n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = phi(i, j);
    }
  }
  return out;
}

namespace reference {

namespace {

Spectrum direct_sum(const std::vector<cplx>& seq, DftNorm norm) {
  if (seq.empty()) throw std::invalid_argument("dft: empty input");
  const std::size_t n = seq.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      const double ang =
          -2.0 * kPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      acc += seq[m] * cplx{std::cos(ang), std::sin(ang)};
    }
    out[k] = acc;
  }
  return spectrum_from(std::move(out), norm);
}

}  // namespace

Spectrum dft(const std::vector<std::complex<double>>& seq, DftNorm norm) {
  return direct_sum(seq, norm);
}

Spectrum dft(const std::vector<double>& seq, DftNorm norm) {
  return direct_sum(complexify(seq), norm);
}

}  // namespace reference

}  // namespace olma
