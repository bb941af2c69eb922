#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "olma/rng.hpp"
#include "olma/transforms.hpp"

using olma::DftNorm;
using olma::Spectrum;

namespace {

std::vector<double> random_vector(olma::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

double max_abs_diff(const std::vector<std::complex<double>>& got,
                    const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    worst = std::max(worst, std::abs(got[i] - std::complex<double>(want[i])));
  }
  return worst;
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("eight-point transform matches an externally computed spectrum") {
  const std::vector<double> x = {0.5, -1.25, 2.0, 3.75, -0.5, 1.5, -2.25, 0.25};
  const double want_re[] = {4.0, -3.419417382415922, 0.25, 5.419417382415922,
                            -4.5, 5.419417382415922, 0.25, -3.419417382415922};
  const double want_im[] = {0.0, -4.7803300858899105, 3.75, 3.7196699141100895,
                            0.0, -3.7196699141100895, -3.75, 4.7803300858899105};
  const Spectrum s = olma::dft(x, DftNorm::unnormalized);
  REQUIRE(s.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(s.re[k] == doctest::Approx(want_re[k]).epsilon(1e-12));
    CHECK(s.im[k] == doctest::Approx(want_im[k]).epsilon(1e-12));
  }
}

TEST_CASE("six-point transform (direct small-length path) matches the oracle") {
  const std::vector<double> x = {1.0, -2.0, 0.5, 3.0, -1.5, 0.25};
  const double want_re[] = {1.25, -2.375, 5.375, -1.25, 5.375, -2.375};
  const double want_im[] = {0.0,  0.21650635094610965, 3.680607966083864,
                            0.0, -3.680607966083864, -0.21650635094610965};
  const Spectrum s = olma::dft(x, DftNorm::unnormalized);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(s.re[k] == doctest::Approx(want_re[k]).epsilon(1e-12));
    CHECK(s.im[k] == doctest::Approx(want_im[k]).epsilon(1e-12));
  }
}

TEST_CASE("fast paths agree with the direct reference sum") {
  olma::Rng rng(11);
  for (const std::size_t n : {2u, 3u, 5u, 8u, 17u, 63u, 64u, 96u, 128u, 720u, 1000u}) {
    const std::vector<double> x = random_vector(rng, n);
    const Spectrum fast = olma::dft(x, DftNorm::unnormalized);
    const Spectrum slow = olma::reference::dft(x, DftNorm::unnormalized);
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(slow.coeff(k)));
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(fast.coeff(k) - slow.coeff(k)) <= 1e-10 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("round trips recover the input under both normalizations") {
  olma::Rng rng(23);
  for (const std::size_t n : {1u, 2u, 7u, 16u, 31u, 96u, 255u, 256u}) {
    const std::vector<double> x = random_vector(rng, n);
    const double scale = std::max(1.0, l2_norm(x));
    for (const DftNorm norm : {DftNorm::unnormalized, DftNorm::orthonormal}) {
      const auto back = olma::idft(olma::dft(x, norm));
      CHECK(max_abs_diff(back, x) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("orthonormal transform preserves the Euclidean norm") {
  olma::Rng rng(31);
  for (const std::size_t n : {2u, 9u, 64u, 97u}) {
    const std::vector<double> x = random_vector(rng, n);
    const Spectrum s = olma::dft(x, DftNorm::orthonormal);
    double freq = 0.0;
    for (std::size_t k = 0; k < n; ++k) freq += std::norm(s.coeff(k));
    const double time = l2_norm(x) * l2_norm(x);
    CHECK(std::sqrt(freq) == doctest::Approx(std::sqrt(time)).epsilon(1e-9));
  }
}

TEST_CASE("unnormalized spectrum satisfies the energy identity") {
  olma::Rng rng(37);
  for (const std::size_t n : {4u, 12u, 50u, 128u}) {
    const std::vector<double> x = random_vector(rng, n);
    const Spectrum s = olma::dft(x, DftNorm::unnormalized);
    double freq = 0.0;
    for (std::size_t k = 0; k < n; ++k) freq += std::norm(s.coeff(k));
    const double time = l2_norm(x) * l2_norm(x);
    CHECK(freq == doctest::Approx(static_cast<double>(n) * time).epsilon(1e-9));
  }
}

TEST_CASE("real input yields conjugate-symmetric coefficients") {
  olma::Rng rng(41);
  const std::vector<double> x = random_vector(rng, 12);
  const Spectrum s = olma::dft(x, DftNorm::unnormalized);
  for (std::size_t k = 1; k < 12; ++k) {
    CHECK(s.coeff(k).real() == doctest::Approx(s.coeff(12 - k).real()).epsilon(1e-12));
    CHECK(s.coeff(k).imag() == doctest::Approx(-s.coeff(12 - k).imag()).epsilon(1e-12));
  }
}

TEST_CASE("haar transform of a known vector") {
  const auto w = olma::haar_dwt({1.0, 2.0, 3.0, 4.0});
  REQUIRE(w.cA.size() == 2);
  REQUIRE(w.cD.size() == 2);
  CHECK(w.cA[0] == doctest::Approx(2.1213203435596424).epsilon(1e-14));
  CHECK(w.cA[1] == doctest::Approx(4.949747468305833).epsilon(1e-14));
  CHECK(w.cD[0] == doctest::Approx(-0.7071067811865475).epsilon(1e-14));
  CHECK(w.cD[1] == doctest::Approx(-0.7071067811865475).epsilon(1e-14));
}

TEST_CASE("haar round trip and energy preservation") {
  olma::Rng rng(43);
  for (const std::size_t n : {2u, 8u, 96u, 254u}) {
    const std::vector<double> x = random_vector(rng, n);
    const auto w = olma::haar_dwt(x);
    const auto back = olma::haar_idwt(w);
    REQUIRE(back.size() == n);
    double worst = 0.0;
    double coeff_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - x[i]));
    for (double v : w.cA) coeff_energy += v * v;
    for (double v : w.cD) coeff_energy += v * v;
    const double norm = l2_norm(x);
    CHECK(worst <= 1e-12 * std::max(1.0, norm));
    CHECK(std::sqrt(coeff_energy) == doctest::Approx(norm).epsilon(1e-9));
  }
}

TEST_CASE("haar rejects odd lengths") {
  CHECK_THROWS_AS(olma::haar_dwt({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("unitary path endpoints and interior unitarity") {
  // Build an orthonormal-DFT matrix, a genuinely complex unitary.
  const std::size_t n = 4;
  olma::UnitaryMatrix u(n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = -2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(n);
      u(j, k) = std::polar(s, angle);
    }
  }
  REQUIRE(olma::unitarity_defect(u) <= 1e-12);

  const auto at0 = olma::unitary_log_path(u, 0.0);
  const auto at1 = olma::unitary_log_path(u, 1.0);
  const auto mid = olma::unitary_log_path(u, 0.5);
  const auto id = olma::UnitaryMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(std::abs(at0(i, j) - id(i, j)) <= 1e-9);
      CHECK(std::abs(at1(i, j) - u(i, j)) <= 1e-9);
    }
  }
  CHECK(olma::unitarity_defect(mid) <= 1e-9);

  CHECK_THROWS_AS(olma::unitary_log_path(u, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(olma::unitary_log_path(u, 1.1), std::invalid_argument);
}

TEST_CASE("unitary path rejects a matrix that is not unitary") {
  olma::UnitaryMatrix bad(2);
  bad(0, 0) = 2.0;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS(olma::unitary_log_path(bad, 0.5), std::invalid_argument);
}

TEST_CASE("plan cache hands back one plan per length") {
  const olma::DftPlan& a = olma::plan_for(96);
  const olma::DftPlan& b = olma::plan_for(96);
  CHECK(&a == &b);
  CHECK(a.length() == 96);
}

TEST_CASE("complex-input transform matches the reference") {
  olma::Rng rng(47);
  std::vector<std::complex<double>> z(20);
  for (auto& v : z) v = {rng.normal(), rng.normal()};
  const Spectrum fast = olma::dft(z, DftNorm::unnormalized);
  const Spectrum slow = olma::reference::dft(z, DftNorm::unnormalized);
  for (std::size_t k = 0; k < z.size(); ++k) {
    CHECK(std::abs(fast.coeff(k) - slow.coeff(k)) <= 1e-10);
  }
}
