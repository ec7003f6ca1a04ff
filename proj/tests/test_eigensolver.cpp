#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gapbound/eigensolver.hpp"
#include "gapbound/errors.hpp"
#include "gapbound/lattice_model.hpp"
#include "gapbound/rng.hpp"
#include "oracles.hpp"

using namespace gapbound;

namespace {

Eigen::MatrixXcd random_hermitian(Rng& rng, int n) {
  Eigen::MatrixXcd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = std::complex<double>(rng.normal(), rng.normal());
  return 0.5 * (b + b.adjoint());
}

}  // namespace

TEST(LowestTwo, TwoByTwoByHand) {
  Eigen::MatrixXcd m(2, 2);
  m << 0, -1, -1, 0;
  const SpectrumResult r = lowest_two(HermitianMatrix(m));
  EXPECT_NEAR(r.e0, -1.0, 1e-14);
  EXPECT_NEAR(r.e1, 1.0, 1e-14);
  EXPECT_NEAR(r.gap, 2.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(r.psi0(0) - h), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r.psi0(1) - h), 0.0, 1e-14);
}

TEST(LowestTwo, ThreeSiteFreeChain) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = 1.0;
  const SpectrumResult r = lowest_two(HermitianMatrix(m));
  EXPECT_NEAR(r.e0, -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.e1, 0.0, 1e-14);
  EXPECT_NEAR(r.gap, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.psi0.norm(), 1.0, 1e-14);
}

TEST(LowestTwo, DegenerateIsRejected) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2) * 3.0;
  EXPECT_THROW(lowest_two(HermitianMatrix(m)), DegenerateGroundState);
}

TEST(LowestTwo, InputErrors) {
  EXPECT_THROW(lowest_two(HermitianMatrix(Eigen::MatrixXcd::Ones(1, 1))), ValidationError);
  Eigen::MatrixXcd bad(2, 2);
  bad << 0, 1, 2, 0;
  EXPECT_THROW(HermitianMatrix{bad}, NonHermitian);
  EXPECT_THROW(HermitianMatrix{Eigen::MatrixXcd::Zero(2, 3)}, ValidationError);
  Eigen::MatrixXcd within(2, 2);
  within << 0, 1, 1.0 + 5e-13, 0;
  EXPECT_NO_THROW(HermitianMatrix{within});
}

TEST(LowestTwo, PhaseConvention) {
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    const SpectrumResult r = lowest_two(HermitianMatrix(random_hermitian(rng, 5)));
    Eigen::Index k = 0;
    r.psi0.cwiseAbs().maxCoeff(&k);
    EXPECT_EQ(r.psi0(k).imag(), 0.0);
    EXPECT_GT(r.psi0(k).real(), 0.0);
    EXPECT_NEAR(r.psi0.norm(), 1.0, 1e-12);
  }
}

TEST(LowestTwo, AgreesWithInertiaOracle) {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 5;
    const Eigen::MatrixXcd m = random_hermitian(rng, n);
    const HermitianMatrix h(m);
    const SpectrumResult r = lowest_two(h);
    const double scale = std::max(1.0, h.spectral_scale());
    EXPECT_NEAR(r.e0, oracle::kth_eigenvalue(m, 0), 1e-10 * scale);
    EXPECT_NEAR(r.e1, oracle::kth_eigenvalue(m, 1), 1e-10 * scale);
    EXPECT_LE(r.residual0, 1e-10 * scale);
    EXPECT_LE(r.residual1, 1e-10 * scale);
    EXPECT_NEAR(r.eigenvalues.sum(), m.trace().real(), 1e-8 * n * scale);
  }
}

TEST(LowestTwo, ImpurityChainAgreesWithContinuant) {
  const int L = 500;
  const double h0 = -0.3;
  const ModelSpec spec = impurity_model(L, h0);
  const SpectrumResult r = lowest_two(HermitianMatrix(assemble(spec)));
  std::vector<double> d(L + 1, 0.0), e(L, 1.0);
  d[impurity_center(L) - 1] = h0;
  EXPECT_NEAR(r.e0, oracle::tridiagonal_kth(d, e, 0), 1e-11);
  EXPECT_NEAR(r.e1, oracle::tridiagonal_kth(d, e, 1), 1e-11);
  // Bound state below the band edge at -2: E0 = -sqrt(h0^2 + 4).
  EXPECT_NEAR(r.e0, -std::sqrt(h0 * h0 + 4.0), 1e-9);
}

TEST(LowestTwo, ShiftInvariance) {
  Rng rng(77);
  for (int t = 0; t < 30; ++t) {
    const int n = 3 + t % 6;
    const Eigen::MatrixXcd m = random_hermitian(rng, n);
    const double c = rng.uniform(-5.0, 5.0);
    const SpectrumResult a = lowest_two(HermitianMatrix(m));
    const SpectrumResult b =
        lowest_two(HermitianMatrix(m + c * Eigen::MatrixXcd::Identity(n, n)));
    EXPECT_NEAR(b.e0, a.e0 + c, 1e-10 * (1 + std::abs(c)));
    EXPECT_NEAR(b.gap, a.gap, 1e-10);
    EXPECT_GT(std::abs(a.psi0.dot(b.psi0)), 1.0 - 1e-10);
  }
}

TEST(LowestTwo, RealBranchMatchesComplexBranch) {
  Rng rng(8);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = rng.normal();
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::MatrixXcd m = a.cast<std::complex<double>>();
  const SpectrumResult real = lowest_two(HermitianMatrix(m));
  // A diagonal unitary gauge makes the matrix complex without changing eigenvalues.
  Eigen::VectorXcd phase(6);
  for (int k = 0; k < 6; ++k) phase(k) = std::polar(1.0, 0.3 * k);
  const Eigen::MatrixXcd u = phase.asDiagonal();
  const SpectrumResult cplx = lowest_two(HermitianMatrix(u * m * u.adjoint()));
  EXPECT_NEAR(real.e0, cplx.e0, 1e-12);
  EXPECT_NEAR(real.e1, cplx.e1, 1e-12);
  EXPECT_NEAR(real.psi0.cwiseAbs().maxCoeff(), cplx.psi0.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(WriteSpectrum, Format) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 2.0;
  m(1, 1) = -1.0;
  m(2, 2) = 0.1;
  std::ostringstream out;
  write_spectrum(out, lowest_two(HermitianMatrix(m)));
  EXPECT_EQ(out.str(), "0 -1\n1 0.10000000000000001\n2 2\n");
}
