#include "gapbound/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "gapbound/errors.hpp"

namespace gapbound {
namespace {

constexpr double kHermitianTol = 1e-12;

void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const std::complex<double> pivot = v(arg);
  if (std::abs(pivot) == 0.0) return;
  v *= std::conj(pivot) / std::abs(pivot);
  v(arg) = std::abs(v(arg));
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix must be square");
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
  if (m.size() > 0) {
    const double err = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (err > kHermitianTol) {
      throw NonHermitian("matrix is not Hermitian (max deviation " +
                         std::to_string(err) + ")");
    }
  }
  m_ = 0.5 * (m + m.adjoint());
  real_ = m_.imag().isZero(0.0);
}

double HermitianMatrix::spectral_scale() const {
  if (m_.size() == 0) return 0.0;
  return m_.cwiseAbs().rowwise().sum().maxCoeff();
}

SpectrumResult lowest_two(const HermitianMatrix& h, const SolverOptions& opts) {
  if (h.n() < 2) throw ValidationError("eigensolver needs n >= 2");
  if (!(opts.tol > 0.0) || !(opts.degeneracy_tol > 0.0)) {
    throw ValidationError("solver tolerances must be positive");
  }

  SpectrumResult out;
  Eigen::MatrixXcd vectors;
  // Both branches run Householder tridiagonalization plus implicit QR; the
  // real branch skips complex arithmetic for real-symmetric input.
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real());
    if (es.info() != Eigen::Success) {
      throw InvariantFailure("symmetric eigensolver did not converge");
    }
    out.eigenvalues = es.eigenvalues();
    vectors = es.eigenvectors().leftCols(2).cast<std::complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
    if (es.info() != Eigen::Success) {
      throw InvariantFailure("Hermitian eigensolver did not converge");
    }
    out.eigenvalues = es.eigenvalues();
    vectors = es.eigenvectors().leftCols(2);
  }

  out.e0 = out.eigenvalues(0);
  out.e1 = out.eigenvalues(1);
  out.gap = out.e1 - out.e0;

  const double scale = h.spectral_scale();
  if (out.gap <= opts.degeneracy_tol * scale) {
    throw DegenerateGroundState("ground state is degenerate (gap " +
                                std::to_string(out.gap) + ")");
  }

  out.psi0 = vectors.col(0);
  out.psi0.normalize();
  fix_phase(out.psi0);
  Eigen::VectorXcd psi1 = vectors.col(1).normalized();

  const auto& m = h.matrix();
  out.residual0 = (m * out.psi0 - out.e0 * out.psi0).norm();
  out.residual1 = (m * psi1 - out.e1 * psi1).norm();
  const double limit = opts.tol * std::max(1.0, scale);
  if (out.residual0 > limit || out.residual1 > limit) {
    throw InvariantFailure("eigenpair residual exceeds tolerance");
  }
  return out;
}

void write_spectrum(std::ostream& out, const SpectrumResult& result) {
  char buf[64];
  for (Eigen::Index k = 0; k < result.eigenvalues.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%lld %.17g\n", static_cast<long long>(k),
                  result.eigenvalues(k));
    out << buf;
  }
}

}  // namespace gapbound
