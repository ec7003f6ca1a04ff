#pragma once

#include <iosfwd>

#include <Eigen/Dense>

namespace gapbound {

/// Dense Hermitian matrix. Construction rejects input whose entries differ
/// from the conjugate transpose by more than 1e-12; accepted input is
/// symmetrized so the stored matrix is exactly Hermitian.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Eigen::MatrixXcd& m);

  int n() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }

  /// Max row 1-norm, ||H||_inf.
  double spectral_scale() const;

  /// True when every entry has zero imaginary part.
  bool is_real() const { return real_; }

 private:
  Eigen::MatrixXcd m_;
  bool real_ = false;
};

/// Two lowest eigenpairs plus the full eigenvalue list of the decomposition.
struct SpectrumResult {
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  Eigen::VectorXcd psi0;
  double residual0 = 0.0;
  double residual1 = 0.0;
  /// Ascending; kept for trace checks and spectrum dumps.
  Eigen::VectorXd eigenvalues;
};

struct SolverOptions {
  /// Residual acceptance, relative to max(1, spectral scale).
  double tol = 1e-10;
  /// Degenerate when gap <= degeneracy_tol * spectral scale.
  double degeneracy_tol = 1e-8;
};

/// Full decomposition by unitary reduction to real tridiagonal form followed
/// by implicit-shift QR sweeps, then selection of the lowest two pairs.
///
/// The global phase of psi0 is fixed so that its largest-magnitude entry is
/// real and positive.
///
/// Throws ValidationError when n < 2, DegenerateGroundState when the gap is
/// below tolerance, and InvariantFailure if a residual exceeds the bound.
SpectrumResult lowest_two(const HermitianMatrix& h, const SolverOptions& opts = {});

/// Writes "<index> <eigenvalue>" lines, zero-based, 17 significant digits.
void write_spectrum(std::ostream& out, const SpectrumResult& result);

}  // namespace gapbound
