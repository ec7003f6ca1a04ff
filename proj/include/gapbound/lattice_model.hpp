#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gapbound {

using Complex = std::complex<double>;
using Block = Eigen::MatrixXcd;

/// Site label (x, i): supersite coordinate x in 1..L, internal index i in
/// 1..N0. Both are one-based, matching the model file format.
struct SiteIndex {
  int x = 1;
  int i = 1;

  /// Zero-based row of this site in the assembled one-particle matrix.
  int flat(int n0) const { return (x - 1) * n0 + (i - 1); }
};

/// Hopping block between supersites x < x_prime. Entry (i, j) couples
/// (x, i+1) to (x_prime, j+1). Its conjugate transpose is implied.
struct HoppingBlock {
  int x = 0;
  int x_prime = 0;
  Block h;
};

/// Hermitian potential block on a single supersite.
struct OnsiteBlock {
  int x = 0;
  Block v;
};

/// Declarative one-particle lattice Hamiltonian.
///
/// Each off-diagonal pair is stored once with x < x_prime and each onsite
/// block once; assembly does not add any implicit Hermitian-conjugate copy
/// beyond mirroring the off-diagonal blocks.
struct ModelSpec {
  int L = 0;
  int n0 = 1;
  std::vector<HoppingBlock> hopping;
  std::vector<OnsiteBlock> onsite;
  std::string label;

  int dimension() const { return L * n0; }
};

/// Exponential hopping envelope: block_norm(x, x') <= cv * exp(-mu |x - x'|).
struct HoppingEnvelope {
  double cv = 1.0;
  double mu = 1.0;

  double operator()(int distance) const;
};

/// Nearest-neighbour hopping bound: norm <= v0 at distance 1, zero beyond.
struct NNBound {
  double v0 = 0.0;
};

/// Throws ValidationError (or NonHermitian) if the spec breaks an invariant:
/// indices out of range, duplicate pairs or onsite entries, wrong block
/// shapes, or onsite blocks that are not Hermitian to 1e-12 entrywise.
void validate(const ModelSpec& spec);

/// One-particle matrix of dimension L*N0, Hermitian by construction.
Eigen::MatrixXcd assemble(const ModelSpec& spec);

/// Spectral norm (largest singular value) of the block coupling x and x'.
/// Symmetric in its arguments; zero when no block is stored.
double block_norm(const ModelSpec& spec, int x, int x_prime);

/// Smallest cv such that every stored block obeys the envelope at rate mu.
HoppingEnvelope fit_envelope(const ModelSpec& spec, double mu);

/// Throws EnvelopeViolation listing every pair whose norm exceeds the
/// envelope by more than a relative 1e-12.
void check_envelope(const ModelSpec& spec, const HoppingEnvelope& envelope);

/// Returns the largest nearest-neighbour norm. Any block at distance two or
/// more with a nonzero entry raises LongRangeHopping; near-zeros are not
/// tolerated.
NNBound check_nearest_neighbor(const ModelSpec& spec);

/// Chain of L+1 sites with unit nearest-neighbour hopping and potential h0
/// on the centre site (one-based index L/2 + 1). L must be even and >= 2.
ModelSpec impurity_model(int L, double h0);

/// One-based coordinate of the defect site in impurity_model(L, ...).
inline int impurity_center(int L) { return L / 2 + 1; }

/// Square-lattice strip of `width` rows and `length` columns, flattened so
/// that each column is one supersite with N0 = width. `potential` is indexed
/// [column * width + row] and may be empty.
struct StripLattice {
  int width = 1;
  int length = 2;
  Complex hop_along = -1.0;
  Complex hop_across = -1.0;
  std::vector<double> potential;
};

ModelSpec flatten_strip(const StripLattice& strip);

/// Model file reader/writer (line-oriented text, see README).
ModelSpec parse_model(std::istream& in);
ModelSpec read_model_file(const std::string& path);
void write_model(std::ostream& out, const ModelSpec& spec);

}  // namespace gapbound
