#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "gapbound/lattice_model.hpp"
#include "gapbound/localization.hpp"

namespace gapbound {

/// Real weight g(x) tabulated on x = 1..L; defines G = sum_x g(x) |x,i><x,i|.
class WeightFunction {
 public:
  explicit WeightFunction(std::vector<double> g);

  int L() const { return static_cast<int>(g_.size()); }
  double at(int x) const { return g_[static_cast<std::size_t>(x - 1)]; }
  const std::vector<double>& values() const { return g_; }

  /// g(x) = x.
  static WeightFunction position(int L);
  static WeightFunction constant(int L, double c);

 private:
  std::vector<double> g_;
};

/// Both sides of  gap * (Delta G)^2 <= |<H_OD>| / 2.
///
/// <H_OD> is recorded with the sign of -<[G,[G,H]]>, which is nonnegative on
/// the ground state. hod_explicit sums over the stored hopping blocks;
/// hod_commutator forms the nested commutator on the assembled matrix.
struct ComplementaryReport {
  double mean_g = 0.0;
  double mean_g2 = 0.0;
  double var_g = 0.0;
  double hod_explicit = 0.0;
  double hod_commutator = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  /// max(1, ||H||_inf) * max(1, max g^2); the unit for absolute tolerances.
  double scale = 1.0;
};

ComplementaryReport g_expectations(const Eigen::VectorXcd& psi0,
                                   const ModelSpec& spec,
                                   const WeightFunction& g, double delta_e0);

/// Signed -<[G,[G,H]]> from the hopping blocks alone.
double hod_expectation(const Eigen::VectorXcd& psi0, const ModelSpec& spec,
                       const WeightFunction& g);

/// V_x = 2 sum_{x'} V(x - x') (x - x')^2 maximized over x in 1..L.
double chebyshev_max_vx(const HoppingEnvelope& envelope, int L);
double chebyshev_max_vx(const NNBound& bound, int L);
/// Same with V(x - x') replaced by the stored block norms.
double chebyshev_max_vx_raw(const ModelSpec& spec);

/// min(1, max_x V_x / (2 R^2 gap)).
double chebyshev_tail_bound(const HoppingEnvelope& envelope, int L,
                            double delta_e0, double R);
double chebyshev_tail_bound(const NNBound& bound, int L, double delta_e0,
                            double R);

/// C1 = 4 Cv sum_{x>=0} (x+1)^2 e^{-mu x}, evaluated in closed form.
double c1_constant(const HoppingEnvelope& envelope);

/// Exponential tail envelope prefactor * exp(-(R - r1) / xi), valid R >= r1.
struct TailEnvelope {
  double r1 = 0.0;
  double xi = 1.0;
  double prefactor = 1.0;

  double operator()(double R) const;
};

struct Theorem1Bound {
  double s = 0.5;
  double c1 = 0.0;
  double mu = 1.0;
  double r1 = 0.0;
  double xi1 = 0.0;
  double prefactor = 0.0;
  double delta_e0 = 0.0;
  double delta_x = 0.0;

  TailEnvelope envelope() const { return {r1, xi1, prefactor}; }
};

struct Theorem2Bound {
  double s = 0.5;
  double v0 = 0.0;
  double r1 = 0.0;
  double xi2 = 0.0;
  double prefactor = 0.0;
  double delta_e0 = 0.0;
  double delta_x = 0.0;

  TailEnvelope envelope() const { return {r1, xi2, prefactor}; }
};

/// Exponential-hopping envelope bound. Throws ValidationError for s outside
/// (0, 1), a nonpositive gap, or a negative delta_x.
Theorem1Bound theorem1_bound(const HoppingEnvelope& envelope, double delta_e0,
                             double s, double delta_x);

/// Nearest-neighbour bound. Same preconditions, plus v0 > 0.
Theorem2Bound theorem2_bound(double v0, double delta_e0, double s,
                             double delta_x);

/// s on the grid 0.05, 0.10, ..., 0.95 minimizing the envelope at radius R
/// (ignoring grid points with r1 > R). value is the envelope at R.
struct SChoice {
  double s = 0.5;
  double value = 1.0;
};
SChoice best_s_theorem1(const HoppingEnvelope& envelope, double delta_e0,
                        double delta_x, double R);
SChoice best_s_theorem2(double v0, double delta_e0, double delta_x, double R);

struct EnvelopeCheck {
  std::vector<double> radii;
  std::vector<double> bound_values;
  std::vector<double> tail_values;
  std::vector<double> violations;

  bool passed() const { return violations.empty(); }
};

/// Compares the measured tail with the envelope at R = r1 + k * grid_step
/// (positive R only) up to the largest |x - mean| on the lattice. A point is
/// a violation when tail > envelope + tolerance.
EnvelopeCheck verify_envelope(const DensityProfile& profile, double mean,
                              const TailEnvelope& envelope, double grid_step,
                              double tolerance = 1e-12);
EnvelopeCheck verify_envelope(const DensityProfile& profile, double mean,
                              const Theorem1Bound& bound, double grid_step,
                              double tolerance = 1e-12);
EnvelopeCheck verify_envelope(const DensityProfile& profile, double mean,
                              const Theorem2Bound& bound, double grid_step,
                              double tolerance = 1e-12);

/// Pointwise minimum of the measured-variance Chebyshev bound and an
/// exponential envelope (the latter only where R >= r1).
double combined_tail_bound(double variance, const TailEnvelope& envelope,
                           double R);

enum class TrapezoidVariant { kTheorem1, kTheorem2 };

/// Radial ramp weight with |x - center| as the radial coordinate.
///
/// kTheorem1: zero up to r_inner + dr/3, unit slope to r_inner + 2dr/3, then
/// flat at dr/3. Requires dr > 3.
/// kTheorem2: zero up to r_inner + 1, unit slope to r_inner + dr - 1, then
/// flat at dr - 2. Requires dr > 2.
WeightFunction trapezoid_g(int L, double center, double r_inner,
                           double delta_r, TrapezoidVariant variant);

struct Region {
  double r_inner = 0.0;
  double delta_r = 4.0;
  double center = 1.0;
};

/// |<H_OD>| against sum_x Vhat_{g,x} p_x, where Vhat is the piecewise bound
/// C1 e^{-mu(a - d)} inside a = r + dr/3, C1 on the ramp, and
/// C1 e^{-mu(d - b)} beyond b = r + 2dr/3.
struct AppendixBReport {
  double lhs = 0.0;
  /// sum_x V_{g,x} p_x with V_{g,x} = 2 sum_{x'} (g(x) - g(x'))^2 V(x - x').
  double intermediate = 0.0;
  double rhs = 0.0;
  double scale = 1.0;
  bool passed = false;
};

/// Throws ValidationError if g is not the theorem-1 trapezoid for the region
/// or the spec breaks the envelope.
AppendixBReport verify_appendix_b(const ModelSpec& spec,
                                  const HoppingEnvelope& envelope,
                                  const WeightFunction& g,
                                  const Eigen::VectorXcd& psi0,
                                  const Region& region);

/// "kind,s,r1,xi,prefactor,C1_or_V0,deltaE0,deltaX" header and rows.
void write_bound_csv_header(std::ostream& out);
void write_bound_csv_row(std::ostream& out, const Theorem1Bound& b);
void write_bound_csv_row(std::ostream& out, const Theorem2Bound& b);
/// "R,tail,bound,violation" with violation as 0/1.
void write_envelope_csv(std::ostream& out, const EnvelopeCheck& check,
                        double tolerance = 1e-12);

}  // namespace gapbound
