#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "gapbound/lattice_model.hpp"

namespace gapbound {

/// Probability per supersite, p[x-1] for x = 1..L.
class DensityProfile {
 public:
  /// Takes a normalized profile. Throws ValidationError on negative or
  /// non-finite entries, or if the sum differs from 1 by more than 1e-12.
  explicit DensityProfile(std::vector<double> p);

  /// Normalizes arbitrary nonnegative weights.
  static DensityProfile from_weights(std::vector<double> w);

  int L() const { return static_cast<int>(p_.size()); }
  /// One-based access.
  double at(int x) const { return p_[static_cast<std::size_t>(x - 1)]; }
  const std::vector<double>& values() const { return p_; }

 private:
  std::vector<double> p_;
};

struct PositionStats {
  double mean = 0.0;
  double variance = 0.0;

  double std_dev() const;
};

struct DecayFit {
  double xi_fit = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
};

struct FitOptions {
  double floor = 1e-13;
  int boundary_margin = 10;
};

/// p_x = sum_i |psi0(x, i)|^2. Requires ||psi0|| = 1 to 1e-8; the result is
/// renormalized so it sums to one to rounding.
DensityProfile density(const Eigen::VectorXcd& psi0, const ModelSpec& spec);
DensityProfile density(const Eigen::VectorXcd& psi0, int L, int n0);

PositionStats position_stats(const DensityProfile& profile);

/// Probability mass at sites with |x - mean| >= R.
double tail(const DensityProfile& profile, double mean, double R);

/// Least-squares fit of ln p_x = intercept - |x - center| / xi over sites with
/// p_x >= floor that are more than boundary_margin sites from either edge.
/// Throws InsufficientData with fewer than four usable points (or a single
/// distinct distance) and NonDecaying when the slope is not negative.
DecayFit fit_localization_length(const DensityProfile& profile, double center,
                                 const FitOptions& opts = {});

/// "x,p_x" CSV with header.
void write_profile_csv(std::ostream& out, const DensityProfile& profile);
/// "xi_fit,intercept,r_squared,window_lo,window_hi" CSV with header.
void write_fit_csv(std::ostream& out, const DecayFit& fit);

}  // namespace gapbound
