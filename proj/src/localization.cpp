#include "gapbound/localization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "gapbound/errors.hpp"

namespace gapbound {

DensityProfile::DensityProfile(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ValidationError("density profile is empty");
  double sum = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("density entries must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("density profile must sum to 1");
  }
}

DensityProfile DensityProfile::from_weights(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (!(sum > 0.0)) throw ValidationError("weights sum to zero");
  for (double& v : w) v /= sum;
  return DensityProfile(std::move(w));
}

double PositionStats::std_dev() const { return std::sqrt(variance); }

DensityProfile density(const Eigen::VectorXcd& psi0, int L, int n0) {
  if (L < 1 || n0 < 1 || psi0.size() != static_cast<Eigen::Index>(L) * n0) {
    throw ValidationError("state dimension does not match L * N0");
  }
  const double norm2 = psi0.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-8) {
    throw ValidationError("state is not normalized");
  }
  std::vector<double> p(static_cast<std::size_t>(L), 0.0);
  for (int x = 0; x < L; ++x) {
    p[x] = psi0.segment(static_cast<Eigen::Index>(x) * n0, n0).squaredNorm();
  }
  return DensityProfile::from_weights(std::move(p));
}

DensityProfile density(const Eigen::VectorXcd& psi0, const ModelSpec& spec) {
  return density(psi0, spec.L, spec.n0);
}

PositionStats position_stats(const DensityProfile& profile) {
  PositionStats s;
  const auto& p = profile.values();
  for (std::size_t k = 0; k < p.size(); ++k) s.mean += static_cast<double>(k + 1) * p[k];
  // Centred second moment; equal to <x^2> - <x>^2 without the cancellation.
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = static_cast<double>(k + 1) - s.mean;
    s.variance += d * d * p[k];
  }
  return s;
}

double tail(const DensityProfile& profile, double mean, double R) {
  const auto& p = profile.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::abs(static_cast<double>(k + 1) - mean) >= R) sum += p[k];
  }
  return std::clamp(sum, 0.0, 1.0);
}

DecayFit fit_localization_length(const DensityProfile& profile, double center,
                                 const FitOptions& opts) {
  if (!(opts.floor > 0.0)) throw ValidationError("fit floor must be positive");
  if (opts.boundary_margin < 0) throw ValidationError("boundary margin must be >= 0");

  std::vector<double> d;
  std::vector<double> y;
  const int L = profile.L();
  for (int x = 1 + opts.boundary_margin; x <= L - opts.boundary_margin; ++x) {
    const double px = profile.at(x);
    if (px < opts.floor) continue;
    d.push_back(std::abs(x - center));
    y.push_back(std::log(px));
  }
  if (d.size() < 4) {
    throw InsufficientData("only " + std::to_string(d.size()) +
                           " usable points for the decay fit");
  }

  const double n = static_cast<double>(d.size());
  const double dbar = std::accumulate(d.begin(), d.end(), 0.0) / n;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    sxx += (d[k] - dbar) * (d[k] - dbar);
    sxy += (d[k] - dbar) * (y[k] - ybar);
    syy += (y[k] - ybar) * (y[k] - ybar);
  }
  if (!(sxx > 0.0)) {
    throw InsufficientData("decay fit needs at least two distinct distances");
  }
  const double slope = sxy / sxx;
  // |slope| below 1e-12 per site means xi beyond 1e12 sites: not decaying.
  if (slope >= -1e-12) {
    throw NonDecaying("profile does not decay away from the centre");
  }

  DecayFit fit;
  fit.xi_fit = -1.0 / slope;
  fit.intercept = ybar - slope * dbar;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.window_lo = *std::min_element(d.begin(), d.end());
  fit.window_hi = *std::max_element(d.begin(), d.end());
  fit.points = static_cast<int>(d.size());
  return fit;
}

void write_profile_csv(std::ostream& out, const DensityProfile& profile) {
  out << "x,p_x\n";
  char buf[64];
  for (int x = 1; x <= profile.L(); ++x) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", x, profile.at(x));
    out << buf;
  }
}

void write_fit_csv(std::ostream& out, const DecayFit& fit) {
  out << "xi_fit,intercept,r_squared,window_lo,window_hi\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", fit.xi_fit,
                fit.intercept, fit.r_squared, fit.window_lo, fit.window_hi);
  out << buf;
}

}  // namespace gapbound
