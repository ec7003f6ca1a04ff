#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gapbound/eigensolver.hpp"
#include "gapbound/errors.hpp"
#include "gapbound/lattice_model.hpp"
#include "gapbound/localization.hpp"

using namespace gapbound;

namespace {

DensityProfile delta(int L, int at) {
  std::vector<double> p(L, 0.0);
  p[at - 1] = 1.0;
  return DensityProfile(p);
}

DensityProfile uniform(int L) { return DensityProfile::from_weights(std::vector<double>(L, 1.0)); }

}  // namespace

TEST(Density, DeltaAndSymmetricStates) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = 1.0;
  const DensityProfile p = density(psi, 4, 1);
  EXPECT_EQ(p.values(), (std::vector<double>{1, 0, 0, 0}));

  Eigen::VectorXcd sym(2);
  sym << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const DensityProfile q = density(sym, 2, 1);
  EXPECT_NEAR(q.at(1), 0.5, 1e-15);
  EXPECT_NEAR(q.at(2), 0.5, 1e-15);
}

TEST(Density, SumsInternalIndex) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = std::complex<double>(0.6, 0.0);
  psi(1) = std::complex<double>(0.0, 0.8);
  const DensityProfile p = density(psi, 2, 2);
  EXPECT_NEAR(p.at(1), 1.0, 1e-15);
  EXPECT_EQ(p.at(2), 0.0);
}

TEST(Density, Errors) {
  EXPECT_THROW(density(Eigen::VectorXcd::Ones(3), 2, 1), ValidationError);
  EXPECT_THROW(density(Eigen::VectorXcd::Ones(2), 2, 1), ValidationError);
  EXPECT_THROW(DensityProfile({0.5, 0.4}), ValidationError);
  EXPECT_THROW(DensityProfile({1.5, -0.5}), ValidationError);
}

TEST(Density, PipelineSumsToOne) {
  const ModelSpec spec = impurity_model(200, -0.4);
  const SpectrumResult r = lowest_two(HermitianMatrix(assemble(spec)));
  const DensityProfile p = density(r.psi0, spec);
  double total = 0.0;
  for (double v : p.values()) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PositionStats, Examples) {
  const PositionStats d = position_stats(delta(9, 5));
  EXPECT_EQ(d.mean, 5.0);
  EXPECT_EQ(d.variance, 0.0);

  const PositionStats h = position_stats(DensityProfile({0.5, 0.5}));
  EXPECT_NEAR(h.mean, 1.5, 1e-15);
  EXPECT_NEAR(h.variance, 0.25, 1e-15);

  for (int L : {1, 2, 7, 100, 1001}) {
    const PositionStats u = position_stats(uniform(L));
    EXPECT_NEAR(u.mean, (L + 1) / 2.0, 1e-12 * L);
    EXPECT_NEAR(u.variance, (double(L) * L - 1) / 12.0, 1e-10 * L * L);
  }
}

TEST(Tail, Examples) {
  EXPECT_EQ(tail(delta(9, 5), 5.0, 0.5), 0.0);
  EXPECT_EQ(tail(delta(9, 5), 5.0, 0.0), 1.0);
  EXPECT_NEAR(tail(DensityProfile({0.5, 0.5}), 1.5, 0.5), 1.0, 1e-15);
  EXPECT_EQ(tail(uniform(4), 2.5, 1.6), 0.0);
  EXPECT_NEAR(tail(uniform(4), 2.5, 1.5), 0.5, 1e-15);
}

TEST(Tail, MonotoneAndBelowChebyshev) {
  const ModelSpec spec = impurity_model(100, -0.7);
  const SpectrumResult r = lowest_two(HermitianMatrix(assemble(spec)));
  const DensityProfile p = density(r.psi0, spec);
  const PositionStats st = position_stats(p);
  double prev = 1.0;
  for (double R = 0.0; R <= 110.0; R += 0.05) {
    const double t = tail(p, st.mean, R);
    EXPECT_LE(t, prev);
    if (R > 0) EXPECT_LE(t, st.variance / (R * R) + 1e-12) << "R=" << R;
    prev = t;
  }
}

TEST(Fit, RecoversSyntheticDecayLength) {
  const int L = 101;
  const double c = 51.0;
  std::vector<double> w(L);
  for (int x = 1; x <= L; ++x) w[x - 1] = std::exp(-std::abs(x - c) / 3.0);
  const DecayFit f = fit_localization_length(DensityProfile::from_weights(w), c);
  EXPECT_NEAR(f.xi_fit, 3.0, 3e-6);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_LT(f.window_lo, f.window_hi);
}

TEST(Fit, FloorAndMarginShrinkTheWindow) {
  const int L = 101;
  std::vector<double> w(L);
  for (int x = 1; x <= L; ++x) w[x - 1] = std::exp(-std::abs(x - 51.0) / 2.0);
  const DensityProfile p = DensityProfile::from_weights(w);
  const DecayFit wide = fit_localization_length(p, 51.0, {1e-300, 0});
  const DecayFit narrow = fit_localization_length(p, 51.0, {1e-6, 10});
  EXPECT_EQ(wide.points, 101);
  EXPECT_LT(narrow.points, wide.points);
  EXPECT_NEAR(narrow.xi_fit, 2.0, 1e-9);
}

TEST(Fit, Errors) {
  EXPECT_THROW(fit_localization_length(uniform(50), 25.0), NonDecaying);
  EXPECT_THROW(fit_localization_length(uniform(20), 10.0, {1e-13, 9}), InsufficientData);
  EXPECT_THROW(fit_localization_length(uniform(50), 25.0, {0.0, 1}), ValidationError);
}

TEST(Fit, ImpurityBoundStateMatchesSpread) {
  const ModelSpec spec = impurity_model(500, -1.0);
  const SpectrumResult r = lowest_two(HermitianMatrix(assemble(spec)));
  const DensityProfile p = density(r.psi0, spec);
  const DecayFit f = fit_localization_length(p, impurity_center(500));
  const double dx = position_stats(p).std_dev();
  EXPECT_NEAR(f.xi_fit / (dx / std::sqrt(2.0)), 1.0, 0.10);
  // Exact decay of the bound state: p_x ~ exp(-2 asinh(|h0|/2) |x|).
  EXPECT_NEAR(f.xi_fit, 1.0 / (2.0 * std::asinh(0.5)), 1e-6);
}

TEST(Csv, ProfileAndFit) {
  std::ostringstream prof;
  write_profile_csv(prof, DensityProfile({0.25, 0.75}));
  EXPECT_EQ(prof.str(), "x,p_x\n1,0.25\n2,0.75\n");
  std::ostringstream fit;
  write_fit_csv(fit, DecayFit{2.5, -1.0, 0.5, 1.0, 9.0, 4});
  EXPECT_EQ(fit.str(), "xi_fit,intercept,r_squared,window_lo,window_hi\n2.5,-1,0.5,1,9\n");
}
