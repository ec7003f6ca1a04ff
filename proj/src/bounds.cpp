#include "gapbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "gapbound/errors.hpp"

namespace gapbound {
namespace {

constexpr double kE = std::numbers::e;

void require_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("s must lie in (0, 1)");
}

void require_gap(double delta_e0) {
  if (!(delta_e0 > 0.0) || !std::isfinite(delta_e0)) {
    throw ValidationError("spectral gap must be positive and finite");
  }
}

void require_delta_x(double delta_x) {
  if (!(delta_x >= 0.0) || !std::isfinite(delta_x)) {
    throw ValidationError("delta X must be nonnegative and finite");
  }
}

void require_state(const Eigen::VectorXcd& psi0, const ModelSpec& spec) {
  if (psi0.size() != spec.dimension()) {
    throw ValidationError("state dimension does not match the model");
  }
}

void require_weight(const WeightFunction& g, const ModelSpec& spec) {
  if (g.L() != spec.L) {
    throw ValidationError("weight function length does not match L");
  }
}

// max_x 2 sum_{x' != x} k(|x - x'|) over x in 1..L, given k(d) for d >= 1.
template <class Kernel>
double max_weighted_sum(int L, Kernel kernel) {
  if (L < 1) throw ValidationError("L must be positive");
  // prefix[m] = sum_{d=1}^{m} kernel(d)
  std::vector<double> prefix(static_cast<std::size_t>(L), 0.0);
  for (int d = 1; d < L; ++d) prefix[d] = prefix[d - 1] + kernel(d);
  double best = 0.0;
  for (int x = 1; x <= L; ++x) {
    best = std::max(best, 2.0 * (prefix[x - 1] + prefix[L - x]));
  }
  return best;
}

void write_row(std::ostream& out, const char* kind, double s, double r1,
               double xi, double prefactor, double c, double de, double dx) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                kind, s, r1, xi, prefactor, c, de, dx);
  out << buf;
}

}  // namespace

WeightFunction::WeightFunction(std::vector<double> g) : g_(std::move(g)) {
  if (g_.empty()) throw ValidationError("weight function is empty");
  for (double v : g_) {
    if (!std::isfinite(v)) throw ValidationError("weight function must be finite");
  }
}

WeightFunction WeightFunction::position(int L) {
  std::vector<double> g(static_cast<std::size_t>(std::max(L, 0)));
  for (int x = 1; x <= L; ++x) g[x - 1] = x;
  return WeightFunction(std::move(g));
}

WeightFunction WeightFunction::constant(int L, double c) {
  return WeightFunction(std::vector<double>(static_cast<std::size_t>(std::max(L, 0)), c));
}

double hod_expectation(const Eigen::VectorXcd& psi0, const ModelSpec& spec,
                       const WeightFunction& g) {
  require_state(psi0, spec);
  require_weight(g, spec);
  const int n0 = spec.n0;
  double sum = 0.0;
  for (const auto& b : spec.hopping) {
    const double dg = g.at(b.x) - g.at(b.x_prime);
    if (dg == 0.0) continue;
    const auto a = psi0.segment(static_cast<Eigen::Index>(b.x - 1) * n0, n0);
    const auto c = psi0.segment(static_cast<Eigen::Index>(b.x_prime - 1) * n0, n0);
    const std::complex<double> amp = a.dot(b.h * c);  // a^dagger h c
    sum += 2.0 * dg * dg * amp.real();
  }
  return -sum;
}

ComplementaryReport g_expectations(const Eigen::VectorXcd& psi0,
                                   const ModelSpec& spec,
                                   const WeightFunction& g, double delta_e0) {
  require_state(psi0, spec);
  require_weight(g, spec);
  if (!std::isfinite(delta_e0) || delta_e0 < 0.0) {
    throw ValidationError("spectral gap must be finite and nonnegative");
  }
  const DensityProfile p = density(psi0, spec);

  ComplementaryReport r;
  double gmax2 = 0.0;
  for (int x = 1; x <= spec.L; ++x) {
    r.mean_g += g.at(x) * p.at(x);
    r.mean_g2 += g.at(x) * g.at(x) * p.at(x);
    gmax2 = std::max(gmax2, g.at(x) * g.at(x));
  }
  for (int x = 1; x <= spec.L; ++x) {
    const double d = g.at(x) - r.mean_g;
    r.var_g += d * d * p.at(x);
  }

  r.hod_explicit = hod_expectation(psi0, spec, g);

  // -<[G,[G,H]]> on the assembled one-particle matrix.
  const Eigen::MatrixXcd h = assemble(spec);
  Eigen::VectorXd gd(spec.dimension());
  for (int x = 1; x <= spec.L; ++x) {
    gd.segment(static_cast<Eigen::Index>(x - 1) * spec.n0, spec.n0).setConstant(g.at(x));
  }
  const Eigen::MatrixXcd inner = gd.asDiagonal() * h - h * gd.asDiagonal();
  const Eigen::MatrixXcd outer = gd.asDiagonal() * inner - inner * gd.asDiagonal();
  r.hod_commutator = -psi0.dot(outer * psi0).real();

  r.lhs = delta_e0 * r.var_g;
  r.rhs = std::abs(r.hod_explicit) / 2.0;
  r.slack = r.rhs - r.lhs;
  const double hnorm = h.cwiseAbs().rowwise().sum().maxCoeff();
  r.scale = std::max(1.0, hnorm) * std::max(1.0, gmax2);
  return r;
}

double chebyshev_max_vx(const HoppingEnvelope& envelope, int L) {
  return max_weighted_sum(L, [&](int d) { return envelope(d) * d * d; });
}

double chebyshev_max_vx(const NNBound& bound, int L) {
  return max_weighted_sum(L, [&](int d) { return d == 1 ? bound.v0 : 0.0; });
}

double chebyshev_max_vx_raw(const ModelSpec& spec) {
  validate(spec);
  std::vector<double> vx(static_cast<std::size_t>(spec.L), 0.0);
  for (const auto& b : spec.hopping) {
    const double d = b.x_prime - b.x;
    const double w = 2.0 * block_norm(spec, b.x, b.x_prime) * d * d;
    vx[b.x - 1] += w;
    vx[b.x_prime - 1] += w;
  }
  return *std::max_element(vx.begin(), vx.end());
}

double chebyshev_tail_bound(const HoppingEnvelope& envelope, int L,
                            double delta_e0, double R) {
  require_gap(delta_e0);
  if (!(R > 0.0)) throw ValidationError("R must be positive");
  return std::min(1.0, chebyshev_max_vx(envelope, L) / (2.0 * R * R * delta_e0));
}

double chebyshev_tail_bound(const NNBound& bound, int L, double delta_e0,
                            double R) {
  require_gap(delta_e0);
  if (!(R > 0.0)) throw ValidationError("R must be positive");
  return std::min(1.0, chebyshev_max_vx(bound, L) / (2.0 * R * R * delta_e0));
}

double c1_constant(const HoppingEnvelope& envelope) {
  if (!(envelope.cv > 0.0) || !(envelope.mu > 0.0)) {
    throw ValidationError("envelope requires Cv > 0 and mu > 0");
  }
  // sum_{x>=0} (x+1)^2 q^x = (1 + q) / (1 - q)^3
  const double q = std::exp(-envelope.mu);
  const double one_minus_q = -std::expm1(-envelope.mu);
  return 4.0 * envelope.cv * (1.0 + q) / (one_minus_q * one_minus_q * one_minus_q);
}

double TailEnvelope::operator()(double R) const {
  return prefactor * std::exp(-(R - r1) / xi);
}

Theorem1Bound theorem1_bound(const HoppingEnvelope& envelope, double delta_e0,
                             double s, double delta_x) {
  require_s(s);
  require_gap(delta_e0);
  require_delta_x(delta_x);
  Theorem1Bound b;
  b.s = s;
  b.c1 = c1_constant(envelope);
  b.mu = envelope.mu;
  b.delta_e0 = delta_e0;
  b.delta_x = delta_x;
  b.r1 = std::sqrt((2.0 * kE + 1.0) / (1.0 - s)) * delta_x;
  const double gap_branch =
      1.5 * std::sqrt((4.0 * kE * kE + 1.0) * b.c1 / (kE * s * delta_e0));
  const double range_branch = 3.0 * std::log(2.0 * kE) / envelope.mu;
  b.xi1 = std::max(gap_branch, range_branch);
  b.prefactor = (2.0 * kE * (2.0 - s) + 1.0) / (4.0 * (2.0 * kE + 1.0));
  return b;
}

Theorem2Bound theorem2_bound(double v0, double delta_e0, double s,
                             double delta_x) {
  require_s(s);
  require_gap(delta_e0);
  require_delta_x(delta_x);
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw ValidationError("V0 must be positive");
  Theorem2Bound b;
  b.s = s;
  b.v0 = v0;
  b.delta_e0 = delta_e0;
  b.delta_x = delta_x;
  b.r1 = std::sqrt((kE + 1.0) / (1.0 - s)) * delta_x;
  b.xi2 = std::sqrt(kE * v0 / (s * delta_e0)) + 2.0;
  b.prefactor = kE * (1.0 - s) / (kE + 1.0);
  return b;
}

namespace {

template <class Make>
SChoice best_s(double R, Make make) {
  SChoice best{0.5, 1.0};
  for (int k = 1; k <= 19; ++k) {
    const double s = 0.05 * k;
    const TailEnvelope env = make(s);
    if (R < env.r1) continue;
    const double v = env(R);
    if (v < best.value) best = {s, v};
  }
  return best;
}

}  // namespace

SChoice best_s_theorem1(const HoppingEnvelope& envelope, double delta_e0,
                        double delta_x, double R) {
  return best_s(R, [&](double s) {
    return theorem1_bound(envelope, delta_e0, s, delta_x).envelope();
  });
}

SChoice best_s_theorem2(double v0, double delta_e0, double delta_x, double R) {
  return best_s(R, [&](double s) {
    return theorem2_bound(v0, delta_e0, s, delta_x).envelope();
  });
}

EnvelopeCheck verify_envelope(const DensityProfile& profile, double mean,
                              const TailEnvelope& envelope, double grid_step,
                              double tolerance) {
  if (!(grid_step > 0.0)) throw ValidationError("grid step must be positive");
  if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be nonnegative");
  if (!(envelope.xi > 0.0) || !(envelope.r1 >= 0.0)) {
    throw ValidationError("envelope needs xi > 0 and r1 >= 0");
  }
  EnvelopeCheck check;
  const double max_distance =
      std::max(std::abs(1.0 - mean), std::abs(profile.L() - mean));
  for (long k = 0;; ++k) {
    const double R = envelope.r1 + static_cast<double>(k) * grid_step;
    if (R > max_distance + 1e-12) break;
    if (!(R > 0.0)) continue;
    const double t = tail(profile, mean, R);
    const double b = envelope(R);
    check.radii.push_back(R);
    check.tail_values.push_back(t);
    check.bound_values.push_back(b);
    if (t > b + tolerance) check.violations.push_back(R);
  }
  return check;
}

EnvelopeCheck verify_envelope(const DensityProfile& profile, double mean,
                              const Theorem1Bound& bound, double grid_step,
                              double tolerance) {
  return verify_envelope(profile, mean, bound.envelope(), grid_step, tolerance);
}

EnvelopeCheck verify_envelope(const DensityProfile& profile, double mean,
                              const Theorem2Bound& bound, double grid_step,
                              double tolerance) {
  return verify_envelope(profile, mean, bound.envelope(), grid_step, tolerance);
}

double combined_tail_bound(double variance, const TailEnvelope& envelope,
                           double R) {
  if (!(R > 0.0)) return 1.0;
  double best = std::min(1.0, variance / (R * R));
  if (R >= envelope.r1) best = std::min(best, envelope(R));
  return best;
}

WeightFunction trapezoid_g(int L, double center, double r_inner,
                           double delta_r, TrapezoidVariant variant) {
  if (L < 1) throw ValidationError("L must be positive");
  if (!std::isfinite(center) || !std::isfinite(r_inner) || r_inner < 0.0) {
    throw ValidationError("region needs a finite centre and r_inner >= 0");
  }
  const bool first = variant == TrapezoidVariant::kTheorem1;
  if (!std::isfinite(delta_r) || (first ? delta_r <= 3.0 : delta_r <= 2.0)) {
    throw ValidationError(first ? "theorem-1 trapezoid needs delta_r > 3"
                                : "theorem-2 trapezoid needs delta_r > 2");
  }
  std::vector<double> g(static_cast<std::size_t>(L));
  for (int x = 1; x <= L; ++x) {
    const double d = std::abs(x - center);
    g[x - 1] = first ? std::clamp(d - r_inner - delta_r / 3.0, 0.0, delta_r / 3.0)
                     : std::clamp(d - (r_inner + 1.0), 0.0, delta_r - 2.0);
  }
  return WeightFunction(std::move(g));
}

AppendixBReport verify_appendix_b(const ModelSpec& spec,
                                  const HoppingEnvelope& envelope,
                                  const WeightFunction& g,
                                  const Eigen::VectorXcd& psi0,
                                  const Region& region) {
  require_state(psi0, spec);
  require_weight(g, spec);
  check_envelope(spec, envelope);
  const WeightFunction expected = trapezoid_g(spec.L, region.center, region.r_inner,
                                              region.delta_r, TrapezoidVariant::kTheorem1);
  for (int x = 1; x <= spec.L; ++x) {
    if (std::abs(g.at(x) - expected.at(x)) > 1e-12 * std::max(1.0, region.delta_r)) {
      throw ValidationError("weight function is not the theorem-1 trapezoid for this region");
    }
  }

  const DensityProfile p = density(psi0, spec);
  const double c1 = c1_constant(envelope);
  const double mu = envelope.mu;
  const double a = region.r_inner + region.delta_r / 3.0;
  const double b = region.r_inner + 2.0 * region.delta_r / 3.0;

  AppendixBReport rep;
  rep.lhs = std::abs(hod_expectation(psi0, spec, g));
  for (int x = 1; x <= spec.L; ++x) {
    double vg = 0.0;
    for (int xp = 1; xp <= spec.L; ++xp) {
      if (xp == x) continue;
      const double dg = g.at(x) - g.at(xp);
      vg += dg * dg * envelope(x - xp);
    }
    rep.intermediate += 2.0 * vg * p.at(x);

    const double d = std::abs(x - region.center);
    double vhat = c1;
    if (d <= a) {
      vhat = c1 * std::exp(-mu * (a - d));
    } else if (d >= b) {
      vhat = c1 * std::exp(-mu * (d - b));
    }
    rep.rhs += vhat * p.at(x);
  }
  rep.scale = std::max(1.0, c1) * std::max(1.0, region.delta_r * region.delta_r / 9.0);
  const double tol = 1e-9 * rep.scale;
  rep.passed = rep.lhs <= rep.intermediate + tol && rep.intermediate <= rep.rhs + tol &&
               rep.lhs <= rep.rhs + tol;
  return rep;
}

void write_bound_csv_header(std::ostream& out) {
  out << "kind,s,r1,xi,prefactor,C1_or_V0,deltaE0,deltaX\n";
}

void write_bound_csv_row(std::ostream& out, const Theorem1Bound& b) {
  write_row(out, "theorem1", b.s, b.r1, b.xi1, b.prefactor, b.c1, b.delta_e0, b.delta_x);
}

void write_bound_csv_row(std::ostream& out, const Theorem2Bound& b) {
  write_row(out, "theorem2", b.s, b.r1, b.xi2, b.prefactor, b.v0, b.delta_e0, b.delta_x);
}

void write_envelope_csv(std::ostream& out, const EnvelopeCheck& check,
                        double tolerance) {
  out << "R,tail,bound,violation\n";
  char buf[128];
  for (std::size_t k = 0; k < check.radii.size(); ++k) {
    const int violated = check.tail_values[k] > check.bound_values[k] + tolerance;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", check.radii[k],
                  check.tail_values[k], check.bound_values[k], violated);
    out << buf;
  }
}

}  // namespace gapbound
