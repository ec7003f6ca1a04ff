#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gapbound/eigensolver.hpp"
#include "gapbound/experiment.hpp"

namespace gapbound {
namespace {

// Failure of one named invariant inside a trial.
struct CheckFailed {
  std::string check;
  std::string message;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void expect(bool ok, const char* check, const std::string& message) {
  if (!ok) throw CheckFailed{check, message};
}

Block random_block(Rng& rng, int n0) {
  Block b(n0, n0);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n0; ++j) b(i, j) = Complex(rng.normal(), rng.normal());
  }
  return b;
}

// Block rescaled to spectral norm `norm`.
Block block_with_norm(Rng& rng, int n0, double norm) {
  Block b = random_block(rng, n0);
  Eigen::JacobiSVD<Block> svd(b);
  const double current = svd.singularValues()(0);
  return current > 0.0 ? Block(b * (norm / current)) : Block(Block::Zero(n0, n0));
}

Block random_hermitian(Rng& rng, int n0, double width) {
  const Block b = random_block(rng, n0);
  return 0.5 * width * (b + b.adjoint());
}

HoppingEnvelope declared_envelope(const FuzzConfig& c) {
  if (c.family == FuzzFamily::kEnvelope) return {c.cv, c.mu};
  // Nearest-neighbour hopping of norm <= v0 sits under v0 e^mu e^{-mu d}.
  return {c.v0 * std::exp(c.mu), c.mu};
}

void check_trial(const FuzzConfig& config, const ModelSpec& spec, Rng& rng,
                 bool& degenerate) {
  const Eigen::MatrixXcd m = assemble(spec);
  expect((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0, "hermitian",
         "assembled matrix differs from its adjoint");

  const HermitianMatrix h(m);
  SpectrumResult sr;
  try {
    sr = lowest_two(h);
  } catch (const DegenerateGroundState&) {
    degenerate = true;
    return;
  } catch (const InvariantFailure& e) {
    throw CheckFailed{"residual", e.what()};
  }
  const double scale = h.spectral_scale();
  const int n = h.n();
  expect(sr.residual0 <= 1e-10 * std::max(1.0, scale), "residual",
         "ground-state residual " + num(sr.residual0));
  const double trace = m.trace().real();
  expect(std::abs(sr.eigenvalues.sum() - trace) <= 1e-8 * n * std::max(1.0, scale),
         "trace", "eigenvalue sum differs from the trace");

  const DensityProfile profile = density(sr.psi0, spec);
  double total = 0.0;
  for (double v : profile.values()) total += v;
  expect(std::abs(total - 1.0) <= 1e-12, "density", "profile sum " + num(total));
  const PositionStats stats = position_stats(profile);

  // Complementary inequality with a random weight and with g(x) = x.
  std::vector<double> gv(static_cast<std::size_t>(spec.L));
  const double amp = rng.uniform(0.1, 2.0) * spec.L;
  for (double& v : gv) v = rng.uniform(-amp, amp);
  for (const WeightFunction& g : {WeightFunction(gv), WeightFunction::position(spec.L)}) {
    const ComplementaryReport r = g_expectations(sr.psi0, spec, g, sr.gap);
    expect(std::abs(r.hod_explicit - r.hod_commutator) <= 1e-9 * r.scale,
           "hod_agreement",
           "explicit " + num(r.hod_explicit) + " vs commutator " + num(r.hod_commutator));
    expect(r.slack >= -1e-9 * r.scale, "complementary", "slack " + num(r.slack));
  }

  // Variance bound from the declared hopping envelope.
  const double max_vx = config.family == FuzzFamily::kEnvelope
                            ? chebyshev_max_vx(HoppingEnvelope{config.cv, config.mu}, spec.L)
                            : chebyshev_max_vx(NNBound{config.v0}, spec.L);
  const double var_bound = max_vx / (2.0 * sr.gap);
  expect(stats.variance <= var_bound * (1.0 + 1e-9) + 1e-12, "variance_bound",
         "variance " + num(stats.variance) + " > " + num(var_bound));

  for (double R = 0.5; R <= spec.L; R += 0.5) {
    const double t = tail(profile, stats.mean, R);
    expect(t <= stats.variance / (R * R) + 1e-12, "chebyshev",
           "tail " + num(t) + " at R = " + num(R));
  }

  const HoppingEnvelope envelope = declared_envelope(config);
  const double dx = stats.std_dev();
  const Theorem1Bound t1 = theorem1_bound(envelope, sr.gap, 0.5, dx);
  const auto c1 = verify_envelope(profile, stats.mean, t1, config.grid_step);
  expect(c1.passed(), "theorem1",
         std::to_string(c1.violations.size()) + " envelope violation(s)");
  if (config.family == FuzzFamily::kNearestNeighbor) {
    const Theorem2Bound t2 = theorem2_bound(config.v0, sr.gap, 0.5, dx);
    const auto c2 = verify_envelope(profile, stats.mean, t2, config.grid_step);
    expect(c2.passed(), "theorem2",
           std::to_string(c2.violations.size()) + " envelope violation(s)");
  }

  Region region;
  region.center = stats.mean;
  region.r_inner = rng.uniform(0.0, 0.5 * spec.L);
  region.delta_r = rng.uniform(3.0 + 1e-6, 3.0 + spec.L);
  const WeightFunction g = trapezoid_g(spec.L, region.center, region.r_inner,
                                       region.delta_r, TrapezoidVariant::kTheorem1);
  const AppendixBReport ab = verify_appendix_b(spec, envelope, g, sr.psi0, region);
  expect(ab.passed, "appendix_b",
         "lhs " + num(ab.lhs) + ", intermediate " + num(ab.intermediate) + ", rhs " +
             num(ab.rhs));
}

}  // namespace

std::string fuzz_family_name(FuzzFamily family) {
  return family == FuzzFamily::kEnvelope ? "envelope" : "nearest-neighbor";
}

FuzzFamily parse_fuzz_family(const std::string& name) {
  if (name == "envelope") return FuzzFamily::kEnvelope;
  if (name == "nearest-neighbor" || name == "nn") return FuzzFamily::kNearestNeighbor;
  throw ValidationError("unknown fuzz family '" + name + "'");
}

void validate(const FuzzConfig& c) {
  if (c.trials < 0) throw ValidationError("trials must be nonnegative");
  if (c.min_L < 2 || c.max_L < c.min_L) throw ValidationError("need 2 <= min_L <= max_L");
  if (c.min_n0 < 1 || c.max_n0 < c.min_n0) throw ValidationError("need 1 <= min_n0 <= max_n0");
  if (!(c.cv > 0.0) || !(c.mu > 0.0) || !(c.v0 > 0.0)) {
    throw ValidationError("declared Cv, mu and V0 must be positive");
  }
  if (!(c.hopping_scale > 0.0)) throw ValidationError("hopping scale must be positive");
  if (!(c.grid_step > 0.0)) throw ValidationError("grid step must be positive");
}

ModelSpec fuzz_spec(const FuzzConfig& config, int trial) {
  Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(trial)));
  ModelSpec spec;
  spec.L = rng.uniform_int(config.min_L, config.max_L);
  spec.n0 = rng.uniform_int(config.min_n0, config.max_n0);
  spec.label = "fuzz seed=" + std::to_string(config.seed) + " trial=" + std::to_string(trial);

  if (config.family == FuzzFamily::kEnvelope) {
    const double density = rng.uniform(0.2, 1.0);
    for (int x = 1; x <= spec.L; ++x) {
      for (int xp = x + 1; xp <= spec.L; ++xp) {
        if (xp > x + 1 && !rng.bernoulli(density)) continue;
        const double norm = config.hopping_scale * rng.uniform() * config.cv *
                            std::exp(-config.mu * (xp - x));
        spec.hopping.push_back({x, xp, block_with_norm(rng, spec.n0, norm)});
      }
    }
  } else {
    for (int x = 1; x < spec.L; ++x) {
      const double norm = config.hopping_scale * rng.uniform(0.2, 1.0) * config.v0;
      spec.hopping.push_back({x, x + 1, block_with_norm(rng, spec.n0, norm)});
    }
  }

  const double width = rng.uniform(0.0, 3.0);
  for (int x = 1; x <= spec.L; ++x) {
    if (rng.bernoulli(0.7)) spec.onsite.push_back({x, random_hermitian(rng, spec.n0, width)});
  }
  return spec;
}

FuzzReport run_fuzz(const FuzzConfig& config) {
  validate(config);
  FuzzReport report;
  report.config = config;
  const HoppingEnvelope envelope = declared_envelope(config);
  for (int trial = 0; trial < config.trials; ++trial) {
    const ModelSpec spec = fuzz_spec(config, trial);
    if (config.family == FuzzFamily::kEnvelope) {
      check_envelope(spec, envelope);
    } else {
      const NNBound nn = check_nearest_neighbor(spec);
      if (nn.v0 > config.v0 * (1.0 + 1e-12)) {
        throw EnvelopeViolation("trial " + std::to_string(trial) +
                                ": nearest-neighbour norm exceeds declared V0");
      }
    }

    // Separate substream for the per-trial draws made while checking.
    Rng rng(substream_seed(~config.seed, static_cast<std::uint64_t>(trial)));
    ++report.trials_run;
    bool degenerate = false;
    try {
      check_trial(config, spec, rng, degenerate);
    } catch (const CheckFailed& f) {
      report.failure = FuzzFailure{trial, substream_seed(config.seed, trial), f.check, f.message};
      return report;
    } catch (const Error& e) {
      report.failure = FuzzFailure{trial, substream_seed(config.seed, trial), "exception", e.what()};
      return report;
    }
    if (degenerate) {
      ++report.degenerate_skipped;
    } else {
      ++report.passed;
    }
  }
  return report;
}

std::string FuzzReport::to_text() const {
  std::ostringstream out;
  out << "family " << fuzz_family_name(config.family) << "\n"
      << "seed " << config.seed << "\n"
      << "trials " << config.trials << "\n"
      << "L " << config.min_L << ".." << config.max_L << "\n"
      << "N0 " << config.min_n0 << ".." << config.max_n0 << "\n"
      << "run " << trials_run << "\n"
      << "passed " << passed << "\n"
      << "degenerate_skipped " << degenerate_skipped << "\n"
      << "failures " << (failure ? 1 : 0) << "\n";
  if (failure) {
    out << "first_failure trial=" << failure->trial << " trial_seed=" << failure->trial_seed
        << " check=" << failure->check << "\n"
        << "message " << failure->message << "\n"
        << "reproduce: gapbound fuzz --seed " << config.seed << " --family "
        << fuzz_family_name(config.family) << " --trials " << failure->trial + 1
        << " --min-L " << config.min_L << " --max-L " << config.max_L << " --min-n0 "
        << config.min_n0 << " --max-n0 " << config.max_n0 << "\n";
  }
  return out.str();
}

}  // namespace gapbound
