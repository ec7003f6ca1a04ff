// gapbound: spectral gap and ground-state localization bounds for
// one-particle lattice Hamiltonians.
//
// Exit codes: 0 success, 1 invalid input, 2 a numerical invariant or bound
// check failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gapbound/bounds.hpp"
#include "gapbound/eigensolver.hpp"
#include "gapbound/errors.hpp"
#include "gapbound/experiment.hpp"
#include "gapbound/lattice_model.hpp"
#include "gapbound/localization.hpp"

namespace {

using namespace gapbound;

constexpr int kExitValidation = 1;
constexpr int kExitInvariant = 2;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

struct Solved {
  ModelSpec spec;
  SpectrumResult spectrum;
  DensityProfile profile;
  PositionStats stats;
};

Solved solve_file(const std::string& path) {
  ModelSpec spec = read_model_file(path);
  SpectrumResult sr = lowest_two(HermitianMatrix(assemble(spec)));
  DensityProfile profile = density(sr.psi0, spec);
  const PositionStats stats = position_stats(profile);
  return {std::move(spec), std::move(sr), std::move(profile), stats};
}

struct SolveArgs {
  std::string model;
  std::string spectrum_out;
  std::string profile_out;
  std::string fit_out;
  double fit_center = std::nan("");
  FitOptions fit;
};

int run_solve(const SolveArgs& a) {
  const Solved s = solve_file(a.model);
  std::cout << "label " << s.spec.label << "\n"
            << "L " << s.spec.L << "\nN0 " << s.spec.n0 << "\n"
            << "E0 " << num(s.spectrum.e0) << "\n"
            << "E1 " << num(s.spectrum.e1) << "\n"
            << "gap " << num(s.spectrum.gap) << "\n"
            << "residual0 " << num(s.spectrum.residual0) << "\n"
            << "residual1 " << num(s.spectrum.residual1) << "\n"
            << "mean_x " << num(s.stats.mean) << "\n"
            << "deltaX " << num(s.stats.std_dev()) << "\n";
  if (!a.spectrum_out.empty()) {
    auto out = open_out(a.spectrum_out);
    write_spectrum(out, s.spectrum);
  }
  if (!a.profile_out.empty()) {
    auto out = open_out(a.profile_out);
    write_profile_csv(out, s.profile);
  }
  if (!a.fit_out.empty()) {
    double center = a.fit_center;
    if (std::isnan(center)) {
      const auto& p = s.profile.values();
      center = static_cast<double>(std::max_element(p.begin(), p.end()) - p.begin() + 1);
    }
    const DecayFit fit = fit_localization_length(s.profile, center, a.fit);
    auto out = open_out(a.fit_out);
    write_fit_csv(out, fit);
    std::cout << "xi_fit " << num(fit.xi_fit) << "\nfit_r_squared " << num(fit.r_squared) << "\n";
  }
  return 0;
}

struct BoundsArgs {
  std::string model;
  double s = 0.5;
  double mu = 1.0;
  double grid_step = 0.5;
  double tolerance = 1e-12;
  std::string out;
  std::string envelope_prefix;
};

int run_bounds(const BoundsArgs& a) {
  const Solved s = solve_file(a.model);
  const double dx = s.stats.std_dev();
  const double gap = s.spectrum.gap;

  std::optional<Theorem1Bound> t1;
  std::optional<Theorem2Bound> t2;
  std::optional<HoppingEnvelope> envelope;
  if (!s.spec.hopping.empty()) {
    try {
      envelope = fit_envelope(s.spec, a.mu);
      t1 = theorem1_bound(*envelope, gap, a.s, dx);
    } catch (const ValidationError& e) {
      std::cerr << "theorem1: skipped (" << e.what() << ")\n";
    }
  }
  try {
    const NNBound nn = check_nearest_neighbor(s.spec);
    if (nn.v0 > 0.0) t2 = theorem2_bound(nn.v0, gap, a.s, dx);
  } catch (const LongRangeHopping& e) {
    std::cerr << "theorem2: skipped (" << e.what() << ")\n";
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!a.out.empty()) {
    file = open_out(a.out);
    out = &file;
  }
  write_bound_csv_header(*out);
  if (t1) write_bound_csv_row(*out, *t1);
  if (t2) write_bound_csv_row(*out, *t2);

  int violations = 0;
  auto check = [&](const char* name, const TailEnvelope& env) {
    const EnvelopeCheck c = verify_envelope(s.profile, s.stats.mean, env, a.grid_step, a.tolerance);
    violations += static_cast<int>(c.violations.size());
    std::cerr << name << ": " << c.radii.size() << " radii checked, " << c.violations.size()
              << " violation(s)\n";
    if (!a.envelope_prefix.empty()) {
      auto f = open_out(a.envelope_prefix + "." + name + ".csv");
      write_envelope_csv(f, c, a.tolerance);
    }
  };
  if (t1) check("theorem1", t1->envelope());
  if (t2) check("theorem2", t2->envelope());

  if (envelope) {
    std::cerr << "fitted envelope Cv=" << num(envelope->cv) << " mu=" << num(envelope->mu)
              << "\nchebyshev max V_x=" << num(chebyshev_max_vx(*envelope, s.spec.L))
              << " (raw norms: " << num(chebyshev_max_vx_raw(s.spec)) << ")\n";
    const double var_bound = chebyshev_max_vx(*envelope, s.spec.L) / (2.0 * gap);
    std::cerr << "variance " << num(s.stats.variance) << " <= " << num(var_bound) << "\n";
    if (s.stats.variance > var_bound * (1.0 + 1e-9)) ++violations;
  }
  return violations == 0 ? 0 : kExitInvariant;
}

struct SweepArgs {
  int L = 500;
  double h0_min = -1.0;
  double h0_max = -0.01;
  int points = 100;
  double s = 0.5;
  double mu = 1.0;
  std::optional<double> cv;
  double grid_step = 0.5;
  int threads = 0;
  std::string out = "sweep.csv";
  std::string plot;
};

int run_sweep_cmd(const SweepArgs& a) {
  SweepConfig config;
  config.L = a.L;
  config.h0_grid = log_spaced_h0(a.points, a.h0_min, a.h0_max);
  config.s = a.s;
  config.mu = a.mu;
  config.cv_override = a.cv;
  config.grid_step = a.grid_step;
  config.threads = a.threads;
  config.output_path = a.out;
  const auto rows = run_sweep(config);

  int violations = 0;
  int order_breaks = 0;
  int below_one = 0;
  for (const auto& r : rows) {
    violations += r.violations1 + r.violations2;
    if (r.ratio2 > r.ratio1) ++order_breaks;
    if (r.fit_r_squared >= 0.99 && (r.ratio1 < 1.0 || r.ratio2 < 1.0)) ++below_one;
  }
  std::cout << "rows " << rows.size() << "\n"
            << "envelope_violations " << violations << "\n"
            << "ratio2_above_ratio1 " << order_breaks << "\n"
            << "ratio_below_one_clean_fit " << below_one << "\n"
            << "csv " << a.out << "\n";
  if (!a.plot.empty()) {
    emit_plot(rows, a.plot);
    std::cout << "svg " << a.plot << "\n";
  }
  return violations == 0 ? 0 : kExitInvariant;
}

int run_fuzz_cmd(const FuzzConfig& config) {
  const FuzzReport report = run_fuzz(config);
  std::cout << report.to_text();
  return report.ok() ? 0 : kExitInvariant;
}

int run_plot(const std::string& csv, const std::string& out_path) {
  std::ifstream in(csv);
  if (!in) throw ValidationError("cannot open '" + csv + "'");
  emit_plot(read_sweep_csv(in), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gap and localization bounds for one-particle lattice models"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from a TOML/INI file; flags override");
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Ground state, gap and position statistics");
  solve_cmd->add_option("model", solve.model, "Model file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--spectrum", solve.spectrum_out, "Write '<index> <eigenvalue>' lines");
  solve_cmd->add_option("--profile", solve.profile_out, "Write the density profile CSV");
  solve_cmd->add_option("--fit", solve.fit_out, "Write the decay-length fit CSV");
  solve_cmd->add_option("--fit-center", solve.fit_center, "Fit centre (default: argmax p_x)");
  solve_cmd->add_option("--fit-floor", solve.fit.floor, "Smallest p_x used in the fit");
  solve_cmd->add_option("--fit-margin", solve.fit.boundary_margin, "Edge sites excluded from the fit");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate and verify the tail envelopes");
  bounds_cmd->add_option("model", bounds.model, "Model file")->required()->check(CLI::ExistingFile);
  bounds_cmd->add_option("--s", bounds.s, "Envelope parameter in (0, 1)");
  bounds_cmd->add_option("--mu", bounds.mu, "Decay rate of the hopping envelope");
  bounds_cmd->add_option("--grid-step", bounds.grid_step, "Radius step for verification");
  bounds_cmd->add_option("--tolerance", bounds.tolerance, "Absolute tolerance on probabilities");
  bounds_cmd->add_option("--out", bounds.out, "Bound report CSV (default stdout)");
  bounds_cmd->add_option("--envelope-out", bounds.envelope_prefix,
                         "Prefix for <prefix>.theorem{1,2}.csv envelope checks");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Impurity-chain sweep over h0");
  sweep_cmd->add_option("--L", sweep.L, "Chain parameter (L + 1 sites, even)");
  sweep_cmd->add_option("--h0-min", sweep.h0_min, "Most negative h0");
  sweep_cmd->add_option("--h0-max", sweep.h0_max, "Least negative h0");
  sweep_cmd->add_option("--points", sweep.points, "Log-spaced grid points");
  sweep_cmd->add_option("--s", sweep.s, "Envelope parameter in (0, 1)");
  sweep_cmd->add_option("--mu", sweep.mu, "Decay rate for the theorem-1 envelope");
  sweep_cmd->add_option("--cv", sweep.cv, "Override the fitted envelope amplitude");
  sweep_cmd->add_option("--grid-step", sweep.grid_step, "Radius step for verification");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0: GAPBOUND_THREADS or all)");
  sweep_cmd->add_option("--out", sweep.out, "Sweep CSV path");
  sweep_cmd->add_option("--plot", sweep.plot, "Also write the SVG plot here");

  FuzzConfig fuzz;
  std::string family = "nearest-neighbor";
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Randomized invariant checks");
  fuzz_cmd->add_option("--seed", fuzz.seed, "Master seed");
  fuzz_cmd->add_option("--trials", fuzz.trials, "Number of random models");
  fuzz_cmd->add_option("--family", family, "envelope | nearest-neighbor");
  fuzz_cmd->add_option("--min-L", fuzz.min_L, "Smallest L drawn");
  fuzz_cmd->add_option("--max-L", fuzz.max_L, "Largest L drawn");
  fuzz_cmd->add_option("--min-n0", fuzz.min_n0, "Smallest N0 drawn");
  fuzz_cmd->add_option("--max-n0", fuzz.max_n0, "Largest N0 drawn");
  fuzz_cmd->add_option("--cv", fuzz.cv, "Declared envelope amplitude");
  fuzz_cmd->add_option("--mu", fuzz.mu, "Declared envelope decay rate");
  fuzz_cmd->add_option("--v0", fuzz.v0, "Declared nearest-neighbour bound");
  fuzz_cmd->add_option("--hopping-scale", fuzz.hopping_scale,
                       "Scale generated hopping relative to the declaration");

  std::string plot_csv;
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render a sweep CSV as SVG");
  plot_cmd->add_option("csv", plot_csv, "Sweep CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*bounds_cmd) return run_bounds(bounds);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*fuzz_cmd) {
      fuzz.family = parse_fuzz_family(family);
      return run_fuzz_cmd(fuzz);
    }
    if (*plot_cmd) return run_plot(plot_csv, plot_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitValidation;
}
