#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gapbound/bounds.hpp"
#include "gapbound/errors.hpp"
#include "gapbound/lattice_model.hpp"
#include "gapbound/localization.hpp"
#include "gapbound/rng.hpp"

namespace gapbound {

/// Impurity-chain sweep over the defect strength h0.
struct SweepConfig {
  int L = 500;
  std::vector<double> h0_grid;
  double s = 0.5;
  /// Decay rate for the exponential envelope used by the theorem-1 bound.
  double mu = 1.0;
  /// Replaces the fitted Cv (e^mu for unit hopping) when set.
  std::optional<double> cv_override;
  double grid_step = 0.5;
  double tolerance = 1e-12;
  FitOptions fit;
  std::string output_path;
  /// 0 selects GAPBOUND_THREADS or the hardware concurrency.
  int threads = 0;
};

/// `points` log-spaced values from h0_min to h0_max (both negative),
/// ordered from h0_min upward.
std::vector<double> log_spaced_h0(int points = 100, double h0_min = -1.0,
                                  double h0_max = -0.01);

struct SweepRow {
  double h0 = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  double delta_x = 0.0;
  double xi_fit = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double ratio1 = 0.0;
  double ratio2 = 0.0;
  double fit_r_squared = 0.0;
  // Not part of the CSV.
  int violations1 = 0;
  int violations2 = 0;
  int radii_checked = 0;
};

/// Thrown when one sweep point fails; carries the offending h0.
class SweepPointError : public Error {
 public:
  SweepPointError(double h0, const std::string& what);
  double h0() const noexcept { return h0_; }

 private:
  double h0_;
};

void validate(const SweepConfig& config);

/// Solves one impurity chain and evaluates both theorem bounds on it.
SweepRow sweep_point(const SweepConfig& config, double h0);

/// Runs every grid point (concurrently when allowed), returns rows in grid
/// order and writes the CSV to output_path when it is nonempty. An empty
/// h0_grid is rejected; use log_spaced_h0() for the default grid.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

inline constexpr const char* kSweepCsvHeader =
    "h0,E0,E1,gap,deltaX,xi_fit,xi1,xi2,ratio1,ratio2,fit_r_squared";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Worker count: GAPBOUND_THREADS when set and positive, else the hardware
/// concurrency, never more than `jobs`.
int resolve_thread_count(int requested, int jobs);

enum class FuzzFamily { kEnvelope, kNearestNeighbor };

struct FuzzConfig {
  std::uint64_t seed = 42;
  int trials = 500;
  int min_L = 2;
  int max_L = 40;
  int min_n0 = 1;
  int max_n0 = 3;
  FuzzFamily family = FuzzFamily::kNearestNeighbor;
  /// Declared hopping bounds the generated specs must respect.
  double cv = 1.0;
  double mu = 1.0;
  double v0 = 1.0;
  /// Multiplies generated hopping norms; above 1 the declaration is broken
  /// on purpose and run_fuzz rejects the input.
  double hopping_scale = 1.0;
  double grid_step = 0.5;
};

void validate(const FuzzConfig& config);

/// Random spec for one trial, drawn from its substream.
ModelSpec fuzz_spec(const FuzzConfig& config, int trial);

struct FuzzFailure {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::string check;
  std::string message;
};

struct FuzzReport {
  FuzzConfig config;
  int trials_run = 0;
  int degenerate_skipped = 0;
  int passed = 0;
  std::optional<FuzzFailure> failure;

  bool ok() const { return !failure.has_value(); }
  std::string to_text() const;
};

/// Runs the invariant suite on each trial and stops at the first failure.
/// Draws whose generated hopping breaks the declared bound raise
/// EnvelopeViolation before any invariant is checked.
FuzzReport run_fuzz(const FuzzConfig& config);

std::string fuzz_family_name(FuzzFamily family);
FuzzFamily parse_fuzz_family(const std::string& name);

/// Two-panel SVG of ratio1 and ratio2 against h0.
std::string render_plot_svg(const std::vector<SweepRow>& rows);
void emit_plot(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace gapbound
