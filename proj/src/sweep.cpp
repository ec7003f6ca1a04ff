#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "gapbound/eigensolver.hpp"
#include "gapbound/experiment.hpp"

namespace gapbound {
namespace {

std::string fmt_h0(double h0) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", h0);
  return buf;
}

// Runs body(i) for i in [0, jobs) on up to `threads` workers. The exception
// from the lowest failing index is rethrown after all workers finish.
template <class Body>
void parallel_for(int jobs, int threads, Body body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  if (threads <= 1) {
    for (int i = 0; i < jobs; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < jobs; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

SweepPointError::SweepPointError(double h0, const std::string& what)
    : Error("h0 = " + fmt_h0(h0) + ": " + what), h0_(h0) {}

std::vector<double> log_spaced_h0(int points, double h0_min, double h0_max) {
  if (points < 1) throw ValidationError("need at least one h0 point");
  if (!(h0_min < 0.0) || !(h0_max < 0.0) || h0_min > h0_max) {
    throw ValidationError("h0 range must be negative with h0_min <= h0_max");
  }
  if (points == 1) return {h0_min};
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double a = std::log(-h0_min);
  const double b = std::log(-h0_max);
  for (int k = 0; k < points; ++k) {
    grid[k] = -std::exp(a + (b - a) * k / (points - 1));
  }
  grid.front() = h0_min;
  grid.back() = h0_max;
  return grid;
}

int resolve_thread_count(int requested, int jobs) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GAPBOUND_THREADS")) {
      int cap = 0;
      const std::string_view sv(env);
      auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
      if (ec == std::errc() && cap > 0) n = cap;
    }
  }
  return std::clamp(n, 1, std::max(1, jobs));
}

void validate(const SweepConfig& c) {
  if (c.L < 2 || c.L % 2 != 0) throw ValidationError("sweep L must be even and >= 2");
  if (c.h0_grid.empty()) throw ValidationError("h0 grid is empty");
  for (double h0 : c.h0_grid) {
    if (!(h0 < 0.0) || !std::isfinite(h0)) {
      throw ValidationError("h0 values must be negative and finite");
    }
  }
  if (!(c.s > 0.0 && c.s < 1.0)) throw ValidationError("s must lie in (0, 1)");
  if (!(c.mu > 0.0)) throw ValidationError("mu must be positive");
  if (c.cv_override && !(*c.cv_override > 0.0)) throw ValidationError("Cv must be positive");
  if (!(c.grid_step > 0.0)) throw ValidationError("grid step must be positive");
  if (!(c.tolerance >= 0.0)) throw ValidationError("tolerance must be nonnegative");
}

SweepRow sweep_point(const SweepConfig& config, double h0) {
  const ModelSpec spec = impurity_model(config.L, h0);
  const SpectrumResult sr = lowest_two(HermitianMatrix(assemble(spec)));
  const DensityProfile profile = density(sr.psi0, spec);
  const PositionStats stats = position_stats(profile);

  SweepRow row;
  row.h0 = h0;
  row.e0 = sr.e0;
  row.e1 = sr.e1;
  row.gap = sr.gap;
  row.delta_x = stats.std_dev();

  try {
    const DecayFit fit =
        fit_localization_length(profile, impurity_center(config.L), config.fit);
    row.xi_fit = fit.xi_fit;
    row.fit_r_squared = fit.r_squared;
  } catch (const InsufficientData&) {
    row.xi_fit = row.fit_r_squared = std::nan("");
  } catch (const NonDecaying&) {
    row.xi_fit = row.fit_r_squared = std::nan("");
  }

  HoppingEnvelope envelope = fit_envelope(spec, config.mu);
  if (config.cv_override) envelope.cv = *config.cv_override;
  const NNBound nn = check_nearest_neighbor(spec);

  const Theorem1Bound t1 = theorem1_bound(envelope, sr.gap, config.s, row.delta_x);
  const Theorem2Bound t2 = theorem2_bound(nn.v0, sr.gap, config.s, row.delta_x);
  row.xi1 = t1.xi1;
  row.xi2 = t2.xi2;
  row.ratio1 = std::sqrt(2.0) * t1.xi1 / row.delta_x;
  row.ratio2 = std::sqrt(2.0) * t2.xi2 / row.delta_x;

  const auto c1 = verify_envelope(profile, stats.mean, t1, config.grid_step, config.tolerance);
  const auto c2 = verify_envelope(profile, stats.mean, t2, config.grid_step, config.tolerance);
  row.violations1 = static_cast<int>(c1.violations.size());
  row.violations2 = static_cast<int>(c2.violations.size());
  row.radii_checked = static_cast<int>(c1.radii.size() + c2.radii.size());
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  validate(config);
  const int jobs = static_cast<int>(config.h0_grid.size());
  std::vector<SweepRow> rows(config.h0_grid.size());
  parallel_for(jobs, resolve_thread_count(config.threads, jobs), [&](int i) {
    const double h0 = config.h0_grid[i];
    try {
      rows[i] = sweep_point(config, h0);
    } catch (const Error& e) {
      throw SweepPointError(h0, e.what());
    }
  });
  if (!config.output_path.empty()) {
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) throw Error("cannot write sweep CSV to '" + config.output_path + "'");
    write_sweep_csv(out, rows);
    if (!out) throw Error("failed writing '" + config.output_path + "'");
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << "\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.h0, r.e0, r.e1, r.gap, r.delta_x, r.xi_fit, r.xi1, r.xi2,
                  r.ratio1, r.ratio2, r.fit_r_squared);
    out << buf;
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty sweep CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw ParseError(1, "unexpected sweep CSV header");
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[11];
    std::size_t pos = 0;
    for (int k = 0; k < 11; ++k) {
      const std::size_t end = k == 10 ? line.size() : line.find(',', pos);
      if (end == std::string::npos) throw ParseError(lineno, "expected 11 fields");
      const std::string field = line.substr(pos, end - pos);
      char* stop = nullptr;
      v[k] = std::strtod(field.c_str(), &stop);
      if (field.empty() || *stop != '\0') {
        throw ParseError(lineno, "bad number '" + field + "'");
      }
      pos = end + 1;
    }
    SweepRow r;
    r.h0 = v[0];
    r.e0 = v[1];
    r.e1 = v[2];
    r.gap = v[3];
    r.delta_x = v[4];
    r.xi_fit = v[5];
    r.xi1 = v[6];
    r.xi2 = v[7];
    r.ratio1 = v[8];
    r.ratio2 = v[9];
    r.fit_r_squared = v[10];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace gapbound
