#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "gapbound/errors.hpp"
#include "gapbound/experiment.hpp"
#include "gapbound/rng.hpp"

using namespace gapbound;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gapbound_test_" + name)).string();
}

}  // namespace

TEST(Rng, DeterministicAndIndependentSubstreams) {
  Rng a(substream_seed(42, 3)), b(substream_seed(42, 3)), c(substream_seed(42, 4));
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    differs |= va != c.next();
  }
  EXPECT_TRUE(differs);
  Rng r(1);
  for (int k = 0; k < 1000; ++k) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const int i = r.uniform_int(2, 5);
    EXPECT_GE(i, 2);
    EXPECT_LE(i, 5);
  }
}

TEST(Grid, LogSpacedEndpoints) {
  const auto g = log_spaced_h0();
  ASSERT_EQ(g.size(), 100u);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_EQ(g.back(), -0.01);
  for (std::size_t k = 1; k < g.size(); ++k) {
    EXPECT_GT(g[k], g[k - 1]);
    EXPECT_NEAR(g[k] / g[k - 1], std::pow(0.01, 1.0 / 99), 1e-12);
  }
  EXPECT_EQ(log_spaced_h0(1, -0.5, -0.1), std::vector<double>{-0.5});
  EXPECT_THROW(log_spaced_h0(0), ValidationError);
  EXPECT_THROW(log_spaced_h0(5, -1.0, 0.5), ValidationError);
  EXPECT_THROW(log_spaced_h0(5, -0.1, -1.0), ValidationError);
}

TEST(Sweep, PointAtStrongDefect) {
  SweepConfig c;
  const SweepRow r = sweep_point(c, -1.0);
  EXPECT_GT(r.gap, 0.0);
  EXPECT_LT(r.ratio2, r.ratio1);
  EXPECT_NEAR(r.xi_fit / (r.delta_x / std::sqrt(2.0)), 1.0, 0.1);
  EXPECT_EQ(r.violations1, 0);
  EXPECT_EQ(r.violations2, 0);
  EXPECT_GT(r.radii_checked, 0);
  EXPECT_NEAR(r.ratio1, std::sqrt(2.0) * r.xi1 / r.delta_x, 1e-12);
}

TEST(Sweep, PointAtWeakDefect) {
  SweepConfig c;
  const SweepRow r = sweep_point(c, -0.01);
  EXPECT_GT(r.gap, 0.0);
  EXPECT_EQ(r.violations1, 0);
  EXPECT_EQ(r.violations2, 0);
}

TEST(Sweep, CvOverrideOnlyMovesTheorem1) {
  SweepConfig c;
  c.L = 100;
  const SweepRow fitted = sweep_point(c, -0.5);
  c.cv_override = 1.0;
  const SweepRow literal = sweep_point(c, -0.5);
  EXPECT_NEAR(fitted.xi1 / literal.xi1, std::sqrt(std::exp(1.0)), 1e-12);
  EXPECT_EQ(fitted.xi2, literal.xi2);
}

TEST(Sweep, DeterministicCsvAcrossThreadCounts) {
  SweepConfig c;
  c.L = 80;
  c.h0_grid = log_spaced_h0(7, -1.0, -0.05);
  c.output_path = temp_path("sweep_a.csv");
  c.threads = 1;
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(rows[k].h0, c.h0_grid[k]);
  const std::string a = slurp(c.output_path);
  c.output_path = temp_path("sweep_b.csv");
  c.threads = 3;
  run_sweep(c);
  EXPECT_EQ(a, slurp(c.output_path));
  EXPECT_EQ(a.substr(0, a.find('\n')), kSweepCsvHeader);
}

TEST(Sweep, CsvRoundTripIsExact) {
  SweepConfig c;
  c.L = 40;
  c.h0_grid = {-1.0, -0.3};
  const auto rows = run_sweep(c);
  std::stringstream io;
  write_sweep_csv(io, rows);
  const auto back = read_sweep_csv(io);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(back[k].h0, rows[k].h0);
    EXPECT_EQ(back[k].gap, rows[k].gap);
    EXPECT_EQ(back[k].ratio1, rows[k].ratio1);
    EXPECT_EQ(back[k].fit_r_squared, rows[k].fit_r_squared);
  }
}

TEST(Sweep, ReadRejectsBadCsv) {
  std::istringstream bad_header("h0,E0\n");
  EXPECT_THROW(read_sweep_csv(bad_header), ParseError);
  std::istringstream short_row(std::string(kSweepCsvHeader) + "\n1,2,3\n");
  EXPECT_THROW(read_sweep_csv(short_row), ParseError);
}

TEST(Sweep, ConfigValidation) {
  SweepConfig c;
  EXPECT_THROW(run_sweep(c), ValidationError);  // empty grid
  c.h0_grid = {-0.5};
  c.L = 7;
  EXPECT_THROW(run_sweep(c), ValidationError);
  c.L = 10;
  c.s = 1.0;
  EXPECT_THROW(run_sweep(c), ValidationError);
  c.s = 0.5;
  c.h0_grid = {0.2};
  EXPECT_THROW(run_sweep(c), ValidationError);
}

TEST(Sweep, FailingPointNamesItsH0) {
  SweepConfig c;
  c.L = 10;
  c.h0_grid = {-0.5};
  c.fit.floor = -1.0;  // rejected inside the point, after the solve
  try {
    run_sweep(c);
    FAIL() << "expected SweepPointError";
  } catch (const SweepPointError& e) {
    EXPECT_EQ(e.h0(), -0.5);
    EXPECT_NE(std::string(e.what()).find("h0 = -0.5"), std::string::npos);
  }
}

TEST(Threads, ResolveCount) {
  EXPECT_EQ(resolve_thread_count(4, 2), 2);
  EXPECT_EQ(resolve_thread_count(3, 100), 3);
  ::setenv("GAPBOUND_THREADS", "2", 1);
  EXPECT_EQ(resolve_thread_count(0, 100), 2);
  ::unsetenv("GAPBOUND_THREADS");
  EXPECT_GE(resolve_thread_count(0, 100), 1);
}

TEST(Fuzz, NearestNeighbourFamilyPasses) {
  FuzzConfig c;
  c.trials = 60;
  const FuzzReport r = run_fuzz(c);
  EXPECT_TRUE(r.ok()) << r.to_text();
  EXPECT_EQ(r.trials_run, 60);
  EXPECT_EQ(r.passed + r.degenerate_skipped, 60);
}

TEST(Fuzz, EnvelopeFamilyPasses) {
  FuzzConfig c;
  c.family = FuzzFamily::kEnvelope;
  c.trials = 60;
  c.seed = 7;
  const FuzzReport r = run_fuzz(c);
  EXPECT_TRUE(r.ok()) << r.to_text();
}

TEST(Fuzz, ReportIsReproducible) {
  FuzzConfig c;
  c.trials = 25;
  EXPECT_EQ(run_fuzz(c).to_text(), run_fuzz(c).to_text());
  const ModelSpec a = fuzz_spec(c, 4), b = fuzz_spec(c, 4);
  EXPECT_EQ(a.L, b.L);
  EXPECT_EQ(a.hopping.size(), b.hopping.size());
}

TEST(Fuzz, BrokenDeclarationIsAPreconditionError) {
  FuzzConfig c;
  c.family = FuzzFamily::kEnvelope;
  c.hopping_scale = 50.0;
  c.trials = 10;
  EXPECT_THROW(run_fuzz(c), EnvelopeViolation);
  c.family = FuzzFamily::kNearestNeighbor;
  EXPECT_THROW(run_fuzz(c), EnvelopeViolation);
}

TEST(Fuzz, ConfigValidation) {
  FuzzConfig c;
  c.min_L = 1;
  EXPECT_THROW(run_fuzz(c), ValidationError);
  c = FuzzConfig{};
  c.max_n0 = 0;
  EXPECT_THROW(run_fuzz(c), ValidationError);
  EXPECT_THROW(parse_fuzz_family("banana"), ValidationError);
  EXPECT_EQ(parse_fuzz_family("nn"), FuzzFamily::kNearestNeighbor);
}

TEST(Plot, SingleRowHasOneMarkerPerPanel) {
  SweepRow r;
  r.h0 = -0.5;
  r.ratio1 = 10.0;
  r.ratio2 = 2.0;
  const std::string svg = render_plot_svg({r});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1))
    ++circles;
  EXPECT_EQ(circles, 2u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, FullSweepCoordinatesAreFiniteAndDeterministic) {
  SweepConfig c;
  c.L = 60;
  c.h0_grid = log_spaced_h0(12, -1.0, -0.05);
  const auto rows = run_sweep(c);
  const std::string svg = render_plot_svg(rows);
  EXPECT_EQ(svg, render_plot_svg(rows));
  const std::regex num(R"re((cx|cy)="([^"]*)")re");
  int seen = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), num); it != std::sregex_iterator();
       ++it) {
    EXPECT_TRUE(std::isfinite(std::stod((*it)[2].str())));
    ++seen;
  }
  EXPECT_EQ(seen, 2 * 2 * 12);
  // Markers in each panel advance left to right with h0.
  const std::regex cx(R"re(<circle cx="([^"]*)")re");
  std::vector<double> xs;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cx); it != std::sregex_iterator();
       ++it)
    xs.push_back(std::stod((*it)[1].str()));
  for (int k = 1; k < 12; ++k) EXPECT_GT(xs[k], xs[k - 1]);

  const std::string path = temp_path("plot.svg");
  emit_plot(rows, path);
  EXPECT_EQ(slurp(path), svg);
}

TEST(Plot, EmptyRowsAndBadPath) {
  EXPECT_THROW(render_plot_svg({}), ValidationError);
  SweepRow r;
  EXPECT_THROW(emit_plot({r}, "/nonexistent-dir/x.svg"), Error);
}
