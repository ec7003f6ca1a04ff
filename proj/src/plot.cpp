#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gapbound/experiment.hpp"

namespace gapbound {
namespace {

constexpr double kPanelWidth = 460.0;
constexpr double kPanelHeight = 360.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Widens degenerate or empty ranges so the mapping stays finite.
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(0.5, 0.05 * std::abs(hi));
      lo -= pad;
      hi += pad;
    }
  }
};

void panel(std::ostringstream& svg, double x0, const std::vector<SweepRow>& rows,
           double SweepRow::*field, const std::string& title, const std::string& ylabel) {
  Range xr, yr;
  for (const auto& r : rows) {
    if (std::isfinite(r.*field)) {
      xr.add(r.h0);
      yr.add(r.*field);
    }
  }
  xr.settle();
  yr.settle();
  yr.lo = std::min(yr.lo, 0.0);

  const double left = x0 + kMarginLeft;
  const double right = x0 + kPanelWidth - kMarginRight;
  const double top = kMarginTop;
  const double bottom = kPanelHeight - kMarginBottom;
  auto px = [&](double v) { return left + (v - xr.lo) / (xr.hi - xr.lo) * (right - left); };
  auto py = [&](double v) { return bottom - (v - yr.lo) / (yr.hi - yr.lo) * (bottom - top); };

  svg << "<g class=\"panel\">\n";
  svg << "<text x=\"" << f3((left + right) / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << title << "</text>\n";
  svg << "<rect x=\"" << f3(left) << "\" y=\"" << f3(top) << "\" width=\"" << f3(right - left)
      << "\" height=\"" << f3(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    svg << "<line x1=\"" << f3(px(xv)) << "\" y1=\"" << f3(bottom) << "\" x2=\"" << f3(px(xv))
        << "\" y2=\"" << f3(bottom + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << f3(px(xv)) << "\" y=\"" << f3(bottom + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(xv) << "</text>\n";
    svg << "<line x1=\"" << f3(left - 5) << "\" y1=\"" << f3(py(yv)) << "\" x2=\"" << f3(left)
        << "\" y2=\"" << f3(py(yv)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << f3(left - 8) << "\" y=\"" << f3(py(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(yv) << "</text>\n";
  }
  svg << "<text x=\"" << f3((left + right) / 2) << "\" y=\"" << f3(kPanelHeight - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">h0</text>\n";
  svg << "<text x=\"" << f3(x0 + 16) << "\" y=\"" << f3((top + bottom) / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 " << f3(x0 + 16)
      << " " << f3((top + bottom) / 2) << ")\">" << ylabel << "</text>\n";

  // Unit reference line: ratios below it would mean the bound undercuts the
  // measured decay length.
  if (yr.lo <= 1.0 && 1.0 <= yr.hi) {
    svg << "<line x1=\"" << f3(left) << "\" y1=\"" << f3(py(1.0)) << "\" x2=\"" << f3(right)
        << "\" y2=\"" << f3(py(1.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }

  std::vector<const SweepRow*> pts;
  for (const auto& r : rows) {
    if (std::isfinite(r.h0) && std::isfinite(r.*field)) pts.push_back(&r);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const SweepRow* a, const SweepRow* b) { return a->h0 < b->h0; });
  if (pts.size() > 1) {
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
    for (const auto* r : pts) svg << f3(px(r->h0)) << "," << f3(py(r->*field)) << " ";
    svg << "\"/>\n";
  }
  for (const auto* r : pts) {
    svg << "<circle cx=\"" << f3(px(r->h0)) << "\" cy=\"" << f3(py(r->*field))
        << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
  }
  svg << "</g>\n";
}

}  // namespace

std::string render_plot_svg(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ValidationError("cannot plot an empty sweep");
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f3(2 * kPanelWidth)
      << "\" height=\"" << f3(kPanelHeight) << "\" viewBox=\"0 0 " << f3(2 * kPanelWidth)
      << " " << f3(kPanelHeight) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(svg, 0.0, rows, &SweepRow::ratio1, "(a) exponential-hopping bound",
        "sqrt(2) xi1 / deltaX");
  panel(svg, kPanelWidth, rows, &SweepRow::ratio2, "(b) nearest-neighbour bound",
        "sqrt(2) xi2 / deltaX");
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<SweepRow>& rows, const std::string& path) {
  const std::string svg = render_plot_svg(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write plot to '" + path + "'");
  out << svg;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace gapbound
