#include "tailselect/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tailselect {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

constexpr double kWidth = 780.0, kHeight = 500.0;
constexpr double kLeft = 72.0, kRight = 600.0;  // plot area x extent
constexpr double kTop = 48.0, kBottom = 430.0;  // plot area y extent

std::string fmt(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.2f", x);
  return b;
}

std::string fmt_value(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%g", x);
  return b;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps data values into pixel coordinates, in log10 space when log is set.
struct AxisScale {
  bool log = false;
  double lo = 0.0, hi = 1.0;
  double p0 = 0.0, p1 = 1.0;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return p0 + (t - lo) / (hi - lo) * (p1 - p0);
  }
};

double nice_step(double raw) {
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r <= 1.0) return mag;
  if (r <= 2.0) return 2.0 * mag;
  if (r <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

// Tick positions in data space; log axes tick every decade inside the range.
std::vector<double> ticks_for(const AxisScale& ax) {
  std::vector<double> t;
  if (ax.log) {
    for (double d = std::ceil(ax.lo - 1e-9); d <= ax.hi + 1e-9; d += 1.0)
      t.push_back(std::pow(10.0, d));
    if (t.empty()) {
      t.push_back(std::pow(10.0, ax.lo));
      t.push_back(std::pow(10.0, ax.hi));
    }
  } else {
    const double step = nice_step((ax.hi - ax.lo) / 5.0);
    for (double v = std::ceil(ax.lo / step - 1e-9) * step; v <= ax.hi + 1e-9;
         v += step)
      t.push_back(std::fabs(v) < step * 1e-9 ? 0.0 : v);
  }
  return t;
}

}  // namespace

std::string render_pfs_svg(const std::vector<PfsCurve>& curves,
                           const PlotOptions& opts) {
  std::size_t n_points = 0;
  for (const PfsCurve& c : curves) n_points += c.rows.size();
  if (curves.empty() || n_points == 0)
    throw std::invalid_argument("render_pfs_svg: no data to plot");

  // Displayed y values, with the log-axis zero clamp applied per row.
  bool any_clamped = false;
  auto display_y = [&](const PfsRow& r) {
    double y = r.pfs;
    if (opts.logy && !(y > 0.0)) {
      y = 1.0 / (2.0 * static_cast<double>(std::max<long>(r.trials, 1)));
      any_clamped = true;
    }
    return y;
  };

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const PfsCurve& c : curves)
    for (const PfsRow& r : c.rows) {
      if (opts.logx && r.T <= 0)
        throw std::invalid_argument("render_pfs_svg: log x needs T > 0");
      const double x = static_cast<double>(r.T);
      const double y = display_y(r);
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }

  AxisScale xs;
  xs.log = opts.logx;
  xs.p0 = kLeft;
  xs.p1 = kRight;
  if (opts.logx) {
    xs.lo = std::log10(xmin);
    xs.hi = std::log10(xmax);
    if (xs.hi - xs.lo < 1e-9) {
      xs.lo -= 0.5;
      xs.hi += 0.5;
    }
  } else {
    const double pad = std::max((xmax - xmin) * 0.05, xmax > 0 ? xmax * 1e-3 : 1.0);
    xs.lo = xmin - pad;
    xs.hi = xmax + pad;
  }

  AxisScale ys;
  ys.log = opts.logy;
  ys.p0 = kBottom;  // y grows downward in SVG, so bottom maps the low end
  ys.p1 = kTop;
  if (opts.logy) {
    ys.lo = std::floor(std::log10(ymin) - 1e-9);
    ys.hi = std::ceil(std::log10(std::max(ymax, ymin)) + 1e-9);
    if (ys.hi - ys.lo < 1.0) ys.lo = ys.hi - 1.0;
  } else {
    ys.lo = 0.0;
    ys.hi = ymax > 0.0 ? std::min(1.05 * ymax, 1.0) : 1.0;
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
         "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) +
         " " + fmt(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!opts.title.empty())
    svg += "<text x=\"" + fmt((kLeft + kRight) / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           xml_escape(opts.title) + "</text>\n";

  // Grid and ticks.
  for (double v : ticks_for(xs)) {
    const double px = xs.map(v);
    svg += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" +
           fmt(px) + "\" y2=\"" + fmt(kBottom) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kBottom + 18) +
           "\" text-anchor=\"middle\">" + fmt_value(v) + "</text>\n";
  }
  for (double v : ticks_for(ys)) {
    const double py = ys.map(v);
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
           fmt(kRight) + "\" y2=\"" + fmt(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(py + 4) +
           "\" text-anchor=\"end\">" + fmt_value(v) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
         fmt(kRight - kLeft) + "\" height=\"" + fmt(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + fmt((kLeft + kRight) / 2) + "\" y=\"" +
         fmt(kBottom + 38) + "\" text-anchor=\"middle\">T</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt((kTop + kBottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt((kTop + kBottom) / 2) + ")\">PFS</text>\n";

  // Curves and legend.
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % kPaletteSize];
    std::string points;
    for (const PfsRow& r : curves[c].rows) {
      points += fmt(xs.map(static_cast<double>(r.T))) + "," +
                fmt(ys.map(display_y(r))) + " ";
    }
    svg += "<polyline points=\"" + points +
           "\" fill=\"none\" stroke-width=\"2\" stroke=\"" + color + "\"/>\n";
    for (const PfsRow& r : curves[c].rows)
      svg += "<circle cx=\"" + fmt(xs.map(static_cast<double>(r.T))) +
             "\" cy=\"" + fmt(ys.map(display_y(r))) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    const double ly = kTop + 16.0 + 20.0 * static_cast<double>(c);
    svg += "<line x1=\"" + fmt(kRight + 14) + "\" y1=\"" + fmt(ly - 4) +
           "\" x2=\"" + fmt(kRight + 40) + "\" y2=\"" + fmt(ly - 4) +
           "\" stroke-width=\"2\" stroke=\"" + std::string(color) + "\"/>\n";
    svg += "<text x=\"" + fmt(kRight + 46) + "\" y=\"" + fmt(ly) + "\">" +
           xml_escape(curves[c].method) + "</text>\n";
  }

  if (any_clamped)
    svg += "<text x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kHeight - 12) +
           "\" font-size=\"11\" fill=\"#555555\">zero PFS rows are drawn at "
           "1/(2*trials), the half-width of their confidence floor</text>\n";

  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace tailselect
