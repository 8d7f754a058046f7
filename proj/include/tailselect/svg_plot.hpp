#pragma once

#include <string>
#include <vector>

#include "tailselect/harness.hpp"

namespace tailselect {

struct PlotOptions {
  bool logx = false;
  bool logy = false;
  std::string title;
};

// Standalone SVG document: one polyline with circle markers per curve,
// tick-labelled axes (decade ticks on log scales), legend from method ids.
// On a log y axis a zero PFS cannot be drawn, so such rows are displayed at
// 1/(2*trials) and a footnote records the substitution. Pure function of its
// inputs.
std::string render_pfs_svg(const std::vector<PfsCurve>& curves,
                           const PlotOptions& opts);

}  // namespace tailselect
