#ifndef GEMD_PLOT_HPP
#define GEMD_PLOT_HPP

#include <string>
#include <vector>

#include "gemd/errors.hpp"

namespace gemd::cli {

// The six figure layouts. The first three read iteration traces, the last
// three read a sweep table.
enum class PlotKind {
  convergence,    // two panels: rel-primal and rel-FW vs iteration, log y
  iou,            // support IoU vs iteration
  iou_vs_gap,     // IoU vs rel-FW gap, log x
  noise,          // final rel-FW gap vs SNR, log y, error bars
  conditioning,   // iterations to threshold vs kappa, log x, error bars
  q_sensitivity,  // two panels: iterations and rel-primal vs q, error bars
};

PlotKind plot_kind_from_key(const std::string& key);
std::string plot_kind_key(PlotKind kind);

// Renders one figure from the input files (trace CSVs for trace kinds, one
// sweep CSV for sweep kinds) and writes <out_base>.svg plus a <out_base>.csv
// sidecar holding exactly the plotted points. All inputs are parsed before
// anything is written, so a bad or empty input produces no files. The SVG is
// a deterministic function of the inputs: fixed canvas, fixed palette.
void render_plot(PlotKind kind, const std::vector<std::string>& inputs,
                 const std::string& out_base);

}  // namespace gemd::cli

#endif  // GEMD_PLOT_HPP
