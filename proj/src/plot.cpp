#include "gemd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gemd/experiment.hpp"
#include "gemd/metrics.hpp"

namespace gemd::cli {

namespace {

namespace fs = std::filesystem;

struct Series {
  std::string label;  // series with the same label share one color
  std::vector<double> x, y;
  std::vector<double> yerr;  // empty, or one half-width per point
};

struct Panel {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  bool unit_y = false;  // fixed [0, 1.05] range for IoU panels
  std::vector<Series> series;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

constexpr double kPanelW = 460.0, kPanelH = 370.0;
constexpr double kMarginL = 62.0, kMarginR = 18.0, kMarginT = 30.0,
                 kMarginB = 48.0;

std::string fmt(double v, const char* spec) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
  const double frac = span / 4.0 / step;
  if (frac >= 5.0)
    step *= 5.0;
  else if (frac >= 2.0)
    step *= 2.0;
  std::vector<double> t;
  for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * span;
       v += step)
    t.push_back(v == 0.0 ? 0.0 : v);
  return t;
}

std::vector<double> log_ticks(double lo, double hi) {
  const int klo = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
  const int khi = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
  const int step = 1 + std::max(0, khi - klo) / 9;
  std::vector<double> t;
  for (int k = klo; k <= khi; k += step) t.push_back(std::pow(10.0, k));
  if (t.empty()) t.push_back(lo);
  return t;
}

bool point_ok(const Panel& p, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  if (p.logx && !(x > 0.0)) return false;
  if (p.logy && !(y > 0.0)) return false;
  return true;
}

void render_panel(std::string& svg, const Panel& p, double ox,
                  const std::vector<std::string>& labels) {
  const double px0 = ox + kMarginL, py0 = kMarginT;
  const double pw = kPanelW - kMarginL - kMarginR;
  const double ph = kPanelH - kMarginT - kMarginB;

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!point_ok(p, s.x[i], s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      double lo = s.y[i], hi = s.y[i];
      if (!s.yerr.empty()) {
        hi += s.yerr[i];
        if (!p.logy || s.y[i] - s.yerr[i] > 0.0) lo -= s.yerr[i];
      }
      ylo = std::min(ylo, lo);
      yhi = std::max(yhi, hi);
    }
  if (!(xlo < xhi)) {
    if (!std::isfinite(xlo)) xlo = p.logx ? 0.1 : 0.0;
    xhi = p.logx ? xlo * 10.0 : xlo + 1.0;
    xlo = p.logx ? xlo / 10.0 : xlo - 1.0;
  }
  if (p.unit_y) {
    ylo = 0.0;
    yhi = 1.05;
  } else if (!(ylo < yhi)) {
    if (!std::isfinite(ylo)) ylo = p.logy ? 0.1 : 0.0;
    yhi = p.logy ? ylo * 10.0 : ylo + 1.0;
    ylo = p.logy ? ylo / 10.0 : ylo - 1.0;
  } else {
    if (p.logy) {
      ylo /= 1.5;
      yhi *= 1.5;
    } else {
      const double pad = 0.05 * (yhi - ylo);
      ylo -= pad;
      yhi += pad;
    }
  }
  if (p.logx) {
    xlo /= 1.3;
    xhi *= 1.3;
  } else if (!p.series.empty()) {
    const double pad = 0.03 * (xhi - xlo);
    xlo -= pad;
    xhi += pad;
  }

  auto tx = [&](double v) { return p.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return p.logy ? std::log10(v) : v; };
  const double txlo = tx(xlo), txhi = tx(xhi), tylo = ty(ylo), tyhi = ty(yhi);
  auto mapx = [&](double v) {
    return px0 + (tx(v) - txlo) / (txhi - txlo) * pw;
  };
  auto mapy = [&](double v) {
    return py0 + ph - (ty(v) - tylo) / (tyhi - tylo) * ph;
  };

  svg += "<rect x=\"" + fmt(px0, "%.2f") + "\" y=\"" + fmt(py0, "%.2f") +
         "\" width=\"" + fmt(pw, "%.2f") + "\" height=\"" + fmt(ph, "%.2f") +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";

  const auto xticks = p.logx ? log_ticks(xlo, xhi) : linear_ticks(xlo, xhi);
  const auto yticks = p.logy ? log_ticks(ylo, yhi) : linear_ticks(ylo, yhi);
  for (double v : xticks) {
    const double X = mapx(v);
    svg += "<line x1=\"" + fmt(X, "%.2f") + "\" y1=\"" + fmt(py0, "%.2f") +
           "\" x2=\"" + fmt(X, "%.2f") + "\" y2=\"" + fmt(py0 + ph, "%.2f") +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(X, "%.2f") + "\" y=\"" +
           fmt(py0 + ph + 16.0, "%.2f") +
           "\" font-size=\"11\" text-anchor=\"middle\">" + fmt(v, "%g") +
           "</text>\n";
  }
  for (double v : yticks) {
    const double Y = mapy(v);
    svg += "<line x1=\"" + fmt(px0, "%.2f") + "\" y1=\"" + fmt(Y, "%.2f") +
           "\" x2=\"" + fmt(px0 + pw, "%.2f") + "\" y2=\"" + fmt(Y, "%.2f") +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(px0 - 6.0, "%.2f") + "\" y=\"" +
           fmt(Y + 4.0, "%.2f") +
           "\" font-size=\"11\" text-anchor=\"end\">" + fmt(v, "%g") +
           "</text>\n";
  }

  auto color_of = [&](const std::string& label) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label)
        return kPalette[i % kPaletteSize];
    return kPalette[0];
  };

  for (const auto& s : p.series) {
    const char* color = color_of(s.label);
    std::string points;
    std::size_t n_ok = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!point_ok(p, s.x[i], s.y[i])) continue;
      points += fmt(mapx(s.x[i]), "%.2f") + "," + fmt(mapy(s.y[i]), "%.2f") +
                " ";
      ++n_ok;
    }
    if (n_ok == 0) continue;
    if (!points.empty()) points.pop_back();
    svg += std::string("<polyline fill=\"none\" stroke=\"") + color +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const bool markers = n_ok <= 32;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!point_ok(p, s.x[i], s.y[i])) continue;
      const double X = mapx(s.x[i]), Y = mapy(s.y[i]);
      if (!s.yerr.empty() && s.yerr[i] > 0.0) {
        double lo = s.y[i] - s.yerr[i], hi = s.y[i] + s.yerr[i];
        if (p.logy && !(lo > 0.0)) lo = ylo;
        const double Ylo = mapy(lo), Yhi = mapy(hi);
        svg += std::string("<line x1=\"") + fmt(X, "%.2f") + "\" y1=\"" +
               fmt(Ylo, "%.2f") + "\" x2=\"" + fmt(X, "%.2f") + "\" y2=\"" +
               fmt(Yhi, "%.2f") + "\" stroke=\"" + color + "\"/>\n";
        for (double Yc : {Ylo, Yhi})
          svg += std::string("<line x1=\"") + fmt(X - 3.0, "%.2f") +
                 "\" y1=\"" + fmt(Yc, "%.2f") + "\" x2=\"" +
                 fmt(X + 3.0, "%.2f") + "\" y2=\"" + fmt(Yc, "%.2f") +
                 "\" stroke=\"" + color + "\"/>\n";
      }
      if (markers)
        svg += std::string("<circle cx=\"") + fmt(X, "%.2f") + "\" cy=\"" +
               fmt(Y, "%.2f") + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
  }

  svg += "<text x=\"" + fmt(px0 + pw / 2.0, "%.2f") + "\" y=\"" +
         fmt(py0 - 10.0, "%.2f") +
         "\" font-size=\"13\" text-anchor=\"middle\">" + escape_xml(p.title) +
         "</text>\n";
  svg += "<text x=\"" + fmt(px0 + pw / 2.0, "%.2f") + "\" y=\"" +
         fmt(py0 + ph + 36.0, "%.2f") +
         "\" font-size=\"12\" text-anchor=\"middle\">" + escape_xml(p.xlabel) +
         "</text>\n";
  svg += "<text x=\"" + fmt(ox + 16.0, "%.2f") + "\" y=\"" +
         fmt(py0 + ph / 2.0, "%.2f") +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " +
         fmt(ox + 16.0, "%.2f") + " " + fmt(py0 + ph / 2.0, "%.2f") + ")\">" +
         escape_xml(p.ylabel) + "</text>\n";

  double ly = py0 + 14.0;
  for (std::size_t i = 0; i < labels.size() && i < 8; ++i) {
    const double lx = px0 + pw - 110.0;
    svg += std::string("<line x1=\"") + fmt(lx, "%.2f") + "\" y1=\"" +
           fmt(ly - 4.0, "%.2f") + "\" x2=\"" + fmt(lx + 22.0, "%.2f") +
           "\" y2=\"" + fmt(ly - 4.0, "%.2f") + "\" stroke=\"" +
           kPalette[i % kPaletteSize] + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(lx + 27.0, "%.2f") + "\" y=\"" +
           fmt(ly, "%.2f") + "\" font-size=\"11\">" + escape_xml(labels[i]) +
           "</text>\n";
    ly += 15.0;
  }
}

std::string render_svg(const std::vector<Panel>& panels) {
  std::vector<std::string> labels;
  for (const auto& p : panels)
    for (const auto& s : p.series)
      if (std::find(labels.begin(), labels.end(), s.label) == labels.end())
        labels.push_back(s.label);

  const double W = kPanelW * panels.size(), H = kPanelH;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      fmt(W, "%.0f") + "\" height=\"" + fmt(H, "%.0f") +
      "\" font-family=\"DejaVu Sans, sans-serif\">\n<rect width=\"" +
      fmt(W, "%.0f") + "\" height=\"" + fmt(H, "%.0f") +
      "\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_panel(svg, panels[i], kPanelW * i, labels);
  svg += "</svg>\n";
  return svg;
}

std::string fical(double v) { return fmt(v, "%.17g"); }

metrics::IterationTrace load_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot open " + path);
  auto trace = metrics::read_csv(f, path);
  if (trace.rows.empty()) throw ParseError(path + ": empty trace");
  return trace;
}

std::string trace_label(const metrics::IterationTrace& trace,
                        const std::string& path) {
  for (const auto& [k, v] : trace.header)
    if (k == "algorithm") return v;
  return fs::path(path).stem().string();
}

SweepTable load_sweep(const std::vector<std::string>& inputs,
                      const char* kind, const char* axis) {
  if (inputs.size() != 1)
    throw ArgumentError(std::string(kind) +
                        " plots read exactly one sweep CSV");
  std::ifstream f(inputs[0], std::ios::binary);
  if (!f) throw ArgumentError("cannot open " + inputs[0]);
  auto table = sweep_from_csv(f, inputs[0]);
  if (table.axis != axis)
    throw ArgumentError(std::string(kind) + " plots need a sweep over " +
                        axis + ", got axis '" + table.axis + "'");
  return table;
}

// One series per algorithm over the axis values, errored cells skipped,
// points sorted by axis value.
std::vector<Series> sweep_series(const SweepTable& table,
                                 const Aggregate AlgoSummary::*metric) {
  std::vector<Series> out;
  for (const auto& algo : table.algorithms) {
    Series s;
    s.label = algo;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < table.cells.size(); ++i)
      if (table.cells[i].algorithm == algo && table.cells[i].error.empty())
        order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                     std::size_t b) {
      return table.cells[a].value < table.cells[b].value;
    });
    for (std::size_t i : order) {
      const auto& agg = table.cells[i].summary.*metric;
      s.x.push_back(table.cells[i].value);
      s.y.push_back(agg.mean);
      s.yerr.push_back(agg.ci95);
    }
    if (!s.x.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

PlotKind plot_kind_from_key(const std::string& key) {
  if (key == "convergence") return PlotKind::convergence;
  if (key == "iou") return PlotKind::iou;
  if (key == "iou_vs_gap") return PlotKind::iou_vs_gap;
  if (key == "noise") return PlotKind::noise;
  if (key == "conditioning") return PlotKind::conditioning;
  if (key == "q_sensitivity") return PlotKind::q_sensitivity;
  throw ArgumentError(
      "unknown plot kind '" + key +
      "' (expected convergence, iou, iou_vs_gap, noise, conditioning, or "
      "q_sensitivity)");
}

std::string plot_kind_key(PlotKind kind) {
  switch (kind) {
    case PlotKind::convergence: return "convergence";
    case PlotKind::iou: return "iou";
    case PlotKind::iou_vs_gap: return "iou_vs_gap";
    case PlotKind::noise: return "noise";
    case PlotKind::conditioning: return "conditioning";
    case PlotKind::q_sensitivity: return "q_sensitivity";
  }
  throw ArgumentError("unknown plot kind");
}

void render_plot(PlotKind kind, const std::vector<std::string>& inputs,
                 const std::string& out_base) {
  if (inputs.empty()) throw ArgumentError("plot needs at least one input file");

  std::vector<Panel> panels;
  std::string sidecar;

  switch (kind) {
    case PlotKind::convergence:
    case PlotKind::iou:
    case PlotKind::iou_vs_gap: {
      std::vector<metrics::IterationTrace> traces;
      std::vector<std::string> names;
      for (const auto& path : inputs) {
        traces.push_back(load_trace(path));
        names.push_back(trace_label(traces.back(), path));
      }
      if (kind == PlotKind::convergence) {
        Panel left, right;
        left.title = "relative primal gap";
        right.title = "relative FW gap";
        left.xlabel = right.xlabel = "iteration";
        left.ylabel = "(L - L*) / max(1, |L*|)";
        right.ylabel = "FW gap / max(1, |L|)";
        left.logy = right.logy = true;
        sidecar = "series,t,rel_primal,rel_fw\n";
        for (std::size_t i = 0; i < traces.size(); ++i) {
          Series sl, sr;
          sl.label = sr.label = names[i];
          for (const auto& row : traces[i].rows) {
            sl.x.push_back(row.t);
            sl.y.push_back(row.rel_primal);
            sr.x.push_back(row.t);
            sr.y.push_back(row.rel_fw);
            sidecar += names[i] + "," + std::to_string(row.t) + "," +
                       fical(row.rel_primal) + "," + fical(row.rel_fw) + "\n";
          }
          left.series.push_back(std::move(sl));
          right.series.push_back(std::move(sr));
        }
        panels = {std::move(left), std::move(right)};
      } else if (kind == PlotKind::iou) {
        Panel p;
        p.title = "support recovery";
        p.xlabel = "iteration";
        p.ylabel = "IoU with planted support";
        p.unit_y = true;
        sidecar = "series,t,iou\n";
        for (std::size_t i = 0; i < traces.size(); ++i) {
          Series s;
          s.label = names[i];
          for (const auto& row : traces[i].rows) {
            s.x.push_back(row.t);
            s.y.push_back(row.iou);
            sidecar += names[i] + "," + std::to_string(row.t) + "," +
                       fical(row.iou) + "\n";
          }
          p.series.push_back(std::move(s));
        }
        panels = {std::move(p)};
      } else {
        Panel p;
        p.title = "recovery vs duality gap";
        p.xlabel = "relative FW gap";
        p.ylabel = "IoU with planted support";
        p.logx = true;
        p.unit_y = true;
        sidecar = "series,rel_fw,iou\n";
        for (std::size_t i = 0; i < traces.size(); ++i) {
          Series s;
          s.label = names[i];
          for (const auto& row : traces[i].rows) {
            s.x.push_back(row.rel_fw);
            s.y.push_back(row.iou);
            sidecar += names[i] + "," + fical(row.rel_fw) + "," +
                       fical(row.iou) + "\n";
          }
          p.series.push_back(std::move(s));
        }
        panels = {std::move(p)};
      }
      break;
    }
    case PlotKind::noise: {
      const auto table = load_sweep(inputs, "noise", "snr_db");
      Panel p;
      p.title = "robustness to gradient noise";
      p.xlabel = "SNR (dB)";
      p.ylabel = "final relative FW gap";
      p.logy = true;
      p.series = sweep_series(table, &AlgoSummary::final_rel_fw);
      sidecar = "algorithm,snr_db,final_rel_fw_mean,final_rel_fw_ci95\n";
      for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
          sidecar += s.label + "," + fical(s.x[i]) + "," + fical(s.y[i]) +
                     "," + fical(s.yerr[i]) + "\n";
      panels = {std::move(p)};
      break;
    }
    case PlotKind::conditioning: {
      const auto table = load_sweep(inputs, "conditioning", "kappa");
      Panel p;
      p.title = "sensitivity to conditioning";
      p.xlabel = "condition number kappa";
      p.ylabel = "iterations to threshold";
      p.logx = true;
      p.series = sweep_series(table, &AlgoSummary::iterations);
      sidecar = "algorithm,kappa,iterations_mean,iterations_ci95\n";
      for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
          sidecar += s.label + "," + fical(s.x[i]) + "," + fical(s.y[i]) +
                     "," + fical(s.yerr[i]) + "\n";
      panels = {std::move(p)};
      break;
    }
    case PlotKind::q_sensitivity: {
      const auto table = load_sweep(inputs, "q_sensitivity", "q");
      Panel left, right;
      left.title = "iterations vs q";
      right.title = "budgeted rel-primal gap vs q";
      left.xlabel = right.xlabel = "q";
      left.ylabel = "iterations to threshold";
      right.ylabel = "rel-primal gap at budget";
      right.logy = true;
      left.series = sweep_series(table, &AlgoSummary::iterations);
      right.series = sweep_series(table, &AlgoSummary::final_rel_primal);
      sidecar =
          "algorithm,q,iterations_mean,iterations_ci95,"
          "final_rel_primal_mean,final_rel_primal_ci95\n";
      for (std::size_t si = 0; si < left.series.size(); ++si) {
        const auto& sl = left.series[si];
        const auto& sr = right.series[si];
        for (std::size_t i = 0; i < sl.x.size(); ++i)
          sidecar += sl.label + "," + fical(sl.x[i]) + "," + fical(sl.y[i]) +
                     "," + fical(sl.yerr[i]) + "," + fical(sr.y[i]) + "," +
                     fical(sr.yerr[i]) + "\n";
      }
      panels = {std::move(left), std::move(right)};
      break;
    }
  }

  const std::string svg = render_svg(panels);
  const fs::path base(out_base);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  {
    std::ofstream f(base.string() + ".svg", std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + base.string() + ".svg");
    f << svg;
  }
  {
    std::ofstream f(base.string() + ".csv", std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + base.string() + ".csv");
    f << sidecar;
  }
}

}  // namespace gemd::cli
