#ifndef GEMD_METRICS_HPP
#define GEMD_METRICS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gemd/errors.hpp"
#include "gemd/links.hpp"
#include "gemd/simplex.hpp"

namespace gemd::metrics {

// One logged iteration. Gap metrics are computed on the clean gradient.
struct TraceRow {
  int t = 0;
  double loss = 0.0;
  double rel_primal = 0.0;
  double fw_gap = 0.0;
  double rel_fw = 0.0;
  double delta_t = 0.0;
  double iou = 0.0;
  int nnz = 0;
  int n_dual = 0;
  int n_fallback = 0;
  int n_clipped = 0;
};

// Per-run record: '#'-prefixed header lines (config, seed, instance spec)
// followed by rows strictly increasing in t, with delta_t = 1 at t = 0.
struct IterationTrace {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TraceRow> rows;
};

// (L_w - L_star) / max(1, |L_star|).
double rel_primal_gap(double L_w, double L_star);

// <w, g> - min_i g_i; nonnegative for any simplex w.
double fw_gap(const std::vector<double>& w, const std::vector<double>& g);

// fw / max(1, |L_w|).
double rel_fw_gap(double fw, double L_w);

// fw_now / fw_init; DegenerateStart when fw_init <= 0.
double stopping_delta(double fw_now, double fw_init);

// Jaccard index between the planted support and the top-K entries of w
// (ties broken by lowest index). K must equal |support| and be <= n.
double iou_topk(const std::vector<double>& w,
                const std::vector<std::size_t>& support, std::size_t K);

// Smallest T with iou(t) = 1 for every t >= T; nullopt if never permanent.
std::optional<int> recovery_delay(const IterationTrace& trace);

// Smallest t with iou(t) >= threshold; nullopt if unattained.
std::optional<int> first_iter_at_iou(const IterationTrace& trace,
                                     double threshold);

// Censored variants used for aggregate statistics: unattained runs report
// the budget value.
int recovery_delay_censored(const IterationTrace& trace, int budget);
int first_iter_at_iou_censored(const IterationTrace& trace, double threshold,
                               int budget);

// D_F(u || w) = F(u) - F(w) - <u - w, f(w)> for the potential F with
// F' = the link's log branch. Closed-form antiderivative for natural and
// tsallis links, 32-node Gauss-Legendre quadrature otherwise.
double bregman_divergence(const links::LinkFunction& link,
                          const SimplexVector& u, const SimplexVector& w);

// CSV persistence. Doubles are written with %.17g so files round-trip
// bit-exactly; header lines are written as "# key: value".
void write_csv(const IterationTrace& trace, std::ostream& os);
std::string to_csv(const IterationTrace& trace);
IterationTrace read_csv(std::istream& is, const std::string& name = "<csv>");

}  // namespace gemd::metrics

#endif  // GEMD_METRICS_HPP
