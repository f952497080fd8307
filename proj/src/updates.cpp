#include "gemd/updates.hpp"

#include <algorithm>
#include <cmath>

namespace gemd::updates {

namespace {

void check_pair(const SimplexVector& w, const std::vector<double>& g,
                const char* what) {
  if (g.size() != w.size())
    throw LengthMismatch(std::string(what) + ": gradient length " +
                         std::to_string(g.size()) +
                         " does not match iterate length " +
                         std::to_string(w.size()));
}

void check_gradient(const std::vector<double>& g, const char* what) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i]))
      throw NonFiniteGradient(std::string(what) +
                              ": non-finite gradient entry at coordinate " +
                              std::to_string(i));
  }
}

void check_eta(double eta, const char* what) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw ArgumentError(std::string(what) + ": eta must be positive");
}

// Normalize the raw post-step weights; an all-zero vector means the step
// destroyed the iterate (eta far beyond the stable range).
SimplexVector finish(std::vector<double>&& v, const char* what) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum > 0.0))
    throw DegenerateState(std::string(what) +
                          ": step produced the all-zero vector; "
                          "eta exceeds the stable range for this link");
  return SimplexVector(std::move(v));
}

}  // namespace

Algorithm algorithm_from_key(const std::string& key) {
  if (key == "eg") return Algorithm::eg;
  if (key == "geg") return Algorithm::geg;
  if (key == "dmd") return Algorithm::dmd;
  if (key == "mmd-geg") return Algorithm::mmd_geg;
  if (key == "mmd-dmd") return Algorithm::mmd_dmd;
  throw ParseError("unknown algorithm key '" + key + "'");
}

std::string algorithm_key(Algorithm a) {
  switch (a) {
    case Algorithm::eg:
      return "eg";
    case Algorithm::geg:
      return "geg";
    case Algorithm::dmd:
      return "dmd";
    case Algorithm::mmd_geg:
      return "mmd-geg";
    case Algorithm::mmd_dmd:
      return "mmd-dmd";
  }
  throw ArgumentError("algorithm_key: invalid enum value");
}

std::vector<double> centred_gradient(const SimplexVector& w,
                                     const std::vector<double>& g) {
  check_pair(w, g, "centred_gradient");
  double dot = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) dot += w[i] * g[i];
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] - dot;
  return out;
}

StepResult step_eg(const SimplexVector& w, const std::vector<double>& g,
                   double eta) {
  check_pair(w, g, "step_eg");
  check_gradient(g, "step_eg");
  check_eta(eta, "step_eg");
  const std::size_t n = w.size();
  // Shift the exponents by their maximum so exp never overflows; the shift
  // cancels in the normalization.
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, -eta * g[i]);
  std::vector<double> v(n);
  StepDiagnostics diag;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = w[i] * std::exp(-eta * g[i] - m);
    if (v[i] == 0.0) ++diag.n_clipped;
  }
  StepResult res{finish(std::move(v), "step_eg"), diag};
  return res;
}

StepResult step_geg(const SimplexVector& w, const std::vector<double>& g,
                    double eta, const links::LinkFunction& link,
                    bool centred) {
  check_pair(w, g, "step_geg");
  check_gradient(g, "step_geg");
  check_eta(eta, "step_geg");
  const std::vector<double> gh =
      centred ? centred_gradient(w, g) : g;
  const std::size_t n = w.size();
  std::vector<double> v(n);
  StepDiagnostics diag;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = link.exp(link.log(w[i]) - eta * gh[i]);
    if (v[i] == 0.0) ++diag.n_clipped;
  }
  StepResult res{finish(std::move(v), "step_geg"), diag};
  return res;
}

StepResult step_dmd(const SimplexVector& w, const std::vector<double>& g,
                    double eta, const links::LinkFunction& link,
                    bool centred) {
  check_pair(w, g, "step_dmd");
  check_gradient(g, "step_dmd");
  check_eta(eta, "step_dmd");
  const std::vector<double> gh =
      centred ? centred_gradient(w, g) : g;
  const std::size_t n = w.size();
  std::vector<double> v(n);
  StepDiagnostics diag;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = link.exp(w[i]) - eta * gh[i];
    double y;
    if (z > 0.0) {
      ++diag.n_dual_branch;
      y = std::max(link.log(z), 0.0);
    } else {
      ++diag.n_fallback;
      y = link.exp(link.log(w[i]) - eta * gh[i]);
    }
    if (y == 0.0) ++diag.n_clipped;
    v[i] = y;
  }
  StepResult res{finish(std::move(v), "step_dmd"), diag};
  return res;
}

StepResult step_mmd(const SimplexVector& w, const std::vector<double>& g,
                    double eta, const links::LinkFunction& link,
                    MmdKind which, bool centred) {
  check_pair(w, g, "step_mmd");
  check_gradient(g, "step_mmd");
  check_eta(eta, "step_mmd");
  const std::vector<double> gh =
      centred ? centred_gradient(w, g) : g;
  const std::size_t n = w.size();
  std::vector<double> v(n);
  StepDiagnostics diag;
  for (std::size_t i = 0; i < n; ++i) {
    double y;
    if (which == MmdKind::geg_link && w[i] == 0.0) {
      // dlog diverges at zero for these links, so the metric freezes the
      // coordinate: zero is absorbing.
      y = 0.0;
    } else {
      const double d =
          which == MmdKind::geg_link ? link.dlog(w[i]) : link.dexp(w[i]);
      if (std::isinf(d)) {
        y = w[i];  // infinite curvature: no movement
      } else if (!(d > 0.0)) {
        throw DomainError("step_mmd: link derivative is not positive at w = " +
                          std::to_string(w[i]));
      } else {
        y = std::max(w[i] - eta * gh[i] / d, 0.0);
      }
    }
    if (y == 0.0) ++diag.n_clipped;
    v[i] = y;
  }
  StepResult res{finish(std::move(v), "step_mmd"), diag};
  return res;
}

StepResult apply_step(const SimplexVector& w, const std::vector<double>& g,
                      const UpdateConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::eg:
      return step_eg(w, g, cfg.eta);
    case Algorithm::geg:
      return step_geg(w, g, cfg.eta, cfg.link, cfg.centred);
    case Algorithm::dmd:
      return step_dmd(w, g, cfg.eta, cfg.link, cfg.centred);
    case Algorithm::mmd_geg:
      return step_mmd(w, g, cfg.eta, cfg.link, MmdKind::geg_link, cfg.centred);
    case Algorithm::mmd_dmd:
      return step_mmd(w, g, cfg.eta, cfg.link, MmdKind::dmd_link, cfg.centred);
  }
  throw ArgumentError("apply_step: invalid algorithm enum value");
}

namespace {

template <class E>
[[noreturn]] void rethrow_at(int t, const E& e) {
  throw E("iteration " + std::to_string(t) + ": " + e.what());
}

}  // namespace

metrics::IterationTrace run(Objective& objective, const SimplexVector& w0,
                            const UpdateConfig& cfg, int t_max,
                            const StoppingRule& stop, int metrics_stride) {
  if (t_max < 1) throw ArgumentError("run: t_max must be >= 1");
  if (metrics_stride < 1)
    throw ArgumentError("run: metrics_stride must be >= 1");
  if (w0.size() != objective.dim())
    throw LengthMismatch("run: w0 length " + std::to_string(w0.size()) +
                         " does not match objective dimension " +
                         std::to_string(objective.dim()));

  metrics::IterationTrace trace;
  SimplexVector w = w0;

  // Metrics row from the clean gradient; returns the raw FW gap.
  auto log_row = [&](int t, const StepDiagnostics& diag) -> double {
    const std::vector<double>& wv = w.values();
    const std::vector<double> g = objective.gradient(wv);
    const double L = objective.loss(wv);
    const double fw = metrics::fw_gap(wv, g);
    metrics::TraceRow row;
    row.t = t;
    row.loss = L;
    row.rel_primal = metrics::rel_primal_gap(L, objective.optimal_value());
    row.fw_gap = fw;
    row.rel_fw = metrics::rel_fw_gap(fw, L);
    const std::vector<std::size_t>* S = objective.support();
    row.iou = S ? metrics::iou_topk(wv, *S, S->size())
                : std::numeric_limits<double>::quiet_NaN();
    row.nnz = w.nnz();
    row.n_dual = diag.n_dual_branch;
    row.n_fallback = diag.n_fallback;
    row.n_clipped = diag.n_clipped;
    trace.rows.push_back(row);
    return fw;
  };

  const double fw_raw = log_row(0, StepDiagnostics{});
  if (std::isnan(fw_raw) || fw_raw < 0.0)
    throw DegenerateStart("run: initial FW gap is " + std::to_string(fw_raw));
  trace.rows.back().delta_t = 1.0;
  const double fw0 = fw_raw;
  if (fw0 == 0.0) return trace;  // started at a certified optimum

  for (int t = 1; t <= t_max; ++t) {
    const std::vector<double> gs = objective.step_gradient(w.values());
    StepDiagnostics diag;
    try {
      StepResult res = apply_step(w, gs, cfg);
      w = res.w;
      diag = res.diag;
    } catch (const DomainError& e) {
      rethrow_at(t, e);
    } catch (const DegenerateState& e) {
      rethrow_at(t, e);
    } catch (const ConvergenceError& e) {
      rethrow_at(t, e);
    } catch (const NonFiniteGradient& e) {
      rethrow_at(t, e);
    }
    if (t % metrics_stride != 0 && t != t_max) continue;
    log_row(t, diag);
    metrics::TraceRow& row = trace.rows.back();
    row.delta_t = std::max(row.fw_gap, 0.0) / fw0;
    if (row.delta_t <= stop.threshold) break;
  }
  return trace;
}

}  // namespace gemd::updates
