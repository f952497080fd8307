#ifndef GEMD_EXPERIMENT_HPP
#define GEMD_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gemd/config.hpp"
#include "gemd/metrics.hpp"
#include "gemd/scqp.hpp"

namespace gemd::cli {

// Mean / sample standard deviation / 95% confidence half-width over runs.
// Computed online (Welford); std is 0 when fewer than two samples.
struct Aggregate {
  int n = 0;
  double mean = 0.0;
  double std = 0.0;   // sample standard deviation
  double ci95 = 0.0;  // 1.96 * std / sqrt(n), half-width of the 95% CI
};

Aggregate aggregate(const std::vector<double>& xs);

enum class RunStatus {
  converged,   // stopping rule fired within the budget
  censored,    // budget exhausted above the threshold
  degenerate,  // stepper collapsed to the zero vector
};

struct RunRecord {
  std::string algorithm;
  int run_index = 0;
  RunStatus status = RunStatus::censored;
  std::string error;  // message for degenerate runs
  metrics::IterationTrace trace;  // empty for degenerate runs
};

// Executes one seeded run of one algorithm on a freshly planted instance.
// Per-run seeds derive from the config seeds and the run index, so runs are
// independent and reproducible individually. Throws on stepper failure.
RunRecord run_single(const RunConfig& cfg, const std::string& algorithm,
                     int run_index);

// Per-algorithm statistics over the non-degenerate runs. Iteration counts,
// first-iteration-to-IoU>=0.9, and recovery delay are censored at t_max.
// fw_margin tracks max over all logged rows of L(w_t) - fw(w_t) - L*, which
// must stay <= 1e-9 for the FW lower-bound certificate to be sound.
struct AlgoSummary {
  std::string algorithm;
  int n_runs = 0;
  int n_converged = 0;
  int n_censored = 0;
  int n_degenerate = 0;
  Aggregate iterations;
  Aggregate final_loss;
  Aggregate final_rel_primal;
  Aggregate final_rel_fw;
  Aggregate final_iou;
  Aggregate first_iou09;
  Aggregate recovery_delay;
  double fw_margin = -std::numeric_limits<double>::infinity();
  bool fw_certificate_ok = true;
};

AlgoSummary summarize(const std::string& algorithm,
                      const std::vector<RunRecord>& records,
                      const RunConfig& cfg);

struct RunOutput {
  std::vector<AlgoSummary> summaries;
  bool any_degenerate = false;
};

// The run command: n_runs seeded runs per algorithm. Writes one CSV trace
// per (algorithm, run) under <out_dir>/traces/ plus <out_dir>/summary.json.
// DegenerateState is caught per run and counted; other errors propagate.
// Pass an empty out_dir to skip file output.
RunOutput execute_run(const RunConfig& cfg,
                      const std::vector<std::string>& algorithms,
                      const std::string& out_dir);

std::string summary_to_json(const RunConfig& cfg, const RunOutput& out);

// One (axis value, algorithm) cell of a sweep. error is set and the summary
// left empty when the cell's config fails validation or a run throws.
struct SweepCell {
  double value = 0.0;
  std::string algorithm;
  AlgoSummary summary;
  std::string error;
};

struct SweepTable {
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> algorithms;
  std::vector<SweepCell> cells;  // value-major order, algorithms inner
};

// Applies one axis value to a copy of the base config. Axis is one of
// n, kappa, K, snr_db, q; the q axis rewrites the link descriptor.
RunConfig config_for_axis(const RunConfig& base, const std::string& axis,
                          double value);

// The sweep command: the cross product of axis values and algorithms, each
// cell run with the same derived seeds as execute_run. Cells are independent
// and may execute on up to `parallel` threads; results are folded in cell
// order, so serial and parallel execution produce identical tables. Writes
// <out_dir>/sweep.json and <out_dir>/sweep.csv unless out_dir is empty.
SweepTable execute_sweep(const RunConfig& base, const std::string& axis,
                         const std::vector<double>& values,
                         const std::vector<std::string>& algorithms,
                         const std::string& out_dir, int parallel);

std::string sweep_to_json(const RunConfig& base, const SweepTable& table);
std::string sweep_to_csv(const SweepTable& table);
SweepTable sweep_from_csv(std::istream& is, const std::string& name);

// One verification check: pass iff observed <= bound.
struct VerifyCheck {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

// Spectral-norm estimate of Q by power iteration; the operator is built so
// this is 1 up to eigenvector truncation error.
double power_iteration_norm(const scqp::SpectralOperator& op, int iters,
                            std::uint64_t seed);

using SpectralEstimator = std::function<double(const scqp::SpectralOperator&)>;

// The verify command: link round trips, group laws, curvature bounds and
// extrema, KKT planting, operator fidelity, and the spectral normalization.
// The spectral estimator is injectable so a perturbed estimate can be shown
// to fail the check; the default is power_iteration_norm.
std::vector<VerifyCheck> verify_checks(const SpectralEstimator& spectral = {});

bool verify_all_pass(const std::vector<VerifyCheck>& checks);
std::string verify_to_json(const std::vector<VerifyCheck>& checks);

}  // namespace gemd::cli

#endif  // GEMD_EXPERIMENT_HPP
