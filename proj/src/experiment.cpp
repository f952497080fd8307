#include "gemd/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gemd/analysis.hpp"
#include "gemd/links.hpp"
#include "gemd/rng.hpp"
#include "gemd/updates.hpp"

namespace gemd::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

// Online mean/variance; numerically stable for long runs.
class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / n_;
    m2_ += d * (x - mean_);
  }
  Aggregate result() const {
    Aggregate a;
    a.n = n_;
    a.mean = n_ > 0 ? mean_ : 0.0;
    a.std = n_ > 1 ? std::sqrt(m2_ / (n_ - 1)) : 0.0;
    a.ci95 = n_ > 0 ? 1.96 * a.std / std::sqrt(static_cast<double>(n_)) : 0.0;
    return a;
  }

 private:
  int n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

bool trace_converged(const metrics::IterationTrace& trace, double threshold) {
  const auto& rows = trace.rows;
  if (rows.empty()) return false;
  // A one-row trace means the start was already optimal (zero FW gap).
  if (rows.size() == 1) return rows.front().fw_gap <= 0.0;
  return rows.back().delta_t <= threshold;
}

double header_value(const metrics::IterationTrace& trace,
                    const std::string& key) {
  for (const auto& [k, v] : trace.header)
    if (k == key) return std::strtod(v.c_str(), nullptr);
  return std::numeric_limits<double>::quiet_NaN();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot write " + path.string());
  f << content;
}

ojson agg_json(const Aggregate& a) {
  ojson j;
  j["n"] = a.n;
  j["mean"] = a.mean;
  j["std"] = a.std;
  j["ci95"] = a.ci95;
  char buf[96];
  // Two conventions, labeled: spread of runs vs. uncertainty of the mean.
  std::snprintf(buf, sizeof buf, "%.6g ± %.6g", a.mean, a.std);
  j["mean_pm_std"] = buf;
  std::snprintf(buf, sizeof buf, "%.6g ± %.6g", a.mean, a.ci95);
  j["mean_pm_ci95"] = buf;
  return j;
}

ojson summary_json(const AlgoSummary& s) {
  ojson j;
  j["algorithm"] = s.algorithm;
  j["n_runs"] = s.n_runs;
  j["n_converged"] = s.n_converged;
  j["n_censored"] = s.n_censored;
  j["n_degenerate"] = s.n_degenerate;
  ojson m;
  m["iterations"] = agg_json(s.iterations);
  m["final_loss"] = agg_json(s.final_loss);
  m["final_rel_primal"] = agg_json(s.final_rel_primal);
  m["final_rel_fw"] = agg_json(s.final_rel_fw);
  m["final_iou"] = agg_json(s.final_iou);
  m["first_iou09"] = agg_json(s.first_iou09);
  m["recovery_delay"] = agg_json(s.recovery_delay);
  j["metrics"] = std::move(m);
  j["fw_certificate"]["max_margin"] = s.fw_margin;
  j["fw_certificate"]["ok"] = s.fw_certificate_ok;
  return j;
}

void append_csv_agg(std::string& out, const Aggregate& a) {
  out += ',' + fmt_g(a.mean) + ',' + fmt_g(a.std) + ',' + fmt_g(a.ci95);
}

constexpr const char* kSweepColumns =
    "axis,value,algorithm,n_runs,n_converged,n_censored,n_degenerate,error,"
    "iterations_mean,iterations_std,iterations_ci95,"
    "final_loss_mean,final_loss_std,final_loss_ci95,"
    "final_rel_primal_mean,final_rel_primal_std,final_rel_primal_ci95,"
    "final_rel_fw_mean,final_rel_fw_std,final_rel_fw_ci95,"
    "final_iou_mean,final_iou_std,final_iou_ci95,"
    "first_iou09_mean,first_iou09_std,first_iou09_ci95,"
    "recovery_delay_mean,recovery_delay_std,recovery_delay_ci95";

std::string sanitize_csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<links::LinkFunction> verify_links() {
  using links::LinkFunction;
  using links::Role;
  const auto ts05 = LinkFunction::tsallis(0.5);
  const auto ts07 = LinkFunction::tsallis(0.7);
  const auto k04 = LinkFunction::kaniadakis(0.4);
  const auto k05 = LinkFunction::kaniadakis(0.5);
  const auto km04 = LinkFunction::kaniadakis(-0.4);
  const auto km06 = LinkFunction::kaniadakis(-0.6);
  return {
      LinkFunction::natural(),
      LinkFunction::tsallis(0.25),
      ts07,
      LinkFunction::tsallis(1.3),
      k04,
      km06,
      LinkFunction::kaniadakis(0.9),
      LinkFunction::kaniadakis3(0.6, 0.2, 1.5),
      LinkFunction::kaniadakis3(0.5, -0.1, 0.8),
      LinkFunction::kaniadakis3(0.9, 0.5, 2.0),
      LinkFunction::euler(0.5, -0.5),
      LinkFunction::euler(0.7, -0.2),
      LinkFunction::euler(1.2, -0.4),
      LinkFunction::stretched_exp(0.5, 2.0),
      LinkFunction::stretched_exp(0.5, 0.75),
      LinkFunction::stretched_exp(0.25, 1.5),
      LinkFunction::super_exp(0.5, 1.5),
      LinkFunction::super_exp(2.0, 1.0),
      LinkFunction::super_exp(3.0, 2.0),
      LinkFunction::chain({{ts05, Role::log}, {k05, Role::exp}}),
      LinkFunction::chain({{k04, Role::log}, {km06, Role::exp}}),
      // Kaniadakis exp constituents never clip, so this composes cleanly
      // down to the grid floor.
      LinkFunction::chain({{ts05, Role::log},
                           {k05, Role::exp},
                           {ts07, Role::log},
                           {km04, Role::exp}}),
  };
}

}  // namespace

Aggregate aggregate(const std::vector<double>& xs) {
  Welford w;
  for (double x : xs) w.add(x);
  return w.result();
}

RunRecord run_single(const RunConfig& cfg, const std::string& algorithm,
                     int run_index) {
  const auto r = static_cast<std::uint64_t>(run_index);
  const std::uint64_t inst_seed = derive_seed(cfg.seeds.instance_seed, r);
  const std::uint64_t op_seed = derive_seed(inst_seed, 0);
  const std::uint64_t plant_seed = derive_seed(inst_seed, 1);
  const std::uint64_t noise_seed = derive_seed(cfg.seeds.noise_seed, r);

  const auto op = scqp::SpectralOperator::make(cfg.instance.n,
                                              cfg.instance.kappa, op_seed);
  const auto inst =
      scqp::plant_instance(op, cfg.instance.K, cfg.instance.delta, plant_seed);
  scqp::ScqpObjective objective(inst, {cfg.instance.snr_db}, noise_seed);

  updates::UpdateConfig ucfg;
  ucfg.algorithm = updates::algorithm_from_key(algorithm);
  ucfg.link = links::LinkFunction::parse(cfg.update.link);
  ucfg.eta = cfg.update.eta;
  ucfg.centred = cfg.update.centred;

  RunRecord rec;
  rec.algorithm = algorithm;
  rec.run_index = run_index;
  rec.trace = updates::run(objective, SimplexVector::uniform(cfg.instance.n),
                           ucfg, cfg.budget.t_max, {cfg.budget.stop_threshold},
                           cfg.budget.metrics_stride);
  rec.status = trace_converged(rec.trace, cfg.budget.stop_threshold)
                   ? RunStatus::converged
                   : RunStatus::censored;

  auto& h = rec.trace.header;
  h.emplace_back("algorithm", algorithm);
  h.emplace_back("run_index", std::to_string(run_index));
  h.emplace_back("instance_seed", std::to_string(inst_seed));
  h.emplace_back("noise_seed", std::to_string(noise_seed));
  h.emplace_back("loss_star", fmt_g(inst.loss_star));
  h.emplace_back(
      "config", nlohmann::json::parse(config_to_json_text(cfg)).dump());
  return rec;
}

AlgoSummary summarize(const std::string& algorithm,
                      const std::vector<RunRecord>& records,
                      const RunConfig& cfg) {
  AlgoSummary s;
  s.algorithm = algorithm;
  Welford iters, floss, frelp, frelfw, fiou, first09, recov;
  for (const auto& rec : records) {
    if (rec.algorithm != algorithm) continue;
    ++s.n_runs;
    if (rec.status == RunStatus::degenerate) {
      ++s.n_degenerate;
      continue;
    }
    const auto& rows = rec.trace.rows;
    const bool conv = rec.status == RunStatus::converged;
    if (conv)
      ++s.n_converged;
    else
      ++s.n_censored;
    iters.add(conv ? rows.back().t : cfg.budget.t_max);
    floss.add(rows.back().loss);
    frelp.add(rows.back().rel_primal);
    frelfw.add(rows.back().rel_fw);
    fiou.add(rows.back().iou);
    first09.add(
        metrics::first_iter_at_iou_censored(rec.trace, 0.9, cfg.budget.t_max));
    recov.add(metrics::recovery_delay_censored(rec.trace, cfg.budget.t_max));
    const double loss_star = header_value(rec.trace, "loss_star");
    if (!std::isnan(loss_star))
      for (const auto& row : rows)
        s.fw_margin =
            std::max(s.fw_margin, row.loss - row.fw_gap - loss_star);
  }
  s.iterations = iters.result();
  s.final_loss = floss.result();
  s.final_rel_primal = frelp.result();
  s.final_rel_fw = frelfw.result();
  s.final_iou = fiou.result();
  s.first_iou09 = first09.result();
  s.recovery_delay = recov.result();
  s.fw_certificate_ok = !(s.fw_margin > 1e-9);
  return s;
}

RunOutput execute_run(const RunConfig& cfg,
                      const std::vector<std::string>& algorithms,
                      const std::string& out_dir) {
  validate_config(cfg);
  if (algorithms.empty())
    throw ArgumentError("run: needs at least one algorithm");
  const bool writing = !out_dir.empty();
  if (writing) fs::create_directories(fs::path(out_dir) / "traces");

  RunOutput out;
  for (const auto& algo : algorithms) {
    std::vector<RunRecord> records;
    for (int r = 0; r < cfg.seeds.n_runs; ++r) {
      RunRecord rec;
      try {
        rec = run_single(cfg, algo, r);
      } catch (const DegenerateState& e) {
        rec.algorithm = algo;
        rec.run_index = r;
        rec.status = RunStatus::degenerate;
        rec.error = e.what();
        out.any_degenerate = true;
      }
      if (writing && rec.status != RunStatus::degenerate) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_run%03d.csv", algo.c_str(), r);
        write_file(fs::path(out_dir) / "traces" / name,
                   metrics::to_csv(rec.trace));
      }
      records.push_back(std::move(rec));
    }
    out.summaries.push_back(summarize(algo, records, cfg));
  }
  if (writing)
    write_file(fs::path(out_dir) / "summary.json", summary_to_json(cfg, out));
  return out;
}

std::string summary_to_json(const RunConfig& cfg, const RunOutput& out) {
  ojson j;
  j["config"] = ojson::parse(config_to_json_text(cfg));
  j["any_degenerate"] = out.any_degenerate;
  j["algorithms"] = ojson::array();
  for (const auto& s : out.summaries) j["algorithms"].push_back(summary_json(s));
  return j.dump(2) + "\n";
}

RunConfig config_for_axis(const RunConfig& base, const std::string& axis,
                          double value) {
  RunConfig cfg = base;
  auto as_index = [&](const char* name) -> std::size_t {
    if (!(value >= 0.0) || value != std::floor(value) || value > 1e15)
      throw ArgumentError(std::string("axis ") + name +
                          ": values must be nonnegative integers");
    return static_cast<std::size_t>(value);
  };
  if (axis == "n")
    cfg.instance.n = as_index("n");
  else if (axis == "kappa")
    cfg.instance.kappa = value;
  else if (axis == "K")
    cfg.instance.K = as_index("K");
  else if (axis == "snr_db")
    cfg.instance.snr_db = value;
  else if (axis == "q")
    cfg.update.link = links::LinkFunction::tsallis(value).descriptor();
  else
    throw ArgumentError("axis must be one of n, kappa, K, snr_db, q");
  return cfg;
}

SweepTable execute_sweep(const RunConfig& base, const std::string& axis,
                         const std::vector<double>& values,
                         const std::vector<std::string>& algorithms,
                         const std::string& out_dir, int parallel) {
  if (axis != "n" && axis != "kappa" && axis != "K" && axis != "snr_db" &&
      axis != "q")
    throw ArgumentError("axis must be one of n, kappa, K, snr_db, q");
  if (values.empty()) throw ArgumentError("sweep: needs at least one value");
  if (algorithms.empty())
    throw ArgumentError("sweep: needs at least one algorithm");

  SweepTable table;
  table.axis = axis;
  table.values = values;
  table.algorithms = algorithms;
  table.cells.resize(values.size() * algorithms.size());

  // Each cell fills its own preallocated slot, so the fold over cells is
  // identical whether the loop below runs serially or on a pool.
  auto run_cell = [&](std::size_t idx) {
    SweepCell cell;
    cell.value = values[idx / algorithms.size()];
    cell.algorithm = algorithms[idx % algorithms.size()];
    try {
      const RunConfig cfg = config_for_axis(base, axis, cell.value);
      validate_config(cfg);
      std::vector<RunRecord> records;
      for (int r = 0; r < cfg.seeds.n_runs; ++r) {
        try {
          records.push_back(run_single(cfg, cell.algorithm, r));
        } catch (const DegenerateState& e) {
          RunRecord rec;
          rec.algorithm = cell.algorithm;
          rec.run_index = r;
          rec.status = RunStatus::degenerate;
          rec.error = e.what();
          records.push_back(std::move(rec));
        }
      }
      cell.summary = summarize(cell.algorithm, records, cfg);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    table.cells[idx] = std::move(cell);
  };

  const std::size_t n_cells = table.cells.size();
  if (parallel <= 1) {
    for (std::size_t i = 0; i < n_cells; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_cells) return;
        run_cell(i);
      }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(parallel), n_cells);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "sweep.json", sweep_to_json(base, table));
    write_file(fs::path(out_dir) / "sweep.csv", sweep_to_csv(table));
  }
  return table;
}

std::string sweep_to_json(const RunConfig& base, const SweepTable& table) {
  ojson j;
  j["axis"] = table.axis;
  j["values"] = table.values;
  j["algorithms"] = table.algorithms;
  j["config"] = ojson::parse(config_to_json_text(base));
  j["cells"] = ojson::array();
  for (const auto& cell : table.cells) {
    ojson c;
    c["value"] = cell.value;
    c["algorithm"] = cell.algorithm;
    c["error"] = cell.error;
    if (cell.error.empty()) c["summary"] = summary_json(cell.summary);
    j["cells"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepTable& table) {
  std::string out = kSweepColumns;
  out += '\n';
  for (const auto& cell : table.cells) {
    const AlgoSummary& s = cell.summary;
    out += table.axis;
    out += ',' + fmt_g(cell.value);
    out += ',' + cell.algorithm;
    out += ',' + std::to_string(s.n_runs);
    out += ',' + std::to_string(s.n_converged);
    out += ',' + std::to_string(s.n_censored);
    out += ',' + std::to_string(s.n_degenerate);
    out += ',' + sanitize_csv_field(cell.error);
    append_csv_agg(out, s.iterations);
    append_csv_agg(out, s.final_loss);
    append_csv_agg(out, s.final_rel_primal);
    append_csv_agg(out, s.final_rel_fw);
    append_csv_agg(out, s.final_iou);
    append_csv_agg(out, s.first_iou09);
    append_csv_agg(out, s.recovery_delay);
    out += '\n';
  }
  return out;
}

SweepTable sweep_from_csv(std::istream& is, const std::string& name) {
  auto fail = [&](int line, const std::string& what) -> void {
    throw ParseError(name + ":" + std::to_string(line) + ": " + what);
  };
  std::string line;
  if (!std::getline(is, line)) fail(1, "empty sweep table");
  if (line == std::string(kSweepColumns) + "\r") line.pop_back();
  if (line != kSweepColumns) fail(1, "unexpected column header");

  SweepTable table;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (fields.size() != 29) fail(lineno, "expected 29 fields");
    auto num = [&](std::size_t i) -> double {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0')
        fail(lineno, "bad number '" + fields[i] + "'");
      return v;
    };
    auto count = [&](std::size_t i) -> int {
      return static_cast<int>(num(i));
    };
    SweepCell cell;
    if (table.axis.empty())
      table.axis = fields[0];
    else if (table.axis != fields[0])
      fail(lineno, "mixed axis names in one table");
    cell.value = num(1);
    cell.algorithm = fields[2];
    cell.summary.algorithm = cell.algorithm;
    cell.summary.n_runs = count(3);
    cell.summary.n_converged = count(4);
    cell.summary.n_censored = count(5);
    cell.summary.n_degenerate = count(6);
    cell.error = fields[7];
    const int agg_n = cell.summary.n_runs - cell.summary.n_degenerate;
    Aggregate* aggs[] = {&cell.summary.iterations,
                        &cell.summary.final_loss,
                        &cell.summary.final_rel_primal,
                        &cell.summary.final_rel_fw,
                        &cell.summary.final_iou,
                        &cell.summary.first_iou09,
                        &cell.summary.recovery_delay};
    for (std::size_t a = 0; a < 7; ++a) {
      aggs[a]->n = agg_n;
      aggs[a]->mean = num(8 + 3 * a);
      aggs[a]->std = num(9 + 3 * a);
      aggs[a]->ci95 = num(10 + 3 * a);
    }
    if (std::find(table.values.begin(), table.values.end(), cell.value) ==
        table.values.end())
      table.values.push_back(cell.value);
    if (std::find(table.algorithms.begin(), table.algorithms.end(),
                  cell.algorithm) == table.algorithms.end())
      table.algorithms.push_back(cell.algorithm);
    table.cells.push_back(std::move(cell));
  }
  if (table.cells.empty()) fail(lineno, "sweep table has no rows");
  return table;
}

double power_iteration_norm(const scqp::SpectralOperator& op, int iters,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(op.dim());
  for (auto& x : v) x = rng.normal();
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  for (auto& x : v) x /= nv;
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    const auto w = op.apply(v);
    est = 0.0;
    double nw = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      est += v[i] * w[i];  // Rayleigh quotient; ||v|| = 1
      nw += w[i] * w[i];
    }
    nw = std::sqrt(nw);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
  }
  return est;
}

std::vector<VerifyCheck> verify_checks(const SpectralEstimator& spectral) {
  std::vector<VerifyCheck> checks;

  {
    VerifyCheck c;
    c.name = "link_round_trip";
    c.bound = 1e-9;
    double worst = 0.0;
    std::string worst_desc;
    for (const auto& link : verify_links()) {
      const auto rep = link.validate(64);
      double err = rep.max_roundtrip;
      if (!rep.monotone) err = std::numeric_limits<double>::infinity();
      if (err >= worst) {
        worst = err;
        worst_desc = link.descriptor();
      }
    }
    c.observed = worst;
    c.pass = worst <= c.bound;
    c.detail = "worst link: " + worst_desc;
    checks.push_back(std::move(c));
  }

  {
    VerifyCheck c;
    c.name = "group_laws";
    c.bound = 1e-10;
    Rng rng(20240817);
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 20; ++i)
      pairs.emplace_back(1e-3 + rng.uniform01() * 3.0,
                         1e-3 + rng.uniform01() * 3.0);
    double worst = 0.0;
    for (const auto& link :
         {links::LinkFunction::natural(), links::LinkFunction::tsallis(0.25),
          links::LinkFunction::tsallis(1.5),
          links::LinkFunction::kaniadakis(0.5),
          links::LinkFunction::kaniadakis(-0.3)})
      worst = std::max(worst, analysis::group_law_check(link, pairs));
    c.observed = worst;
    c.pass = worst <= c.bound;
    checks.push_back(std::move(c));
  }

  {
    VerifyCheck c;
    c.name = "dmd_condition_bound";
    c.bound = 2.71828182845904523536;
    double worst = 0.0;
    for (int i = 1; i <= 99; ++i)
      worst = std::max(worst, analysis::dmd_condition_bound(i / 100.0));
    c.observed = worst;
    c.pass = worst <= c.bound;
    c.detail = "max over the 99-point q grid";
    checks.push_back(std::move(c));
  }

  {
    VerifyCheck c;
    c.name = "curvature_extrema";
    c.bound = 1e-9;
    const auto link = links::LinkFunction::tsallis(0.25);
    const auto dmd = analysis::curvature_profile(
        link, analysis::CurvatureKind::dmd, linspace(0.0, 1.0, 101));
    double err = std::abs(dmd.mu_F - 1.0);
    err = std::max(err,
                   std::abs(dmd.L_F - analysis::dmd_condition_bound(0.25)));
    const double delta = 0.01;
    const auto geg = analysis::curvature_profile(
        link, analysis::CurvatureKind::geg, linspace(delta, 1.0, 100));
    err = std::max(err, std::abs(geg.mu_F - 1.0));
    err = std::max(
        err,
        std::abs(geg.L_F - analysis::geg_truncated_condition(0.25, delta)));
    c.observed = err;
    c.pass = err <= c.bound;
    checks.push_back(std::move(c));
  }

  {
    VerifyCheck c;
    c.name = "kkt_planting";
    c.bound = 1e-10;
    double worst = 0.0;
    auto probe = [&](std::size_t n, double kappa, std::size_t K,
                     std::uint64_t seed) {
      const auto op =
          scqp::SpectralOperator::make(n, kappa, derive_seed(seed, 0));
      const auto inst =
          scqp::plant_instance(op, K, 1e-3, derive_seed(seed, 1));
      const auto g = scqp::gradient(inst, inst.w_star.values());
      std::vector<char> on(n, 0);
      for (std::size_t i : inst.support) on[i] = 1;
      for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(g[i] - (on[i] ? 0.0 : inst.delta)));
      worst = std::max(worst, metrics::fw_gap(inst.w_star.values(), g));
    };
    for (std::uint64_t s = 1; s <= 5; ++s) probe(64, 100.0, 6, 400 + s);
    probe(200, 1000.0, 20, 410);
    c.observed = worst;
    c.pass = worst <= c.bound;
    checks.push_back(std::move(c));
  }

  {
    VerifyCheck c;
    c.name = "operator_fidelity";
    c.bound = 1e-12;
    const std::size_t n = 16;
    const auto op = scqp::SpectralOperator::make(n, 30.0, 77);
    std::vector<std::vector<double>> M(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      M[j] = op.apply(e);  // column j
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(M[j][i] - M[i][j]));
    Rng rng(78);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> w(n);
      for (auto& x : w) x = rng.normal();
      const auto fast = op.apply(w);
      for (std::size_t i = 0; i < n; ++i) {
        double dense = 0.0;
        for (std::size_t j = 0; j < n; ++j) dense += M[j][i] * w[j];
        worst = std::max(worst, std::abs(fast[i] - dense));
      }
    }
    c.observed = worst;
    c.pass = worst <= c.bound;
    c.detail = "dense agreement and symmetry at n = 16";
    checks.push_back(std::move(c));
  }

  {
    VerifyCheck c;
    c.name = "spectral_norm";
    c.bound = 1e-3;
    const auto op = scqp::SpectralOperator::make(256, 100.0, 99);
    const double est =
        spectral ? spectral(op) : power_iteration_norm(op, 500, 1234);
    c.observed = std::abs(est - 1.0);
    c.pass = c.observed <= c.bound;
    c.detail = "power-iteration estimate " + fmt_g(est);
    checks.push_back(std::move(c));
  }

  return checks;
}

bool verify_all_pass(const std::vector<VerifyCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string verify_to_json(const std::vector<VerifyCheck>& checks) {
  ojson j;
  j["all_pass"] = verify_all_pass(checks);
  j["checks"] = ojson::array();
  for (const auto& c : checks) {
    ojson jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["observed"] = c.observed;
    jc["bound"] = c.bound;
    jc["detail"] = c.detail;
    j["checks"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

}  // namespace gemd::cli
