#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gemd/config.hpp"
#include "gemd/experiment.hpp"
#include "gemd/plot.hpp"

namespace {

gemd::cli::RunConfig make_config(const std::string& config_path,
                                 std::int64_t seed, int runs) {
  gemd::cli::RunConfig cfg;
  if (!config_path.empty()) cfg = gemd::cli::load_config(config_path);
  if (seed >= 0) cfg.seeds.instance_seed = static_cast<std::uint64_t>(seed);
  if (runs > 0) cfg.seeds.n_runs = runs;
  return cfg;
}

void print_summary(const gemd::cli::AlgoSummary& s) {
  std::printf("  %-8s converged %d/%d", s.algorithm.c_str(), s.n_converged,
              s.n_runs);
  if (s.n_degenerate > 0) std::printf(" (%d degenerate)", s.n_degenerate);
  std::printf("  iterations %.6g ± %.6g  final IoU %.3f\n", s.iterations.mean,
              s.iterations.std, s.final_iou.mean);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-entropy mirror-descent benchmark"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::int64_t seed = -1;
  int runs = 0;
  std::vector<std::string> algos = {"eg", "geg", "dmd"};
  std::string axis;
  std::vector<double> values;
  int parallel = 1;
  std::string kind;
  std::vector<std::string> inputs;

  auto* run = app.add_subcommand("run", "execute seeded runs, write traces");
  run->add_option("--config", config_path, "config JSON path");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override instance seed");
  run->add_option("--runs", runs, "override run count");
  run->add_option("--algo", algos, "algorithms to run")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "run one axis across values");
  sweep->add_option("--config", config_path, "config JSON path");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--seed", seed, "override instance seed");
  sweep->add_option("--runs", runs, "override run count");
  sweep->add_option("--algo", algos, "algorithms to run")->delimiter(',');
  sweep->add_option("--axis", axis, "one of n, kappa, K, snr_db, q")
      ->required();
  sweep->add_option("--values", values, "axis values")
      ->delimiter(',')
      ->required();
  sweep->add_option("--parallel", parallel, "worker thread count");

  auto* verify = app.add_subcommand("verify", "run the theorem checks");
  verify->add_option("--out", out_dir, "also write verify.json here");

  auto* plot = app.add_subcommand("plot", "render SVG figures");
  plot->add_option("--kind", kind,
                   "convergence, iou, iou_vs_gap, noise, conditioning, or "
                   "q_sensitivity")
      ->required();
  plot->add_option("--out", out_dir, "output directory");
  plot->add_option("inputs", inputs, "trace or sweep CSV files")->required();

  CLI11_PARSE(app, argc, argv);
  const bool verify_to_file = verify->count("--out") > 0;

  try {
    if (run->parsed()) {
      const auto cfg = make_config(config_path, seed, runs);
      const auto out = gemd::cli::execute_run(cfg, algos, out_dir);
      std::printf("run: %d runs per algorithm -> %s\n", cfg.seeds.n_runs,
                  out_dir.c_str());
      for (const auto& s : out.summaries) print_summary(s);
      return out.any_degenerate ? 2 : 0;
    }
    if (sweep->parsed()) {
      const auto cfg = make_config(config_path, seed, runs);
      const auto table = gemd::cli::execute_sweep(cfg, axis, values, algos,
                                                  out_dir, parallel);
      std::printf("sweep over %s (%zu values x %zu algorithms) -> %s\n",
                  axis.c_str(), table.values.size(), table.algorithms.size(),
                  out_dir.c_str());
      for (const auto& cell : table.cells) {
        if (!cell.error.empty()) {
          std::printf("  %s=%-8g %-8s FAILED: %s\n", axis.c_str(), cell.value,
                      cell.algorithm.c_str(), cell.error.c_str());
          continue;
        }
        std::printf("  %s=%-8g", axis.c_str(), cell.value);
        print_summary(cell.summary);
      }
      return 0;
    }
    if (verify->parsed()) {
      const auto checks = gemd::cli::verify_checks();
      const std::string report = gemd::cli::verify_to_json(checks);
      std::fputs(report.c_str(), stdout);
      if (verify_to_file) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        std::ofstream f(fs::path(out_dir) / "verify.json", std::ios::binary);
        f << report;
      }
      return gemd::cli::verify_all_pass(checks) ? 0 : 1;
    }
    if (plot->parsed()) {
      const auto k = gemd::cli::plot_kind_from_key(kind);
      namespace fs = std::filesystem;
      const std::string base =
          (fs::path(out_dir) / gemd::cli::plot_kind_key(k)).string();
      gemd::cli::render_plot(k, inputs, base);
      std::printf("plot: wrote %s.svg and %s.csv\n", base.c_str(),
                  base.c_str());
      return 0;
    }
  } catch (const gemd::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
