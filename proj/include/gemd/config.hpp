#ifndef GEMD_CONFIG_HPP
#define GEMD_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "gemd/errors.hpp"

namespace gemd::cli {

// Benchmark instance parameters.
struct InstanceSpec {
  std::size_t n = 1000;
  double kappa = 1000.0;
  std::size_t K = 100;
  double delta = 5e-4;
  double snr_db = std::numeric_limits<double>::infinity();  // inf = clean
};

// Stepper parameters; algorithm and link are string keys so configs stay
// plain text.
struct UpdateSpec {
  std::string algorithm = "dmd";
  std::string link = "tsallis:q=0.25";
  double eta = 1.0;
  bool centred = true;
};

struct BudgetSpec {
  int t_max = 200;
  double stop_threshold = 1e-4;
  int metrics_stride = 1;
};

struct SeedSpec {
  std::uint64_t instance_seed = 20240501;
  std::uint64_t noise_seed = 912;
  int n_runs = 20;
};

struct RunConfig {
  InstanceSpec instance;
  UpdateSpec update;
  BudgetSpec budget;
  SeedSpec seeds;
};

// JSON round trip. snr_db serializes as the string "inf" when infinite and
// accepts either a number or "inf". Unknown keys are rejected with the field
// path in the message.
RunConfig config_from_json_text(const std::string& text,
                                const std::string& name = "<config>");
std::string config_to_json_text(const RunConfig& cfg);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

// Field-level validation: every module precondition is checked (including
// parsing the link descriptor and the algorithm key) before any run starts.
// Throws ArgumentError with the offending field path.
void validate_config(const RunConfig& cfg);

}  // namespace gemd::cli

#endif  // GEMD_CONFIG_HPP
