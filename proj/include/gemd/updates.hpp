#ifndef GEMD_UPDATES_HPP
#define GEMD_UPDATES_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gemd/errors.hpp"
#include "gemd/links.hpp"
#include "gemd/metrics.hpp"
#include "gemd/simplex.hpp"

namespace gemd::updates {

enum class Algorithm { eg, geg, dmd, mmd_geg, mmd_dmd };

// String keys used by configs and the command line:
// "eg", "geg", "dmd", "mmd-geg", "mmd-dmd".
Algorithm algorithm_from_key(const std::string& key);
std::string algorithm_key(Algorithm a);

enum class MmdKind { geg_link, dmd_link };

struct UpdateConfig {
  Algorithm algorithm = Algorithm::dmd;
  links::LinkFunction link = links::LinkFunction::tsallis(0.25);  // eg ignores
  double eta = 1.0;
  bool centred = true;
};

struct StepDiagnostics {
  int n_dual_branch = 0;  // DMD coordinates updated through the dual branch
  int n_fallback = 0;     // DMD coordinates updated through the GEG fallback
  int n_clipped = 0;      // coordinates at exactly zero before normalization
};

struct StepResult {
  SimplexVector w;
  StepDiagnostics diag;
};

// g - (w.g) 1; orthogonal to w up to rounding.
std::vector<double> centred_gradient(const SimplexVector& w,
                                     const std::vector<double>& g);

// Multiplicative update w_i exp(-eta g_i), normalized; computed with a
// max-shift so large gradient spreads cannot overflow.
StepResult step_eg(const SimplexVector& w, const std::vector<double>& g,
                   double eta);

// exp_G(log_G(w_i) - eta g^_i), then l1 normalization.
StepResult step_geg(const SimplexVector& w, const std::vector<double>& g,
                    double eta, const links::LinkFunction& link, bool centred);

// Two-branch dual update: z_i = exp_G(w_i) - eta g^_i; positive z goes
// through [log_G(z_i)]_+ (hard thresholding), the rest fall back to the GEG
// step; then l1 normalization.
StepResult step_dmd(const SimplexVector& w, const std::vector<double>& g,
                    double eta, const links::LinkFunction& link, bool centred);

// Additive update [w_i - eta g^_i / d_i]_+ with d_i the derivative of the
// chosen link branch at w_i; zeros are absorbing under geg_link.
StepResult step_mmd(const SimplexVector& w, const std::vector<double>& g,
                    double eta, const links::LinkFunction& link, MmdKind which,
                    bool centred);

// Dispatch on cfg.algorithm. EG receives the gradient as given (its update
// is shift-invariant, so centring cannot change the result).
StepResult apply_step(const SimplexVector& w, const std::vector<double>& g,
                      const UpdateConfig& cfg);

// Objective oracle driven by the run loop. step_gradient supplies the
// (possibly noisy) gradient fed to the stepper and may advance RNG state;
// gradient/loss are the clean quantities used for metrics.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dim() const = 0;
  virtual double loss(const std::vector<double>& w) const = 0;
  virtual std::vector<double> gradient(const std::vector<double>& w) const = 0;
  virtual std::vector<double> step_gradient(const std::vector<double>& w) = 0;

  // Reference data for metrics; NaN / null when not known.
  virtual double optimal_value() const {
    return std::numeric_limits<double>::quiet_NaN();
  }
  virtual const std::vector<std::size_t>* support() const { return nullptr; }
};

struct StoppingRule {
  double threshold = 1e-4;  // fires when delta_t = fw_t / fw_0 <= threshold
};

// Iterates the configured stepper from w0 for at most t_max steps, logging
// one row per logged iteration (metrics on the clean gradient) including the
// t = 0 state. metrics_stride > 1 logs (and checks stopping) only every
// stride-th iteration plus the final one, for large-n runs where the clean
// loss/gradient evaluation doubles the cost. Stops early when the normalized
// FW gap ratio reaches the threshold, or immediately when the initial FW gap
// is zero. Stepper errors are rethrown with the iteration index prefixed.
metrics::IterationTrace run(Objective& objective, const SimplexVector& w0,
                            const UpdateConfig& cfg, int t_max,
                            const StoppingRule& stop, int metrics_stride = 1);

}  // namespace gemd::updates

#endif  // GEMD_UPDATES_HPP
