#ifndef GEMD_ANALYSIS_HPP
#define GEMD_ANALYSIS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gemd/errors.hpp"
#include "gemd/links.hpp"

namespace gemd::analysis {

// Which update family's curvature h'' is profiled: dmd reads the derivative
// of the link's exp branch at the weight, geg the derivative of the log
// branch.
enum class CurvatureKind { dmd, geg };

struct CurvatureReport {
  std::string link;  // descriptor
  CurvatureKind kind = CurvatureKind::dmd;
  std::vector<double> grid;
  std::vector<double> h2;  // curvature at each grid point
  double mu_F = 0.0;       // infimum over the grid
  double L_F = 0.0;        // supremum over the grid
  double kappa_F = 0.0;    // L_F / mu_F
};

// Evaluates the curvature over the grid (points in [0, 1]; include the
// endpoints where the extrema live). Analytic for links with closed-form
// derivatives; finite differences otherwise, via the link's deriv path.
CurvatureReport curvature_profile(const links::LinkFunction& link,
                                  CurvatureKind kind,
                                  const std::vector<double>& grid);

// (2 - q)^(q/(1-q)) for q in (0, 1); bounded by e.
double dmd_condition_bound(double q);

// delta^(-q): the curvature ratio of the geg potential on [delta, 1].
double geg_truncated_condition(double q, double delta);

// Curvature-based stability guideline: largest safe step size.
// dmd: 2 / (2-q)^(q/(1-q)), ignores w_min. geg: 2 * w_min^q, where w_min is
// the smallest active weight.
double max_stable_step(CurvatureKind kind, double q,
                       std::optional<double> w_min = std::nullopt);

// Max absolute residual of log_G(xy) = Phi(log_G x, log_G y) over the pairs,
// with the closed-form group law Phi of the natural, tsallis, or kaniadakis1
// family.
double group_law_check(const links::LinkFunction& link,
                       const std::vector<std::pair<double, double>>& pairs);

}  // namespace gemd::analysis

#endif  // GEMD_ANALYSIS_HPP
