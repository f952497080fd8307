#ifndef GEMD_LINKS_HPP
#define GEMD_LINKS_HPP

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gemd/errors.hpp"

namespace gemd::links {

// Families of deformed logarithm / exponential pairs. Each family defines a
// strictly increasing log branch on (0, inf) with log(1) = 0 and its
// compositional inverse, the exp branch with exp(0) = 1.
enum class Family {
  natural,
  tsallis,
  kaniadakis1,
  kaniadakis3,
  euler,
  stretched_exp,
  super_exp,
  chain,
};

enum class Role { log, exp };

std::string family_name(Family f);
std::string role_name(Role r);

namespace detail {
struct LinkImpl;
}

struct ValidityReport {
  bool monotone = false;       // first differences of the log branch > 0
  bool concave_log = false;    // chord slopes of the log branch decreasing
  bool convex_exp = false;     // chord slopes of the exp branch increasing
  double max_roundtrip = 0.0;  // max |exp(log(w)) - w| / max(1, w) on grid
  bool admissible = false;     // monotone && max_roundtrip <= 1e-9
  int grid_size = 0;
};

struct ChainStep;

// A deformed log/exp pair with derivatives; the mirror map of the descent
// updates. Immutable and freely shareable across threads.
class LinkFunction {
 public:
  static LinkFunction natural();
  static LinkFunction tsallis(double q);
  static LinkFunction kaniadakis(double kappa);
  static LinkFunction kaniadakis3(double kappa, double r, double lambda);
  static LinkFunction euler(double a, double b);
  static LinkFunction stretched_exp(double alpha, double gamma);
  static LinkFunction super_exp(double alpha, double gamma);

  // Chain composition log_G1 o exp_G2 o ... o ln. Steps are listed outermost
  // first, must alternate log/exp roles, start with log and end with exp.
  // The terminal natural log is implicit. Constituents may not themselves be
  // chains.
  static LinkFunction chain(std::vector<ChainStep> steps);

  // Builds a link from its string descriptor, e.g. "tsallis:q=0.25" or
  // "chain:[tsallis:q=0.5>log|kaniadakis1:kappa=0.5>exp]".
  static LinkFunction parse(std::string_view descriptor);

  double log(double w) const;
  double exp(double x) const;

  // Derivative of the chosen branch at its own argument: dlog(w) is
  // d log_G / dw, dexp(w) is d exp_G / dw. Analytic where a closed form
  // exists, otherwise a central finite difference.
  double dlog(double w) const;
  double dexp(double w) const;

  double eval(Role r, double v) const;
  double deriv(Role r, double v) const;

  Family family() const;
  const std::vector<double>& params() const;
  // Chain steps; empty unless family() == Family::chain.
  const std::vector<ChainStep>& steps() const;

  std::string descriptor() const;

  // Validated evaluation interval. lo == 0 means "open at zero"; grid-based
  // checks then start at 1e-6. Evaluation outside the interval is permitted
  // wherever the function is mathematically defined.
  double domain_lo() const;
  double domain_hi() const;
  LinkFunction with_domain(double lo, double hi) const;

  // Scans a log-spaced grid of the given size over the validated interval
  // and reports monotonicity, branch curvature, and round-trip error.
  ValidityReport validate(int grid_size) const;

 private:
  friend struct detail::LinkImpl;
  explicit LinkFunction(std::shared_ptr<const detail::LinkImpl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::LinkImpl> impl_;
};

// One stage of a chain link: a non-chain constituent applied through its log
// or exp branch.
struct ChainStep {
  LinkFunction link;
  Role role;
};

// Grid start used by validation and round-trip checks when the validated
// interval is open at zero.
inline constexpr double kGridFloor = 1e-6;

}  // namespace gemd::links

#endif  // GEMD_LINKS_HPP
