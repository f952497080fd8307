#include "gemd/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace gemd::analysis {

namespace {

constexpr double kE = 2.71828182845904523536;

void check_q(double q, const char* what) {
  if (!(q > 0.0) || !(q < 1.0))
    throw ParamError(std::string(what) + ": requires q in (0, 1)");
}

}  // namespace

CurvatureReport curvature_profile(const links::LinkFunction& link,
                                  CurvatureKind kind,
                                  const std::vector<double>& grid) {
  if (grid.empty())
    throw ArgumentError("curvature_profile: grid must be nonempty");
  CurvatureReport rep;
  rep.link = link.descriptor();
  rep.kind = kind;
  rep.grid = grid;
  rep.h2.reserve(grid.size());
  for (double w : grid) {
    if (!(w >= 0.0) || !(w <= 1.0))
      throw ArgumentError("curvature_profile: grid point outside [0, 1]");
    const double h2 =
        kind == CurvatureKind::dmd ? link.dexp(w) : link.dlog(w);
    rep.h2.push_back(h2);
  }
  rep.mu_F = *std::min_element(rep.h2.begin(), rep.h2.end());
  rep.L_F = *std::max_element(rep.h2.begin(), rep.h2.end());
  rep.kappa_F = rep.L_F / rep.mu_F;
  return rep;
}

double dmd_condition_bound(double q) {
  check_q(q, "dmd_condition_bound");
  const double bound = std::pow(2.0 - q, q / (1.0 - q));
  if (!(bound <= kE + 1e-12))
    throw Error("dmd_condition_bound: computed bound exceeds e");
  return bound;
}

double geg_truncated_condition(double q, double delta) {
  check_q(q, "geg_truncated_condition");
  if (!(delta > 0.0) || !(delta <= 1.0))
    throw ParamError("geg_truncated_condition: requires delta in (0, 1]");
  return std::pow(delta, -q);
}

double max_stable_step(CurvatureKind kind, double q,
                       std::optional<double> w_min) {
  check_q(q, "max_stable_step");
  if (kind == CurvatureKind::dmd) return 2.0 / dmd_condition_bound(q);
  if (!w_min.has_value())
    throw ParamError("max_stable_step: geg requires w_min");
  if (!(*w_min > 0.0) || !(*w_min <= 1.0))
    throw ParamError("max_stable_step: w_min must lie in (0, 1]");
  return 2.0 * std::pow(*w_min, q);
}

double group_law_check(const links::LinkFunction& link,
                       const std::vector<std::pair<double, double>>& pairs) {
  using links::Family;
  const Family fam = link.family();
  double kq = 0.0;
  switch (fam) {
    case Family::natural:
    case Family::tsallis:
    case Family::kaniadakis1:
      kq = link.params().empty() ? 0.0 : link.params()[0];
      break;
    default:
      throw UnsupportedFamily(
          "group_law_check: no closed-form group law registered for " +
          links::family_name(fam));
  }
  auto phi = [&](double x, double y) {
    switch (fam) {
      case Family::natural:
        return x + y;
      case Family::tsallis:
        return x + y + (1.0 - kq) * x * y;
      default:  // kaniadakis1
        return x * std::sqrt(1.0 + kq * kq * y * y) +
               y * std::sqrt(1.0 + kq * kq * x * x);
    }
  };
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const double lhs = link.log(x * y);
    const double rhs = phi(link.log(x), link.log(y));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace gemd::analysis
