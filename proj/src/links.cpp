#include "gemd/links.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace gemd::links {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kE = 2.718281828459045235;
constexpr double kInvE = 0.36787944117144232160;  // 1/e

// Shortest decimal string that parses back to the same double.
std::string fmt_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// Principal branch of the Lambert function, w e^w = z, by Halley iteration.
// Returns NaN below the branch point z = -1/e.
double lambert_w0(double z) {
  if (std::isnan(z) || z < -kInvE - 1e-15) return kNaN;
  if (z == 0.0) return 0.0;
  if (z <= -kInvE) return -1.0;
  if (z == kInf) return kInf;
  double w;
  if (z < 0.0) {
    // Series around the branch point keeps the iteration inside the basin.
    double p = std::sqrt(2.0 * (kE * z + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else if (z < kE) {
    w = z / (1.0 + z);
  } else {
    double l1 = std::log(z), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 50; ++it) {
    double ew = std::exp(w);
    double f = w * ew - z;
    double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-14 * std::max(1.0, std::abs(w))) return w;
  }
  throw ConvergenceError("lambert_w0: Halley iteration did not converge");
}

// d/dz of the principal branch; W'(0) = 1.
double lambert_w0_deriv(double z) {
  if (z == 0.0) return 1.0;
  double w = lambert_w0(z);
  return w / (z * (1.0 + w));
}

// Solves f(w) = x for strictly increasing f on the fixed bracket
// [1e-12, 1e6]: Newton from the unit point, bisection whenever the Newton
// step leaves the current bracket. Arguments outside f's range over the
// bracket clamp to the nearer endpoint.
template <class F, class DF>
double invert_increasing(F&& f, DF&& df, double x) {
  if (std::isnan(x)) return kNaN;
  double a = 1e-12, b = 1e6;
  double fa = f(a), fb = f(b);
  if (!(x > fa)) return a;
  if (!(x < fb)) return b;
  double w = 1.0;
  double fw = f(w);
  for (int it = 0; it < 200; ++it) {
    if (fw == x) return w;
    if (fw < x) {
      a = w;
    } else {
      b = w;
    }
    double d = df(w);
    double wn = kNaN;
    if (std::isfinite(d) && d > 0.0) wn = w - (fw - x) / d;
    if (!(wn > a && wn < b)) wn = 0.5 * (a + b);
    double dw = std::abs(wn - w);
    w = wn;
    fw = f(w);
    if (dw <= 1e-12 * std::max(1.0, std::abs(w))) return w;
  }
  throw ConvergenceError("link inversion: no convergence within 200 iterations");
}

double spow(double u, double p) {
  if (u == 0.0) return 0.0;
  return u < 0.0 ? -std::pow(-u, p) : std::pow(u, p);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::natural: return "natural";
    case Family::tsallis: return "tsallis";
    case Family::kaniadakis1: return "kaniadakis1";
    case Family::kaniadakis3: return "kaniadakis3";
    case Family::euler: return "euler";
    case Family::stretched_exp: return "stretched_exp";
    case Family::super_exp: return "super_exp";
    case Family::chain: return "chain";
  }
  return "?";
}

std::string role_name(Role r) { return r == Role::log ? "log" : "exp"; }

namespace detail {

// Immutable parameterization shared by all copies of a LinkFunction. The
// core_* evaluators follow IEEE limit semantics (0 and +/-inf flow through,
// undefined points yield NaN); the public wrappers turn NaN and divergent
// endpoints into DomainError.
struct LinkImpl {
  Family family = Family::natural;
  std::vector<double> params;
  std::vector<ChainStep> steps;
  double lo = 0.0;
  double hi = 1.0;

  double core_log(double w) const;
  double core_exp(double x) const;
  double core_dlog(double w) const;
  double core_dexp(double x) const;

  static const LinkImpl& of(const LinkFunction& lf) { return *lf.impl_; }
};

namespace {

double ts_log(double q, double w) {
  double e1 = 1.0 - q;
  if (w == 0.0) return q < 1.0 ? -1.0 / e1 : -kInf;
  return std::expm1(e1 * std::log(w)) / e1;
}

double ts_exp(double q, double x) {
  double e1 = 1.0 - q;
  double u = 1.0 + e1 * x;
  if (!(u > 0.0)) return q < 1.0 ? 0.0 : kNaN;  // clip vs. pole
  return std::exp(std::log1p(e1 * x) / e1);
}

double ts_dlog(double q, double w) { return std::pow(w, -q); }

double ts_dexp(double q, double x) {
  double e1 = 1.0 - q;
  double u = 1.0 + e1 * x;
  if (!(u > 0.0)) return q < 1.0 ? 0.0 : kNaN;
  return std::exp(q * std::log1p(e1 * x) / e1);
}

double k1_log(double k, double w) {
  if (w == 0.0) return -kInf;
  return std::sinh(k * std::log(w)) / k;
}

double k1_exp(double k, double x) { return std::exp(std::asinh(k * x) / k); }

double k1_dlog(double k, double w) { return std::cosh(k * std::log(w)) / w; }

double k1_dexp(double k, double x) {
  if (!std::isfinite(x)) return x > 0 ? kInf : 0.0;
  return k1_exp(k, x) / std::sqrt(1.0 + k * k * x * x);
}

double k3_log(double k, double r, double lam, double w) {
  double lk = std::pow(lam, k), lmk = std::pow(lam, -k);
  double D = (r + k) * lk - (r - k) * lmk;
  return (lk * std::pow(w, r + k) - lmk * std::pow(w, r - k) - lk + lmk) / D;
}

double k3_dlog(double k, double r, double lam, double w) {
  double lk = std::pow(lam, k), lmk = std::pow(lam, -k);
  double D = (r + k) * lk - (r - k) * lmk;
  return (lk * (r + k) * std::pow(w, r + k - 1.0) -
          lmk * (r - k) * std::pow(w, r - k - 1.0)) /
         D;
}

double eu_log(double a, double b, double w) {
  return (std::pow(w, a) - std::pow(w, b)) / (a - b);
}

double eu_dlog(double a, double b, double w) {
  return (a * std::pow(w, a - 1.0) - b * std::pow(w, b - 1.0)) / (a - b);
}

double st_log(double al, double ga, double w) {
  double c = 1.0 - al;
  if (w == 0.0) return -kInf;
  return c * spow(std::log(w) / c, 1.0 / ga);
}

double st_exp(double al, double ga, double x) {
  double c = 1.0 - al;
  return std::exp(c * spow(x / c, ga));
}

double st_dlog(double al, double ga, double w) {
  double c = 1.0 - al;
  return std::pow(std::abs(std::log(w) / c), 1.0 / ga - 1.0) / (ga * w);
}

double st_dexp(double al, double ga, double x) {
  double c = 1.0 - al;
  return st_exp(al, ga, x) * ga * std::pow(std::abs(x / c), ga - 1.0);
}

double se_log(double al, double ga, double w) {
  double c = 1.0 - al;
  if (w == 0.0) return kNaN;  // Lambert branch point is at w = e^{-1/e}
  double L = lambert_w0(std::log(w));
  return c * std::expm1(L / (ga * c));
}

double se_exp(double al, double ga, double x) {
  double c = 1.0 - al;
  double s = x / c;
  if (!(1.0 + s > 0.0)) return kNaN;
  double v = ga * c * std::log1p(s);
  if (v < -1.0) {
    if (v < -1.0 - 1e-9) return kNaN;  // below the range of the log branch
    v = -1.0;
  }
  return std::exp(v * std::exp(v));
}

double se_dlog(double al, double ga, double w) {
  double c = 1.0 - al;
  double z = std::log(w);
  double L = lambert_w0(z);
  return std::exp(L / (ga * c)) * lambert_w0_deriv(z) / (ga * w);
}

double se_dexp(double al, double ga, double x) {
  double c = 1.0 - al;
  double s = x / c;
  if (!(1.0 + s > 0.0)) return kNaN;
  double v = ga * c * std::log1p(s);
  if (v < -1.0) v = -1.0;
  return std::exp(v * std::exp(v)) * std::exp(v) * (1.0 + v) * ga / (1.0 + s);
}

}  // namespace

double LinkImpl::core_log(double w) const {
  if (std::isnan(w) || w < 0.0) return kNaN;
  switch (family) {
    case Family::natural:
      return std::log(w);
    case Family::tsallis:
      return ts_log(params[0], w);
    case Family::kaniadakis1:
      return k1_log(params[0], w);
    case Family::kaniadakis3:
      return k3_log(params[0], params[1], params[2], w);
    case Family::euler:
      return eu_log(params[0], params[1], w);
    case Family::stretched_exp:
      return st_log(params[0], params[1], w);
    case Family::super_exp:
      return se_log(params[0], params[1], w);
    case Family::chain: {
      double y = std::log(w);
      for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const LinkImpl& inner = of(it->link);
        y = it->role == Role::log ? inner.core_log(y) : inner.core_exp(y);
      }
      return y;
    }
  }
  return kNaN;
}

double LinkImpl::core_exp(double x) const {
  if (std::isnan(x)) return kNaN;
  switch (family) {
    case Family::natural:
      return std::exp(x);
    case Family::tsallis:
      return ts_exp(params[0], x);
    case Family::kaniadakis1:
      return k1_exp(params[0], x);
    case Family::kaniadakis3: {
      double k = params[0], r = params[1], lam = params[2];
      return invert_increasing([&](double w) { return k3_log(k, r, lam, w); },
                               [&](double w) { return k3_dlog(k, r, lam, w); },
                               x);
    }
    case Family::euler: {
      double a = params[0], b = params[1];
      return invert_increasing([&](double w) { return eu_log(a, b, w); },
                               [&](double w) { return eu_dlog(a, b, w); }, x);
    }
    case Family::stretched_exp:
      return st_exp(params[0], params[1], x);
    case Family::super_exp:
      return se_exp(params[0], params[1], x);
    case Family::chain: {
      double y = x;
      for (const auto& s : steps) {
        const LinkImpl& inner = of(s.link);
        y = s.role == Role::log ? inner.core_exp(y) : inner.core_log(y);
      }
      return std::exp(y);
    }
  }
  return kNaN;
}

double LinkImpl::core_dlog(double w) const {
  switch (family) {
    case Family::natural:
      return 1.0 / w;
    case Family::tsallis:
      return ts_dlog(params[0], w);
    case Family::kaniadakis1:
      return k1_dlog(params[0], w);
    case Family::kaniadakis3:
      return k3_dlog(params[0], params[1], params[2], w);
    case Family::euler:
      return eu_dlog(params[0], params[1], w);
    case Family::stretched_exp:
      return st_dlog(params[0], params[1], w);
    case Family::super_exp:
      return se_dlog(params[0], params[1], w);
    case Family::chain: {
      double h = std::max(1e-7, 1e-7 * std::abs(w));
      double wl = std::max(w - h, 0.0);
      return (core_log(w + h) - core_log(wl)) / (w + h - wl);
    }
  }
  return kNaN;
}

double LinkImpl::core_dexp(double x) const {
  switch (family) {
    case Family::natural:
      return std::exp(x);
    case Family::tsallis:
      return ts_dexp(params[0], x);
    case Family::kaniadakis1:
      return k1_dexp(params[0], x);
    case Family::kaniadakis3:
    case Family::euler: {
      // Inverse-function rule through the Newton inverse.
      double w = core_exp(x);
      return 1.0 / core_dlog(w);
    }
    case Family::stretched_exp:
      return st_dexp(params[0], params[1], x);
    case Family::super_exp:
      return se_dexp(params[0], params[1], x);
    case Family::chain: {
      double h = std::max(1e-7, 1e-7 * std::abs(x));
      return (core_exp(x + h) - core_exp(x - h)) / (2.0 * h);
    }
  }
  return kNaN;
}

}  // namespace detail

namespace {

void require_finite(Family f, std::initializer_list<std::pair<const char*, double>> ps) {
  for (const auto& [name, v] : ps) {
    if (!std::isfinite(v)) {
      throw ParamError(family_name(f) + ": parameter " + name +
                       " must be finite");
    }
  }
}

}  // namespace

// --- factories ---

namespace {
std::shared_ptr<const detail::LinkImpl> make_impl(Family f,
                                                  std::vector<double> params,
                                                  std::vector<ChainStep> steps,
                                                  double lo, double hi) {
  auto impl = std::make_shared<detail::LinkImpl>();
  impl->family = f;
  impl->params = std::move(params);
  impl->steps = std::move(steps);
  impl->lo = lo;
  impl->hi = hi;
  return impl;
}
}  // namespace

LinkFunction LinkFunction::natural() {
  return LinkFunction(make_impl(Family::natural, {}, {}, 0.0, 1.0));
}

LinkFunction LinkFunction::tsallis(double q) {
  require_finite(Family::tsallis, {{"q", q}});
  if (!(q > 0.0)) throw ParamError("tsallis: requires q > 0");
  if (q == 1.0) throw ParamError("tsallis: requires q != 1 (use natural)");
  return LinkFunction(make_impl(Family::tsallis, {q}, {}, 0.0, 1.0));
}

LinkFunction LinkFunction::kaniadakis(double kappa) {
  require_finite(Family::kaniadakis1, {{"kappa", kappa}});
  if (!(kappa >= -1.0 && kappa <= 1.0))
    throw ParamError("kaniadakis1: requires kappa in [-1, 1]");
  if (kappa == 0.0)
    throw ParamError("kaniadakis1: requires kappa != 0 (use natural)");
  return LinkFunction(make_impl(Family::kaniadakis1, {kappa}, {}, 0.0, 1.0));
}

LinkFunction LinkFunction::kaniadakis3(double kappa, double r, double lambda) {
  require_finite(Family::kaniadakis3,
                 {{"kappa", kappa}, {"r", r}, {"lambda", lambda}});
  if (!(lambda > 0.0)) throw ParamError("kaniadakis3: requires lambda > 0");
  if (!(kappa >= -1.0 && kappa <= 1.0))
    throw ParamError("kaniadakis3: requires kappa in [-1, 1]");
  if (!(std::abs(r) < std::abs(kappa)))
    throw ParamError("kaniadakis3: requires -|kappa| < r < |kappa|");
  return LinkFunction(
      make_impl(Family::kaniadakis3, {kappa, r, lambda}, {}, 0.0, 1.0));
}

LinkFunction LinkFunction::euler(double a, double b) {
  require_finite(Family::euler, {{"a", a}, {"b", b}});
  if (a == b) throw ParamError("euler: requires a != b");
  return LinkFunction(make_impl(Family::euler, {a, b}, {}, 0.0, 1.0));
}

LinkFunction LinkFunction::stretched_exp(double alpha, double gamma) {
  require_finite(Family::stretched_exp, {{"alpha", alpha}, {"gamma", gamma}});
  if (!(alpha < 1.0)) throw ParamError("stretched_exp: requires alpha < 1");
  if (!(gamma > 0.0)) throw ParamError("stretched_exp: requires gamma > 0");
  return LinkFunction(
      make_impl(Family::stretched_exp, {alpha, gamma}, {}, 0.0, 1.0));
}

LinkFunction LinkFunction::super_exp(double alpha, double gamma) {
  require_finite(Family::super_exp, {{"alpha", alpha}, {"gamma", gamma}});
  if (!(alpha > 0.0)) throw ParamError("super_exp: requires alpha > 0");
  if (alpha == 1.0) throw ParamError("super_exp: requires alpha != 1");
  if (!(gamma >= 1.0)) throw ParamError("super_exp: requires gamma >= 1");
  // The log branch needs ln w >= -1/e, i.e. w >= e^{-1/e} ~= 0.692; validate
  // over [0.7, 1] by default.
  return LinkFunction(
      make_impl(Family::super_exp, {alpha, gamma}, {}, 0.7, 1.0));
}

LinkFunction LinkFunction::chain(std::vector<ChainStep> steps) {
  if (steps.empty()) throw ParamError("chain: requires at least one step");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].link.family() == Family::chain)
      throw ParamError("chain: steps may not themselves be chains");
    Role expect = (i % 2 == 0) ? Role::log : Role::exp;
    if (steps[i].role != expect)
      throw ParamError(
          "chain: roles must alternate log, exp, ... starting with log");
  }
  if (steps.back().role != Role::exp)
    throw ParamError(
        "chain: the last explicit step must be an exp (the terminal natural "
        "log is implicit)");
  return LinkFunction(make_impl(Family::chain, {}, std::move(steps), 0.0, 1.0));
}

// --- evaluation wrappers ---

double LinkFunction::log(double w) const {
  if (std::isnan(w) || w < 0.0)
    throw DomainError(family_name(family()) + " log: requires w >= 0");
  double v = impl_->core_log(w);
  if (std::isnan(v))
    throw DomainError(family_name(family()) +
                      " log: undefined at w = " + fmt_double(w));
  if (w == 0.0 && !std::isfinite(v))
    throw DomainError(family_name(family()) + " log: diverges at w = 0");
  return v;
}

double LinkFunction::exp(double x) const {
  if (std::isnan(x))
    throw DomainError(family_name(family()) + " exp: requires a real argument");
  double v = impl_->core_exp(x);
  if (std::isnan(v))
    throw DomainError(family_name(family()) +
                      " exp: undefined at x = " + fmt_double(x));
  return v;
}

double LinkFunction::dlog(double w) const {
  if (std::isnan(w) || w <= 0.0)
    throw DomainError(family_name(family()) +
                      " dlog: singular or undefined at w = " + fmt_double(w));
  double v = impl_->core_dlog(w);
  if (std::isnan(v))
    throw DomainError(family_name(family()) +
                      " dlog: undefined at w = " + fmt_double(w));
  return v;
}

double LinkFunction::dexp(double w) const {
  if (std::isnan(w))
    throw DomainError(family_name(family()) +
                      " dexp: requires a real argument");
  double v = impl_->core_dexp(w);
  if (std::isnan(v))
    throw DomainError(family_name(family()) +
                      " dexp: undefined at x = " + fmt_double(w));
  return v;
}

double LinkFunction::eval(Role r, double v) const {
  return r == Role::log ? log(v) : exp(v);
}

double LinkFunction::deriv(Role r, double v) const {
  return r == Role::log ? dlog(v) : dexp(v);
}

Family LinkFunction::family() const { return impl_->family; }

const std::vector<double>& LinkFunction::params() const {
  return impl_->params;
}

const std::vector<ChainStep>& LinkFunction::steps() const {
  return impl_->steps;
}

double LinkFunction::domain_lo() const { return impl_->lo; }
double LinkFunction::domain_hi() const { return impl_->hi; }

LinkFunction LinkFunction::with_domain(double lo, double hi) const {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw ArgumentError("with_domain: requires 0 <= lo < hi < inf");
  detail::LinkImpl copy = *impl_;
  copy.lo = lo;
  copy.hi = hi;
  return LinkFunction(std::make_shared<detail::LinkImpl>(std::move(copy)));
}

// --- descriptor formatting ---

namespace {
const char* const kParamNames[][3] = {
    /* natural */ {nullptr, nullptr, nullptr},
    /* tsallis */ {"q", nullptr, nullptr},
    /* kaniadakis1 */ {"kappa", nullptr, nullptr},
    /* kaniadakis3 */ {"kappa", "r", "lambda"},
    /* euler */ {"a", "b", nullptr},
    /* stretched_exp */ {"alpha", "gamma", nullptr},
    /* super_exp */ {"alpha", "gamma", nullptr},
    /* chain */ {nullptr, nullptr, nullptr},
};
}  // namespace

std::string LinkFunction::descriptor() const {
  Family f = family();
  if (f == Family::natural) return "natural";
  if (f == Family::chain) {
    std::string out = "chain:[";
    const auto& ss = steps();
    for (std::size_t i = 0; i < ss.size(); ++i) {
      if (i) out += '|';
      out += ss[i].link.descriptor();
      out += '>';
      out += role_name(ss[i].role);
    }
    out += ']';
    return out;
  }
  std::string out = family_name(f) + ":";
  const auto& ps = params();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ',';
    out += kParamNames[static_cast<int>(f)][i];
    out += '=';
    out += fmt_double(ps[i]);
  }
  return out;
}

// --- descriptor parsing ---

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view tok, std::string_view descriptor) {
  std::string buf(tok);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw ParseError("link descriptor '" + std::string(descriptor) +
                     "': bad numeric value '" + buf + "'");
  return v;
}

// Parses "name=value,name=value" into values ordered per kParamNames.
std::vector<double> parse_params(Family f, std::string_view body,
                                 std::string_view desc,
                                 std::size_t n_expected) {
  std::vector<double> vals(n_expected, kNaN);
  std::vector<bool> seen(n_expected, false);
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t comma = body.find(',', pos);
    std::string_view item = body.substr(
        pos, comma == std::string_view::npos ? body.size() - pos : comma - pos);
    item = trim(item);
    if (item.empty())
      throw ParseError("link descriptor '" + std::string(desc) +
                       "': empty parameter entry");
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("link descriptor '" + std::string(desc) +
                       "': expected name=value, got '" + std::string(item) +
                       "'");
    std::string_view name = trim(item.substr(0, eq));
    std::string_view value = trim(item.substr(eq + 1));
    bool matched = false;
    for (std::size_t i = 0; i < n_expected; ++i) {
      if (name == kParamNames[static_cast<int>(f)][i]) {
        if (seen[i])
          throw ParseError("link descriptor '" + std::string(desc) +
                           "': duplicate parameter '" + std::string(name) +
                           "'");
        vals[i] = parse_number(value, desc);
        seen[i] = true;
        matched = true;
        break;
      }
    }
    if (!matched)
      throw ParseError("link descriptor '" + std::string(desc) +
                       "': unknown parameter '" + std::string(name) + "' for " +
                       family_name(f));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  for (std::size_t i = 0; i < n_expected; ++i) {
    if (!seen[i])
      throw ParseError("link descriptor '" + std::string(desc) +
                       "': missing parameter '" +
                       kParamNames[static_cast<int>(f)][i] + "'");
  }
  return vals;
}

LinkFunction parse_simple(std::string_view desc) {
  std::string_view s = trim(desc);
  std::size_t colon = s.find(':');
  std::string_view fam = trim(colon == std::string_view::npos ? s : s.substr(0, colon));
  std::string_view body =
      colon == std::string_view::npos ? std::string_view{} : s.substr(colon + 1);
  if (fam == "natural") {
    if (!trim(body).empty())
      throw ParseError("link descriptor '" + std::string(desc) +
                       "': natural takes no parameters");
    return LinkFunction::natural();
  }
  if (fam == "tsallis") {
    auto v = parse_params(Family::tsallis, body, desc, 1);
    return LinkFunction::tsallis(v[0]);
  }
  if (fam == "kaniadakis1") {
    auto v = parse_params(Family::kaniadakis1, body, desc, 1);
    return LinkFunction::kaniadakis(v[0]);
  }
  if (fam == "kaniadakis3") {
    auto v = parse_params(Family::kaniadakis3, body, desc, 3);
    return LinkFunction::kaniadakis3(v[0], v[1], v[2]);
  }
  if (fam == "euler") {
    auto v = parse_params(Family::euler, body, desc, 2);
    return LinkFunction::euler(v[0], v[1]);
  }
  if (fam == "stretched_exp") {
    auto v = parse_params(Family::stretched_exp, body, desc, 2);
    return LinkFunction::stretched_exp(v[0], v[1]);
  }
  if (fam == "super_exp") {
    auto v = parse_params(Family::super_exp, body, desc, 2);
    return LinkFunction::super_exp(v[0], v[1]);
  }
  throw UnsupportedFamily("unknown link family '" + std::string(fam) + "'");
}

}  // namespace

LinkFunction LinkFunction::parse(std::string_view descriptor) {
  std::string_view s = trim(descriptor);
  if (s.empty()) throw ParseError("link descriptor is empty");
  if (s.rfind("chain:", 0) == 0) {
    std::string_view body = trim(s.substr(6));
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
      throw ParseError("link descriptor '" + std::string(descriptor) +
                       "': chain body must be bracketed as chain:[...]");
    body = body.substr(1, body.size() - 2);
    std::vector<ChainStep> steps;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t bar = body.find('|', pos);
      std::string_view item = body.substr(
          pos,
          bar == std::string_view::npos ? body.size() - pos : bar - pos);
      item = trim(item);
      std::size_t gt = item.rfind('>');
      if (gt == std::string_view::npos)
        throw ParseError("link descriptor '" + std::string(descriptor) +
                         "': chain step '" + std::string(item) +
                         "' lacks a >log or >exp role");
      std::string_view role_s = trim(item.substr(gt + 1));
      Role role;
      if (role_s == "log") {
        role = Role::log;
      } else if (role_s == "exp") {
        role = Role::exp;
      } else {
        throw ParseError("link descriptor '" + std::string(descriptor) +
                         "': chain role must be log or exp, got '" +
                         std::string(role_s) + "'");
      }
      steps.push_back(ChainStep{parse_simple(item.substr(0, gt)), role});
      if (bar == std::string_view::npos) break;
      pos = bar + 1;
    }
    return LinkFunction::chain(std::move(steps));
  }
  return parse_simple(s);
}

// --- validation ---

ValidityReport LinkFunction::validate(int grid_size) const {
  if (grid_size < 16)
    throw ArgumentError("validate: grid_size must be at least 16");
  double lo = impl_->lo > 0.0 ? impl_->lo : kGridFloor;
  double hi = impl_->hi;
  int n = grid_size;
  std::vector<double> wv(n), xv(n), ev(n);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / (n - 1);
    wv[i] = std::exp(llo + t * (lhi - llo));
    xv[i] = impl_->core_log(wv[i]);
    ev[i] = impl_->core_exp(xv[i]);
  }
  ValidityReport rep;
  rep.grid_size = n;
  bool monotone = true, concave = true, convex = true;
  double rt = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    if (!(xv[i + 1] > xv[i])) monotone = false;
  }
  for (int i = 0; i + 2 < n; ++i) {
    double s0 = (xv[i + 1] - xv[i]) / (wv[i + 1] - wv[i]);
    double s1 = (xv[i + 2] - xv[i + 1]) / (wv[i + 2] - wv[i + 1]);
    if (!(s1 < s0)) concave = false;
    double e0 = (ev[i + 1] - ev[i]) / (xv[i + 1] - xv[i]);
    double e1 = (ev[i + 2] - ev[i + 1]) / (xv[i + 2] - xv[i + 1]);
    if (!(e1 > e0)) convex = false;
  }
  for (int i = 0; i < n; ++i) {
    if (std::isnan(xv[i]) || std::isnan(ev[i])) {
      monotone = concave = convex = false;
      rt = kInf;
      break;
    }
    rt = std::max(rt, std::abs(ev[i] - wv[i]) / std::max(1.0, wv[i]));
  }
  rep.monotone = monotone;
  rep.concave_log = concave;
  rep.convex_exp = convex;
  rep.max_roundtrip = rt;
  rep.admissible = monotone && rt <= 1e-9;
  return rep;
}

}  // namespace gemd::links
