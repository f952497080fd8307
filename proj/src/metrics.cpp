#include "gemd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gemd::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 32-point Gauss-Legendre rule on [-1, 1]; positive half, mirrored in use.
constexpr int kGlHalf = 16;
constexpr double kGlNode[kGlHalf] = {
    0.048307665687738316235, 0.14447196158279649349, 0.23928736225213707454,
    0.33186860228212764978,  0.42135127613063534536, 0.50689990893222939002,
    0.58771575724076232904,  0.66304426693021520098, 0.73218211874028968039,
    0.79448379596794240696,  0.84936761373256997013, 0.89632115576605212397,
    0.93490607593773968917,  0.96476225558750643077, 0.9856115115452683354,
    0.99726386184948156354};
constexpr double kGlWeight[kGlHalf] = {
    0.096540088514727800567, 0.095638720079274859419, 0.093844399080804565639,
    0.091173878695763884713, 0.087652093004403811143, 0.083311924226946755222,
    0.078193895787070306472, 0.072345794108848506225, 0.065822222776361846838,
    0.058684093478535547145, 0.050998059262376176196, 0.042835898022226680657,
    0.034273862913021433103, 0.025392065309262059456, 0.016274394730905670605,
    0.0070186100094700966005};

// Integral of the link's log branch over [a, b] (signed).
double integrate_log(const links::LinkFunction& link, double a, double b) {
  if (a == b) return 0.0;
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < kGlHalf; ++i) {
    acc += kGlWeight[i] * (link.log(mid + half * kGlNode[i]) +
                           link.log(mid - half * kGlNode[i]));
  }
  return half * acc;
}

double xlnx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

// Antiderivative of the tsallis log, fixed so A(1) has no free constant
// (constants cancel in differences).
double ts_antideriv(double q, double x) {
  double e1 = 1.0 - q;
  return (std::pow(x, 2.0 - q) - 1.0) / (e1 * (2.0 - q)) - (x - 1.0) / e1;
}

}  // namespace

double rel_primal_gap(double L_w, double L_star) {
  return (L_w - L_star) / std::max(1.0, std::abs(L_star));
}

double fw_gap(const std::vector<double>& w, const std::vector<double>& g) {
  if (w.size() != g.size())
    throw LengthMismatch("fw_gap: weight and gradient lengths differ");
  if (w.empty()) throw ArgumentError("fw_gap: empty vectors");
  double dot = 0.0, mn = g[0];
  for (std::size_t i = 0; i < w.size(); ++i) {
    dot += w[i] * g[i];
    mn = std::min(mn, g[i]);
  }
  return dot - mn;
}

double rel_fw_gap(double fw, double L_w) {
  return fw / std::max(1.0, std::abs(L_w));
}

double stopping_delta(double fw_now, double fw_init) {
  if (!(fw_init > 0.0))
    throw DegenerateStart(
        "stopping_delta: initial FW gap is not positive (start already "
        "optimal)");
  return fw_now / fw_init;
}

double iou_topk(const std::vector<double>& w,
                const std::vector<std::size_t>& support, std::size_t K) {
  const std::size_t n = w.size();
  if (K > n) throw ArgumentError("iou_topk: K exceeds the dimension");
  if (K == 0 || K != support.size())
    throw ArgumentError("iou_topk: K must equal |support| and be >= 1");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + K, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (w[a] != w[b]) return w[a] > w[b];
                      return a < b;  // ties broken by lowest index
                    });
  std::vector<char> in_star(n, 0);
  for (std::size_t i : support) {
    if (i >= n) throw ArgumentError("iou_topk: support index out of range");
    in_star[i] = 1;
  }
  std::size_t inter = 0;
  for (std::size_t j = 0; j < K; ++j) inter += in_star[idx[j]];
  const std::size_t uni = 2 * K - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<int> recovery_delay(const IterationTrace& trace) {
  const auto& rows = trace.rows;
  if (rows.empty()) return std::nullopt;
  std::size_t j = rows.size();
  while (j > 0 && rows[j - 1].iou == 1.0) --j;
  if (j == rows.size()) return std::nullopt;  // final row not at IoU 1
  return rows[j].t;
}

std::optional<int> first_iter_at_iou(const IterationTrace& trace,
                                     double threshold) {
  for (const auto& row : trace.rows) {
    if (row.iou >= threshold) return row.t;
  }
  return std::nullopt;
}

int recovery_delay_censored(const IterationTrace& trace, int budget) {
  return recovery_delay(trace).value_or(budget);
}

int first_iter_at_iou_censored(const IterationTrace& trace, double threshold,
                               int budget) {
  return first_iter_at_iou(trace, threshold).value_or(budget);
}

double bregman_divergence(const links::LinkFunction& link,
                          const SimplexVector& u, const SimplexVector& w) {
  if (u.size() != w.size())
    throw LengthMismatch("bregman_divergence: operand lengths differ");
  using links::Family;
  const Family fam = link.family();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = u[i], wi = w[i];
    if (ui == wi) continue;
    double seg;  // F(u_i) - F(w_i) = integral of log_G over [w_i, u_i]
    if (fam == Family::natural) {
      if (wi == 0.0) return kInf;  // KL-style divergence is infinite
      seg = (xlnx(ui) - ui) - (xlnx(wi) - wi);
    } else if (fam == Family::tsallis) {
      seg = ts_antideriv(link.params()[0], ui) -
            ts_antideriv(link.params()[0], wi);
    } else {
      seg = integrate_log(link, wi, ui);
    }
    acc += seg - (ui - wi) * link.log(wi);
  }
  return acc;
}

// --- CSV persistence ---

namespace {
const char kColumns[] =
    "t,loss,rel_primal,fw_gap,rel_fw,delta_t,iou,nnz,n_dual,n_fallback,"
    "n_clipped";

void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}
}  // namespace

std::string to_csv(const IterationTrace& trace) {
  std::string out;
  for (const auto& [key, value] : trace.header) {
    out += "# ";
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  out += kColumns;
  out += '\n';
  for (const auto& r : trace.rows) {
    out += std::to_string(r.t);
    out += ',';
    append_g17(out, r.loss);
    out += ',';
    append_g17(out, r.rel_primal);
    out += ',';
    append_g17(out, r.fw_gap);
    out += ',';
    append_g17(out, r.rel_fw);
    out += ',';
    append_g17(out, r.delta_t);
    out += ',';
    append_g17(out, r.iou);
    out += ',';
    out += std::to_string(r.nnz);
    out += ',';
    out += std::to_string(r.n_dual);
    out += ',';
    out += std::to_string(r.n_fallback);
    out += ',';
    out += std::to_string(r.n_clipped);
    out += '\n';
  }
  return out;
}

void write_csv(const IterationTrace& trace, std::ostream& os) {
  os << to_csv(trace);
}

IterationTrace read_csv(std::istream& is, const std::string& name) {
  IterationTrace trace;
  std::string line;
  int lineno = 0;
  bool saw_columns = false;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(name + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      auto colon = body.find(": ");
      if (colon == std::string::npos)
        trace.header.emplace_back(body, "");
      else
        trace.header.emplace_back(body.substr(0, colon),
                                  body.substr(colon + 2));
      continue;
    }
    if (!saw_columns) {
      if (line != kColumns)
        throw fail("expected column header '" + std::string(kColumns) + "'");
      saw_columns = true;
      continue;
    }
    TraceRow r;
    const char* p = line.c_str();
    char* end = nullptr;
    auto next_double = [&](double& out) {
      out = std::strtod(p, &end);
      if (end == p) throw fail("bad numeric field");
      p = (*end == ',') ? end + 1 : end;
    };
    auto next_int = [&](int& out) {
      long v = std::strtol(p, &end, 10);
      if (end == p) throw fail("bad integer field");
      out = static_cast<int>(v);
      p = (*end == ',') ? end + 1 : end;
    };
    double td = 0;
    next_double(td);
    r.t = static_cast<int>(td);
    next_double(r.loss);
    next_double(r.rel_primal);
    next_double(r.fw_gap);
    next_double(r.rel_fw);
    next_double(r.delta_t);
    next_double(r.iou);
    next_int(r.nnz);
    next_int(r.n_dual);
    next_int(r.n_fallback);
    next_int(r.n_clipped);
    if (*end != '\0' && *end != '\r') throw fail("trailing characters");
    if (!trace.rows.empty() && r.t <= trace.rows.back().t)
      throw fail("iteration counters must strictly increase");
    trace.rows.push_back(r);
  }
  if (!saw_columns) throw fail("missing column header");
  return trace;
}

}  // namespace gemd::metrics
