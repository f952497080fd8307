#include "gemd/scqp.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace gemd::scqp {

namespace {

// FFTW's planner is not thread-safe; executions on distinct buffers are.
// Each thread keeps its own plans + buffers per size, so concurrent runs
// never share mutable state and results are identical to the serial path
// (FFTW_ESTIMATE picks the same algorithm for the same size/alignment).
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct DctPlans {
  std::size_t n = 0;
  double* in = nullptr;
  double* out = nullptr;
  fftw_plan fwd = nullptr;  // REDFT10, the DCT-II
  fftw_plan inv = nullptr;  // REDFT01, the DCT-III

  explicit DctPlans(std::size_t size) : n(size) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in = fftw_alloc_real(n);
    out = fftw_alloc_real(n);
    fwd = fftw_plan_r2r_1d(static_cast<int>(n), in, out, FFTW_REDFT10,
                           FFTW_ESTIMATE);
    inv = fftw_plan_r2r_1d(static_cast<int>(n), in, out, FFTW_REDFT01,
                           FFTW_ESTIMATE);
  }
  DctPlans(const DctPlans&) = delete;
  DctPlans& operator=(const DctPlans&) = delete;
  ~DctPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

DctPlans& plans_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<DctPlans>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DctPlans>(n);
  return *slot;
}

// Orthonormal DCT-II. FFTW's REDFT10 returns 2 sum_j x_j cos(pi(2j+1)k/2n),
// so the orthonormal coefficients need 1/(2 sqrt n) at k = 0 and
// 1/sqrt(2n) elsewhere.
std::vector<double> dct2_ortho(const std::vector<double>& x) {
  const std::size_t n = x.size();
  auto& p = plans_for(n);
  std::memcpy(p.in, x.data(), n * sizeof(double));
  fftw_execute(p.fwd);
  std::vector<double> y(n);
  const double s0 = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  const double sk = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  y[0] = p.out[0] * s0;
  for (std::size_t k = 1; k < n; ++k) y[k] = p.out[k] * sk;
  return y;
}

// Inverse of dct2_ortho (orthonormal DCT-III) via REDFT01 with the matching
// pre-scaling.
std::vector<double> dct3_ortho(const std::vector<double>& y) {
  const std::size_t n = y.size();
  auto& p = plans_for(n);
  const double s0 = 1.0 / std::sqrt(static_cast<double>(n));
  const double sk = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  p.in[0] = y[0] * s0;
  for (std::size_t k = 1; k < n; ++k) p.in[k] = y[k] * sk;
  fftw_execute(p.inv);
  return std::vector<double>(p.out, p.out + n);
}

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw LengthMismatch(std::string(what) + ": vector length " +
                         std::to_string(got) + " does not match dimension " +
                         std::to_string(want));
}

}  // namespace

SpectralOperator SpectralOperator::make(std::size_t n, double kappa,
                                        std::uint64_t seed) {
  if (n < 2) throw ArgumentError("make_operator: requires n >= 2");
  if (!(kappa >= 1.0) || !std::isfinite(kappa))
    throw ArgumentError("make_operator: requires kappa >= 1");
  SpectralOperator op;
  op.n_ = n;
  op.kappa_ = kappa;
  op.seed_ = seed;
  op.lambda_.resize(n);
  const double lk = std::log(kappa);
  for (std::size_t i = 0; i < n; ++i) {
    op.lambda_[i] =
        std::exp(-lk * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  Rng rng(seed);
  op.signs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) op.signs_[i] = rng.sign();
  op.perm_.resize(n);
  std::iota(op.perm_.begin(), op.perm_.end(), std::size_t{0});
  rng.shuffle(op.perm_);
  return op;
}

std::vector<double> SpectralOperator::apply_u(
    const std::vector<double>& w) const {
  check_len(w.size(), n_, "apply_u");
  std::vector<double> t(n_);
  for (std::size_t i = 0; i < n_; ++i) t[i] = signs_[i] * w[perm_[i]];
  return dct2_ortho(t);
}

std::vector<double> SpectralOperator::apply_ut(
    const std::vector<double>& y) const {
  check_len(y.size(), n_, "apply_ut");
  std::vector<double> t = dct3_ortho(y);
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[perm_[i]] = signs_[i] * t[i];
  return out;
}

std::vector<double> SpectralOperator::apply(
    const std::vector<double>& w) const {
  check_len(w.size(), n_, "apply_q");
  std::vector<double> y = apply_u(w);
  for (std::size_t i = 0; i < n_; ++i) y[i] *= lambda_[i];
  return apply_ut(y);
}

ScqpInstance plant_instance(const SpectralOperator& op, std::size_t K,
                            double delta, std::uint64_t seed) {
  const std::size_t n = op.dim();
  if (K < 1 || K > n)
    throw ArgumentError("plant_instance: requires 1 <= K <= n");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ArgumentError("plant_instance: requires delta > 0");

  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  std::vector<std::size_t> support(idx.begin(), idx.begin() + K);
  std::sort(support.begin(), support.end());

  SimplexVector w_star = SimplexVector::indicator(support, n);
  std::vector<double> v = op.apply(w_star.values());

  std::vector<char> on(n, 0);
  for (std::size_t i : support) on[i] = 1;
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = on[i] ? -v[i] : -v[i] + delta;

  ScqpInstance inst{op, std::move(c), std::move(w_star), std::move(support),
                    delta, 0.0};
  double ws_v = 0.0;
  for (std::size_t i : inst.support) ws_v += inst.w_star[i] * v[i];
  inst.loss_star = -0.5 * ws_v;

  // KKT certificate: the gradient at w* must be 0 on the support and delta
  // off it, up to rounding.
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = v[i] + inst.c[i];
  for (std::size_t i = 0; i < n; ++i) {
    const double want = on[i] ? 0.0 : delta;
    if (std::abs(g[i] - want) > 1e-10)
      throw Error("plant_instance: KKT certificate violated at coordinate " +
                  std::to_string(i));
  }
  return inst;
}

double loss(const ScqpInstance& inst, const std::vector<double>& w) {
  check_len(w.size(), inst.op.dim(), "loss");
  std::vector<double> qw = inst.op.apply(w);
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    quad += w[i] * qw[i];
    lin += inst.c[i] * w[i];
  }
  return 0.5 * quad + lin;
}

std::vector<double> gradient(const ScqpInstance& inst,
                             const std::vector<double>& w) {
  check_len(w.size(), inst.op.dim(), "gradient");
  std::vector<double> g = inst.op.apply(w);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += inst.c[i];
  return g;
}

std::vector<double> noisy_gradient(const ScqpInstance& inst,
                                   const std::vector<double>& w,
                                   const NoiseModel& noise, Rng& rng) {
  std::vector<double> g = gradient(inst, w);
  if (noise.snr_db == std::numeric_limits<double>::infinity()) return g;
  if (std::isnan(noise.snr_db) ||
      noise.snr_db == -std::numeric_limits<double>::infinity())
    throw ArgumentError("noisy_gradient: snr_db must be finite or +inf");
  double norm2 = 0.0;
  for (double x : g) norm2 += x * x;
  const double sigma = std::sqrt(norm2 / static_cast<double>(g.size())) *
                       std::pow(10.0, -noise.snr_db / 20.0);
  for (double& x : g) x += sigma * rng.normal();
  return g;
}

}  // namespace gemd::scqp
