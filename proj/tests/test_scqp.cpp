#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gemd/metrics.hpp"
#include "gemd/rng.hpp"
#include "gemd/scqp.hpp"

using namespace gemd;
using namespace gemd::scqp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

SimplexVector random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform01();
  return SimplexVector(std::move(v));
}

// Materialize the operator as a dense matrix by applying it to basis vectors.
std::vector<std::vector<double>> densify(const SpectralOperator& op) {
  const std::size_t n = op.dim();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    std::vector<double> col = op.apply(e);
    for (std::size_t i = 0; i < n; ++i) q[i][j] = col[i];
  }
  return q;
}

}  // namespace

TEST_CASE("make_operator validates arguments") {
  CHECK_THROWS_AS(SpectralOperator::make(1, 2.0, 0), ArgumentError);
  CHECK_THROWS_AS(SpectralOperator::make(0, 2.0, 0), ArgumentError);
  CHECK_THROWS_AS(SpectralOperator::make(8, 0.5, 0), ArgumentError);
  CHECK_THROWS_AS(SpectralOperator::make(8, kInf, 0), ArgumentError);
  CHECK_THROWS_AS(
      SpectralOperator::make(8, std::numeric_limits<double>::quiet_NaN(), 0),
      ArgumentError);
}

TEST_CASE("eigenvalues decay geometrically from 1 to 1/kappa") {
  auto op = SpectralOperator::make(1000, 1000.0, 7);
  const auto& lam = op.eigenvalues();
  CHECK(lam[0] == 1.0);
  CHECK(lam.front() / lam.back() == doctest::Approx(1000.0).epsilon(1e-9));
  for (std::size_t i = 0; i + 2 < lam.size(); i += 97) {
    CHECK(lam[i] / lam[i + 1] ==
          doctest::Approx(lam[i + 1] / lam[i + 2]).epsilon(1e-12));
  }
  for (std::size_t i = 0; i + 1 < lam.size(); ++i) CHECK(lam[i] > lam[i + 1]);
}

TEST_CASE("kappa = 1 gives the identity operator") {
  auto op = SpectralOperator::make(33, 1.0, 3);  // odd n on purpose
  Rng rng(11);
  std::vector<double> w = random_vector(rng, 33);
  std::vector<double> qw = op.apply(w);
  for (std::size_t i = 0; i < w.size(); ++i)
    CHECK(qw[i] == doctest::Approx(w[i]).epsilon(1e-12));
}

TEST_CASE("U round trips through signs, permutation and DCT") {
  for (std::size_t n : {37u, 128u}) {
    auto op = SpectralOperator::make(n, 50.0, 21);
    Rng rng(4 + n);
    std::vector<double> w = random_vector(rng, n);
    std::vector<double> back = op.apply_ut(op.apply_u(w));
    for (std::size_t i = 0; i < n; ++i)
      CHECK(back[i] == doctest::Approx(w[i]).epsilon(1e-12));
  }
}

TEST_CASE("apply_u matches the textbook orthonormal DCT-II") {
  const std::size_t n = 16;
  auto op = SpectralOperator::make(n, 10.0, 5);
  Rng rng(9);
  std::vector<double> w = random_vector(rng, n);
  // Undo the randomization by hand, then take the dense cosine transform.
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = op.signs()[i] * w[op.perm()[i]];
  std::vector<double> want(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += t[j] * std::cos(kPi * (2.0 * j + 1.0) * k / (2.0 * n));
    const double scale =
        k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    want[k] = scale * acc;
  }
  std::vector<double> got = op.apply_u(w);
  for (std::size_t k = 0; k < n; ++k)
    CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("operator is symmetric") {
  const std::size_t n = 128;
  auto op = SpectralOperator::make(n, 100.0, 17);
  Rng rng(2);
  std::vector<double> u = random_vector(rng, n);
  std::vector<double> v = random_vector(rng, n);
  const double lhs = dot(u, op.apply(v));
  const double rhs = dot(op.apply(u), v);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * norm2(u) * norm2(v));
}

TEST_CASE("dense materialization at n = 16 agrees with the fast path") {
  const std::size_t n = 16;
  auto op = SpectralOperator::make(n, 25.0, 13);
  auto q = densify(op);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::abs(q[i][j] - q[j][i]) <= 1e-12);
  // Similarity invariant: tr(Q) = sum of eigenvalues.
  double tr = 0.0, sum_lam = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tr += q[i][i];
    sum_lam += op.eigenvalues()[i];
  }
  CHECK(tr == doctest::Approx(sum_lam).epsilon(1e-12));
  // Dense multiply matches apply.
  Rng rng(6);
  std::vector<double> w = random_vector(rng, n);
  std::vector<double> qw = op.apply(w);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += q[i][j] * w[j];
    CHECK(std::abs(acc - qw[i]) <= 1e-12);
  }
}

TEST_CASE("Rayleigh quotients stay inside the spectral interval") {
  const std::size_t n = 64;
  const double kappa = 10.0;
  auto op = SpectralOperator::make(n, kappa, 23);
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> w = random_vector(rng, n);
    const double r = dot(w, op.apply(w)) / dot(w, w);
    CHECK(r >= 1.0 / kappa - 1e-9);
    CHECK(r <= 1.0 + 1e-9);
  }
}

TEST_CASE("power iteration certifies unit spectral norm") {
  const std::size_t n = 256;
  auto op = SpectralOperator::make(n, 100.0, 29);
  Rng rng(41);
  std::vector<double> x = random_vector(rng, n);
  double est = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> y = op.apply(x);
    est = norm2(y);
    for (double& v : y) v /= est;
    x = std::move(y);
  }
  CHECK(est == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("length mismatches are rejected") {
  auto op = SpectralOperator::make(8, 4.0, 1);
  std::vector<double> bad(7, 0.1);
  CHECK_THROWS_AS(op.apply(bad), LengthMismatch);
  CHECK_THROWS_AS(op.apply_u(bad), LengthMismatch);
  CHECK_THROWS_AS(op.apply_ut(bad), LengthMismatch);
  auto inst = plant_instance(op, 2, 5e-4, 2);
  CHECK_THROWS_AS(loss(inst, bad), LengthMismatch);
  CHECK_THROWS_AS(gradient(inst, bad), LengthMismatch);
}

TEST_CASE("plant_instance builds a certified KKT point") {
  auto op = SpectralOperator::make(200, 100.0, 51);
  const double delta = 5e-4;
  auto inst = plant_instance(op, 20, delta, 52);

  REQUIRE(inst.support.size() == 20);
  CHECK(std::is_sorted(inst.support.begin(), inst.support.end()));
  for (std::size_t i : inst.support) {
    CHECK(inst.w_star[i] == doctest::Approx(1.0 / 20).epsilon(1e-15));
  }
  CHECK(inst.w_star.nnz() == 20);

  std::vector<double> g = gradient(inst, inst.w_star.values());
  std::vector<char> on(200, 0);
  for (std::size_t i : inst.support) on[i] = 1;
  for (std::size_t i = 0; i < 200; ++i) {
    const double want = on[i] ? 0.0 : delta;
    CHECK(std::abs(g[i] - want) <= 1e-10);
  }

  // FW gap vanishes at the planted optimum.
  CHECK(metrics::fw_gap(inst.w_star.values(), g) <= 1e-12);

  // Closed-form optimal value agrees with a direct loss evaluation.
  CHECK(loss(inst, inst.w_star.values()) ==
        doctest::Approx(inst.loss_star).epsilon(1e-12));

  CHECK_THROWS_AS(plant_instance(op, 0, delta, 1), ArgumentError);
  CHECK_THROWS_AS(plant_instance(op, 201, delta, 1), ArgumentError);
  CHECK_THROWS_AS(plant_instance(op, 10, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(plant_instance(op, 10, -1e-4, 1), ArgumentError);
}

TEST_CASE("planted optimum is a global minimum over the simplex") {
  auto op = SpectralOperator::make(64, 30.0, 61);
  auto inst = plant_instance(op, 8, 5e-4, 62);
  Rng rng(63);
  for (int rep = 0; rep < 100; ++rep) {
    SimplexVector w = random_simplex(rng, 64);
    CHECK(loss(inst, w.values()) - inst.loss_star >= -1e-12);
    // FW certificate: the linearized bound never exceeds the optimum.
    std::vector<double> g = gradient(inst, w.values());
    const double lower =
        loss(inst, w.values()) - metrics::fw_gap(w.values(), g);
    CHECK(inst.loss_star >= lower - 1e-9);
  }
}

TEST_CASE("loss of uniform w under the identity operator with zero cost") {
  const std::size_t n = 40;
  auto op = SpectralOperator::make(n, 1.0, 77);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  ScqpInstance inst{op, std::vector<double>(n, 0.0), SimplexVector::uniform(n),
                    all, 5e-4, 0.5 / static_cast<double>(n)};
  CHECK(loss(inst, SimplexVector::uniform(n).values()) ==
        doctest::Approx(0.5 / n).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences") {
  const std::size_t n = 16;
  auto op = SpectralOperator::make(n, 12.0, 71);
  auto inst = plant_instance(op, 4, 5e-4, 72);
  Rng rng(73);
  std::vector<double> w = random_simplex(rng, n).values();
  std::vector<double> u = random_vector(rng, n);
  std::vector<double> g = gradient(inst, w);
  const double h = 1e-5;
  std::vector<double> wp = w, wm = w;
  for (std::size_t i = 0; i < n; ++i) {
    wp[i] += h * u[i];
    wm[i] -= h * u[i];
  }
  const double fd = (loss(inst, wp) - loss(inst, wm)) / (2.0 * h);
  CHECK(fd == doctest::Approx(dot(g, u)).epsilon(1e-6));
}

TEST_CASE("gradient is affine") {
  const std::size_t n = 32;
  auto op = SpectralOperator::make(n, 9.0, 81);
  auto inst = plant_instance(op, 5, 5e-4, 82);
  Rng rng(83);
  std::vector<double> w1 = random_vector(rng, n);
  std::vector<double> w2 = random_vector(rng, n);
  std::vector<double> w12(n);
  for (std::size_t i = 0; i < n; ++i) w12[i] = w1[i] + w2[i];
  std::vector<double> g1 = gradient(inst, w1);
  std::vector<double> g2 = gradient(inst, w2);
  std::vector<double> g12 = gradient(inst, w12);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(g12[i] - g1[i] - g2[i] + inst.c[i]) <= 1e-12);
  }
}

TEST_CASE("noisy gradient with infinite SNR is the clean gradient") {
  auto op = SpectralOperator::make(24, 5.0, 91);
  auto inst = plant_instance(op, 6, 5e-4, 92);
  std::vector<double> w = SimplexVector::uniform(24).values();
  Rng rng(93);
  std::vector<double> g = noisy_gradient(inst, w, NoiseModel{kInf}, rng);
  std::vector<double> clean = gradient(inst, w);
  CHECK(g == clean);
  // No RNG draws were consumed.
  CHECK(rng.next_u64() == Rng(93).next_u64());
}

TEST_CASE("noisy gradient rejects undefined SNR values") {
  auto op = SpectralOperator::make(8, 5.0, 94);
  auto inst = plant_instance(op, 2, 5e-4, 95);
  std::vector<double> w = SimplexVector::uniform(8).values();
  Rng rng(96);
  CHECK_THROWS_AS(
      noisy_gradient(inst, w, NoiseModel{-kInf}, rng), ArgumentError);
  CHECK_THROWS_AS(
      noisy_gradient(
          inst, w, NoiseModel{std::numeric_limits<double>::quiet_NaN()}, rng),
      ArgumentError);
}

TEST_CASE("noise level is calibrated to the requested SNR") {
  const std::size_t n = 100;
  auto op = SpectralOperator::make(n, 50.0, 101);
  auto inst = plant_instance(op, 10, 5e-4, 102);
  std::vector<double> w = SimplexVector::uniform(n).values();
  std::vector<double> clean = gradient(inst, w);
  const double gn = norm2(clean);

  for (double snr : {0.0, 20.0, 40.0}) {
    const double sigma_target =
        gn / std::sqrt(static_cast<double>(n)) * std::pow(10.0, -snr / 20.0);
    Rng rng(103);
    double ss = 0.0;
    const int reps = 100;  // reps * n = 1e4 draws
    for (int rep = 0; rep < reps; ++rep) {
      std::vector<double> g = noisy_gradient(inst, w, NoiseModel{snr}, rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = g[i] - clean[i];
        ss += d * d;
      }
    }
    const double sigma_hat = std::sqrt(ss / (reps * n));
    CHECK(sigma_hat == doctest::Approx(sigma_target).epsilon(0.02));
  }
}

TEST_CASE("instances are bit-identical across constructions") {
  auto build = [] {
    auto op = SpectralOperator::make(300, 250.0, 111);
    return plant_instance(op, 30, 5e-4, 112);
  };
  auto a = build();
  auto b = build();
  CHECK(a.support == b.support);
  CHECK(a.c == b.c);
  CHECK(a.w_star.values() == b.w_star.values());
  CHECK(a.op.eigenvalues() == b.op.eigenvalues());
  CHECK(a.op.signs() == b.op.signs());
  CHECK(a.op.perm() == b.op.perm());
  CHECK(a.loss_star == b.loss_star);

  // Different plant seed moves the support.
  auto op = SpectralOperator::make(300, 250.0, 111);
  auto c = plant_instance(op, 30, 5e-4, 113);
  CHECK(c.support != a.support);
}

TEST_CASE("objective adapter exposes the instance to the run loop") {
  auto op = SpectralOperator::make(50, 20.0, 121);
  auto inst = plant_instance(op, 5, 5e-4, 122);
  ScqpObjective obj(inst, NoiseModel{kInf}, 123);
  CHECK(obj.dim() == 50);
  CHECK(obj.optimal_value() == inst.loss_star);
  REQUIRE(obj.support() != nullptr);
  CHECK(*obj.support() == inst.support);
  std::vector<double> w = SimplexVector::uniform(50).values();
  CHECK(obj.loss(w) == loss(inst, w));
  CHECK(obj.gradient(w) == gradient(inst, w));
  CHECK(obj.step_gradient(w) == gradient(inst, w));  // exact at infinite SNR
}
