#ifndef GEMD_SCQP_HPP
#define GEMD_SCQP_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "gemd/errors.hpp"
#include "gemd/rng.hpp"
#include "gemd/simplex.hpp"
#include "gemd/updates.hpp"

namespace gemd::scqp {

// Matrix-free symmetric operator Q = U^T Lambda U with unit spectral norm.
// U composes a coordinate permutation, random sign flips, and an orthonormal
// DCT; eigenvalues decay geometrically from 1 to 1/kappa.
class SpectralOperator {
 public:
  static SpectralOperator make(std::size_t n, double kappa,
                               std::uint64_t seed);

  std::size_t dim() const { return n_; }
  double kappa() const { return kappa_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& eigenvalues() const { return lambda_; }
  const std::vector<double>& signs() const { return signs_; }
  const std::vector<std::size_t>& perm() const { return perm_; }

  // U w = DCT(signs * w[perm]); O(n log n).
  std::vector<double> apply_u(const std::vector<double>& w) const;
  // U^T y (the inverse of apply_u since U is orthogonal).
  std::vector<double> apply_ut(const std::vector<double>& y) const;
  // Q w = U^T Lambda U w.
  std::vector<double> apply(const std::vector<double>& w) const;

 private:
  SpectralOperator() = default;
  std::size_t n_ = 0;
  double kappa_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<double> lambda_;
  std::vector<double> signs_;
  std::vector<std::size_t> perm_;
};

// Planted benchmark instance: minimize 1/2 w^T Q w + c^T w over the simplex,
// with the optimum w* = uniform on a random K-subset and gradient exactly
// (0 on the support, delta off it).
struct ScqpInstance {
  SpectralOperator op;
  std::vector<double> c;
  SimplexVector w_star;
  std::vector<std::size_t> support;  // sorted
  double delta = 0.0;
  double loss_star = 0.0;  // L(w*) = -1/2 w*^T Q w*
};

ScqpInstance plant_instance(const SpectralOperator& op, std::size_t K,
                            double delta, std::uint64_t seed);

double loss(const ScqpInstance& inst, const std::vector<double>& w);
std::vector<double> gradient(const ScqpInstance& inst,
                             const std::vector<double>& w);

struct NoiseModel {
  double snr_db = std::numeric_limits<double>::infinity();  // inf = exact
};

// Clean gradient plus white noise with sigma = (||g||_2 / sqrt(n)) *
// 10^(-snr_db/20), recalibrated from the clean gradient at each call. The
// caller owns the RNG stream; snr_db = inf draws nothing.
std::vector<double> noisy_gradient(const ScqpInstance& inst,
                                   const std::vector<double>& w,
                                   const NoiseModel& noise, Rng& rng);

// Objective adapter for the run loop: clean loss/gradient for metrics,
// noisy gradient (own RNG stream) for the stepper.
class ScqpObjective final : public updates::Objective {
 public:
  ScqpObjective(const ScqpInstance& inst, NoiseModel noise,
                std::uint64_t noise_seed)
      : inst_(inst), noise_(noise), rng_(noise_seed) {}

  std::size_t dim() const override { return inst_.op.dim(); }
  double loss(const std::vector<double>& w) const override {
    return scqp::loss(inst_, w);
  }
  std::vector<double> gradient(const std::vector<double>& w) const override {
    return scqp::gradient(inst_, w);
  }
  std::vector<double> step_gradient(const std::vector<double>& w) override {
    return noisy_gradient(inst_, w, noise_, rng_);
  }
  double optimal_value() const override { return inst_.loss_star; }
  const std::vector<std::size_t>* support() const override {
    return &inst_.support;
  }

 private:
  const ScqpInstance& inst_;
  NoiseModel noise_;
  Rng rng_;
};

}  // namespace gemd::scqp

#endif  // GEMD_SCQP_HPP
