#ifndef GEMD_SIMPLEX_HPP
#define GEMD_SIMPLEX_HPP

#include <cstddef>
#include <vector>

#include "gemd/errors.hpp"

namespace gemd {

// Nonnegative weight vector with unit l1 norm: the optimization iterate.
// Construction normalizes, so the sum-to-one invariant holds to 1e-12 after
// every public operation.
class SimplexVector {
 public:
  // Takes any nonnegative, finite, not-all-zero vector and normalizes it.
  explicit SimplexVector(std::vector<double> v);

  static SimplexVector uniform(std::size_t n);
  // 1/|support| on the given indices, 0 elsewhere.
  static SimplexVector indicator(const std::vector<std::size_t>& support,
                                 std::size_t n);

  const std::vector<double>& values() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::size_t size() const { return v_.size(); }

  // Count of strictly positive entries.
  int nnz() const;
  // Smallest strictly positive entry.
  double min_positive() const;

 private:
  std::vector<double> v_;
};

}  // namespace gemd

#endif  // GEMD_SIMPLEX_HPP
