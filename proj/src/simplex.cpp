#include "gemd/simplex.hpp"

#include <cmath>
#include <limits>

namespace gemd {

SimplexVector::SimplexVector(std::vector<double> v) : v_(std::move(v)) {
  if (v_.empty()) throw ArgumentError("SimplexVector: dimension must be >= 1");
  double sum = 0.0;
  for (double x : v_) {
    if (!std::isfinite(x) || x < 0.0)
      throw ArgumentError(
          "SimplexVector: entries must be finite and nonnegative");
    sum += x;
  }
  if (!(sum > 0.0))
    throw ArgumentError("SimplexVector: entries must not all be zero");
  for (double& x : v_) x /= sum;
}

SimplexVector SimplexVector::uniform(std::size_t n) {
  if (n == 0) throw ArgumentError("SimplexVector: dimension must be >= 1");
  return SimplexVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexVector SimplexVector::indicator(const std::vector<std::size_t>& support,
                                       std::size_t n) {
  if (support.empty())
    throw ArgumentError("SimplexVector: support must be nonempty");
  std::vector<double> v(n, 0.0);
  for (std::size_t i : support) {
    if (i >= n)
      throw ArgumentError("SimplexVector: support index out of range");
    if (v[i] != 0.0)
      throw ArgumentError("SimplexVector: duplicate support index");
    v[i] = 1.0;
  }
  return SimplexVector(std::move(v));
}

int SimplexVector::nnz() const {
  int k = 0;
  for (double x : v_) k += (x > 0.0);
  return k;
}

double SimplexVector::min_positive() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v_) {
    if (x > 0.0 && x < m) m = x;
  }
  return m;
}

}  // namespace gemd
