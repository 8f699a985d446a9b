#include "drso/sampling.hpp"

#include <numeric>
#include <stdexcept>

namespace drso {

std::vector<DecisionVector> lhs_sample(const Bounds& bounds, std::size_t count, RngStream& rng) {
  if (count == 0) throw std::invalid_argument("lhs_sample: count must be positive");
  const std::size_t n = bounds.dim();
  std::vector<DecisionVector> points(count, DecisionVector(n));
  std::vector<std::size_t> strata(count);
  for (std::size_t j = 0; j < n; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    rng.shuffle(strata);
    const double width = bounds.width(j) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      double v = bounds.lower(j) + (static_cast<double>(strata[i]) + rng.uniform()) * width;
      // Rounding can push the top stratum onto the upper bound; keep it inside.
      if (v > bounds.upper(j)) v = bounds.upper(j);
      points[i][j] = v;
    }
  }
  return points;
}

}  // namespace drso
