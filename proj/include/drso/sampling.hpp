#pragma once

#include <vector>

#include "drso/core.hpp"

namespace drso {

/// Classic Latin hypercube design: per dimension, one point in each of
/// `count` equal-width strata, placed uniformly within its stratum.
std::vector<DecisionVector> lhs_sample(const Bounds& bounds, std::size_t count, RngStream& rng);

}  // namespace drso
