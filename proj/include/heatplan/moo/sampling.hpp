#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace heatplan::moo {

/// Halton points in [0, 1)^dims with seeded per-digit random permutations
/// (one permutation per dimension, applied to every digit). seed 0 with
/// scramble=false gives the plain sequence. Rows are points; `skip` drops
/// leading indices.
[[nodiscard]] Eigen::MatrixXd scrambled_halton(int n, int dims, std::uint64_t seed, bool scramble = true,
                                               int skip = 0);

}  // namespace heatplan::moo
