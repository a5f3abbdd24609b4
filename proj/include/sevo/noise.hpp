#pragma once

#include <cstdint>
#include <vector>

#include "sevo/quadrature.hpp"

namespace sevo {

/// r-dimensional Brownian path on [0, T] stored as a dyadic refinement
/// tree: levels[L] holds the r x 2^L increments over the mesh of 2^L
/// steps. All dyadic meshes up to 2^max_level read the same path.
struct WienerTree {
    int r = 0;
    double T = 1.0;
    int max_level = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_index = 0;
    std::vector<Mat> levels;  // levels[L]: r x 2^L
};

/// Builds a path by Brownian-bridge midpoint refinement. The stream is
/// keyed by (master_seed, trajectory_index) through a counter-based
/// generator, so trajectories are independent and order-independent.
WienerTree sample_path(int r, double T, int max_level, std::uint64_t master_seed,
                       std::uint64_t trajectory_index);

/// Increments over the mesh of m = 2^L steps. Rejects non-dyadic m and
/// levels beyond the tree.
Mat increments(const WienerTree& tree, int m);

/// Direct (uncoupled) sampling for arbitrary m, same keyed stream.
Mat direct_increments(int r, double T, int m, std::uint64_t master_seed,
                      std::uint64_t trajectory_index);

}  // namespace sevo
