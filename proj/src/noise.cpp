#include "sevo/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "sevo/rng.hpp"

namespace sevo {

namespace {
// Key salts keep bridge draws, level-0 draws and direct draws in
// disjoint streams.
constexpr std::uint64_t kSaltRoot = 0x726f6f74ULL;
constexpr std::uint64_t kSaltBridge = 0x6272696467ULL;
constexpr std::uint64_t kSaltDirect = 0x64697265ULL;
}  // namespace

WienerTree sample_path(int r, double T, int max_level, std::uint64_t master_seed,
                       std::uint64_t trajectory_index) {
    if (max_level < 0 || max_level > 30)
        throw std::invalid_argument("sample_path: max_level must be in [0, 30]");
    if (r < 1) throw std::invalid_argument("sample_path: r must be >= 1");

    WienerTree tree;
    tree.r = r;
    tree.T = T;
    tree.max_level = max_level;
    tree.master_seed = master_seed;
    tree.trajectory_index = trajectory_index;
    tree.levels.resize(max_level + 1);

    tree.levels[0].resize(r, 1);
    for (int j = 0; j < r; ++j)
        tree.levels[0](j, 0) =
            std::sqrt(T) * rng::normal({master_seed, trajectory_index, kSaltRoot, (std::uint64_t)j});

    for (int L = 1; L <= max_level; ++L) {
        const int parents = 1 << (L - 1);
        const double len = T / parents;       // parent interval length
        const double sd = std::sqrt(len / 4.0);  // bridge midpoint sd
        tree.levels[L].resize(r, 2 * parents);
        for (int k = 0; k < parents; ++k)
            for (int j = 0; j < r; ++j) {
                double d = tree.levels[L - 1](j, k);
                double xi = sd * rng::normal({master_seed, trajectory_index, kSaltBridge,
                                              (std::uint64_t)L, (std::uint64_t)k, (std::uint64_t)j});
                tree.levels[L](j, 2 * k) = 0.5 * d + xi;
                tree.levels[L](j, 2 * k + 1) = 0.5 * d - xi;
            }
    }
    // Rebuild coarser levels from the finest so that each parent is the
    // literal floating-point sum of its two children; every coarsening
    // then telescopes bitwise, not just up to rounding.
    for (int L = max_level; L >= 1; --L) {
        const int half = tree.levels[L].cols() / 2;
        for (int k = 0; k < half; ++k)
            for (int j = 0; j < r; ++j)
                tree.levels[L - 1](j, k) = tree.levels[L](j, 2 * k) + tree.levels[L](j, 2 * k + 1);
    }
    return tree;
}

Mat increments(const WienerTree& tree, int m) {
    if (m < 1 || (m & (m - 1)) != 0)
        throw std::invalid_argument("increments: m must be a dyadic power of two");
    int level = 0;
    while ((1 << level) < m) ++level;
    if (level > tree.max_level)
        throw std::invalid_argument("increments: m exceeds the tree's finest level");
    return tree.levels[level];
}

Mat direct_increments(int r, double T, int m, std::uint64_t master_seed,
                      std::uint64_t trajectory_index) {
    if (m < 1) throw std::invalid_argument("direct_increments: m must be >= 1");
    Mat dw(r, m);
    const double sd = std::sqrt(T / m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < r; ++j)
            dw(j, i) = sd * rng::normal({master_seed, trajectory_index, kSaltDirect,
                                         (std::uint64_t)i, (std::uint64_t)j});
    return dw;
}

}  // namespace sevo
