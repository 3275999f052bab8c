#pragma once

// Shared helpers for randomized tests. All generators take an explicit
// engine so every test run is reproducible.

#include "polyzono/pz.hpp"

#include <random>

namespace polyzono::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline Vec random_vec(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = uniform(rng, lo, hi);
    }
    return v;
}

inline Mat random_mat(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo,
                      double hi) {
    Mat M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            M(i, j) = uniform(rng, lo, hi);
        }
    }
    return M;
}

inline PolyZonotope random_pz(std::mt19937_64& rng, Eigen::Index n, Eigen::Index h,
                              Eigen::Index q, Eigen::Index p, double scale = 2.0,
                              std::int64_t max_exp = 3) {
    const Vec c = random_vec(rng, n, -scale, scale);
    const Mat G = random_mat(rng, n, h, -scale, scale);
    const Mat GI = random_mat(rng, n, q, -scale, scale);
    ExpMat E(p, h);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < h; ++j) {
            E(i, j) = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_exp + 1));
        }
    }
    return PolyZonotope(c, G, GI, E);
}

inline FactorAssignment random_fa(std::mt19937_64& rng, const PolyZonotope& pz) {
    FactorAssignment fa;
    fa.alpha = random_vec(rng, pz.num_factors(), -1.0, 1.0);
    fa.beta = random_vec(rng, pz.num_independent(), -1.0, 1.0);
    return fa;
}

/// The polynomial zonotope of the worked two-dimensional example:
/// c = [4,4], G = [[2,1,2],[0,2,2]], GI = [[1],[0]], E = [[1,0,3],[0,1,1]].
inline PolyZonotope example_set() {
    Vec c(2);
    c << 4.0, 4.0;
    Mat G(2, 3);
    G << 2.0, 1.0, 2.0, 0.0, 2.0, 2.0;
    Mat GI(2, 1);
    GI << 1.0, 0.0;
    ExpMat E(2, 3);
    E << 1, 0, 3, 0, 1, 1;
    return PolyZonotope(c, G, GI, E);
}

}  // namespace polyzono::testing
