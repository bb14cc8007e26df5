#pragma once

#include "sve/mesh.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sve {

// Brownian increments over a graded grid: increments[(n-1)*dim + j] holds
// W_j(t_n) - W_j(t_{n-1}) for 1 <= n <= N, 0 <= j < dim.
struct BrownianPath {
    GradedMesh mesh;
    std::size_t dim = 1; // m, number of driving coordinates
    std::uint64_t seed = 0;
    std::vector<double> increments; // N * dim values

    double increment(std::size_t n, std::size_t j) const {
        return increments[(n - 1) * dim + j];
    }
};

// Draws every increment as sqrt(h_n) * z(seed, n, j) with a counter-based
// normal generator, so the result is independent of evaluation order.
BrownianPath sample_path(const GradedMesh& mesh, std::size_t dim, std::uint64_t seed);

// Block sums of fine increments onto the coarser grid with
// coarse_steps | fine steps; summation runs left to right inside each block,
// so the result is a pure function of the fine increments. Coarsening in two
// stages regroups the additions and may differ from the direct sum by
// rounding.
BrownianPath coarsen(const BrownianPath& fine, std::size_t coarse_steps);

} // namespace sve
