#include "sve/noise.hpp"

#include "sve/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sve {

BrownianPath sample_path(const GradedMesh& mesh, std::size_t dim, std::uint64_t seed) {
    if (dim < 1)
        throw std::invalid_argument("sample_path: need at least one coordinate");
    BrownianPath path;
    path.mesh = mesh;
    path.dim = dim;
    path.seed = seed;
    path.increments.resize(mesh.steps * dim);
    for (std::size_t n = 1; n <= mesh.steps; ++n) {
        const double sqrt_h = std::sqrt(mesh.step(n));
        for (std::size_t j = 0; j < dim; ++j)
            path.increments[(n - 1) * dim + j] = sqrt_h * gaussian_at(seed, n, j);
    }
    return path;
}

BrownianPath coarsen(const BrownianPath& fine, std::size_t coarse_steps) {
    const std::size_t n_fine = fine.mesh.steps;
    if (coarse_steps < 1 || n_fine % coarse_steps != 0)
        throw std::invalid_argument("coarsen: coarse step count must divide the fine one");
    const std::size_t block = n_fine / coarse_steps;

    BrownianPath coarse;
    coarse.mesh = build_mesh(fine.mesh.horizon, coarse_steps, fine.mesh.grading);
    coarse.dim = fine.dim;
    coarse.seed = fine.seed;
    coarse.increments.assign(coarse_steps * fine.dim, 0.0);
    for (std::size_t c = 0; c < coarse_steps; ++c)
        for (std::size_t b = 0; b < block; ++b)
            for (std::size_t j = 0; j < fine.dim; ++j)
                coarse.increments[c * fine.dim + j] +=
                    fine.increments[(c * block + b) * fine.dim + j];
    return coarse;
}

} // namespace sve
