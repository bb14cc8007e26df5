#pragma once

#include "sve/mesh.hpp"
#include "sve/noise.hpp"
#include "sve/problem.hpp"
#include "sve/quadrature.hpp"
#include "sve/soe.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace sve {

struct Trajectory {
    GradedMesh mesh;
    std::size_t dim = 1;        // d
    std::vector<double> states; // (N+1) * d row-major; states[0..d) is x0
    std::string scheme;
    double wall_seconds = 0.0;

    const double* state(std::size_t n) const { return states.data() + n * dim; }
};

// Path-independent kernel weight tables on a fixed mesh, shared by every
// sample: drift holds the exact panel integrals w_{n,i}, diffusion the
// frozen coefficients (t_n - t_i)^(-beta) (left empty when beta = 0).
// Row n has n entries starting at offset n(n-1)/2.
struct KernelWeights {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> drift;
    std::vector<double> diffusion;

    static std::size_t row(std::size_t n) { return n * (n - 1) / 2; }
};

KernelWeights build_kernel_weights(const GradedMesh& mesh, double alpha, double beta,
                                   bool want_diffusion = true);

// One-step-recursion-free scheme: every step sums the full weighted history,
//   X_n = x0 + sum_{i<n} w_{n,i} f(X_i)
//            + sum_{i<n} (t_n - t_i)^(-beta) g(X_i) dW_{i+1},
// at Theta(N^2) cost per path. Throws sve::numerical_error (with the step
// index) if a state leaves the finite range.
Trajectory em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                    const BrownianPath& noise);
Trajectory em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                    const BrownianPath& noise, const KernelWeights& weights);

// Same update with both kernels replaced by certified exponential sums, so
// the history collapses into K recursively updated auxiliary states and the
// cost drops to Theta(N * K). When the compressions are not supplied they
// are built with delta = h_1 and tolerance eps. beta = 0 needs no
// compression (the diffusion kernel is constant) and is handled exactly.
Trajectory fast_em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                         const BrownianPath& noise, double eps);
Trajectory fast_em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                         const BrownianPath& noise, double eps,
                         const SOEApprox* alpha_kernel, const SOEApprox* beta_kernel);

enum class MilsteinMode {
    exact_beta0, // closed-form iterated integrals; requires beta = 0, m = 1
    subsampled   // inner integrals resolved on a finer grid; reference oracle
};

// First-order scheme adding the iterated stochastic correction terms.
//
// exact_beta0: with a constant diffusion kernel the cross-panel correction
// vanishes and the diagonal one is g'(Y_i) g(Y_i) ((dW)^2 - h)/2, so the
// scheme stays Theta(N^2) with no auxiliary grid.
//
// subsampled: evaluates every stochastic integral of the scheme as a
// left-point Ito sum over the sub-grid of `fine` (k_inner fine steps per
// coarse panel; fine must refine `mesh` and `noise` must be its exact
// coarsening). Used as a slow oracle, not a production scheme; the
// cross-panel history makes it Theta(N^2 * k_inner^2) when beta > 0.
Trajectory milstein_solve(const SVEProblem& problem, const GradedMesh& mesh,
                          const BrownianPath& noise, MilsteinMode mode,
                          const BrownianPath* fine = nullptr);
Trajectory milstein_solve(const SVEProblem& problem, const GradedMesh& mesh,
                          const BrownianPath& noise, MilsteinMode mode,
                          const BrownianPath* fine, const KernelWeights& weights);

} // namespace sve
