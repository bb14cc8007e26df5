#pragma once

#include <cstddef>
#include <vector>

namespace sve {

// Time grid t_n = T * (n/N)^r on [0, T]. r = 1 is the uniform grid; r > 1
// clusters nodes near t = 0 where the kernel singularity concentrates the
// solution's roughness. Immutable after construction.
struct GradedMesh {
    double horizon = 0.0;   // T
    std::size_t steps = 0;  // N
    double grading = 1.0;   // r
    std::vector<double> t;  // nodes t[0..N], t[0] = 0, t[N] = T

    double node(std::size_t n) const { return t[n]; }
    double step(std::size_t n) const { return t[n] - t[n - 1]; } // h_n, 1 <= n <= N
};

// Builds the graded grid. Nodes are computed independently per index (no
// cumulative summation), so meshes with step counts N and M*N share the
// coarse nodes bit-for-bit. Throws std::invalid_argument on bad parameters.
GradedMesh build_mesh(double horizon, std::size_t steps, double grading);

// Exact panel integral of the singular drift kernel,
//   w_{n,i} = integral over [t_i, t_{i+1}] of (t_n - s)^(-alpha) ds
//           = ((t_n - t_i)^(1-alpha) - (t_n - t_{i+1})^(1-alpha)) / (1-alpha),
// with a midpoint-expansion fallback when the two powers nearly cancel.
// Requires i < n <= N and alpha in (0,1).
double drift_weight(const GradedMesh& mesh, std::size_t n, std::size_t i, double alpha);

// Exact panel integral of an exponential kernel,
//   integral over [t_a, t_b] of exp(-tau * (t_n - s)) ds,
// valid for any 0 <= t_a <= t_b <= t_n and tau >= 0 (tau = 0 gives t_b - t_a).
double exp_drift_weight(double tau, double t_n, double t_a, double t_b);

// Frozen diffusion coefficient (t_n - t_i)^(-beta); exactly 1 when beta = 0.
// Requires i < n <= N and beta in [0, 1/2).
double diffusion_coeff(const GradedMesh& mesh, std::size_t n, std::size_t i, double beta);

} // namespace sve
