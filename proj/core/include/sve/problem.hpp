#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sve {

// Coefficient callbacks write into caller-provided storage:
//   drift:        out[k]           = f_k(x),         k < d
//   diffusion:    out[k*m + j]     = g_kj(x),        k < d, j < m
//   diffusion_jacobian: out[(k*m + j)*d + l] = d g_kj / d x_l
using CoeffFn = std::function<void(const double* x, double* out)>;

// Optional random initial state, keyed by the per-path seed.
using InitSampler = std::function<std::vector<double>(std::uint64_t path_seed)>;

// The singular Volterra problem
//   x(t) = x0 + int_0^t (t-s)^(-alpha) f(x(s)) ds
//             + int_0^t (t-s)^(-beta)  g(x(s)) dW(s),
// with alpha in (0,1), beta in [0, 1/2), d state components and m driving
// Brownian coordinates.
struct SVEProblem {
    std::string name;
    double alpha = 0.5;
    double beta = 0.0;
    double horizon = 1.0;
    std::size_t d = 1;
    std::size_t m = 1;
    std::vector<double> x0;
    InitSampler x0_sampler; // optional; takes precedence over x0
    CoeffFn f;
    CoeffFn g;
    CoeffFn g_prime; // optional; required by the Milstein scheme
};

// Throws std::invalid_argument when fields are inconsistent.
void validate_problem(const SVEProblem& problem);

// Resolves the initial state for one path.
std::vector<double> initial_state(const SVEProblem& problem, std::uint64_t path_seed);

// Scalar benchmark problem: f(x) = -(1-alpha) sin(x/2), g(x) = cos(x/2),
// x0 = 1, T = 1. Globally Lipschitz with bounded derivatives, so every
// scheme's convergence assumptions hold.
SVEProblem make_example_problem(double alpha, double beta);

// Linear coefficients f(x) = A x + a, g_col_j(x) = B_j x + b_j.
// A is d*d row-major, B is d*m*d with B[(k*m+j)*d + l], b is d*m row-major.
SVEProblem make_linear_problem(double alpha, double beta, double horizon,
                               std::size_t d, std::size_t m,
                               std::vector<double> A, std::vector<double> a,
                               std::vector<double> B, std::vector<double> b,
                               std::vector<double> x0);

} // namespace sve
