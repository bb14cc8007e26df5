#include "sve/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace sve {

void validate_problem(const SVEProblem& problem) {
    if (!(problem.alpha > 0.0 && problem.alpha < 1.0))
        throw std::invalid_argument("problem: alpha must lie in (0,1)");
    if (!(problem.beta >= 0.0 && problem.beta < 0.5))
        throw std::invalid_argument("problem: beta must lie in [0, 1/2)");
    if (!(problem.horizon > 0.0))
        throw std::invalid_argument("problem: horizon must be positive");
    if (problem.d < 1 || problem.m < 1)
        throw std::invalid_argument("problem: need d >= 1 and m >= 1");
    if (!problem.x0_sampler && problem.x0.size() != problem.d)
        throw std::invalid_argument("problem: x0 size must equal d");
    if (!problem.f || !problem.g)
        throw std::invalid_argument("problem: drift and diffusion callbacks are required");
}

std::vector<double> initial_state(const SVEProblem& problem, std::uint64_t path_seed) {
    if (problem.x0_sampler) {
        std::vector<double> x0 = problem.x0_sampler(path_seed);
        if (x0.size() != problem.d)
            throw std::invalid_argument("problem: sampled x0 size must equal d");
        return x0;
    }
    return problem.x0;
}

SVEProblem make_example_problem(double alpha, double beta) {
    SVEProblem p;
    p.name = "trig";
    p.alpha = alpha;
    p.beta = beta;
    p.horizon = 1.0;
    p.d = 1;
    p.m = 1;
    p.x0 = {1.0};
    const double scale = 1.0 - alpha;
    p.f = [scale](const double* x, double* out) { out[0] = -scale * std::sin(0.5 * x[0]); };
    p.g = [](const double* x, double* out) { out[0] = std::cos(0.5 * x[0]); };
    p.g_prime = [](const double* x, double* out) { out[0] = -0.5 * std::sin(0.5 * x[0]); };
    validate_problem(p);
    return p;
}

SVEProblem make_linear_problem(double alpha, double beta, double horizon,
                               std::size_t d, std::size_t m,
                               std::vector<double> A, std::vector<double> a,
                               std::vector<double> B, std::vector<double> b,
                               std::vector<double> x0) {
    if (A.size() != d * d || a.size() != d || B.size() != d * m * d || b.size() != d * m ||
        x0.size() != d)
        throw std::invalid_argument("make_linear_problem: coefficient sizes do not match d, m");
    SVEProblem p;
    p.name = "linear";
    p.alpha = alpha;
    p.beta = beta;
    p.horizon = horizon;
    p.d = d;
    p.m = m;
    p.x0 = std::move(x0);
    p.f = [d, A = std::move(A), a = std::move(a)](const double* x, double* out) {
        for (std::size_t k = 0; k < d; ++k) {
            double s = a[k];
            for (std::size_t l = 0; l < d; ++l)
                s += A[k * d + l] * x[l];
            out[k] = s;
        }
    };
    p.g = [d, m, B, b](const double* x, double* out) {
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < m; ++j) {
                double s = b[k * m + j];
                for (std::size_t l = 0; l < d; ++l)
                    s += B[(k * m + j) * d + l] * x[l];
                out[k * m + j] = s;
            }
    };
    p.g_prime = [d, m, B = std::move(B)](const double*, double* out) {
        for (std::size_t i = 0; i < d * m * d; ++i)
            out[i] = B[i];
    };
    validate_problem(p);
    return p;
}

} // namespace sve
