#include "doctest.h"

#include "sve/errors.hpp"
#include "sve/mesh.hpp"
#include "sve/noise.hpp"
#include "sve/problem.hpp"
#include "sve/rng.hpp"
#include "sve/schemes.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace {

sve::SVEProblem scalar_linear(double alpha, double beta, double A, double a, double B,
                              double b, double x0 = 1.0) {
    return sve::make_linear_problem(alpha, beta, 1.0, 1, 1, {A}, {a}, {B}, {b}, {x0});
}

// Series solution of the deterministic linear problem x = x0 + a*I^(1-alpha)[x]:
// x(t) = x0 * sum_k (a*Gamma(1-alpha))^k * t^(k(1-alpha)) / Gamma(k(1-alpha)+1).
double linear_series(double x0, double a, double alpha, double t) {
    const double g1 = std::tgamma(1.0 - alpha);
    double sum = 0.0, coeff = x0;
    for (int k = 0; k < 200; ++k) {
        const double term = coeff * std::pow(t, k * (1.0 - alpha));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2)
            break;
        coeff *= a * g1 * std::tgamma(k * (1.0 - alpha) + 1.0) /
                 std::tgamma((k + 1) * (1.0 - alpha) + 1.0);
    }
    return sum;
}

double max_node_gap(const sve::Trajectory& a, const sve::Trajectory& b) {
    double worst = 0.0;
    for (std::size_t n = 0; n < a.states.size(); ++n)
        worst = std::max(worst, std::abs(a.states[n] - b.states[n]));
    return worst;
}

} // namespace

TEST_SUITE("schemes") {

TEST_CASE("zero coefficients leave the state untouched") {
    const sve::SVEProblem still = scalar_linear(0.5, 0.2, 0.0, 0.0, 0.0, 0.0);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 32, 2.0);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 5);
    for (const sve::Trajectory& traj :
         {sve::em_solve(still, mesh, noise), sve::fast_em_solve(still, mesh, noise, 1e-6)})
        for (std::size_t n = 0; n <= 32; ++n)
            CHECK(traj.state(n)[0] == 1.0);
    const sve::SVEProblem still0 = scalar_linear(0.5, 0.0, 0.0, 0.0, 0.0, 0.0);
    const sve::Trajectory mil =
        sve::milstein_solve(still0, mesh, noise, sve::MilsteinMode::exact_beta0);
    for (std::size_t n = 0; n <= 32; ++n)
        CHECK(mil.state(n)[0] == 1.0);
}

TEST_CASE("constant drift integrates the kernel exactly") {
    const double alpha = 0.6, c = 0.8;
    const sve::SVEProblem prob = scalar_linear(alpha, 0.0, 0.0, c, 0.0, 0.0);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 64, 1.5);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 3);
    const sve::Trajectory em = sve::em_solve(prob, mesh, noise);
    const sve::Trajectory fast = sve::fast_em_solve(prob, mesh, noise, 1e-8);
    for (std::size_t n = 1; n <= 64; ++n) {
        const double exact = 1.0 + c * std::pow(mesh.node(n), 1.0 - alpha) / (1.0 - alpha);
        CHECK(em.state(n)[0] == doctest::Approx(exact).epsilon(1e-10));
        CHECK(std::abs(fast.state(n)[0] - exact) < 1e-6);
    }
}

TEST_CASE("deterministic linear problem converges to the series solution") {
    const double alpha = 0.25, a = -0.5;
    const sve::SVEProblem prob = scalar_linear(alpha, 0.0, a, 0.0, 0.0, 0.0);
    const double exact = linear_series(1.0, a, alpha, 1.0);
    std::vector<double> errs;
    for (const std::size_t n_steps : {256u, 512u, 1024u}) {
        const sve::GradedMesh mesh = sve::build_mesh(1.0, n_steps, 2.0);
        const sve::BrownianPath noise = sve::sample_path(mesh, 1, 1);
        const sve::Trajectory em = sve::em_solve(prob, mesh, noise);
        errs.push_back(std::abs(em.state(n_steps)[0] - exact));
    }
    CHECK(errs[2] < 1e-3);
    const double order = std::log(errs[0] / errs[2]) / std::log(4.0);
    CHECK(order > 0.85);
}

TEST_CASE("precomputed weights change nothing") {
    const sve::SVEProblem prob = sve::make_example_problem(0.9, 0.1);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 64, 2.0);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 17);
    const sve::KernelWeights weights = sve::build_kernel_weights(mesh, 0.9, 0.1);
    const sve::Trajectory lazy = sve::em_solve(prob, mesh, noise);
    const sve::Trajectory shared = sve::em_solve(prob, mesh, noise, weights);
    CHECK(lazy.states == shared.states);
}

TEST_CASE("fast solver tracks the direct one") {
    const sve::SVEProblem prob = sve::make_example_problem(0.9, 0.1);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 64, 2.0);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 23);
    const sve::Trajectory em = sve::em_solve(prob, mesh, noise);
    const sve::Trajectory fast = sve::fast_em_solve(prob, mesh, noise, 1e-6);
    CHECK(max_node_gap(em, fast) <= 1e-4);
}

TEST_CASE("milstein with constant diffusion reduces to the em update") {
    const sve::SVEProblem prob = scalar_linear(0.7, 0.0, -0.4, 0.1, 0.0, 0.5);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 128, 2.0);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 29);
    const sve::Trajectory em = sve::em_solve(prob, mesh, noise);
    const sve::Trajectory mil =
        sve::milstein_solve(prob, mesh, noise, sve::MilsteinMode::exact_beta0);
    CHECK(max_node_gap(em, mil) <= 1e-12);
}

TEST_CASE("one-step correction has the closed form") {
    // Single step, f = 0, g(x) = x: the first-order term is (dW^2 - h)/2.
    const sve::SVEProblem prob = scalar_linear(0.5, 0.0, 0.0, 0.0, 1.0, 0.0);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 1, 1.0);
    for (std::uint64_t seed = 1; seed <= 32; ++seed) {
        const sve::BrownianPath noise = sve::sample_path(mesh, 1, seed);
        const double dw = noise.increment(1, 0);
        const sve::Trajectory em = sve::em_solve(prob, mesh, noise);
        const sve::Trajectory mil =
            sve::milstein_solve(prob, mesh, noise, sve::MilsteinMode::exact_beta0);
        const double corr = mil.state(1)[0] - em.state(1)[0];
        CHECK(std::abs(corr - 0.5 * (dw * dw - 1.0)) < 1e-14);
    }
}

TEST_CASE("subsampling with factor one is the em update") {
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 48, 2.0);
    for (const double beta : {0.0, 0.2}) {
        const sve::SVEProblem prob = sve::make_example_problem(0.8, beta);
        const sve::BrownianPath noise = sve::sample_path(mesh, 1, 31);
        const sve::Trajectory em = sve::em_solve(prob, mesh, noise);
        const sve::Trajectory sub =
            sve::milstein_solve(prob, mesh, noise, sve::MilsteinMode::subsampled, &noise);
        CHECK(max_node_gap(em, sub) <= 1e-12);
    }
}

TEST_CASE("subsampled refinement narrows toward the exact correction") {
    const sve::SVEProblem prob = sve::make_example_problem(0.9, 0.0);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 16, 1.0);
    double prev_rms = -1.0;
    for (const std::size_t k_inner : {4u, 16u, 64u}) {
        const sve::GradedMesh fine_mesh = sve::build_mesh(1.0, 16 * k_inner, 1.0);
        double sum2 = 0.0;
        const std::size_t n_paths = 64;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const sve::BrownianPath fine =
                sve::sample_path(fine_mesh, 1, sve::derive_path_seed(7777, p));
            const sve::BrownianPath noise = sve::coarsen(fine, 16);
            const sve::Trajectory exact =
                sve::milstein_solve(prob, mesh, noise, sve::MilsteinMode::exact_beta0);
            const sve::Trajectory sub =
                sve::milstein_solve(prob, mesh, noise, sve::MilsteinMode::subsampled, &fine);
            const double diff = exact.state(16)[0] - sub.state(16)[0];
            sum2 += diff * diff;
        }
        const double rms = std::sqrt(sum2 / n_paths);
        if (prev_rms >= 0.0)
            CHECK(rms < prev_rms);
        prev_rms = rms;
    }
}

TEST_CASE("overflow is reported with the offending step") {
    sve::SVEProblem blow;
    blow.name = "cubic";
    blow.alpha = 0.5;
    blow.beta = 0.0;
    blow.horizon = 1.0;
    blow.x0 = {1e200};
    blow.f = [](const double* x, double* out) { out[0] = x[0] * x[0] * x[0]; };
    blow.g = [](const double*, double* out) { out[0] = 0.0; };
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 8, 1.0);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 2);
    CHECK_THROWS_AS(sve::em_solve(blow, mesh, noise), sve::numerical_error);
    try {
        sve::em_solve(blow, mesh, noise);
    } catch (const sve::numerical_error& e) {
        CHECK(e.step() >= 1);
        CHECK(e.step() <= 8);
    }
}

TEST_CASE("mismatched inputs are rejected") {
    const sve::SVEProblem prob = sve::make_example_problem(0.9, 0.1);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 32, 2.0);
    const sve::GradedMesh other = sve::build_mesh(1.0, 16, 2.0);
    const sve::BrownianPath noise = sve::sample_path(other, 1, 1);
    CHECK_THROWS_AS(sve::em_solve(prob, mesh, noise), std::invalid_argument);
    const sve::BrownianPath ok = sve::sample_path(mesh, 1, 1);
    CHECK_THROWS_AS(
        sve::milstein_solve(prob, mesh, ok, sve::MilsteinMode::exact_beta0),
        std::invalid_argument); // beta != 0 has no closed-form correction
    const sve::KernelWeights wrong = sve::build_kernel_weights(mesh, 0.5, 0.1);
    CHECK_THROWS_AS(sve::em_solve(prob, mesh, ok, wrong), std::invalid_argument);
}

} // TEST_SUITE("schemes")
