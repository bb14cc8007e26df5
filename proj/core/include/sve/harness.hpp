#pragma once

#include "sve/problem.hpp"
#include "sve/schemes.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sve {

enum class Scheme { em, fast_em, milstein };

std::string scheme_name(Scheme s);

// One strong-convergence study: a batch of coupled paths solved at every
// level against a same-family reference on the N_ref grid.
struct ExperimentConfig {
    Scheme scheme = Scheme::em;
    SVEProblem problem;
    double grading = 1.0;              // r
    std::vector<std::size_t> levels;   // step counts, each dividing n_ref
    std::size_t n_ref = 1u << 12;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    double soe_eps = 1e-6;             // fast-em kernel tolerance
    double p_moment = 2.0;             // L^p error exponent
    int threads = 0;                   // 0 = hardware concurrency
};

struct LevelResult {
    std::size_t n = 0;
    double err_end = 0.0;  // ||x_ref(T) - Z_N||_{L^p}
    double err_max = 0.0;  // sup over coarse nodes of the per-node L^p norm
    double wall_seconds = 0.0;
};

// Power-law rates implied by the analysis for this scheme, grading and
// exponents; the fitted orders should approach them.
struct TheoreticalOrders {
    double rho = 0.0;       // min(1-alpha, 1/2-beta), global Holder exponent
    double sigma = 0.0;     // min(3/2-alpha-beta, 1), interior regularity gain
    double order_end = 0.0;
    double order_max = 0.0;
    double r_em = 1.0;      // grading restoring the uniform EM rate
    double r_milstein = 1.0;
};

TheoreticalOrders theoretical_orders(Scheme scheme, double alpha, double beta, double grading);

struct ErrorReport {
    Scheme scheme = Scheme::em;
    double alpha = 0.0, beta = 0.0, grading = 1.0;
    std::size_t n_ref = 0, paths = 0;
    std::uint64_t seed = 0;
    double p_moment = 2.0;
    std::vector<LevelResult> levels;
    double order_end = 0.0; // least-squares fits over the levels
    double order_max = 0.0;
    TheoreticalOrders theory;
    std::size_t excluded_paths = 0;
    double ref_wall_seconds = 0.0;
};

// Couples every level to the reference through block sums of the same fine
// increments, accumulates per-node p-th moments in fixed chunk order (so
// results are reproducible for a given seed regardless of thread count),
// and fits the observed orders. Paths whose solve overflows are dropped as
// long as they stay within 0.1% of the batch; beyond that the run aborts
// with sve::numerical_error.
ErrorReport run_convergence(const ExperimentConfig& config);

// Minus the least-squares slope of log(err) against log(N).
double fit_order(const std::vector<std::size_t>& levels, const std::vector<double>& errors);

// CSV with one row per level and fitted/theoretical orders as trailing
// comment lines.
void write_convergence_csv(const ErrorReport& report, std::ostream& out);

struct BenchConfig {
    SVEProblem problem;
    double grading = 2.0;
    std::vector<std::size_t> levels;
    std::size_t repetitions = 5;
    std::uint64_t seed = 1;
    double soe_eps = 1e-6;
};

struct BenchLevel {
    std::size_t n = 0;
    double em_seconds = 0.0;       // median over repetitions, warmup excluded
    double fast_em_seconds = 0.0;
    double soe_build_seconds = 0.0; // one-off setup, not part of the medians
    std::size_t soe_terms = 0;
};

struct BenchReport {
    std::vector<BenchLevel> levels;
    double em_slope = 0.0;      // log-log growth of time in N
    double fast_em_slope = 0.0;
};

// Single-thread wall-clock scaling of one-path solves.
BenchReport bench_cpu(const BenchConfig& config);

void write_bench_csv(const BenchReport& report, std::ostream& out);

// L^2 modulus probe of the time regularity of the scheme's own solution.
struct RegularityConfig {
    SVEProblem problem;
    double grading = 3.0;
    std::size_t n_ref = 1u << 12;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    int threads = 0;
    // Node-index pairs (j_s, j_t), j_s < j_t.
    std::vector<std::pair<std::size_t, std::size_t>> interior_pairs;
    std::vector<std::pair<std::size_t, std::size_t>> origin_pairs;
};

struct RegularityPoint {
    std::size_t j_s = 0, j_t = 0;
    double t_s = 0.0, t_t = 0.0;
    double modulus = 0.0; // ||X(t_t) - X(t_s)||_{L^2}
};

struct RegularityReport {
    std::vector<RegularityPoint> interior;
    std::vector<RegularityPoint> origin;
    double interior_exponent = 0.0; // slope of log modulus vs log(t_t - t_s)
    double origin_exponent = 0.0;   // slope of log modulus vs log(t_s), t_t ~ 2 t_s
};

// Fills empty pair lists with defaults: interior increments anchored near
// T/2 spanning dyadic gaps, origin pairs (s, ~2s) walking into the graded
// region where the drift singularity dominates.
void default_regularity_pairs(const GradedMesh& mesh, RegularityConfig& config);

RegularityReport regularity_probe(const RegularityConfig& config);

void write_regularity_csv(const RegularityReport& report, std::ostream& out);

} // namespace sve
