#include "sve/schemes.hpp"

#include "sve/errors.hpp"
#include "sve/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sve {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

void check_finite(const double* x, std::size_t d, std::size_t step, const char* scheme) {
    for (std::size_t k = 0; k < d; ++k)
        if (!std::isfinite(x[k]))
            throw numerical_error(std::string(scheme) + ": non-finite state", step);
}

// out[k] = sum_j G[k*m+j] * dw[j]
void apply_diffusion(const double* G, const double* dw, std::size_t d, std::size_t m,
                     double* out) {
    for (std::size_t k = 0; k < d; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            s += G[k * m + j] * dw[j];
        out[k] = s;
    }
}

// acc[k] += sum_{i<n} w[i] * v[i*d+k], with a tight path for scalar state.
void accumulate_weighted(const double* w, const double* v, std::size_t n, std::size_t d,
                         double* acc) {
    if (d == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += w[i] * v[i];
        acc[0] += s;
        return;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            acc[k] += w[i] * v[i * d + k];
}

void require_noise_match(const SVEProblem& problem, const GradedMesh& mesh,
                         const BrownianPath& noise, const char* what) {
    if (noise.mesh.steps != mesh.steps || noise.mesh.horizon != mesh.horizon ||
        noise.mesh.grading != mesh.grading)
        throw std::invalid_argument(std::string(what) + ": noise grid does not match the mesh");
    if (noise.dim != problem.m)
        throw std::invalid_argument(std::string(what) + ": noise dimension does not match m");
}

} // namespace

KernelWeights build_kernel_weights(const GradedMesh& mesh, double alpha, double beta,
                                   bool want_diffusion) {
    KernelWeights kw;
    kw.alpha = alpha;
    kw.beta = beta;
    const std::size_t n_steps = mesh.steps;
    kw.drift.resize(KernelWeights::row(n_steps) + n_steps);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        double* row = kw.drift.data() + KernelWeights::row(n);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = drift_weight(mesh, n, i, alpha);
    }
    if (want_diffusion && beta != 0.0) {
        kw.diffusion.resize(kw.drift.size());
        for (std::size_t n = 1; n <= n_steps; ++n) {
            double* row = kw.diffusion.data() + KernelWeights::row(n);
            for (std::size_t i = 0; i < n; ++i)
                row[i] = diffusion_coeff(mesh, n, i, beta);
        }
    }
    return kw;
}

Trajectory em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                    const BrownianPath& noise) {
    return em_solve(problem, mesh, noise,
                    build_kernel_weights(mesh, problem.alpha, problem.beta));
}

Trajectory em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                    const BrownianPath& noise, const KernelWeights& weights) {
    validate_problem(problem);
    require_noise_match(problem, mesh, noise, "em_solve");
    if (weights.alpha != problem.alpha || weights.beta != problem.beta)
        throw std::invalid_argument("em_solve: weight table built for different exponents");
    if (problem.beta != 0.0 && weights.diffusion.empty())
        throw std::invalid_argument("em_solve: weight table lacks diffusion coefficients");

    const auto start = clock_type::now();
    const std::size_t n_steps = mesh.steps;
    const std::size_t d = problem.d;
    const std::size_t m = problem.m;

    Trajectory traj;
    traj.mesh = mesh;
    traj.dim = d;
    traj.scheme = "em";
    traj.states.assign((n_steps + 1) * d, 0.0);

    const std::vector<double> x0 = initial_state(problem, noise.seed);
    std::memcpy(traj.states.data(), x0.data(), d * sizeof(double));
    check_finite(traj.states.data(), d, 0, "em_solve");

    std::vector<double> fx(n_steps * d);       // f at visited nodes
    std::vector<double> gdw(n_steps * d);      // g at node i applied to dW_{i+1}
    std::vector<double> gtmp(d * m);
    std::vector<double> rundiff(d, 0.0);       // prefix diffusion sum when beta = 0

    for (std::size_t n = 1; n <= n_steps; ++n) {
        const double* prev = traj.states.data() + (n - 1) * d;
        problem.f(prev, fx.data() + (n - 1) * d);
        problem.g(prev, gtmp.data());
        apply_diffusion(gtmp.data(), &noise.increments[(n - 1) * m], d, m,
                        gdw.data() + (n - 1) * d);

        double* out = traj.states.data() + n * d;
        std::memcpy(out, x0.data(), d * sizeof(double));
        accumulate_weighted(weights.drift.data() + KernelWeights::row(n), fx.data(), n, d, out);
        if (problem.beta == 0.0) {
            for (std::size_t k = 0; k < d; ++k) {
                rundiff[k] += gdw[(n - 1) * d + k];
                out[k] += rundiff[k];
            }
        } else {
            accumulate_weighted(weights.diffusion.data() + KernelWeights::row(n), gdw.data(), n,
                                d, out);
        }
        check_finite(out, d, n, "em_solve");
    }
    traj.wall_seconds = seconds_since(start);
    return traj;
}

Trajectory fast_em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                         const BrownianPath& noise, double eps) {
    return fast_em_solve(problem, mesh, noise, eps, nullptr, nullptr);
}

Trajectory fast_em_solve(const SVEProblem& problem, const GradedMesh& mesh,
                         const BrownianPath& noise, double eps,
                         const SOEApprox* alpha_kernel, const SOEApprox* beta_kernel) {
    validate_problem(problem);
    require_noise_match(problem, mesh, noise, "fast_em_solve");

    const double h1 = mesh.step(1);
    SOEApprox alpha_local, beta_local;
    if (!alpha_kernel) {
        alpha_local = build_soe(problem.alpha, h1, mesh.horizon, eps);
        alpha_kernel = &alpha_local;
    }
    if (!beta_kernel && problem.beta != 0.0) {
        beta_local = build_soe(problem.beta, h1, mesh.horizon, eps);
        beta_kernel = &beta_local;
    }
    if (alpha_kernel->gamma != problem.alpha || alpha_kernel->delta > h1 * (1.0 + 1e-12) ||
        alpha_kernel->horizon < mesh.horizon * (1.0 - 1e-12))
        throw std::invalid_argument("fast_em_solve: drift compression does not cover this mesh");
    if (problem.beta != 0.0 &&
        (beta_kernel->gamma != problem.beta || beta_kernel->delta > h1 * (1.0 + 1e-12) ||
         beta_kernel->horizon < mesh.horizon * (1.0 - 1e-12)))
        throw std::invalid_argument("fast_em_solve: diffusion compression does not cover this mesh");

    const auto start = clock_type::now();
    const std::size_t n_steps = mesh.steps;
    const std::size_t d = problem.d;
    const std::size_t m = problem.m;

    // beta = 0 keeps the constant kernel exact: one term with tau = 0, w = 1.
    static const double unit_tau = 0.0, unit_omega = 1.0;
    const double* tau_b = problem.beta != 0.0 ? beta_kernel->tau.data() : &unit_tau;
    const double* omega_b = problem.beta != 0.0 ? beta_kernel->omega.data() : &unit_omega;
    const std::size_t kb = problem.beta != 0.0 ? beta_kernel->size() : 1;
    const double* tau_a = alpha_kernel->tau.data();
    const double* omega_a = alpha_kernel->omega.data();
    const std::size_t ka = alpha_kernel->size();

    Trajectory traj;
    traj.mesh = mesh;
    traj.dim = d;
    traj.scheme = "fast-em";
    traj.states.assign((n_steps + 1) * d, 0.0);

    const std::vector<double> x0 = initial_state(problem, noise.seed);
    std::memcpy(traj.states.data(), x0.data(), d * sizeof(double));
    check_finite(traj.states.data(), d, 0, "fast_em_solve");

    std::vector<double> za(ka * d, 0.0), zb(kb * d, 0.0); // history states
    std::vector<double> prev_f(d), cur_f(d);              // f(X_{n-2}), f(X_{n-1})
    std::vector<double> prev_gdw(d), cur_gdw(d);          // g(X_{n-2}) dW_{n-1}, g(X_{n-1}) dW_n
    std::vector<double> gtmp(d * m);

    // First step is the plain one-panel update.
    {
        const double* x = traj.states.data();
        problem.f(x, cur_f.data());
        problem.g(x, gtmp.data());
        apply_diffusion(gtmp.data(), noise.increments.data(), d, m, cur_gdw.data());
        const double w10 = drift_weight(mesh, 1, 0, problem.alpha);
        const double c10 = diffusion_coeff(mesh, 1, 0, problem.beta);
        double* out = traj.states.data() + d;
        for (std::size_t k = 0; k < d; ++k)
            out[k] = x0[k] + w10 * cur_f[k] + c10 * cur_gdw[k];
        check_finite(out, d, 1, "fast_em_solve");
    }

    for (std::size_t n = 2; n <= n_steps; ++n) {
        const double hn = mesh.step(n);
        const double hp = mesh.step(n - 1);
        prev_f.swap(cur_f);
        prev_gdw.swap(cur_gdw);

        // Absorb the panel [t_{n-2}, t_{n-1}] into each auxiliary state.
        for (std::size_t k = 0; k < ka; ++k) {
            const double decay = std::exp(-tau_a[k] * hn);
            const double w = tau_a[k] == 0.0
                                 ? hp
                                 : decay * (-std::expm1(-tau_a[k] * hp)) / tau_a[k];
            double* z = za.data() + k * d;
            for (std::size_t c = 0; c < d; ++c)
                z[c] = decay * z[c] + w * prev_f[c];
        }
        for (std::size_t k = 0; k < kb; ++k) {
            const double decay = std::exp(-tau_b[k] * hn);
            const double reach = decay * std::exp(-tau_b[k] * hp);
            double* z = zb.data() + k * d;
            for (std::size_t c = 0; c < d; ++c)
                z[c] = decay * z[c] + reach * prev_gdw[c];
        }

        const double* prev = traj.states.data() + (n - 1) * d;
        problem.f(prev, cur_f.data());
        problem.g(prev, gtmp.data());
        apply_diffusion(gtmp.data(), &noise.increments[(n - 1) * m], d, m, cur_gdw.data());

        const double w_local = drift_weight(mesh, n, n - 1, problem.alpha);
        const double c_local = problem.beta == 0.0 ? 1.0 : std::pow(hn, -problem.beta);

        double* out = traj.states.data() + n * d;
        for (std::size_t c = 0; c < d; ++c)
            out[c] = x0[c] + w_local * cur_f[c] + c_local * cur_gdw[c];
        for (std::size_t k = 0; k < ka; ++k) {
            const double* z = za.data() + k * d;
            for (std::size_t c = 0; c < d; ++c)
                out[c] += omega_a[k] * z[c];
        }
        for (std::size_t k = 0; k < kb; ++k) {
            const double* z = zb.data() + k * d;
            for (std::size_t c = 0; c < d; ++c)
                out[c] += omega_b[k] * z[c];
        }
        check_finite(out, d, n, "fast_em_solve");
    }
    traj.wall_seconds = seconds_since(start);
    return traj;
}

namespace {

// Diagonal iterated-integral sums on the sub-grid of one coarse panel,
//   inner4[q] = sum_{p < q, p in panel} (s_q - u_p)^(-beta) dw_p,
// reducing to W(s_q) - W(t_i) when beta = 0.
void panel_inner_sums(const BrownianPath& fine, std::size_t first, std::size_t count,
                      double beta, std::vector<double>& inner) {
    inner.assign(count, 0.0);
    if (beta == 0.0) {
        double acc = 0.0;
        for (std::size_t q = 1; q < count; ++q) {
            acc += fine.increment(first + q, 0);
            inner[q] = acc;
        }
        return;
    }
    const auto& s = fine.mesh.t;
    for (std::size_t q = 1; q < count; ++q) {
        double acc = 0.0;
        for (std::size_t p = 0; p < q; ++p)
            acc += std::pow(s[first + q] - s[first + p], -beta) *
                   fine.increment(first + p + 1, 0);
        inner[q] = acc;
    }
}

} // namespace

Trajectory milstein_solve(const SVEProblem& problem, const GradedMesh& mesh,
                          const BrownianPath& noise, MilsteinMode mode,
                          const BrownianPath* fine) {
    // Both modes evaluate the diffusion kernels on their own grids, so only
    // the drift table is shared.
    return milstein_solve(problem, mesh, noise, mode, fine,
                          build_kernel_weights(mesh, problem.alpha, problem.beta, false));
}

Trajectory milstein_solve(const SVEProblem& problem, const GradedMesh& mesh,
                          const BrownianPath& noise, MilsteinMode mode,
                          const BrownianPath* fine, const KernelWeights& weights) {
    validate_problem(problem);
    require_noise_match(problem, mesh, noise, "milstein_solve");
    if (problem.m != 1)
        throw std::invalid_argument("milstein_solve: only scalar noise (m = 1) is supported");
    if (!problem.g_prime)
        throw std::invalid_argument("milstein_solve: g_prime callback is required");
    if (weights.alpha != problem.alpha)
        throw std::invalid_argument("milstein_solve: weight table built for different alpha");

    const auto start = clock_type::now();
    const std::size_t n_steps = mesh.steps;
    const std::size_t d = problem.d;

    Trajectory traj;
    traj.mesh = mesh;
    traj.dim = d;
    traj.scheme = "milstein";
    traj.states.assign((n_steps + 1) * d, 0.0);
    const std::vector<double> x0 = initial_state(problem, noise.seed);
    std::memcpy(traj.states.data(), x0.data(), d * sizeof(double));
    check_finite(traj.states.data(), d, 0, "milstein_solve");

    if (mode == MilsteinMode::exact_beta0) {
        if (problem.beta != 0.0)
            throw std::invalid_argument("milstein_solve: exact mode requires beta = 0");

        std::vector<double> fx(n_steps * d);
        std::vector<double> gv(d), jac(d * d), corr(d);
        std::vector<double> sum_diff(d, 0.0), sum_corr(d, 0.0);

        for (std::size_t n = 1; n <= n_steps; ++n) {
            const double* prev = traj.states.data() + (n - 1) * d;
            problem.f(prev, fx.data() + (n - 1) * d);
            problem.g(prev, gv.data());
            problem.g_prime(prev, jac.data());
            const double dw = noise.increment(n, 0);
            const double iterated = 0.5 * (dw * dw - mesh.step(n));
            for (std::size_t k = 0; k < d; ++k) {
                double gpg = 0.0;
                for (std::size_t l = 0; l < d; ++l)
                    gpg += jac[k * d + l] * gv[l];
                corr[k] = gpg;
            }
            double* out = traj.states.data() + n * d;
            std::memcpy(out, x0.data(), d * sizeof(double));
            accumulate_weighted(weights.drift.data() + KernelWeights::row(n), fx.data(), n, d,
                                out);
            for (std::size_t k = 0; k < d; ++k) {
                sum_diff[k] += gv[k] * dw;
                sum_corr[k] += corr[k] * iterated;
                out[k] += sum_diff[k] + sum_corr[k];
            }
            check_finite(out, d, n, "milstein_solve");
        }
        traj.wall_seconds = seconds_since(start);
        return traj;
    }

    // Subsampled oracle mode.
    if (!fine)
        throw std::invalid_argument("milstein_solve: subsampled mode needs a fine path");
    if (fine->dim != 1 || fine->mesh.steps % n_steps != 0 ||
        fine->mesh.horizon != mesh.horizon || fine->mesh.grading != mesh.grading)
        throw std::invalid_argument("milstein_solve: fine path does not refine the mesh");
    const std::size_t k_inner = fine->mesh.steps / n_steps;
    {
        const BrownianPath check = coarsen(*fine, n_steps);
        if (check.increments != noise.increments)
            throw std::invalid_argument(
                "milstein_solve: coarse increments are not the block sums of the fine path");
    }

    const double beta = problem.beta;
    const auto& s = fine->mesh.t;
    const auto& t = mesh.t;

    std::vector<double> fx(n_steps * d), gvs(n_steps * d), jacs(n_steps * d * d),
        corr(n_steps * d);
    // Cross-panel history A[i][q] (d-vector per fine node) and diagonal
    // prefix sums per panel.
    std::vector<double> across(beta != 0.0 ? n_steps * k_inner * d : 0, 0.0);
    std::vector<std::vector<double>> inner4(n_steps);

    for (std::size_t n = 1; n <= n_steps; ++n) {
        // Bring node n-1 into the history caches.
        const std::size_t i = n - 1;
        const double* yi = traj.states.data() + i * d;
        problem.f(yi, fx.data() + i * d);
        problem.g(yi, gvs.data() + i * d);
        problem.g_prime(yi, jacs.data() + i * d * d);
        for (std::size_t k = 0; k < d; ++k) {
            double gpg = 0.0;
            for (std::size_t l = 0; l < d; ++l)
                gpg += jacs[i * d * d + k * d + l] * gvs[i * d + l];
            corr[i * d + k] = gpg;
        }
        panel_inner_sums(*fine, i * k_inner, k_inner, beta, inner4[i]);
        if (beta != 0.0) {
            for (std::size_t q = 0; q < k_inner; ++q) {
                double* A = across.data() + (i * k_inner + q) * d;
                const double sq = s[i * k_inner + q];
                for (std::size_t j = 0; j < i; ++j) {
                    const double* gj = gvs.data() + j * d;
                    for (std::size_t p = 0; p < k_inner; ++p) {
                        const double up = s[j * k_inner + p];
                        const double wdiff =
                            std::pow(sq - up, -beta) - std::pow(t[i] - up, -beta);
                        const double z = wdiff * fine->increment(j * k_inner + p + 1, 0);
                        for (std::size_t k = 0; k < d; ++k)
                            A[k] += z * gj[k];
                    }
                }
            }
        }

        double* out = traj.states.data() + n * d;
        std::memcpy(out, x0.data(), d * sizeof(double));
        accumulate_weighted(weights.drift.data() + KernelWeights::row(n), fx.data(), n, d, out);

        for (std::size_t i2 = 0; i2 < n; ++i2) {
            const double* gi = gvs.data() + i2 * d;
            const double* ci = corr.data() + i2 * d;
            const double* Ji = jacs.data() + i2 * d * d;
            for (std::size_t q = 0; q < k_inner; ++q) {
                const std::size_t fidx = i2 * k_inner + q;
                const double dwq = fine->increment(fidx + 1, 0);
                const double cker = beta == 0.0 ? 1.0 : std::pow(t[n] - s[fidx], -beta);
                const double inner = inner4[i2][q];
                if (beta != 0.0) {
                    const double* A = across.data() + fidx * d;
                    for (std::size_t k = 0; k < d; ++k) {
                        double ja = 0.0;
                        for (std::size_t l = 0; l < d; ++l)
                            ja += Ji[k * d + l] * A[l];
                        out[k] += cker * dwq * (gi[k] + ja + ci[k] * inner);
                    }
                } else {
                    for (std::size_t k = 0; k < d; ++k)
                        out[k] += dwq * (gi[k] + ci[k] * inner);
                }
            }
        }
        check_finite(out, d, n, "milstein_solve");
    }
    traj.wall_seconds = seconds_since(start);
    return traj;
}

} // namespace sve
