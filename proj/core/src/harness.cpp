#include "sve/harness.hpp"

#include "sve/errors.hpp"
#include "sve/parallel.hpp"
#include "sve/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace sve {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

constexpr std::size_t kChunkPaths = 16;

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit: abscissae are all equal");
    return sxy / sxx;
}

void validate_config(const ExperimentConfig& cfg) {
    validate_problem(cfg.problem);
    if (cfg.levels.empty())
        throw std::invalid_argument("run_convergence: need at least one level");
    if (cfg.paths < 1)
        throw std::invalid_argument("run_convergence: need at least one path");
    if (!(cfg.p_moment >= 1.0))
        throw std::invalid_argument("run_convergence: p must be >= 1");
    for (std::size_t lev : cfg.levels)
        if (lev < 1 || lev > cfg.n_ref || cfg.n_ref % lev != 0)
            throw std::invalid_argument("run_convergence: every level must divide n_ref");
    if (cfg.scheme == Scheme::milstein) {
        if (cfg.problem.beta != 0.0)
            throw std::invalid_argument("run_convergence: milstein runs require beta = 0");
        if (cfg.problem.m != 1 || !cfg.problem.g_prime)
            throw std::invalid_argument("run_convergence: milstein needs m = 1 and g_prime");
    }
    if (cfg.scheme == Scheme::fast_em && !(cfg.soe_eps > 0.0 && cfg.soe_eps <= 0.1))
        throw std::invalid_argument("run_convergence: soe_eps must lie in (0, 0.1]");
}

} // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::em: return "em";
    case Scheme::fast_em: return "fast-em";
    case Scheme::milstein: return "milstein";
    }
    return "unknown";
}

TheoreticalOrders theoretical_orders(Scheme scheme, double alpha, double beta, double grading) {
    TheoreticalOrders th;
    th.rho = std::min(1.0 - alpha, 0.5 - beta);
    th.sigma = std::min(1.5 - alpha - beta, 1.0);
    th.r_em = std::max((0.5 - beta) / (1.0 - alpha + th.rho), 1.0);
    th.r_milstein = std::max(th.sigma / (0.5 - alpha + beta + th.sigma), 1.0);
    if (scheme == Scheme::milstein) {
        const double nu = std::min(1.5 - alpha - beta, 1.0 - 2.0 * beta);
        th.order_end = nu;
        th.order_max = std::min(nu, nu - th.sigma + grading * (0.5 - alpha + beta + th.sigma));
    } else {
        th.order_end = 0.5 - beta;
        th.order_max = std::min(0.5 - beta, grading * (1.0 - alpha + th.rho));
    }
    return th;
}

double fit_order(const std::vector<std::size_t>& levels, const std::vector<double>& errors) {
    if (levels.size() != errors.size() || levels.size() < 2)
        throw std::invalid_argument("fit_order: need matching lists with >= 2 entries");
    std::vector<double> x(levels.size()), y(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1 || !(errors[i] > 0.0) || !std::isfinite(errors[i]))
            throw std::invalid_argument("fit_order: errors must be positive and finite");
        x[i] = std::log(static_cast<double>(levels[i]));
        y[i] = std::log(errors[i]);
    }
    return -ols_slope(x, y);
}

ErrorReport run_convergence(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const SVEProblem& pb = cfg.problem;
    const std::size_t n_levels = cfg.levels.size();

    const GradedMesh ref_mesh = build_mesh(pb.horizon, cfg.n_ref, cfg.grading);
    const KernelWeights ref_weights =
        build_kernel_weights(ref_mesh, pb.alpha, pb.beta, cfg.scheme != Scheme::milstein);

    std::vector<GradedMesh> meshes;
    std::vector<KernelWeights> level_weights;
    std::vector<SOEApprox> soe_alpha, soe_beta;
    meshes.reserve(n_levels);
    level_weights.reserve(n_levels);
    for (std::size_t L = 0; L < n_levels; ++L) {
        meshes.push_back(build_mesh(pb.horizon, cfg.levels[L], cfg.grading));
        level_weights.push_back(build_kernel_weights(
            meshes[L], pb.alpha, pb.beta, cfg.scheme == Scheme::em && pb.beta != 0.0));
        if (cfg.scheme == Scheme::fast_em) {
            soe_alpha.push_back(build_soe(pb.alpha, meshes[L].step(1), pb.horizon, cfg.soe_eps));
            if (pb.beta != 0.0)
                soe_beta.push_back(build_soe(pb.beta, meshes[L].step(1), pb.horizon, cfg.soe_eps));
        }
    }

    struct ChunkAcc {
        std::vector<std::vector<double>> node_pow; // per level, per node 1..N
        std::vector<double> wall;
        double ref_wall = 0.0;
        std::size_t excluded = 0;
    };
    const std::size_t n_chunks = (cfg.paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<ChunkAcc> chunks(n_chunks);
    for (auto& c : chunks) {
        c.node_pow.resize(n_levels);
        for (std::size_t L = 0; L < n_levels; ++L)
            c.node_pow[L].assign(cfg.levels[L], 0.0);
        c.wall.assign(n_levels, 0.0);
    }

    const double p = cfg.p_moment;
    const std::size_t d = pb.d;

    parallel_chunks(cfg.paths, kChunkPaths, cfg.threads, [&](std::size_t ci, std::size_t lo,
                                                             std::size_t hi) {
        ChunkAcc& acc = chunks[ci];
        std::vector<std::vector<double>> local(n_levels); // staged until the path succeeds
        for (std::size_t L = 0; L < n_levels; ++L)
            local[L].resize(cfg.levels[L]);
        for (std::size_t path = lo; path < hi; ++path) {
            const std::uint64_t path_seed = derive_path_seed(cfg.seed, path);
            const BrownianPath fine = sample_path(ref_mesh, pb.m, path_seed);
            try {
                const auto t0 = clock_type::now();
                const Trajectory ref =
                    cfg.scheme == Scheme::milstein
                        ? milstein_solve(pb, ref_mesh, fine, MilsteinMode::exact_beta0, nullptr,
                                         ref_weights)
                        : em_solve(pb, ref_mesh, fine, ref_weights);
                const double ref_secs = seconds_between(t0, clock_type::now());

                std::vector<double> level_secs(n_levels, 0.0);
                for (std::size_t L = 0; L < n_levels; ++L) {
                    const std::size_t n_coarse = cfg.levels[L];
                    const BrownianPath coarse = coarsen(fine, n_coarse);
                    const auto t1 = clock_type::now();
                    Trajectory traj;
                    switch (cfg.scheme) {
                    case Scheme::em:
                        traj = em_solve(pb, meshes[L], coarse, level_weights[L]);
                        break;
                    case Scheme::fast_em:
                        traj = fast_em_solve(pb, meshes[L], coarse, cfg.soe_eps, &soe_alpha[L],
                                             pb.beta != 0.0 ? &soe_beta[L] : nullptr);
                        break;
                    case Scheme::milstein:
                        traj = milstein_solve(pb, meshes[L], coarse, MilsteinMode::exact_beta0,
                                              nullptr, level_weights[L]);
                        break;
                    }
                    level_secs[L] = seconds_between(t1, clock_type::now());
                    const std::size_t blow = cfg.n_ref / n_coarse;
                    for (std::size_t n = 1; n <= n_coarse; ++n) {
                        const double* xl = traj.state(n);
                        const double* xr = ref.state(n * blow);
                        double sq = 0.0;
                        for (std::size_t k = 0; k < d; ++k) {
                            const double diff = xl[k] - xr[k];
                            sq += diff * diff;
                        }
                        local[L][n - 1] = p == 2.0 ? sq : std::pow(sq, 0.5 * p);
                    }
                }
                // Path fully solved; commit.
                acc.ref_wall += ref_secs;
                for (std::size_t L = 0; L < n_levels; ++L) {
                    acc.wall[L] += level_secs[L];
                    for (std::size_t n = 0; n < cfg.levels[L]; ++n)
                        acc.node_pow[L][n] += local[L][n];
                }
            } catch (const numerical_error&) {
                ++acc.excluded;
            }
        }
    });

    ErrorReport report;
    report.scheme = cfg.scheme;
    report.alpha = pb.alpha;
    report.beta = pb.beta;
    report.grading = cfg.grading;
    report.n_ref = cfg.n_ref;
    report.paths = cfg.paths;
    report.seed = cfg.seed;
    report.p_moment = p;
    report.theory = theoretical_orders(cfg.scheme, pb.alpha, pb.beta, cfg.grading);

    std::size_t excluded = 0;
    for (const auto& c : chunks)
        excluded += c.excluded;
    report.excluded_paths = excluded;
    if (excluded > 0) {
        const double frac = static_cast<double>(excluded) / static_cast<double>(cfg.paths);
        if (frac > 0.001)
            throw numerical_error("run_convergence: more than 0.1% of paths overflowed", 0);
        std::cerr << "run_convergence: warning: excluded " << excluded << " of " << cfg.paths
                  << " paths after overflow\n";
    }
    const double used = static_cast<double>(cfg.paths - excluded);
    if (used <= 0.0)
        throw numerical_error("run_convergence: no usable paths", 0);

    std::vector<double> ends, maxes;
    for (std::size_t L = 0; L < n_levels; ++L) {
        LevelResult lr;
        lr.n = cfg.levels[L];
        double worst = 0.0;
        double last = 0.0;
        for (std::size_t n = 0; n < cfg.levels[L]; ++n) {
            double total = 0.0;
            for (const auto& c : chunks)
                total += c.node_pow[L][n];
            const double node_err = std::pow(total / used, 1.0 / p);
            worst = std::max(worst, node_err);
            last = node_err;
        }
        lr.err_end = last;
        lr.err_max = worst;
        for (const auto& c : chunks)
            lr.wall_seconds += c.wall[L];
        report.levels.push_back(lr);
        ends.push_back(lr.err_end);
        maxes.push_back(lr.err_max);
    }
    for (const auto& c : chunks)
        report.ref_wall_seconds += c.ref_wall;

    const bool fittable =
        n_levels >= 2 &&
        std::all_of(ends.begin(), ends.end(), [](double e) { return e > 0.0 && std::isfinite(e); }) &&
        std::all_of(maxes.begin(), maxes.end(), [](double e) { return e > 0.0 && std::isfinite(e); });
    if (fittable) {
        report.order_end = fit_order(cfg.levels, ends);
        report.order_max = fit_order(cfg.levels, maxes);
    } else {
        report.order_end = std::numeric_limits<double>::quiet_NaN();
        report.order_max = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

void write_convergence_csv(const ErrorReport& report, std::ostream& out) {
    out.precision(17);
    out << "scheme,alpha,beta,r,N,err_end,err_max,paths,seed,wall_s\n";
    for (const auto& lr : report.levels)
        out << scheme_name(report.scheme) << ',' << report.alpha << ',' << report.beta << ','
            << report.grading << ',' << lr.n << ',' << lr.err_end << ',' << lr.err_max << ','
            << report.paths << ',' << report.seed << ',' << lr.wall_seconds << '\n';
    out << "# order_end=" << report.order_end << '\n';
    out << "# order_max=" << report.order_max << '\n';
    out << "# theory_order_end=" << report.theory.order_end << '\n';
    out << "# theory_order_max=" << report.theory.order_max << '\n';
    out << "# rho=" << report.theory.rho << '\n';
    out << "# sigma=" << report.theory.sigma << '\n';
    out << "# r_em=" << report.theory.r_em << '\n';
    out << "# r_milstein=" << report.theory.r_milstein << '\n';
    out << "# n_ref=" << report.n_ref << '\n';
    out << "# excluded_paths=" << report.excluded_paths << '\n';
    out << "# ref_wall_s=" << report.ref_wall_seconds << '\n';
}

BenchReport bench_cpu(const BenchConfig& cfg) {
    validate_problem(cfg.problem);
    if (cfg.levels.size() < 2)
        throw std::invalid_argument("bench_cpu: need at least two levels");
    if (cfg.repetitions < 5)
        throw std::invalid_argument("bench_cpu: need at least five repetitions");

    BenchReport report;
    for (std::size_t n_steps : cfg.levels) {
        const GradedMesh mesh = build_mesh(cfg.problem.horizon, n_steps, cfg.grading);
        const BrownianPath path =
            sample_path(mesh, cfg.problem.m, derive_path_seed(cfg.seed, n_steps));

        BenchLevel lv;
        lv.n = n_steps;
        const auto s0 = clock_type::now();
        const SOEApprox ka = build_soe(cfg.problem.alpha, mesh.step(1), mesh.horizon, cfg.soe_eps);
        SOEApprox kb;
        if (cfg.problem.beta != 0.0)
            kb = build_soe(cfg.problem.beta, mesh.step(1), mesh.horizon, cfg.soe_eps);
        lv.soe_build_seconds = seconds_between(s0, clock_type::now());
        lv.soe_terms = ka.size() + kb.size();
        const SOEApprox* kbp = cfg.problem.beta != 0.0 ? &kb : nullptr;

        (void)em_solve(cfg.problem, mesh, path); // warmup, discarded
        (void)fast_em_solve(cfg.problem, mesh, path, cfg.soe_eps, &ka, kbp);

        std::vector<double> em_times, fast_times;
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
            auto t0 = clock_type::now();
            (void)em_solve(cfg.problem, mesh, path); // includes its weight tables
            em_times.push_back(seconds_between(t0, clock_type::now()));
            t0 = clock_type::now();
            (void)fast_em_solve(cfg.problem, mesh, path, cfg.soe_eps, &ka, kbp);
            fast_times.push_back(seconds_between(t0, clock_type::now()));
        }
        auto median = [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            const std::size_t mid = v.size() / 2;
            return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
        };
        lv.em_seconds = median(em_times);
        lv.fast_em_seconds = median(fast_times);
        report.levels.push_back(lv);
    }

    std::vector<double> em_s, fast_s;
    for (const auto& lv : report.levels) {
        em_s.push_back(lv.em_seconds);
        fast_s.push_back(lv.fast_em_seconds);
    }
    report.em_slope = -fit_order(cfg.levels, em_s);
    report.fast_em_slope = -fit_order(cfg.levels, fast_s);
    return report;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
    out.precision(17);
    out << "n,em_s,fast_em_s,soe_build_s,soe_terms\n";
    for (const auto& lv : report.levels)
        out << lv.n << ',' << lv.em_seconds << ',' << lv.fast_em_seconds << ','
            << lv.soe_build_seconds << ',' << lv.soe_terms << '\n';
    out << "# em_slope=" << report.em_slope << '\n';
    out << "# fast_em_slope=" << report.fast_em_slope << '\n';
}

void default_regularity_pairs(const GradedMesh& mesh, RegularityConfig& config) {
    const std::size_t n_steps = mesh.steps;
    const double T = mesh.horizon;
    if (config.interior_pairs.empty()) {
        // Anchor near T/2, gaps from ~T/512 up to T/32 (small enough that the
        // modulus has not started to saturate, large enough for the local
        // spacing to resolve).
        std::size_t j0 = n_steps / 2;
        double best = std::abs(mesh.node(j0) - 0.5 * T);
        for (std::size_t j = 1; j <= n_steps; ++j) {
            const double dist = std::abs(mesh.node(j) - 0.5 * T);
            if (dist < best) {
                best = dist;
                j0 = j;
            }
        }
        const double local_h = mesh.node(std::min(j0 + 1, n_steps)) - mesh.node(j0);
        for (int k = 9; k >= 5; --k) {
            const double gap = T / static_cast<double>(1 << k);
            if (gap < 4.0 * local_h)
                continue;
            const double target = mesh.node(j0) + gap;
            if (target > T)
                continue;
            std::size_t jt = j0 + 1;
            while (jt < n_steps && mesh.node(jt) < target)
                ++jt;
            if (jt > j0 &&
                (config.interior_pairs.empty() || config.interior_pairs.back().second != jt))
                config.interior_pairs.emplace_back(j0, jt);
        }
    }
    if (config.origin_pairs.empty()) {
        const double expand = std::exp2(1.0 / mesh.grading); // index ratio giving t -> 2t
        for (std::size_t js : {4, 5, 6, 8, 10, 13, 16}) {
            const std::size_t jt = std::max(
                js + 1, static_cast<std::size_t>(std::lround(expand * static_cast<double>(js))));
            if (jt <= n_steps)
                config.origin_pairs.emplace_back(js, jt);
        }
    }
}

RegularityReport regularity_probe(const RegularityConfig& cfg) {
    validate_problem(cfg.problem);
    const GradedMesh mesh = build_mesh(cfg.problem.horizon, cfg.n_ref, cfg.grading);
    RegularityConfig filled = cfg;
    default_regularity_pairs(mesh, filled);

    std::vector<std::pair<std::size_t, std::size_t>> pairs = filled.interior_pairs;
    pairs.insert(pairs.end(), filled.origin_pairs.begin(), filled.origin_pairs.end());
    if (pairs.empty())
        throw std::invalid_argument("regularity_probe: no node pairs to measure");
    for (const auto& pr : pairs)
        if (pr.first > pr.second || pr.second > cfg.n_ref)
            throw std::out_of_range("regularity_probe: node pair outside the grid");

    const KernelWeights weights =
        build_kernel_weights(mesh, cfg.problem.alpha, cfg.problem.beta);
    const std::size_t n_pairs = pairs.size();
    const std::size_t d = cfg.problem.d;

    const std::size_t n_chunks = (cfg.paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<std::vector<double>> sums(n_chunks, std::vector<double>(n_pairs, 0.0));
    std::vector<std::size_t> excluded(n_chunks, 0);

    parallel_chunks(cfg.paths, kChunkPaths, cfg.threads,
                    [&](std::size_t ci, std::size_t lo, std::size_t hi) {
                        for (std::size_t path = lo; path < hi; ++path) {
                            const std::uint64_t seed = derive_path_seed(cfg.seed, path);
                            const BrownianPath noise = sample_path(mesh, cfg.problem.m, seed);
                            try {
                                const Trajectory traj =
                                    em_solve(cfg.problem, mesh, noise, weights);
                                for (std::size_t q = 0; q < n_pairs; ++q) {
                                    const double* xs = traj.state(pairs[q].first);
                                    const double* xt = traj.state(pairs[q].second);
                                    double sq = 0.0;
                                    for (std::size_t k = 0; k < d; ++k) {
                                        const double diff = xt[k] - xs[k];
                                        sq += diff * diff;
                                    }
                                    sums[ci][q] += sq;
                                }
                            } catch (const numerical_error&) {
                                ++excluded[ci];
                            }
                        }
                    });

    std::size_t dropped = 0;
    for (std::size_t c = 0; c < n_chunks; ++c)
        dropped += excluded[c];
    if (dropped > 0.001 * static_cast<double>(cfg.paths))
        throw numerical_error("regularity_probe: more than 0.1% of paths overflowed", 0);
    const double used = static_cast<double>(cfg.paths - dropped);

    RegularityReport report;
    auto emit = [&](const std::vector<std::pair<std::size_t, std::size_t>>& list,
                    std::size_t offset, std::vector<RegularityPoint>& out) {
        for (std::size_t q = 0; q < list.size(); ++q) {
            RegularityPoint pt;
            pt.j_s = list[q].first;
            pt.j_t = list[q].second;
            pt.t_s = mesh.node(pt.j_s);
            pt.t_t = mesh.node(pt.j_t);
            double total = 0.0;
            for (std::size_t c = 0; c < n_chunks; ++c)
                total += sums[c][offset + q];
            pt.modulus = std::sqrt(total / used);
            out.push_back(pt);
        }
    };
    emit(filled.interior_pairs, 0, report.interior);
    emit(filled.origin_pairs, filled.interior_pairs.size(), report.origin);

    auto fit = [](const std::vector<RegularityPoint>& pts, bool against_gap) {
        std::vector<double> x, y;
        for (const auto& pt : pts) {
            if (!(pt.modulus > 0.0))
                continue;
            x.push_back(std::log(against_gap ? pt.t_t - pt.t_s : pt.t_s));
            y.push_back(std::log(pt.modulus));
        }
        if (x.size() < 2)
            return std::numeric_limits<double>::quiet_NaN();
        return ols_slope(x, y);
    };
    report.interior_exponent = fit(report.interior, true);
    report.origin_exponent = fit(report.origin, false);
    return report;
}

void write_regularity_csv(const RegularityReport& report, std::ostream& out) {
    out.precision(17);
    out << "kind,j_s,j_t,t_s,t_t,modulus\n";
    for (const auto& pt : report.interior)
        out << "interior," << pt.j_s << ',' << pt.j_t << ',' << pt.t_s << ',' << pt.t_t << ','
            << pt.modulus << '\n';
    for (const auto& pt : report.origin)
        out << "origin," << pt.j_s << ',' << pt.j_t << ',' << pt.t_s << ',' << pt.t_t << ','
            << pt.modulus << '\n';
    out << "# interior_exponent=" << report.interior_exponent << '\n';
    out << "# origin_exponent=" << report.origin_exponent << '\n';
}

} // namespace sve
