// sve: command line front end for the graded-mesh Volterra solvers.
//
// Subcommands
//   converge    strong-error study of a scheme against a fine-mesh reference
//   bench       single-thread CPU scaling of the direct vs the fast solver
//   regularity  Monte Carlo probe of the solution's time regularity
//   soe build   compress t^(-gamma) into a certified exponential sum (CSV)
//   soe verify  recheck a stored compression on a fresh grid
//   mesh dump   print the graded time grid, one node per line
//
// Exit codes: 0 success, 1 invalid arguments or config, 2 numerical failure,
// 3 kernel compression could not be certified.

#include "sve/errors.hpp"
#include "sve/harness.hpp"
#include "sve/mesh.hpp"
#include "sve/problem.hpp"
#include "sve/soe.hpp"

#include "CLI11.hpp"

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct ProblemOpts {
    std::string preset = "trig";
    double alpha = 0.9;
    double beta = 0.1;
    // linear preset only: f(x) = A x + a, g(x) = B x + b on [0, horizon]
    double lin_A = -1.0;
    double lin_a = 0.0;
    double lin_B = 0.0;
    double lin_b = 0.5;
    double lin_x0 = 1.0;
    double lin_horizon = 1.0;
};

void add_problem_options(CLI::App* cmd, ProblemOpts& opts) {
    cmd->add_option("--preset", opts.preset, "problem preset: trig | linear")
        ->check(CLI::IsMember({"trig", "linear"}));
    cmd->add_option("--alpha", opts.alpha, "drift kernel exponent, in (0,1)");
    cmd->add_option("--beta", opts.beta, "diffusion kernel exponent, in [0,0.5)");
    cmd->add_option("--A", opts.lin_A, "linear preset: drift slope");
    cmd->add_option("--a", opts.lin_a, "linear preset: drift offset");
    cmd->add_option("--B", opts.lin_B, "linear preset: diffusion slope");
    cmd->add_option("--b", opts.lin_b, "linear preset: diffusion offset");
    cmd->add_option("--x0", opts.lin_x0, "linear preset: initial state");
    cmd->add_option("--horizon", opts.lin_horizon, "linear preset: final time T");
}

sve::SVEProblem make_problem(const ProblemOpts& opts) {
    if (opts.preset == "trig")
        return sve::make_example_problem(opts.alpha, opts.beta);
    if (opts.preset == "linear")
        return sve::make_linear_problem(opts.alpha, opts.beta, opts.lin_horizon, 1, 1,
                                        {opts.lin_A}, {opts.lin_a}, {opts.lin_B},
                                        {opts.lin_b}, {opts.lin_x0});
    throw std::invalid_argument("unknown preset: " + opts.preset);
}

sve::Scheme parse_scheme(const std::string& name) {
    if (name == "em") return sve::Scheme::em;
    if (name == "fast-em") return sve::Scheme::fast_em;
    if (name == "milstein") return sve::Scheme::milstein;
    throw std::invalid_argument("unknown scheme: " + name);
}

// "LO:HI" -> {2^LO, ..., 2^HI}; a single integer gives one level.
std::vector<std::size_t> parse_levels(const std::string& text) {
    const auto bad = [&] {
        return std::invalid_argument("levels: expected exponent range LO:HI (e.g. 6:9), got '" +
                                     text + "'");
    };
    unsigned long lo = 0, hi = 0;
    try {
        const auto colon = text.find(':');
        std::size_t used = 0;
        if (colon == std::string::npos) {
            lo = hi = std::stoul(text, &used);
            if (used != text.size()) throw bad();
        } else {
            lo = std::stoul(text.substr(0, colon), &used);
            if (used != colon) throw bad();
            hi = std::stoul(text.substr(colon + 1), &used);
            if (used != text.size() - colon - 1) throw bad();
        }
    } catch (const std::invalid_argument&) {
        throw bad();
    } catch (const std::out_of_range&) {
        throw bad();
    }
    if (lo < 1 || hi > 20 || lo > hi)
        throw std::invalid_argument("levels: need 1 <= LO <= HI <= 20");
    std::vector<std::size_t> levels;
    for (unsigned long k = lo; k <= hi; ++k)
        levels.push_back(std::size_t{1} << k);
    return levels;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot open output file: " + path);
    fn(out);
    if (!out)
        throw std::runtime_error("failed while writing: " + path);
}

void write_soe_csv(const sve::SOEApprox& soe, std::ostream& out) {
    out.precision(17);
    out << "# gamma=" << soe.gamma << "\n"
        << "# delta=" << soe.delta << "\n"
        << "# horizon=" << soe.horizon << "\n"
        << "# eps=" << soe.eps << "\n"
        << "# certified_error=" << soe.certified_error << "\n"
        << "# terms=" << soe.size() << "\n"
        << "tau,omega\n";
    for (std::size_t k = 0; k < soe.size(); ++k)
        out << soe.tau[k] << "," << soe.omega[k] << "\n";
}

sve::SOEApprox read_soe_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open SOE file: " + path);
    sve::SOEApprox soe;
    bool have_gamma = false, have_delta = false, have_horizon = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const auto fail = [&](const char* what) {
            return std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + what);
        };
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            const double value = std::stod(line.substr(eq + 1));
            if (key == "gamma") {
                soe.gamma = value;
                have_gamma = true;
            } else if (key == "delta") {
                soe.delta = value;
                have_delta = true;
            } else if (key == "horizon") {
                soe.horizon = value;
                have_horizon = true;
            } else if (key == "eps") {
                soe.eps = value;
            } else if (key == "certified_error") {
                soe.certified_error = value;
            }
            continue;
        }
        if (line.rfind("tau", 0) == 0)
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw fail("expected 'tau,omega'");
        try {
            soe.tau.push_back(std::stod(line.substr(0, comma)));
            soe.omega.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw fail("expected two numbers");
        }
    }
    if (!have_gamma || !have_delta || !have_horizon)
        throw std::invalid_argument(path + ": missing '# gamma=' / '# delta=' / '# horizon=' header");
    if (soe.tau.empty())
        throw std::invalid_argument(path + ": no exponential terms found");
    return soe;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graded-mesh solvers and Monte Carlo experiments for stochastic "
                 "Volterra equations with weakly singular kernels"};
    app.require_subcommand(1);

    // converge ------------------------------------------------------------
    auto* conv = app.add_subcommand(
        "converge", "Fit strong convergence orders against a fine-mesh reference");
    ProblemOpts conv_problem;
    std::string conv_scheme = "em";
    std::string conv_levels = "6:9";
    double conv_grading = 1.0;
    sve::ExperimentConfig conv_cfg;
    std::string conv_out;
    conv->add_option("--scheme", conv_scheme, "em | fast-em | milstein")
        ->check(CLI::IsMember({"em", "fast-em", "milstein"}));
    add_problem_options(conv, conv_problem);
    conv->add_option("--r", conv_grading, "mesh grading exponent, >= 1")
        ->check(CLI::PositiveNumber);
    conv->add_option("--levels", conv_levels, "level exponents LO:HI, N = 2^LO..2^HI");
    conv->add_option("--nref", conv_cfg.n_ref,
                     "reference step count (power of two, multiple of every level)");
    conv->add_option("--paths", conv_cfg.paths, "Monte Carlo sample paths")
        ->check(CLI::PositiveNumber);
    conv->add_option("--seed", conv_cfg.seed, "master seed");
    conv->add_option("--eps", conv_cfg.soe_eps, "fast-em kernel tolerance");
    conv->add_option("--threads", conv_cfg.threads, "worker threads (0 = all cores)");
    conv->add_option("--out", conv_out, "output CSV path (default: stdout)");
    conv->callback([&] {
        conv_cfg.scheme = parse_scheme(conv_scheme);
        conv_cfg.problem = make_problem(conv_problem);
        conv_cfg.grading = conv_grading;
        conv_cfg.levels = parse_levels(conv_levels);
        const sve::ErrorReport report = sve::run_convergence(conv_cfg);
        with_output(conv_out, [&](std::ostream& out) { sve::write_convergence_csv(report, out); });
        std::cerr << "order_end=" << report.order_end << " order_max=" << report.order_max
                  << " (theory " << report.theory.order_end << " / " << report.theory.order_max
                  << ")\n";
    });

    // bench ---------------------------------------------------------------
    auto* bench = app.add_subcommand("bench",
                                     "Single-thread CPU scaling of direct vs fast solver");
    ProblemOpts bench_problem;
    std::string bench_levels = "7:11";
    sve::BenchConfig bench_cfg;
    std::string bench_out;
    add_problem_options(bench, bench_problem);
    bench->add_option("--r", bench_cfg.grading, "mesh grading exponent, >= 1")
        ->check(CLI::PositiveNumber);
    bench->add_option("--levels", bench_levels, "level exponents LO:HI, N = 2^LO..2^HI");
    bench->add_option("--reps", bench_cfg.repetitions, "timed repetitions per level (median)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_cfg.seed, "path seed");
    bench->add_option("--eps", bench_cfg.soe_eps, "fast-em kernel tolerance");
    bench->add_option("--out", bench_out, "output CSV path (default: stdout)");
    bench->callback([&] {
        bench_cfg.problem = make_problem(bench_problem);
        bench_cfg.levels = parse_levels(bench_levels);
        const sve::BenchReport report = sve::bench_cpu(bench_cfg);
        with_output(bench_out, [&](std::ostream& out) { sve::write_bench_csv(report, out); });
        std::cerr << "em_slope=" << report.em_slope << " fast_em_slope=" << report.fast_em_slope
                  << "\n";
    });

    // regularity ----------------------------------------------------------
    auto* reg = app.add_subcommand(
        "regularity", "Estimate interior and near-origin Holder exponents of the solution");
    ProblemOpts reg_problem;
    sve::RegularityConfig reg_cfg;
    std::string reg_out;
    add_problem_options(reg, reg_problem);
    reg->add_option("--r", reg_cfg.grading, "mesh grading exponent, >= 1")
        ->check(CLI::PositiveNumber);
    reg->add_option("--nref", reg_cfg.n_ref, "grid step count");
    reg->add_option("--paths", reg_cfg.paths, "Monte Carlo sample paths")
        ->check(CLI::PositiveNumber);
    reg->add_option("--seed", reg_cfg.seed, "master seed");
    reg->add_option("--threads", reg_cfg.threads, "worker threads (0 = all cores)");
    reg->add_option("--out", reg_out, "output CSV path (default: stdout)");
    reg->callback([&] {
        reg_cfg.problem = make_problem(reg_problem);
        const sve::RegularityReport report = sve::regularity_probe(reg_cfg);
        with_output(reg_out, [&](std::ostream& out) { sve::write_regularity_csv(report, out); });
        std::cerr << "interior_exponent=" << report.interior_exponent
                  << " origin_exponent=" << report.origin_exponent << "\n";
    });

    // soe build / verify ----------------------------------------------------
    auto* soe = app.add_subcommand("soe", "Certified exponential-sum kernel compression");
    soe->require_subcommand(1);

    auto* soe_build = soe->add_subcommand("build", "Compress t^(-gamma) on [delta, horizon]");
    double soe_gamma = 0.5, soe_delta = 1e-4, soe_horizon = 1.0, soe_eps = 1e-6;
    std::string soe_out;
    soe_build->add_option("--gamma", soe_gamma, "kernel exponent, in (0,1)")->required();
    soe_build->add_option("--delta", soe_delta, "lower cutoff, 0 < delta <= horizon")->required();
    soe_build->add_option("--horizon", soe_horizon, "upper end of the validity window")
        ->required();
    soe_build->add_option("--eps", soe_eps, "absolute tolerance, in (0, 1)")->required();
    soe_build->add_option("--out", soe_out, "output CSV path (default: stdout)");
    soe_build->callback([&] {
        const sve::SOEApprox approx = sve::build_soe(soe_gamma, soe_delta, soe_horizon, soe_eps);
        with_output(soe_out, [&](std::ostream& out) { write_soe_csv(approx, out); });
        std::cerr << "terms=" << approx.size() << " certified_error=" << approx.certified_error
                  << "\n";
    });

    auto* soe_verify = soe->add_subcommand("verify", "Recheck a stored compression");
    std::string soe_in;
    std::size_t soe_grid = 10000;
    soe_verify->add_option("--in", soe_in, "CSV produced by 'soe build'")->required();
    soe_verify->add_option("--grid", soe_grid, "number of log-spaced check points")
        ->check(CLI::PositiveNumber);
    soe_verify->callback([&] {
        const sve::SOEApprox approx = read_soe_csv(soe_in);
        const double err = sve::verify_soe(approx, soe_grid);
        std::cout.precision(17);
        std::cout << err << "\n";
    });

    // mesh dump -------------------------------------------------------------
    auto* mesh = app.add_subcommand("mesh", "Graded time grid utilities");
    mesh->require_subcommand(1);
    auto* mesh_dump = mesh->add_subcommand("dump", "Print every node, one per line");
    double mesh_horizon = 1.0, mesh_grading = 1.0;
    std::size_t mesh_steps = 16;
    std::string mesh_out;
    mesh_dump->add_option("--horizon", mesh_horizon, "final time T")->required();
    mesh_dump->add_option("--steps", mesh_steps, "step count N")->required();
    mesh_dump->add_option("--r", mesh_grading, "grading exponent, >= 1")->required();
    mesh_dump->add_option("--out", mesh_out, "output path (default: stdout)");
    mesh_dump->callback([&] {
        const sve::GradedMesh grid = sve::build_mesh(mesh_horizon, mesh_steps, mesh_grading);
        with_output(mesh_out, [&](std::ostream& out) {
            out.precision(17);
            for (const double t : grid.t)
                out << t << "\n";
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const sve::soe_build_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sve::numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
