#include "doctest.h"

#include "sve/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

sve::ExperimentConfig small_config() {
    sve::ExperimentConfig cfg;
    cfg.scheme = sve::Scheme::em;
    cfg.problem = sve::make_example_problem(0.9, 0.1);
    cfg.grading = 1.0;
    cfg.levels = {32, 64};
    cfg.n_ref = 256;
    cfg.paths = 64;
    cfg.seed = 2024;
    return cfg;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("order fit recovers exact power laws") {
    CHECK(sve::fit_order({128, 256, 512}, {0.4, 0.2, 0.1}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sve::fit_order({128, 256, 512}, {0.3, 0.3, 0.3}) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(sve::fit_order({128, 256, 512, 1024}, {6.68e-2, 5.76e-2, 5.02e-2, 4.38e-2}) ==
          doctest::Approx(0.2027).epsilon(5e-3));
    CHECK_THROWS_AS(sve::fit_order({128}, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(sve::fit_order({128, 256}, {0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sve::fit_order({128, 256}, {0.1, -0.2}), std::invalid_argument);
}

TEST_CASE("predicted rates for the standard exponent pairs") {
    const sve::TheoreticalOrders em1 = sve::theoretical_orders(sve::Scheme::em, 0.9, 0.1, 1.0);
    CHECK(em1.rho == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(em1.sigma == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(em1.order_end == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(em1.order_max == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(em1.r_em == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(em1.r_milstein == doctest::Approx(2.5).epsilon(1e-12));

    const sve::TheoreticalOrders em2 = sve::theoretical_orders(sve::Scheme::em, 0.9, 0.1, 2.0);
    CHECK(em2.order_end == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(em2.order_max == doctest::Approx(0.4).epsilon(1e-12));

    const sve::TheoreticalOrders mil1 =
        sve::theoretical_orders(sve::Scheme::milstein, 0.9, 0.0, 1.0);
    CHECK(mil1.sigma == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(mil1.order_end == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(mil1.order_max == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(mil1.r_milstein == doctest::Approx(3.0).epsilon(1e-12));

    const sve::TheoreticalOrders mil3 =
        sve::theoretical_orders(sve::Scheme::milstein, 0.9, 0.0, 3.0);
    CHECK(mil3.order_max == doctest::Approx(0.6).epsilon(1e-12));

    const sve::TheoreticalOrders mil_half =
        sve::theoretical_orders(sve::Scheme::milstein, 0.5, 0.0, 1.0);
    CHECK(mil_half.order_end == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mil_half.order_max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("self-comparison at the reference level is exact") {
    sve::ExperimentConfig cfg = small_config();
    cfg.levels = {cfg.n_ref};
    cfg.paths = 8;
    const sve::ErrorReport report = sve::run_convergence(cfg);
    REQUIRE(report.levels.size() == 1);
    CHECK(report.levels[0].err_end == 0.0);
    CHECK(report.levels[0].err_max == 0.0);
    CHECK(std::isnan(report.order_end));
    CHECK(std::isnan(report.order_max));
}

TEST_CASE("reports are identical for any thread count") {
    sve::ExperimentConfig cfg = small_config();
    cfg.n_ref = 128;
    cfg.paths = 37; // not a multiple of the internal chunk size
    cfg.threads = 1;
    const sve::ErrorReport one = sve::run_convergence(cfg);
    cfg.threads = 3;
    const sve::ErrorReport three = sve::run_convergence(cfg);
    REQUIRE(one.levels.size() == three.levels.size());
    for (std::size_t i = 0; i < one.levels.size(); ++i) {
        CHECK(one.levels[i].err_end == three.levels[i].err_end);
        CHECK(one.levels[i].err_max == three.levels[i].err_max);
    }
    CHECK(one.order_end == three.order_end);
    CHECK(one.excluded_paths == three.excluded_paths);
}

TEST_CASE("uniform error dominates the terminal error") {
    sve::ExperimentConfig cfg = small_config();
    const sve::ErrorReport report = sve::run_convergence(cfg);
    for (const sve::LevelResult& level : report.levels) {
        CHECK(level.err_max >= level.err_end);
        CHECK(level.err_end > 0.0);
    }
}

TEST_CASE("adding sample paths moves errors within the noise band") {
    sve::ExperimentConfig cfg = small_config();
    cfg.paths = 400;
    const sve::ErrorReport coarse = sve::run_convergence(cfg);
    cfg.paths = 800; // first 400 paths are shared (per-path seeds)
    const sve::ErrorReport fine = sve::run_convergence(cfg);
    for (std::size_t i = 0; i < coarse.levels.size(); ++i) {
        const double a = coarse.levels[i].err_end;
        const double b = fine.levels[i].err_end;
        CHECK(std::abs(a - b) <= 0.1 * std::max(a, b));
    }
}

TEST_CASE("csv round trip carries rows and fitted orders") {
    sve::ExperimentConfig cfg = small_config();
    cfg.paths = 32;
    const sve::ErrorReport report = sve::run_convergence(cfg);
    std::ostringstream out;
    sve::write_convergence_csv(report, out);
    const std::string text = out.str();
    CHECK(text.rfind("scheme,alpha,beta,r,N,err_end,err_max,paths,seed,wall_s", 0) == 0);
    CHECK(text.find("\nem,") != std::string::npos);
    CHECK(text.find("# order_end=") != std::string::npos);
    CHECK(text.find("# order_max=") != std::string::npos);
    CHECK(text.find("# theory_order_end=") != std::string::npos);
    std::size_t rows = 0;
    for (std::size_t pos = text.find("\nem,"); pos != std::string::npos;
         pos = text.find("\nem,", pos + 1))
        ++rows;
    CHECK(rows == report.levels.size());
}

TEST_CASE("config validation rejects inconsistent requests") {
    sve::ExperimentConfig cfg = small_config();
    cfg.levels = {48};
    CHECK_THROWS_AS(sve::run_convergence(cfg), std::invalid_argument); // 48 does not divide 256

    cfg = small_config();
    cfg.scheme = sve::Scheme::milstein; // beta = 0.1: no exact correction available
    CHECK_THROWS_AS(sve::run_convergence(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.scheme = sve::Scheme::fast_em;
    cfg.soe_eps = 0.2;
    CHECK_THROWS_AS(sve::run_convergence(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.paths = 0;
    CHECK_THROWS_AS(sve::run_convergence(cfg), std::invalid_argument);
}

TEST_CASE("bench requires a usable protocol") {
    sve::BenchConfig cfg;
    cfg.problem = sve::make_example_problem(0.9, 0.1);
    cfg.levels = {64};
    CHECK_THROWS_AS(sve::bench_cpu(cfg), std::invalid_argument); // one level fits no slope
    cfg.levels = {64, 128};
    cfg.repetitions = 3;
    CHECK_THROWS_AS(sve::bench_cpu(cfg), std::invalid_argument); // median needs >= 5
}

} // TEST_SUITE("harness")
