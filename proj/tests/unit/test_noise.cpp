#include "doctest.h"

#include "sve/mesh.hpp"
#include "sve/noise.hpp"
#include "sve/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

TEST_SUITE("noise") {

TEST_CASE("sampling is a pure function of the seed") {
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 256, 2.0);
    const sve::BrownianPath a = sve::sample_path(mesh, 2, 42);
    const sve::BrownianPath b = sve::sample_path(mesh, 2, 42);
    const sve::BrownianPath c = sve::sample_path(mesh, 2, 43);
    CHECK(a.increments == b.increments);
    CHECK(a.increments != c.increments);
    // Documented keying: increment (n, j) is sqrt(h_n) * z(seed, n, j).
    for (std::size_t n : {std::size_t{1}, std::size_t{100}, std::size_t{256}})
        for (std::size_t j : {std::size_t{0}, std::size_t{1}})
            CHECK(a.increment(n, j) ==
                  std::sqrt(mesh.step(n)) * sve::gaussian_at(42, n, j));
}

TEST_CASE("coarsening reproduces left-to-right block sums bitwise") {
    const sve::GradedMesh fine_mesh = sve::build_mesh(1.0, 1024, 2.0);
    const sve::BrownianPath fine = sve::sample_path(fine_mesh, 1, 7);
    const sve::BrownianPath coarse = sve::coarsen(fine, 128);
    REQUIRE(coarse.mesh.steps == 128);
    const std::size_t m = 1024 / 128;
    const sve::GradedMesh direct = sve::build_mesh(1.0, 128, 2.0);
    for (std::size_t n = 1; n <= 128; ++n) {
        double block = 0.0;
        for (std::size_t k = (n - 1) * m + 1; k <= n * m; ++k)
            block += fine.increment(k, 0);
        CHECK(coarse.increment(n, 0) == block);
        CHECK(coarse.mesh.node(n) == fine_mesh.node(n * m)); // shared nodes, bit-exact
        CHECK(coarse.mesh.node(n) == direct.node(n));
    }
}

TEST_CASE("two-stage coarsening equals one-stage up to regrouped rounding") {
    const sve::GradedMesh fine_mesh = sve::build_mesh(1.0, 512, 3.0);
    const sve::BrownianPath fine = sve::sample_path(fine_mesh, 3, 11);
    const sve::BrownianPath two = sve::coarsen(sve::coarsen(fine, 128), 32);
    const sve::BrownianPath one = sve::coarsen(fine, 32);
    CHECK(two.mesh.t == one.mesh.t); // nodes are recomputed, not summed: bit-exact
    REQUIRE(two.increments.size() == one.increments.size());
    for (std::size_t i = 0; i < one.increments.size(); ++i)
        CHECK(two.increments[i] == doctest::Approx(one.increments[i]).epsilon(1e-13));
}

TEST_CASE("non-divisible coarsening is rejected") {
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 100, 1.0);
    const sve::BrownianPath path = sve::sample_path(mesh, 1, 1);
    CHECK_THROWS_AS(sve::coarsen(path, 33), std::invalid_argument);
    CHECK_THROWS_AS(sve::coarsen(path, 200), std::invalid_argument);
}

TEST_CASE("normal draws have the right moments") {
    const std::size_t n_draws = 100000;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const double z = sve::gaussian_at(314159, i, 0);
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    const double mean = sum / n_draws;
    const double var = sum2 / n_draws - mean * mean;
    const double m4 = sum4 / n_draws;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
    CHECK(std::abs(m4 - 3.0) < 0.15);
}

TEST_CASE("increment variance tracks the step size") {
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 8, 2.0);
    const std::size_t n_paths = 10000;
    double sum2[9] = {};
    for (std::size_t p = 0; p < n_paths; ++p) {
        const sve::BrownianPath path =
            sve::sample_path(mesh, 1, sve::derive_path_seed(999, p));
        for (std::size_t n = 1; n <= 8; ++n)
            sum2[n] += path.increment(n, 0) * path.increment(n, 0);
    }
    for (std::size_t n = 1; n <= 8; ++n)
        CHECK(std::abs(sum2[n] / n_paths / mesh.step(n) - 1.0) < 0.05);
}

TEST_CASE("inverse normal CDF round-trips through erfc") {
    CHECK(sve::inverse_normal_cdf(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(sve::inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(sve::inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    for (const double p : {1e-12, 1e-6, 1e-3, 0.2, 0.7, 1.0 - 1e-7}) {
        const double z = sve::inverse_normal_cdf(p);
        const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
        CHECK(back == doctest::Approx(p).epsilon(1e-9));
    }
}

} // TEST_SUITE("noise")
