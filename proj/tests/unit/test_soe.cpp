#include "doctest.h"

#include "sve/errors.hpp"
#include "sve/mesh.hpp"
#include "sve/soe.hpp"

#include <cmath>
#include <stdexcept>

TEST_SUITE("soe") {

TEST_CASE("certified build on a moderate window") {
    const sve::SOEApprox s = sve::build_soe(0.5, 0.01, 1.0, 1e-6);
    CHECK(s.certified_error <= 1e-6);
    CHECK(sve::verify_soe(s, 100000) <= 1e-6);
    REQUIRE(s.size() >= 1);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s.tau[k] > 0.0);
        CHECK(s.omega[k] > 0.0);
        if (k > 0)
            CHECK(s.tau[k] > s.tau[k - 1]);
    }
}

TEST_CASE("window anchored at the first graded step") {
    // delta equal to h_1 of the N = 2^7, r = 2 grid on [0,1].
    const sve::GradedMesh mesh = sve::build_mesh(1.0, 128, 2.0);
    const sve::SOEApprox s = sve::build_soe(0.9, mesh.step(1), 1.0, 1e-6);
    CHECK(s.certified_error <= 1e-6);
    CHECK(sve::verify_soe(s, 100000) <= 1e-6);
    CHECK(s.size() <= 300);
}

TEST_CASE("degenerate single-point window") {
    const sve::SOEApprox s = sve::build_soe(0.5, 1.0, 1.0, 0.5);
    CHECK(s.certified_error <= 0.5);
    CHECK(sve::verify_soe(s, 1000) <= 0.5);
    CHECK(s.size() <= 300);
}

TEST_CASE("term count grows as the tolerance tightens") {
    const sve::SOEApprox a = sve::build_soe(0.9, 1e-4, 1.0, 1e-4);
    const sve::SOEApprox b = sve::build_soe(0.9, 1e-4, 1.0, 1e-6);
    const sve::SOEApprox c = sve::build_soe(0.9, 1e-4, 1.0, 1e-8);
    CHECK(a.size() < b.size());
    CHECK(b.size() < c.size());
    CHECK(c.size() <= 300);
    CHECK(a.certified_error <= 1e-4);
    CHECK(b.certified_error <= 1e-6);
    CHECK(c.certified_error <= 1e-8);
}

TEST_CASE("certificate survives a denser recheck") {
    const sve::SOEApprox s = sve::build_soe(0.8, 1e-4, 1.0, 1e-6);
    CHECK(sve::verify_soe(s, 25000) <= 1e-6);
    CHECK(sve::verify_soe(s, 100000) <= 1e-6);
}

TEST_CASE("eval is the plain exponential sum") {
    sve::SOEApprox one;
    one.gamma = 0.5;
    one.delta = 0.1;
    one.horizon = 1.0;
    one.tau = {1.0};
    one.omega = {1.0};
    CHECK(sve::eval_soe(one, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sve::eval_soe(one, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

    const sve::SOEApprox s = sve::build_soe(0.5, 0.01, 1.0, 1e-6);
    double prev = sve::eval_soe(s, 0.01);
    for (int i = 1; i <= 50; ++i) {
        const double t = 0.01 + (1.0 - 0.01) * i / 50.0;
        const double v = sve::eval_soe(s, t);
        CHECK(v < prev); // positive weights and decays: strictly decreasing
        CHECK(std::abs(v - std::pow(t, -0.5)) <= 2e-6);
        prev = v;
    }
}

TEST_CASE("verifier measures the kernel itself when the sum is empty") {
    sve::SOEApprox hollow;
    hollow.gamma = 0.5;
    hollow.delta = 0.04;
    hollow.horizon = 1.0;
    hollow.tau = {1.0};
    hollow.omega = {0.0};
    // With zero weights the deviation peaks at the left endpoint.
    CHECK(sve::verify_soe(hollow, 5000) ==
          doctest::Approx(std::pow(0.04, -0.5)).epsilon(1e-12));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(sve::build_soe(0.0, 1e-4, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(sve::build_soe(1.0, 1e-4, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(sve::build_soe(0.5, 0.0, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(sve::build_soe(0.5, 2.0, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(sve::build_soe(0.5, 1e-4, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sve::build_soe(0.5, 1e-4, 1.0, 1.0), std::invalid_argument);
}

} // TEST_SUITE("soe")
