#pragma once

#include <cstddef>
#include <vector>

namespace sve {

// Sum-of-exponentials compression of the singular kernel t^(-gamma):
//   | t^(-gamma) - sum_k omega_k * exp(-tau_k * t) |  <=  eps
// uniformly (in absolute value) for t in [delta, horizon]. All nodes and
// weights are strictly positive.
struct SOEApprox {
    double gamma = 0.0;
    double delta = 0.0;
    double horizon = 0.0;
    double eps = 0.0;            // requested tolerance
    double certified_error = 0.0; // max deviation seen on the build grid
    std::vector<double> tau;
    std::vector<double> omega;

    std::size_t size() const { return tau.size(); }
};

// Evaluates sum_k omega_k * exp(-tau_k * t) with compensated summation.
double eval_soe(const SOEApprox& approx, double t);

// Builds and certifies the compression. The quadrature orders grow over up
// to 8 refinement rounds; if the dense-grid check still fails, throws
// sve::soe_build_error carrying the achieved error and term count.
// Requires gamma in (0,1), 0 < delta <= horizon, eps in (0, 1).
SOEApprox build_soe(double gamma, double delta, double horizon, double eps);

// Max absolute deviation from t^(-gamma) over `grid_points` log-spaced
// points spanning [delta, horizon].
double verify_soe(const SOEApprox& approx, std::size_t grid_points);

} // namespace sve
