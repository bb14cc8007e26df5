#pragma once

#include <vector>

namespace sve::detail {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadRule gauss_legendre(int n);

// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1+x)^(gamma-1),
// gamma in (0, 1]; the weights carry the full measure of the singular factor.
QuadRule gauss_jacobi_left(int n, double gamma);

} // namespace sve::detail
