#include "sve/quadrature.hpp"

#include <cmath>

namespace sve {

double quadrature_oracle(double exponent, double a, double b, double t_n) {
    if (!(exponent >= 0.0 && exponent < 1.0))
        throw std::invalid_argument("quadrature_oracle: exponent must lie in [0,1)");
    if (!(0.0 <= a && a < b && b <= t_n))
        throw std::invalid_argument("quadrature_oracle: need 0 <= a < b <= t_n");
    if (exponent == 0.0)
        return b - a;

    // In v = t_n - s the integral is over [v0, v1] with a v^(-exponent)
    // integrand, singular (or steeply graded) at the lower end.
    const double v0 = t_n - b;
    const double v1 = t_n - a;
    const double rel = 1e-11;

    if (v0 > 0.0 && v1 <= 16.0 * v0) {
        auto f = [exponent](double v) { return std::pow(v, -exponent); };
        return adaptive_gk15(f, v0, v1, rel);
    }

    // v = w^q flattens the endpoint: the integrand becomes q*w^(q*(1-e)-1),
    // with the power >= 1 once q >= 2/(1-e).
    const double q = std::ceil(2.0 / (1.0 - exponent));
    const double ex = q * (1.0 - exponent) - 1.0;
    const double w0 = v0 > 0.0 ? std::pow(v0, 1.0 / q) : 0.0;
    const double w1 = std::pow(v1, 1.0 / q);
    auto g = [q, ex](double w) { return q * std::pow(w, ex); };
    return adaptive_gk15(g, w0, w1, rel);
}

} // namespace sve
