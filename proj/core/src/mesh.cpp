#include "sve/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sve {

GradedMesh build_mesh(double horizon, std::size_t steps, double grading) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("build_mesh: horizon must be positive and finite");
    if (steps < 1)
        throw std::invalid_argument("build_mesh: need at least one step");
    if (!(grading >= 1.0) || !std::isfinite(grading))
        throw std::invalid_argument("build_mesh: grading exponent must be >= 1");

    GradedMesh m;
    m.horizon = horizon;
    m.steps = steps;
    m.grading = grading;
    m.t.resize(steps + 1);
    m.t[0] = 0.0;
    const double n_steps = static_cast<double>(steps);
    for (std::size_t n = 1; n <= steps; ++n)
        m.t[n] = horizon * std::pow(static_cast<double>(n) / n_steps, grading);
    for (std::size_t n = 1; n <= steps; ++n)
        if (!(m.t[n] > m.t[n - 1]))
            throw std::invalid_argument("build_mesh: nodes not strictly increasing (N too large for this grading)");
    return m;
}

double drift_weight(const GradedMesh& mesh, std::size_t n, std::size_t i, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("drift_weight: alpha must lie in (0,1)");
    if (n > mesh.steps || i >= n)
        throw std::out_of_range("drift_weight: need i < n <= N");

    const double a = mesh.t[n] - mesh.t[i];
    const double b = mesh.t[n] - mesh.t[i + 1];
    const double h = mesh.t[i + 1] - mesh.t[i];
    const double p = 1.0 - alpha;
    // a^p - b^p cancels badly once h << a; switch to the midpoint form
    // p * xi^(p-1) * (a - b) which is accurate exactly in that regime.
    if (h < 1e-8 * a)
        return std::pow(0.5 * (a + b), -alpha) * h;
    return (std::pow(a, p) - std::pow(b, p)) / p;
}

double exp_drift_weight(double tau, double t_n, double t_a, double t_b) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("exp_drift_weight: tau must be finite and >= 0");
    if (!(0.0 <= t_a && t_a <= t_b && t_b <= t_n))
        throw std::invalid_argument("exp_drift_weight: need 0 <= t_a <= t_b <= t_n");
    const double width = t_b - t_a;
    if (tau == 0.0)
        return width;
    // exp(-tau*(t_n-t_b)) * (1 - exp(-tau*width)) / tau; expm1 keeps the
    // bracket exact down to tau*width ~ 0.
    return std::exp(-tau * (t_n - t_b)) * (-std::expm1(-tau * width)) / tau;
}

double diffusion_coeff(const GradedMesh& mesh, std::size_t n, std::size_t i, double beta) {
    if (!(beta >= 0.0 && beta < 0.5))
        throw std::invalid_argument("diffusion_coeff: beta must lie in [0, 1/2)");
    if (n > mesh.steps || i >= n)
        throw std::out_of_range("diffusion_coeff: need i < n <= N");
    if (beta == 0.0)
        return 1.0;
    return std::pow(mesh.t[n] - mesh.t[i], -beta);
}

} // namespace sve
