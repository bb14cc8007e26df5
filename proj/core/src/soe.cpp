#include "sve/soe.hpp"

#include "gauss.hpp"
#include "sve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sve {

namespace {

constexpr std::size_t kBuildGrid = 25000;

void validate_params(double gamma, double delta, double horizon, double eps) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("build_soe: gamma must lie in (0,1)");
    if (!(delta > 0.0 && delta <= horizon) || !std::isfinite(horizon))
        throw std::invalid_argument("build_soe: need 0 < delta <= horizon");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("build_soe: eps must lie in (0, 1)");
}

// Truncation point Lambda of the Laplace representation
//   t^(-gamma) = (1/Gamma(gamma)) * integral_0^inf exp(-t*l) l^(gamma-1) dl.
// The discarded tail, worst at t = delta, is ~ exp(-delta*L) L^(gamma-1) /
// (delta*Gamma(gamma)); solve for a tail of eps/10 so the certified error
// tracks the requested tolerance instead of collapsing to machine noise.
double truncation_point(double gamma, double delta, double eps) {
    const double log_gamma_fn = std::lgamma(gamma);
    double x = std::max(2.0, -gamma * std::log(delta) - log_gamma_fn - std::log(eps / 10.0));
    for (int it = 0; it < 6; ++it) {
        const double next = (gamma - 1.0) * std::log(x) - gamma * std::log(delta) -
                            log_gamma_fn - std::log(eps / 10.0);
        x = std::max(2.0, next);
    }
    return x / delta;
}

// Quadrature discretization of the Laplace integral: one Gauss-Jacobi rule
// absorbs the l^(gamma-1) factor on [0, a0], then Gauss-Legendre panels of
// graded width up to Lambda (the last one truncated exactly there).
//
// A panel ending at lambda is felt at its resonance scale t ~ 1/lambda,
// where the kernel has magnitude t^(-gamma); with the nearest singularity of
// l^(gamma-1) at l = 0, a panel of relative width w converges like
// (4/w)^(-2*order). Widths are sized so every panel holds ~eps/8 absolute
// error at its own resonance. Because the width is a continuous knob (unlike
// the order), the achieved error tracks the requested tolerance smoothly
// across [delta, horizon] instead of collapsing to machine accuracy away
// from the left end.
SOEApprox assemble(double gamma, double delta, double horizon, double eps,
                   double lambda_max, int base_order) {
    SOEApprox s;
    s.gamma = gamma;
    s.delta = delta;
    s.horizon = horizon;
    s.eps = eps;

    const double inv_gamma_fn = 1.0 / std::tgamma(gamma);
    double a0 = std::exp2(std::floor(std::log2(1.0 / horizon)));
    if (a0 > lambda_max)
        a0 = lambda_max;

    const int order = std::max(6, base_order);
    const double inv2o = 1.0 / (2.0 * order);
    auto panel_width = [&](double lo) {
        const double t_star = std::clamp(1.0 / lo, delta, horizon);
        const double rel = std::min(eps * std::pow(t_star, gamma) / 12.0, 0.1);
        // Bernstein parameter needed for rho^(-2*order) = rel, then the
        // relative width whose ellipse (singularity at l = 0) reaches it.
        const double rho = std::pow(rel, -inv2o);
        return std::clamp(4.0 * rho / ((rho - 1.0) * (rho - 1.0)), 0.02, 4.0);
    };

    const auto jac = detail::gauss_jacobi_left(order + 2, gamma);
    const double jscale = std::pow(0.5 * a0, gamma) * inv_gamma_fn;
    for (std::size_t k = 0; k < jac.x.size(); ++k) {
        s.tau.push_back(0.5 * a0 * (1.0 + jac.x[k]));
        s.omega.push_back(jscale * jac.w[k]);
    }

    const auto leg = detail::gauss_legendre(order);
    double lo = a0;
    while (lo < lambda_max) {
        const double hi = std::min(lo * (1.0 + panel_width(lo)), lambda_max);
        const double mid = 0.5 * (lo + hi);
        const double hw = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < leg.x.size(); ++k) {
            const double l = mid + hw * leg.x[k];
            s.tau.push_back(l);
            s.omega.push_back(hw * leg.w[k] * std::pow(l, gamma - 1.0) * inv_gamma_fn);
        }
        lo = hi;
    }
    return s;
}

double max_deviation(const SOEApprox& s, std::size_t grid_points) {
    if (grid_points < 1)
        throw std::invalid_argument("verify_soe: need at least one grid point");
    const double llo = std::log(s.delta);
    const double lhi = std::log(s.horizon);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double u = grid_points == 1
                             ? 0.0
                             : static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double t = std::exp(llo + u * (lhi - llo));
        const double err = std::abs(std::pow(t, -s.gamma) - eval_soe(s, t));
        worst = std::max(worst, err);
    }
    return worst;
}

// Drops terms whose total contribution on [delta, inf) is negligible: raw
// weight below eps*delta^gamma/K, or weight damped below that at t = delta.
SOEApprox pruned(const SOEApprox& s) {
    const double cut =
        s.eps * std::pow(s.delta, s.gamma) / static_cast<double>(std::max<std::size_t>(s.size(), 1));
    SOEApprox out = s;
    out.tau.clear();
    out.omega.clear();
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double reach = s.omega[k] * std::exp(-s.tau[k] * s.delta);
        if (s.omega[k] < cut || reach < cut)
            continue;
        out.tau.push_back(s.tau[k]);
        out.omega.push_back(s.omega[k]);
    }
    return out;
}

// Backward elimination on the certification grid: delete every term whose
// removal keeps the maximum deviation under `target`, cheapest peak
// contribution first. The quadrature build lands far inside the budget;
// spending the slack here keeps K near-minimal and makes the achieved error
// track the requested tolerance instead of the machine floor.
SOEApprox greedy_trim(const SOEApprox& s, double target) {
    const std::size_t n = kBuildGrid;
    const std::size_t k_terms = s.size();
    if (k_terms == 0)
        return s;

    const double llo = std::log(s.delta);
    const double lhi = std::log(s.horizon);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = std::exp(llo + u * (lhi - llo));
    }

    std::vector<std::vector<double>> col(k_terms, std::vector<double>(n));
    for (std::size_t k = 0; k < k_terms; ++k)
        for (std::size_t i = 0; i < n; ++i)
            col[k][i] = s.omega[k] * std::exp(-s.tau[k] * grid[i]);

    // Signed residual kernel - soe; removing a (positive) term adds its
    // column back into the residual.
    std::vector<double> err(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0, comp = 0.0;
        for (std::size_t k = 0; k < k_terms; ++k) {
            const double term = col[k][i] - comp;
            const double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
        err[i] = std::pow(grid[i], -s.gamma) - sum;
    }

    std::vector<std::size_t> order(k_terms);
    for (std::size_t k = 0; k < k_terms; ++k)
        order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return col[a][0] < col[b][0]; });

    std::vector<char> alive(k_terms, 1);
    for (int pass = 0; pass < 4; ++pass) {
        bool removed = false;
        for (std::size_t k : order) {
            if (!alive[k])
                continue;
            bool fits = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(err[i] + col[k][i]) > target) {
                    fits = false;
                    break;
                }
            }
            if (!fits)
                continue;
            alive[k] = 0;
            removed = true;
            for (std::size_t i = 0; i < n; ++i)
                err[i] += col[k][i];
        }
        if (!removed)
            break;
    }

    SOEApprox out = s;
    out.tau.clear();
    out.omega.clear();
    for (std::size_t k = 0; k < k_terms; ++k) {
        if (alive[k]) {
            out.tau.push_back(s.tau[k]);
            out.omega.push_back(s.omega[k]);
        }
    }
    return out;
}

} // namespace

double eval_soe(const SOEApprox& approx, double t) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < approx.size(); ++k) {
        const double term = approx.omega[k] * std::exp(-approx.tau[k] * t) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

SOEApprox build_soe(double gamma, double delta, double horizon, double eps) {
    validate_params(gamma, delta, horizon, eps);
    const double lambda_max = truncation_point(gamma, delta, eps);

    // Escalate the floor on the per-panel orders until the grid certificate
    // holds (the resonance-sized orders usually succeed at the first try).
    static constexpr int kOrders[] = {2, 3, 4, 6, 8, 11, 15, 20, 26, 34};
    double achieved = std::numeric_limits<double>::infinity();
    int terms = 0;
    for (int order : kOrders) {
        SOEApprox s = assemble(gamma, delta, horizon, eps, lambda_max, order);
        s.certified_error = max_deviation(s, kBuildGrid);
        achieved = s.certified_error;
        terms = static_cast<int>(s.size());
        if (s.certified_error <= eps) {
            SOEApprox small = pruned(s);
            if (small.size() < s.size()) {
                small.certified_error = max_deviation(small, kBuildGrid);
                if (small.certified_error > eps)
                    small = s;
            } else {
                small = s;
            }
            SOEApprox trimmed = greedy_trim(small, 0.98 * eps);
            trimmed.certified_error = max_deviation(trimmed, kBuildGrid);
            if (trimmed.size() < small.size() && trimmed.certified_error <= eps)
                return trimmed;
            return small;
        }
    }
    throw soe_build_error(
        "build_soe: certification failed after refinement cap (achieved " +
            std::to_string(achieved) + ", requested " + std::to_string(eps) + ")",
        achieved, terms);
}

double verify_soe(const SOEApprox& approx, std::size_t grid_points) {
    return max_deviation(approx, grid_points);
}

} // namespace sve
