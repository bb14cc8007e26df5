#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace sve {

namespace detail {

// 15-point Kronrod nodes on [-1,1] with the embedded 7-point Gauss rule
// (QUADPACK qk15 constants).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15_panel(F& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    const double fc = f(c);
    double res_k = gk15_wk[7] * fc;
    double res_g = gk15_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = hw * gk15_x[j];
        const double fsum = f(c - dx) + f(c + dx);
        res_k += gk15_wk[j] * fsum;
        if (j % 2 == 1)
            res_g += gk15_wg[j / 2] * fsum;
    }
    value = res_k * hw;
    error = std::abs((res_k - res_g) * hw);
}

} // namespace detail

// Adaptive bisection with the Gauss-Kronrod 15(7) panel rule. The absolute
// budget is halved on each split; two global passes turn a relative request
// into an absolute one.
template <class F>
double adaptive_gk15(F&& f, double a, double b, double tol_rel, double tol_abs = 0.0,
                     int max_depth = 52) {
    if (!(a <= b))
        throw std::invalid_argument("adaptive_gk15: need a <= b");
    if (a == b)
        return 0.0;

    struct Rec {
        F& fn;
        int max_depth;
        double run(double lo, double hi, double budget, int depth) {
            double v, e;
            detail::gk15_panel(fn, lo, hi, v, e);
            if (e <= budget || depth >= max_depth)
                return v;
            const double mid = 0.5 * (lo + hi);
            return run(lo, mid, 0.5 * budget, depth + 1) +
                   run(mid, hi, 0.5 * budget, depth + 1);
        }
    };
    Rec rec{f, max_depth};

    double v0, e0;
    detail::gk15_panel(f, a, b, v0, e0);
    double budget = tol_abs + tol_rel * std::abs(v0);
    if (budget <= 0.0)
        budget = tol_rel;
    const double first = rec.run(a, b, budget, 0);
    // Re-run once with the budget anchored to the refined value in case the
    // crude whole-interval estimate was far off.
    double budget2 = tol_abs + tol_rel * std::abs(first);
    if (budget2 <= 0.0)
        budget2 = tol_rel;
    if (budget2 >= 0.5 * budget)
        return first;
    return rec.run(a, b, budget2, 0);
}

// Independent evaluation of the singular panel integral
//   integral over [a, b] of (t_n - s)^(-exponent) ds,
// exponent in [0,1), a < b <= t_n. A singular endpoint (b = t_n) is removed
// by the power substitution t_n - s = w^q before the adaptive rule runs.
// Relative accuracy ~1e-10; used to cross-check the closed-form weights.
double quadrature_oracle(double exponent, double a, double b, double t_n);

} // namespace sve
