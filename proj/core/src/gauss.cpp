#include "gauss.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace sve::detail {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
// matrix built from the three-term recurrence of the orthogonal family;
// weights are mu0 times the squared first eigenvector components.
QuadRule golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta,
                      double mu0) {
    const int n = static_cast<int>(alpha.size());
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
    for (int i = 0; i < n; ++i)
        diag[i] = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i)
        sub[i] = std::sqrt(beta[static_cast<std::size_t>(i + 1)]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("golub_welsch: eigen decomposition failed");

    QuadRule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.x[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.w[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

} // namespace

QuadRule gauss_legendre(int n) {
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
    std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
    beta[0] = 2.0; // mu0 = total weight of dx on [-1,1]
    for (int k = 1; k < n; ++k) {
        const double kk = k;
        beta[static_cast<std::size_t>(k)] = kk * kk / (4.0 * kk * kk - 1.0);
    }
    return golub_welsch(alpha, beta, beta[0]);
}

QuadRule gauss_jacobi_left(int n, double gamma) {
    if (n < 1)
        throw std::invalid_argument("gauss_jacobi_left: n must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gauss_jacobi_left: gamma must lie in (0,1]");
    // Jacobi weight (1-x)^a (1+x)^b with a = 0, b = gamma-1 (Gautschi's
    // recurrence coefficients).
    const double b = gamma - 1.0;
    std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
    std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
    alpha[0] = b / (b + 2.0);
    beta[0] = std::pow(2.0, gamma) / gamma; // integral of (1+x)^(gamma-1) over [-1,1]
    for (int k = 1; k < n; ++k) {
        const double kk = k;
        const double den = (2.0 * kk + b) * (2.0 * kk + b + 2.0);
        alpha[static_cast<std::size_t>(k)] = b * b / den;
        const double num = 4.0 * kk * kk * (kk + b) * (kk + b);
        const double den2 = (2.0 * kk + b) * (2.0 * kk + b) * (2.0 * kk + b + 1.0) *
                            (2.0 * kk + b - 1.0);
        beta[static_cast<std::size_t>(k)] = num / den2;
    }
    return golub_welsch(alpha, beta, beta[0]);
}

} // namespace sve::detail
