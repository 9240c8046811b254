#include "botlab/quadrature.hpp"

#include "botlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace botlab {

namespace {

// Orthonormal probabilists' Hermite polynomials psi_n, psi_{n-1} at x.
std::pair<long double, long double> hermite_pair(std::size_t n, long double x) {
    long double prev = 0.0L;
    long double cur = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
        const long double next = (x * cur - std::sqrt(static_cast<long double>(k)) * prev) /
                                 std::sqrt(static_cast<long double>(k + 1));
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

}  // namespace

QuadratureRule gauss_hermite(std::size_t order) {
    if (order == 0) throw ConfigError("Gauss-Hermite order must be >= 1");
    const auto n = static_cast<Eigen::Index>(order);

    // Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);

    std::vector<long double> x(order);
    for (std::size_t i = 0; i < order; ++i) x[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];

    // Newton polish in extended precision; psi_n' = sqrt(n) psi_{n-1}.
    const long double sqrt_n = std::sqrt(static_cast<long double>(order));
    for (auto& xi : x) {
        for (int it = 0; it < 100; ++it) {
            const auto [pn, pn1] = hermite_pair(order, xi);
            const long double step = pn / (sqrt_n * pn1);
            xi -= step;
            if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(xi))) break;
        }
    }
    std::sort(x.begin(), x.end());
    for (std::size_t i = 0; i < order / 2; ++i) {
        const long double m = 0.5L * (x[order - 1 - i] - x[i]);
        x[i] = -m;
        x[order - 1 - i] = m;
    }
    if (order % 2 == 1) x[order / 2] = 0.0L;

    std::vector<long double> w(order);
    long double total = 0.0L;
    for (std::size_t i = 0; i < order; ++i) {
        const auto [pn, pn1] = hermite_pair(order, x[i]);
        (void)pn;
        w[i] = 1.0L / (static_cast<long double>(order) * pn1 * pn1);
        total += w[i];
    }
    for (std::size_t i = 0; i < order / 2; ++i) {
        const long double m = 0.5L * (w[i] + w[order - 1 - i]);
        w[i] = w[order - 1 - i] = m;
    }

    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
        rule.nodes[i] = static_cast<double>(x[i]);
        rule.weights[i] = static_cast<double>(w[i] / total);
    }
    return rule;
}

GaussianCubature2D gaussian_cubature(const Mat2& covariance, const QuadratureRule& rule) {
    GaussianCubature2D cub;
    if (covariance.isZero(0.0)) {
        cub.nodes.push_back(Vec2::Zero());
        cub.weights.push_back(1.0);
        return cub;
    }
    Eigen::LLT<Mat2> llt(covariance);
    if (llt.info() != Eigen::Success) throw ConfigError("cubature covariance is not positive definite");
    const Mat2 l = llt.matrixL();
    const std::size_t q = rule.order();
    cub.nodes.reserve(q * q);
    cub.weights.reserve(q * q);
    for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t b = 0; b < q; ++b) {
            cub.nodes.push_back(l * Vec2(rule.nodes[a], rule.nodes[b]));
            cub.weights.push_back(rule.weights[a] * rule.weights[b]);
        }
    }
    return cub;
}

GaussianCubature2D trajectory_noise_cubature(const TrajectoryNoiseSpec& spec, const QuadratureRule& rule) {
    validate(spec);
    return gaussian_cubature(marginal_covariance(spec), rule);
}

}  // namespace botlab

namespace botlab {

TimeRule riemann_rule(std::size_t grid) {
    if (grid == 0) throw ConfigError("integration grid needs at least one point");
    TimeRule r;
    r.t.resize(grid);
    r.w.assign(grid, 1.0 / static_cast<double>(grid));
    for (std::size_t k = 1; k <= grid; ++k) r.t[k - 1] = static_cast<double>(k) / static_cast<double>(grid);
    return r;
}

TimeRule composite_legendre_rule(std::size_t panels, std::size_t order) {
    if (panels == 0 || order == 0) throw ConfigError("Gauss-Legendre rule needs panels >= 1 and order >= 1");
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        jacobi(k, k - 1) = jacobi(k - 1, k) = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    TimeRule r;
    const double h = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = es.eigenvalues()[i];
            const double v = es.eigenvectors()(0, i);
            r.t.push_back(h * (static_cast<double>(p) + 0.5 * (x + 1.0)));
            r.w.push_back(h * v * v);  // 2 v0^2 on [-1, 1], halved by the map
        }
    }
    return r;
}

}  // namespace botlab
