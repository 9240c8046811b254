#pragma once

#include "botlab/geometry.hpp"
#include "botlab/noise.hpp"

#include <cstddef>
#include <vector>

namespace botlab {

/// Gauss-Hermite rule for E f(Z), Z ~ N(0, 1): sum_i weights[i] f(nodes[i]).
/// Weights sum to one; nodes are symmetric about zero.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t order() const noexcept { return nodes.size(); }
};

QuadratureRule gauss_hermite(std::size_t order);

/// Tensor-product rule for E f(U), U ~ N(0, C) in the plane, built by mapping
/// the order x order standard grid through the Cholesky factor of C. A zero
/// covariance collapses to the single node 0.
struct GaussianCubature2D {
    std::vector<Vec2> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

GaussianCubature2D gaussian_cubature(const Mat2& covariance, const QuadratureRule& rule);

/// Cubature for the marginal law of the trajectory noise.
GaussianCubature2D trajectory_noise_cubature(const TrajectoryNoiseSpec& spec, const QuadratureRule& rule);

}  // namespace botlab

namespace botlab {

/// Nodes and weights for int_0^1 h(t) dt.
struct TimeRule {
    std::vector<double> t;
    std::vector<double> w;
    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
};

/// t_k = k / grid, weights 1 / grid.
TimeRule riemann_rule(std::size_t grid);
/// `panels` equal panels of Gauss-Legendre with `order` nodes each.
TimeRule composite_legendre_rule(std::size_t panels, std::size_t order);

}  // namespace botlab
