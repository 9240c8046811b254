#pragma once

#include "botlab/geometry.hpp"
#include "botlab/rng.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace botlab {

// Trajectory noise variants. Lengths are km.
struct NoTrajectoryNoise {};

struct IsotropicGaussian {
    double sigma = 0.0;  // per-axis standard deviation
};

struct AnisotropicGaussian {
    Mat2 covariance = Mat2::Zero();  // km^2, symmetric positive definite
};

// eps_{k+1} = phi eps_k + eta_k, applied independently to each coordinate,
// eta_k ~ N(0, sigma_eta^2 I_2), started from the stationary law.
struct Ar1Noise {
    double phi = 0.0;
    double sigma_eta = 0.0;
};

using TrajectoryNoiseSpec = std::variant<NoTrajectoryNoise, IsotropicGaussian, AnisotropicGaussian, Ar1Noise>;

// Centered Gaussian observation noise with standard deviation sigma (rad).
struct ObservationNoiseSpec {
    double sigma = 1e-3;
};

void validate(const TrajectoryNoiseSpec& spec);
void validate(const ObservationNoiseSpec& spec);

[[nodiscard]] std::string describe(const TrajectoryNoiseSpec& spec);
[[nodiscard]] bool is_isotropic(const TrajectoryNoiseSpec& spec);
[[nodiscard]] bool is_none(const TrajectoryNoiseSpec& spec);

/// Covariance of the marginal law of eps_1 (stationary law for AR1).
[[nodiscard]] Mat2 marginal_covariance(const TrajectoryNoiseSpec& spec);

/// E ||eps_1||^2 in km^2.
[[nodiscard]] double second_moment(const TrajectoryNoiseSpec& spec);

/// Lag-k autocovariance of one AR1 coordinate: phi^k sigma_eta^2 / (1 - phi^2).
[[nodiscard]] double ar1_autocovariance(double phi, double sigma_eta, std::size_t lag);

/// n draws; i.i.d. for the Gaussian variants, a stationary path for AR1.
std::vector<Vec2> sample_trajectory_noise(const TrajectoryNoiseSpec& spec, std::size_t n, Rng& rng);
std::vector<Vec2> sample_trajectory_noise(const TrajectoryNoiseSpec& spec, std::size_t n, std::uint64_t seed);

std::vector<double> sample_observation_noise(const ObservationNoiseSpec& spec, std::size_t n, Rng& rng);

}  // namespace botlab
