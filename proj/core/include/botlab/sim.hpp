#pragma once

#include "botlab/geometry.hpp"
#include "botlab/noise.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace botlab {

struct Scenario {
    TrajectoryModel model = TrajectoryModel::uniform_linear(20.0);
    Theta theta_true;
    ObserverPath path = ObserverPath(straight_observer(Vec2::Zero(), 0.0, 0.25, 20.0));
    TrajectoryNoiseSpec trajectory_noise = NoTrajectoryNoise{};
    ObservationNoiseSpec observation_noise;
    std::size_t n = 2000;
    double r_min = 6.0;  // km, prior lower bound on the target range
    std::string name = "scenario";
};

/// Geometry validity of the true trajectory plus the scenario-level checks
/// (noise specs, n >= m). Failed geometry flags are reported, not thrown.
ValidityReport validate_scenario(const Scenario& scenario);

/// Stable 64-bit hash of every scenario parameter that influences a draw.
std::uint64_t fingerprint(const Scenario& scenario);

struct Dataset {
    std::vector<double> t;                  // k / n, k = 1..n
    std::vector<double> y;                  // bearings, rad, wrapped to (-pi, pi]
    std::optional<std::vector<Vec2>> latent;  // X_k, diagnostics only
    std::uint64_t fingerprint = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
};

/// X_k = S_theta*(t_k) + eps_k, Y_k = Psi(X_k, t_k) + V_k.
Dataset simulate(const Scenario& scenario, std::uint64_t seed, bool keep_latent = false);

/// CSV with header `k,t,Y` or `k,t,Y,X1,X2`; 17 significant digits.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

}  // namespace botlab
