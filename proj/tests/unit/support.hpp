#pragma once

#include "botlab/sim.hpp"

#include <cmath>
#include <numbers>

namespace botlab::test {

// Maneuvering observer used throughout: four legs, C-infinity turns.
inline ObserverSpec maneuvering_spec() {
    ObserverSpec o;
    o.initial_position = Vec2(-4.0, -3.0);
    o.initial_heading = std::numbers::pi / 4;
    o.segments = {{0.0, 6.5, 0.2}, {6.5, 10.5, 0.0}, {10.5, 14.5, -0.22}, {14.5, 20.0, 0.0}};
    return o;
}

inline Theta theta_star() {
    Theta t(4);
    t << 2.8, 0.225, 3.8, -0.15;  // x0, vx, y0, vy
    return t;
}

inline Scenario base_scenario(TrajectoryNoiseSpec noise = IsotropicGaussian{0.01}) {
    Scenario s;
    s.model = TrajectoryModel::uniform_linear(20.0);
    s.theta_true = theta_star();
    s.path = build_observer_path(maneuvering_spec());
    s.trajectory_noise = noise;
    s.observation_noise.sigma = 1e-3;
    s.n = 2000;
    s.r_min = 6.0;
    s.name = "isotropic";
    return s;
}

// Bearings with no noise of either kind, straight from the true trajectory.
inline Dataset exact_dataset(const Scenario& s) {
    Dataset d;
    for (std::size_t k = 1; k <= s.n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(s.n);
        d.t.push_back(t);
        d.y.push_back(bearing(s.model.position(s.theta_true, t), t, s.path).value());
    }
    return d;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace botlab::test
