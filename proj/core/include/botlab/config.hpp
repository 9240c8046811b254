#pragma once

#include "botlab/sim.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace botlab {

struct RunSettings {
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    double level = 0.95;
    std::size_t workers = 0;
};

struct ScenarioConfig {
    Scenario scenario;
    RunSettings run;
};

/// INI-style scenario file with sections [model], [observer], [truth],
/// [noise.trajectory], [noise.observation] and [run]. Unknown sections or
/// keys are rejected with ConfigError.
ScenarioConfig parse_scenario(std::istream& in, const std::string& origin = "<stream>");
ScenarioConfig load_scenario(const std::string& path);

}  // namespace botlab
