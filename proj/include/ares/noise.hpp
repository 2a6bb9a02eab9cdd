#pragma once

#include <span>

#include "ares/agent.hpp"
#include "ares/rng.hpp"

namespace ares {

// One positioning-error magnitude in metres. The error is Rayleigh
// distributed with RMS value E (per-axis components are independent
// N(0, E^2/2)), so P(Z <= z) = 1 - exp(-z^2 / E^2), the mean error is
// E * sqrt(pi) / 2 and the RMS error is E itself. Requires E > 0; the
// noiseless E = 0 regime bypasses sampling upstream.
double sample_error_magnitude(double E, Rng& rng);

// Displaces every agent's position by an independent Rayleigh(E) magnitude
// in a uniformly random direction, consuming draws in agent order. E = 0
// leaves positions bitwise untouched and consumes nothing.
void perturb_positions(std::span<AgentState> agents, double E, Rng& rng);

}  // namespace ares
