#pragma once

#include <span>
#include <string>

#include "ares/agent.hpp"
#include "ares/rng.hpp"
#include "ares/spatial_index.hpp"

namespace ares {

// The three stampede indicators. Pressure is the variance-based measure and
// the only one that also grades the milder turbulence regime; Force flags a
// single agent's momentum change; Density is a plain head count.
enum class Method { Pressure, Force, Density };

const char* method_name(Method method);
Method parse_method(const std::string& name);

struct AssessmentConfig {
    Method method = Method::Pressure;
    double R = 1.0;                     // measurement radius, metres
    double weight_cutoff_radius = 0.0;  // Gaussian support cutoff; 0 means 3 * R

    double pressure_threshold = 0.04;    // 1/s^2, stampede
    double turbulence_threshold = 0.02;  // 1/s^2
    double force_threshold = 4500.0;     // N
    double density_threshold = 7.0;      // 1/m^2

    double cutoff() const { return weight_cutoff_radius > 0.0 ? weight_cutoff_radius : 3.0 * R; }
};

struct DetectionReport {
    Method method = Method::Pressure;
    bool stampede = false;
    bool turbulence = false;  // pressure method only
    double max_value = 0.0;   // peak metric value across agents
    Vec2 location;            // position of the peaking agent
    long step = -1;           // step index the report was taken at
};

// Distance-weighting kernel: exp(-d^2/R^2) / (pi R^2). Integrates to 1 over
// the plane, so summing it over agents yields a density in 1/m^2.
double gauss_weight(double d, double R);

// Kernel-weighted statistics at an arbitrary point, taken over indexed agents
// within `cutoff` metres of `center` (an agent located at the point itself
// included). cutoff = 0 picks the 3R default. local_velocity and
// velocity_variance require at least one agent inside the cutoff and throw
// otherwise; density of an empty neighbourhood is 0.
double local_density(Vec2 center, std::span<const AgentState> agents, const SpatialIndex& index,
                     double R, double cutoff = 0.0);
Vec2 local_velocity(Vec2 center, std::span<const AgentState> agents, const SpatialIndex& index,
                    double R, double cutoff = 0.0);
double velocity_variance(Vec2 center, std::span<const AgentState> agents,
                         const SpatialIndex& index, double R, double cutoff = 0.0);

// Crowd pressure at a point: local density times local velocity variance.
double crowd_pressure(Vec2 center, std::span<const AgentState> agents, const SpatialIndex& index,
                      double R, double cutoff = 0.0);

// Magnitude of the force implied by a velocity change over one step:
// mass * |v_cur - v_prev| / dt.
double physical_force(double mass, Vec2 v_prev, Vec2 v_cur, double dt);

// Body mass in kg: normal(mean 70, sd 10) redrawn until it lands in [50, 100].
double sample_mass(Rng& rng);

// Count density: L neighbours inside a disc of radius R, as L / (pi R^2).
double neighbor_density(long L, double R);

// Applies cfg.method to every live agent and reports the peak, with the
// stampede / turbulence flags set from the configured thresholds (crossing
// means value >= threshold). dt is the step length behind the velocity
// deltas the force method differentiates.
DetectionReport evaluate(std::span<const AgentState> agents, const SpatialIndex& index,
                         const AssessmentConfig& cfg, double dt, long step);

}  // namespace ares
