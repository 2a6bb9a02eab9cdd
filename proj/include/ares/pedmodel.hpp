#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ares/agent.hpp"
#include "ares/spatial_index.hpp"
#include "ares/venue.hpp"

namespace ares {

// Velocity-obstacle pedestrian model: each step every agent picks the
// feasible velocity closest to its preferred one, where feasibility is an
// intersection of half-planes in velocity space (one per nearby agent, one
// per nearby wall) and a hard speed disc. Speed through dense crowds is
// additionally capped by the stride rule, which shortens steps as free space
// ahead shrinks.
struct PedModelConfig {
    double factor = 1.57;        // stride length per unit speed
    double buffer = 0.9;         // stride clearance in units of agent radius
    double tau = 3.0;            // s, agent-agent avoidance horizon
    double tau_obst = 0.1;       // s, wall avoidance horizon
    double turning_bias = 1.0;   // >1 penalizes deviation perpendicular to v_pref
    bool density_aware = false;  // reserved: no global density rescaling of pref_speed
    double dt = 0.1;             // s, step length
    double pref_speed = 1.04;    // m/s, free-walking speed for spawned agents
    double max_speed = 2.0;      // m/s, hard cap for spawned agents
    double max_pref_accel = 5.0; // m/s^2, ramp limit on the preferred velocity
    double neighbor_limit_radius = 5.0;  // m, neighbor query radius
    // Only the closest agents enter the LP; 10 matches common practice for
    // velocity-obstacle simulators and keeps dense-crowd steps near-linear.
    std::size_t neighbor_limit_count = 10;

    bool operator==(const PedModelConfig&) const = default;
};

void validate(const PedModelConfig& cfg);

// Permitted velocities v satisfy dot(normal, v - point) >= 0.
struct HalfPlane {
    Vec2 point;   // m/s space
    Vec2 normal;  // unit
};

inline bool satisfies(const HalfPlane& h, Vec2 v, double tol = 0.0) {
    return dot(h.normal, v - h.point) >= -tol;
}

// Half-plane constraints for one agent. Wall constraints come first and are
// never relaxed; the trailing agent-agent constraints may be relaxed by the
// LP fallback when the feasible region is empty.
struct ConstraintSet {
    std::vector<HalfPlane> planes;
    std::size_t hard_count = 0;
};

// Simulation state advanced by step(). Wait-time draws come from per-agent
// streams derived from (seed, agent id, step_index), so results do not depend
// on evaluation order.
struct World {
    std::vector<AgentState> agents;
    std::uint64_t seed = 0;
    long step_index = 0;
};

// Target velocity from the behavior phase: Travelling heads for the current
// waypoint, Waiting yields exactly zero, Exiting heads for the nearest point
// of the exit line. The change against agent.pref_velocity is clamped to
// max_pref_accel * dt (Waiting is exempt and stops instantly).
Vec2 preferred_velocity(const AgentState& agent, const VenueMap& map, const PedModelConfig& cfg);

// One half-plane per neighbor (ids into `agents`, reciprocity 1/2) and one
// per obstacle segment close enough to bind within the speed disc.
ConstraintSet vo_halfplanes(const AgentState& agent, std::span<const AgentState> agents,
                            std::span<const std::pair<int, double>> neighbors,
                            std::span<const Segment> obstacles, const PedModelConfig& cfg);

// Speed ceiling from free space ahead: max(0, (d_free - buffer*radius)/factor)
// capped at the agent's max_speed, where d_free is the clear distance to the
// nearest agent disc or obstacle segment inside a 45-degree half-angle cone
// around v_pref. No blocker (or zero v_pref) means max_speed.
double stride_cap(const AgentState& agent, Vec2 v_pref, std::span<const AgentState> agents,
                  std::span<const std::pair<int, double>> neighbors,
                  std::span<const Segment> obstacles, const PedModelConfig& cfg);

// Feasible velocity with ||v|| <= max_speed minimizing the turning-bias
// weighted distance to v_pref (components parallel / perpendicular to v_pref
// weighted 1 : turning_bias). If the soft constraints admit no velocity,
// falls back to minimizing the largest soft violation while keeping the
// first hard_count planes satisfied.
Vec2 solve_velocity(std::span<const HalfPlane> planes, std::size_t hard_count, Vec2 v_pref,
                    double max_speed, double turning_bias);

// Cell lookup from a position to the obstacle segments within `margin` of it
// (as a superset). The venue is static, so trial runners build this once and
// reuse it across steps.
class WallIndex {
  public:
    WallIndex() = default;
    explicit WallIndex(const VenueMap& map, double margin = 4.0);

    // Fills `out` with every segment possibly within margin of p.
    void candidates(Vec2 p, std::vector<Segment>& out) const;

  private:
    static std::int64_t key(int cx, int cy);
    static constexpr double kCell = 2.0;

    std::vector<Segment> segments_;
    double margin_ = 4.0;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

// Wall lookup margin wide enough for every query step() makes under cfg.
double wall_query_margin(const PedModelConfig& cfg);

// Advances every live agent one dt: preferred velocity, stride cap, LP solve
// against index-queried neighbors and nearby walls, movement (truncated at
// obstacle segments so centers never cross them), then the behavior-phase
// update (arrival, waiting countdown, exit-line crossing).
void step(World& world, const VenueMap& map, const WallIndex& walls, const PedModelConfig& cfg);
void step(World& world, const VenueMap& map, const PedModelConfig& cfg);

}  // namespace ares
