#pragma once

#include "ares/vec2.hpp"

namespace ares {

// Where an agent is in its visit script: heading to a stop, pausing at it,
// leaving the venue, or already gone.
enum class Phase { Travelling, Waiting, Exiting, Done };

struct BehaviorPhase {
    Phase kind = Phase::Travelling;
    int waypoint = 0;        // target stop index; valid for Travelling and Waiting
    double remaining = 0.0;  // seconds left at the stop; valid for Waiting

    static constexpr BehaviorPhase travelling(int wp) { return {Phase::Travelling, wp, 0.0}; }
    static constexpr BehaviorPhase waiting(double remaining, int wp) {
        return {Phase::Waiting, wp, remaining};
    }
    static constexpr BehaviorPhase exiting() { return {Phase::Exiting, -1, 0.0}; }
    static constexpr BehaviorPhase done() { return {Phase::Done, -1, 0.0}; }

    constexpr bool operator==(const BehaviorPhase&) const = default;
};

struct AgentState {
    int id = 0;
    Vec2 position;
    Vec2 velocity;       // realized velocity over the last step
    Vec2 prev_velocity;  // realized velocity over the step before that
    Vec2 pref_velocity;  // preferred velocity chosen in the last step
    double radius = 0.19;
    double mass = 70.0;       // kg
    double pref_speed = 1.04; // m/s, free-walking target speed
    double max_speed = 2.0;   // m/s, hard cap
    BehaviorPhase behavior;

    bool done() const { return behavior.kind == Phase::Done; }
};

}  // namespace ares
