#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ares/vec2.hpp"

namespace ares {

struct Segment {
    Vec2 a;
    Vec2 b;
    constexpr bool operator==(const Segment&) const = default;
};

struct Rect {
    Vec2 min;
    Vec2 max;
    constexpr bool operator==(const Rect&) const = default;
    constexpr bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    constexpr double width() const { return max.x - min.x; }
    constexpr double height() const { return max.y - min.y; }
};

struct Waypoint {
    Vec2 center;
    double arrival_radius = 2.0;
    constexpr bool operator==(const Waypoint&) const = default;
};

// Static world geometry plus the behavioural anchors agents follow.
// Obstacles are line segments; agents treat each one as an impassable wall.
struct VenueMap {
    std::vector<Segment> obstacles;
    Rect spawn_region;
    std::vector<Waypoint> waypoints;  // visited in order
    double mean_wait = 60.0;          // seconds, mean of the exponential pause at each stop
    Segment exit_line;                // crossing it removes the agent
    Rect bounds;

    bool operator==(const VenueMap&) const = default;
};

inline Vec2 closest_point_on_segment(Segment s, Vec2 p) {
    const Vec2 d = s.b - s.a;
    const double len_sq = d.norm_sq();
    if (len_sq <= 0.0) return s.a;
    const double t = std::clamp(dot(p - s.a, d) / len_sq, 0.0, 1.0);
    return s.a + t * d;
}

inline double point_segment_distance(Vec2 p, Segment s) {
    return distance(p, closest_point_on_segment(s, p));
}

// Proper or touching intersection of segments [p, p+r] and [q, q+s_vec].
// Returns the parameter t along the first segment, or nullopt. Collinear
// overlap reports the smallest overlapping t.
inline std::optional<double> segment_intersection_t(Vec2 p, Vec2 p2, Vec2 q, Vec2 q2) {
    const Vec2 r = p2 - p;
    const Vec2 s_vec = q2 - q;
    const double denom = det(r, s_vec);
    const Vec2 qp = q - p;
    if (denom == 0.0) {
        if (det(qp, r) != 0.0) return std::nullopt;  // parallel, disjoint
        const double rr = r.norm_sq();
        if (rr <= 0.0) {
            return (qp.norm_sq() == 0.0 || (q2 - p).norm_sq() == 0.0)
                       ? std::optional<double>(0.0)
                       : std::nullopt;
        }
        double t0 = dot(qp, r) / rr;
        double t1 = dot(q2 - p, r) / rr;
        if (t0 > t1) std::swap(t0, t1);
        if (t1 < 0.0 || t0 > 1.0) return std::nullopt;
        return std::max(0.0, t0);
    }
    const double t = det(qp, s_vec) / denom;
    const double u = det(qp, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

inline bool segments_intersect(Segment s1, Segment s2) {
    return segment_intersection_t(s1.a, s1.b, s2.a, s2.b).has_value();
}

}  // namespace ares
