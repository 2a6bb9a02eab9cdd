#pragma once

#include <utility>

#include "ares/vec2.hpp"

namespace ares {

// Local tangent-plane frame anchored at (lat0, lon0), both in degrees.
// rotation is the bearing of the local +x axis, in radians counterclockwise
// from geographic east. The projection is equirectangular: metres per degree
// of longitude are scaled by cos(lat0), which is accurate at venue scale
// (a few kilometres) away from the poles.
struct GeoOrigin {
    double lat0 = 0.0;
    double lon0 = 0.0;
    double rotation = 0.0;
    double earth_radius = 6371000.0;

    bool operator==(const GeoOrigin&) const = default;
};

// (lat, lon) degrees -> local metres.
Vec2 to_local(const GeoOrigin& origin, double lat, double lon);

// Local metres -> (lat, lon) degrees.
std::pair<double, double> to_global(const GeoOrigin& origin, Vec2 local);

// Speed (m/s) plus bearing (radians, same convention as GeoOrigin::rotation:
// counterclockwise from geographic east) -> local frame velocity components.
// A track aligned with the venue x-axis (bearing == rotation) maps to
// (speed, 0). Negative speed is rejected.
Vec2 velocity_to_local(const GeoOrigin& origin, double speed, double bearing);

}  // namespace ares
