#include "ares/geo.hpp"

#include <cmath>
#include <stdexcept>

namespace ares {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

void check_origin(const GeoOrigin& origin) {
    if (!(origin.earth_radius > 0.0))
        throw std::invalid_argument("geo: earth_radius must be > 0");
    if (!(origin.lat0 >= -90.0 && origin.lat0 <= 90.0))
        throw std::invalid_argument("geo: origin latitude outside [-90, 90]");
    if (!(origin.lon0 >= -180.0 && origin.lon0 <= 180.0))
        throw std::invalid_argument("geo: origin longitude outside [-180, 180]");
    if (std::cos(origin.lat0 * kDegToRad) < 1e-6)
        throw std::invalid_argument("geo: origin too close to a pole");
    if (!std::isfinite(origin.rotation))
        throw std::invalid_argument("geo: rotation must be finite");
}

}  // namespace

Vec2 to_local(const GeoOrigin& origin, double lat, double lon) {
    check_origin(origin);
    if (!(lat >= -90.0 && lat <= 90.0))
        throw std::invalid_argument("geo: latitude outside [-90, 90]");
    if (!(lon >= -180.0 && lon <= 180.0))
        throw std::invalid_argument("geo: longitude outside [-180, 180]");
    const double east =
        origin.earth_radius * std::cos(origin.lat0 * kDegToRad) * (lon - origin.lon0) * kDegToRad;
    const double north = origin.earth_radius * (lat - origin.lat0) * kDegToRad;
    // Local frame is the east/north frame rotated by +rotation, so coordinates
    // rotate the other way.
    return rotate({east, north}, -origin.rotation);
}

std::pair<double, double> to_global(const GeoOrigin& origin, Vec2 local) {
    check_origin(origin);
    if (!local.finite()) throw std::invalid_argument("geo: non-finite local position");
    const Vec2 en = rotate(local, origin.rotation);
    const double lat = origin.lat0 + en.y / origin.earth_radius / kDegToRad;
    const double lon =
        origin.lon0 + en.x / (origin.earth_radius * std::cos(origin.lat0 * kDegToRad)) / kDegToRad;
    return {lat, lon};
}

Vec2 velocity_to_local(const GeoOrigin& origin, double speed, double bearing) {
    check_origin(origin);
    if (!std::isfinite(speed) || !std::isfinite(bearing))
        throw std::invalid_argument("geo: non-finite velocity");
    if (speed < 0.0) throw std::invalid_argument("geo: speed must be >= 0");
    // Express the track in east/north components, then swing it into the
    // venue frame the same way positions are handled.
    return rotate({speed * std::cos(bearing), speed * std::sin(bearing)}, -origin.rotation);
}

}  // namespace ares
