#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "ares/geo.hpp"
#include "ares/rng.hpp"

using namespace ares;

namespace {

constexpr double kDegToRad = M_PI / 180.0;

// Haversine distance on the same sphere the projection assumes.
double great_circle(const GeoOrigin& o, double lat1, double lon1, double lat2, double lon2) {
    const double p1 = lat1 * kDegToRad, p2 = lat2 * kDegToRad;
    const double dp = (lat2 - lat1) * kDegToRad, dl = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dp / 2) * std::sin(dp / 2) +
                     std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * o.earth_radius * std::asin(std::sqrt(a));
}

}  // namespace

TEST_CASE("origin maps to the local origin and back") {
    const GeoOrigin origin{21.4211, 39.8718, 0.7, 6371000.0};
    const Vec2 local = to_local(origin, origin.lat0, origin.lon0);
    CHECK(local.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(local.y == doctest::Approx(0.0).epsilon(1e-15));
    const auto [lat, lon] = to_global(origin, {0.0, 0.0});
    CHECK(lat == doctest::Approx(origin.lat0).epsilon(1e-15));
    CHECK(lon == doctest::Approx(origin.lon0).epsilon(1e-15));
}

TEST_CASE("one degree of latitude north of the equator is 111194.9 m") {
    const GeoOrigin origin{0.0, 0.0, 0.0, 6371000.0};
    const Vec2 local = to_local(origin, 1.0, 0.0);
    CHECK(std::abs(local.x - 0.0) < 0.1);
    CHECK(std::abs(local.y - 111194.9) < 0.1);

    const auto [lat, lon] = to_global(origin, local);
    CHECK(std::abs(lat - 1.0) < 1e-9);
    CHECK(std::abs(lon - 0.0) < 1e-9);
}

TEST_CASE("to_local and to_global invert each other within 10 km of the origin") {
    const GeoOrigin origin{21.4211, 39.8718, 0.35, 6371000.0};
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        // Points up to roughly 10 km out in each axis.
        const double lat = origin.lat0 + rng.uniform(-0.09, 0.09);
        const double lon = origin.lon0 + rng.uniform(-0.09, 0.09);
        const auto [lat2, lon2] = to_global(origin, to_local(origin, lat, lon));
        CHECK(std::abs(lat2 - lat) < 1e-9);
        CHECK(std::abs(lon2 - lon) < 1e-9);

        const Vec2 p{rng.uniform(-10000.0, 10000.0), rng.uniform(-10000.0, 10000.0)};
        const auto [plat, plon] = to_global(origin, p);
        const Vec2 p2 = to_local(origin, plat, plon);
        CHECK(p2.x == doctest::Approx(p.x).epsilon(1e-9));
        CHECK(p2.y == doctest::Approx(p.y).epsilon(1e-9));
    }
}

TEST_CASE("rotating the venue frame rotates local coordinates consistently") {
    GeoOrigin flat{45.0, 9.0, 0.0, 6371000.0};
    GeoOrigin turned = flat;
    turned.rotation = M_PI / 2.0;
    const double d = 250.0;
    // Local +x in the turned frame points where local +y points in the flat
    // frame, so both address the same spot on the sphere.
    const auto [lat_a, lon_a] = to_global(turned, {d, 0.0});
    const auto [lat_b, lon_b] = to_global(flat, {0.0, d});
    CHECK(lat_a == doctest::Approx(lat_b).epsilon(1e-12));
    CHECK(lon_a == doctest::Approx(lon_b).epsilon(1e-12));
}

TEST_CASE("projection stays within 0.1 percent of great-circle distance at venue scale") {
    const GeoOrigin origin{21.4211, 39.8718, 1.1, 6371000.0};
    Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        const double lat1 = origin.lat0 + rng.uniform(-0.004, 0.004);
        const double lon1 = origin.lon0 + rng.uniform(-0.004, 0.004);
        const double lat2 = origin.lat0 + rng.uniform(-0.004, 0.004);
        const double lon2 = origin.lon0 + rng.uniform(-0.004, 0.004);
        const double oracle = great_circle(origin, lat1, lon1, lat2, lon2);
        if (oracle < 1.0 || oracle > 1000.0) continue;
        const double planar = distance(to_local(origin, lat1, lon1), to_local(origin, lat2, lon2));
        CHECK(std::abs(planar - oracle) / oracle < 0.001);
    }
}

TEST_CASE("velocity_to_local") {
    const GeoOrigin origin{21.4211, 39.8718, 0.6, 6371000.0};

    SUBCASE("zero speed is the zero vector for any bearing") {
        for (double bearing : {0.0, 0.6, 2.0, -1.0, 6.28}) {
            const Vec2 v = velocity_to_local(origin, 0.0, bearing);
            CHECK(v.x == 0.0);
            CHECK(v.y == 0.0);
        }
    }

    SUBCASE("a track aligned with the venue axis maps onto local +x") {
        const Vec2 v = velocity_to_local(origin, 1.04, origin.rotation);
        CHECK(std::abs(v.x - 1.04) < 1e-12);
        CHECK(std::abs(v.y - 0.0) < 1e-12);
    }

    SUBCASE("speed is preserved for random inputs") {
        Rng rng(12);
        for (int i = 0; i < 100; ++i) {
            const double speed = rng.uniform(0.0, 3.0);
            const double bearing = rng.uniform(-7.0, 7.0);
            CHECK(velocity_to_local(origin, speed, bearing).norm() ==
                  doctest::Approx(speed).epsilon(1e-12));
        }
    }

    SUBCASE("negative speed is rejected") {
        CHECK_THROWS_AS(velocity_to_local(origin, -0.1, 0.0), std::invalid_argument);
    }
}

TEST_CASE("invalid coordinates and origins are rejected") {
    const GeoOrigin ok{10.0, 10.0, 0.0, 6371000.0};
    CHECK_THROWS_AS(to_local(ok, 91.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(to_local(ok, -90.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(to_local(ok, 0.0, 180.5), std::invalid_argument);
    CHECK_THROWS_AS(to_local(ok, std::numeric_limits<double>::quiet_NaN(), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(to_local(ok, 0.0, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(to_global(ok, {std::numeric_limits<double>::quiet_NaN(), 0.0}),
                    std::invalid_argument);

    GeoOrigin bad_lat = ok;
    bad_lat.lat0 = 95.0;
    CHECK_THROWS_AS(to_local(bad_lat, 0.0, 0.0), std::invalid_argument);
    GeoOrigin bad_lon = ok;
    bad_lon.lon0 = -200.0;
    CHECK_THROWS_AS(to_local(bad_lon, 0.0, 0.0), std::invalid_argument);
    GeoOrigin pole = ok;
    pole.lat0 = 90.0;
    CHECK_THROWS_AS(to_local(pole, 89.0, 0.0), std::invalid_argument);
    GeoOrigin bad_r = ok;
    bad_r.earth_radius = 0.0;
    CHECK_THROWS_AS(to_local(bad_r, 0.0, 0.0), std::invalid_argument);
}
