#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ares/geo.hpp"
#include "ares/pedmodel.hpp"
#include "ares/venue.hpp"

namespace ares {

// A complete experiment setup: the venue, how agents spawn, the model
// parameters, and an optional geodetic anchor for reporting alerts in
// global coordinates.
struct Scenario {
    VenueMap venue;
    double spawn_spacing = 0.55;  // m, grid pitch inside venue.spawn_region
    double agent_radius = 0.19;   // m, disc radius of spawned agents
    PedModelConfig model;
    std::optional<GeoOrigin> geo;

    bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(int line, const std::string& message);
    int line() const { return line_; }

  private:
    int line_;
};

// Parses the sectioned key = value scenario format. Unknown sections or keys,
// malformed values, and inconsistent geometry are rejected with the offending
// line number.
Scenario parse_scenario_text(std::string_view text);
Scenario load_scenario(const std::string& path);

// Canonical text form; parse_scenario_text(write_scenario(s)) == s.
std::string write_scenario(const Scenario& s);

// The bundled bridge venue: 44 m wide bridge flanked by 22 m wide ramps,
// three square pillars along y = -6 with stops at their centers, spawn grid
// on the right ramp, exit line near the left ramp's end. Identical to the
// shipped scenarios/jamarat.scn.
Scenario default_scenario();

}  // namespace ares
