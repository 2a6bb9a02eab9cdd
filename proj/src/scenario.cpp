#include "ares/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "ares/textio.hpp"

namespace ares {
namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(int line, const std::string& message) { throw ScenarioError(line, message); }

double parse_double(const std::string& token, int line) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + token.size() || token.empty() || !std::isfinite(value))
        fail(line, "expected a number, got '" + token + "'");
    return value;
}

std::vector<double> parse_numbers(const std::string& value, std::size_t count, int line) {
    std::istringstream in(value);
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(parse_double(token, line));
    if (out.size() != count)
        fail(line, "expected " + std::to_string(count) + " numbers, got " +
                       std::to_string(out.size()));
    return out;
}

bool parse_bool(const std::string& value, int line) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(line, "expected true or false, got '" + value + "'");
}

void add_pillar(std::vector<Segment>& obstacles, Vec2 center, double half) {
    const Vec2 a{center.x - half, center.y - half};
    const Vec2 b{center.x + half, center.y - half};
    const Vec2 c{center.x + half, center.y + half};
    const Vec2 d{center.x - half, center.y + half};
    obstacles.push_back({a, b});
    obstacles.push_back({b, c});
    obstacles.push_back({c, d});
    obstacles.push_back({d, a});
}

void validate_scenario(const Scenario& s, int line) {
    const VenueMap& v = s.venue;
    if (!(v.bounds.min.x < v.bounds.max.x && v.bounds.min.y < v.bounds.max.y))
        fail(line, "venue bounds must define a nonempty rectangle");
    if (v.obstacles.empty()) fail(line, "venue needs at least one obstacle segment");
    for (const Segment& seg : v.obstacles)
        if ((seg.b - seg.a).norm_sq() <= 0.0) fail(line, "obstacle segment has zero length");
    if ((v.exit_line.b - v.exit_line.a).norm_sq() <= 0.0)
        fail(line, "exit line has zero length");
    if (v.waypoints.empty()) fail(line, "need at least one waypoint");
    for (std::size_t i = 0; i < v.waypoints.size(); ++i) {
        if (!(v.waypoints[i].arrival_radius > 0.0)) fail(line, "arrival_radius must be > 0");
        if (i > 0 && !(v.waypoints[i].center.x < v.waypoints[i - 1].center.x))
            fail(line, "waypoints must be ordered right to left (strictly decreasing x)");
    }
    if (!(v.mean_wait > 0.0)) fail(line, "mean_wait must be > 0");
    if (!(v.spawn_region.min.x < v.spawn_region.max.x &&
          v.spawn_region.min.y < v.spawn_region.max.y))
        fail(line, "spawn rect must define a nonempty rectangle");
    if (!(v.bounds.contains(v.spawn_region.min) && v.bounds.contains(v.spawn_region.max)))
        fail(line, "spawn rect must lie inside venue bounds");
    if (!(s.agent_radius > 0.0)) fail(line, "agent radius must be > 0");
    if (!(s.spawn_spacing > 2.0 * s.agent_radius))
        fail(line, "spawn spacing must exceed one agent diameter");
    try {
        validate(s.model);
    } catch (const std::invalid_argument& e) {
        fail(line, e.what());
    }
}

}  // namespace

ScenarioError::ScenarioError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

Scenario parse_scenario_text(std::string_view text) {
    Scenario s;
    s.venue.obstacles.clear();
    s.venue.waypoints.clear();

    enum class Section { None, Venue, Waypoints, Spawn, Model, Geo };
    Section section = Section::None;
    std::set<std::string> seen;  // "section.key" for single-use keys
    double arrival_radius = 2.0;
    bool have_geo = false;
    GeoOrigin geo;

    auto single_use = [&](Section sec, const std::string& key, int line) {
        const std::string tag = std::to_string(static_cast<int>(sec)) + "." + key;
        if (!seen.insert(tag).second) fail(line, "duplicate key '" + key + "'");
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']') fail(line, "unterminated section header");
            const std::string name = trim(stripped.substr(1, stripped.size() - 2));
            if (name == "venue") section = Section::Venue;
            else if (name == "waypoints") section = Section::Waypoints;
            else if (name == "spawn") section = Section::Spawn;
            else if (name == "model") section = Section::Model;
            else if (name == "geo") { section = Section::Geo; have_geo = true; }
            else fail(line, "unknown section '" + name + "'");
            continue;
        }

        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(line, "missing key before '='");

        switch (section) {
            case Section::None:
                fail(line, "key '" + key + "' outside any section");
            case Section::Venue: {
                if (key == "bounds") {
                    single_use(section, key, line);
                    const auto n = parse_numbers(value, 4, line);
                    s.venue.bounds = {{n[0], n[1]}, {n[2], n[3]}};
                } else if (key == "segment") {
                    const auto n = parse_numbers(value, 4, line);
                    s.venue.obstacles.push_back({{n[0], n[1]}, {n[2], n[3]}});
                } else if (key == "pillar") {
                    const auto n = parse_numbers(value, 3, line);
                    if (!(n[2] > 0.0)) fail(line, "pillar half size must be > 0");
                    add_pillar(s.venue.obstacles, {n[0], n[1]}, n[2]);
                } else if (key == "exit") {
                    single_use(section, key, line);
                    const auto n = parse_numbers(value, 4, line);
                    s.venue.exit_line = {{n[0], n[1]}, {n[2], n[3]}};
                } else {
                    fail(line, "unknown key '" + key + "' in [venue]");
                }
                break;
            }
            case Section::Waypoints: {
                if (key == "arrival_radius") {
                    arrival_radius = parse_double(value, line);
                } else if (key == "mean_wait") {
                    single_use(section, key, line);
                    s.venue.mean_wait = parse_double(value, line);
                } else if (key == "point") {
                    const auto n = parse_numbers(value, 2, line);
                    s.venue.waypoints.push_back({{n[0], n[1]}, arrival_radius});
                } else {
                    fail(line, "unknown key '" + key + "' in [waypoints]");
                }
                break;
            }
            case Section::Spawn: {
                single_use(section, key, line);
                if (key == "rect") {
                    const auto n = parse_numbers(value, 4, line);
                    s.venue.spawn_region = {{n[0], n[1]}, {n[2], n[3]}};
                } else if (key == "spacing") {
                    s.spawn_spacing = parse_double(value, line);
                } else {
                    fail(line, "unknown key '" + key + "' in [spawn]");
                }
                break;
            }
            case Section::Model: {
                single_use(section, key, line);
                if (key == "factor") s.model.factor = parse_double(value, line);
                else if (key == "buffer") s.model.buffer = parse_double(value, line);
                else if (key == "tau") s.model.tau = parse_double(value, line);
                else if (key == "tau_obst") s.model.tau_obst = parse_double(value, line);
                else if (key == "turning_bias") s.model.turning_bias = parse_double(value, line);
                else if (key == "density_aware") s.model.density_aware = parse_bool(value, line);
                else if (key == "dt") s.model.dt = parse_double(value, line);
                else if (key == "pref_speed") s.model.pref_speed = parse_double(value, line);
                else if (key == "max_speed") s.model.max_speed = parse_double(value, line);
                else if (key == "max_pref_accel")
                    s.model.max_pref_accel = parse_double(value, line);
                else if (key == "neighbor_limit_radius")
                    s.model.neighbor_limit_radius = parse_double(value, line);
                else if (key == "neighbor_limit_count") {
                    const double n = parse_double(value, line);
                    if (n < 1.0 || n != std::floor(n))
                        fail(line, "neighbor_limit_count must be a positive integer");
                    s.model.neighbor_limit_count = static_cast<std::size_t>(n);
                } else if (key == "radius") {
                    s.agent_radius = parse_double(value, line);
                } else {
                    fail(line, "unknown key '" + key + "' in [model]");
                }
                break;
            }
            case Section::Geo: {
                single_use(section, key, line);
                if (key == "lat0") geo.lat0 = parse_double(value, line);
                else if (key == "lon0") geo.lon0 = parse_double(value, line);
                else if (key == "rotation") geo.rotation = parse_double(value, line);
                else if (key == "earth_radius") geo.earth_radius = parse_double(value, line);
                else fail(line, "unknown key '" + key + "' in [geo]");
                break;
            }
        }
    }
    if (have_geo) s.geo = geo;
    validate_scenario(s, line);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

std::string write_scenario(const Scenario& s) {
    std::ostringstream out;
    const auto d = format_number;
    out << "[venue]\n";
    out << "bounds = " << d(s.venue.bounds.min.x) << ' ' << d(s.venue.bounds.min.y) << ' '
        << d(s.venue.bounds.max.x) << ' ' << d(s.venue.bounds.max.y) << '\n';
    for (const Segment& seg : s.venue.obstacles)
        out << "segment = " << d(seg.a.x) << ' ' << d(seg.a.y) << ' ' << d(seg.b.x) << ' '
            << d(seg.b.y) << '\n';
    out << "exit = " << d(s.venue.exit_line.a.x) << ' ' << d(s.venue.exit_line.a.y) << ' '
        << d(s.venue.exit_line.b.x) << ' ' << d(s.venue.exit_line.b.y) << '\n';

    out << "\n[waypoints]\n";
    out << "mean_wait = " << d(s.venue.mean_wait) << '\n';
    double last_radius = 0.0;
    bool first = true;
    for (const Waypoint& wp : s.venue.waypoints) {
        if (first || wp.arrival_radius != last_radius) {
            out << "arrival_radius = " << d(wp.arrival_radius) << '\n';
            last_radius = wp.arrival_radius;
            first = false;
        }
        out << "point = " << d(wp.center.x) << ' ' << d(wp.center.y) << '\n';
    }

    out << "\n[spawn]\n";
    out << "rect = " << d(s.venue.spawn_region.min.x) << ' ' << d(s.venue.spawn_region.min.y)
        << ' ' << d(s.venue.spawn_region.max.x) << ' ' << d(s.venue.spawn_region.max.y) << '\n';
    out << "spacing = " << d(s.spawn_spacing) << '\n';

    out << "\n[model]\n";
    out << "factor = " << d(s.model.factor) << '\n';
    out << "buffer = " << d(s.model.buffer) << '\n';
    out << "tau = " << d(s.model.tau) << '\n';
    out << "tau_obst = " << d(s.model.tau_obst) << '\n';
    out << "turning_bias = " << d(s.model.turning_bias) << '\n';
    out << "density_aware = " << (s.model.density_aware ? "true" : "false") << '\n';
    out << "dt = " << d(s.model.dt) << '\n';
    out << "pref_speed = " << d(s.model.pref_speed) << '\n';
    out << "max_speed = " << d(s.model.max_speed) << '\n';
    out << "max_pref_accel = " << d(s.model.max_pref_accel) << '\n';
    out << "neighbor_limit_radius = " << d(s.model.neighbor_limit_radius) << '\n';
    out << "neighbor_limit_count = " << s.model.neighbor_limit_count << '\n';
    out << "radius = " << d(s.agent_radius) << '\n';

    if (s.geo) {
        out << "\n[geo]\n";
        out << "lat0 = " << d(s.geo->lat0) << '\n';
        out << "lon0 = " << d(s.geo->lon0) << '\n';
        out << "rotation = " << d(s.geo->rotation) << '\n';
        out << "earth_radius = " << d(s.geo->earth_radius) << '\n';
    }
    return out.str();
}

Scenario default_scenario() {
    Scenario s;
    VenueMap& v = s.venue;
    v.bounds = {{-90.0, -24.0}, {215.0, 24.0}};
    v.obstacles = {
        {{-70.0, 22.0}, {25.0, 22.0}},    // bridge north wall
        {{-70.0, -22.0}, {25.0, -22.0}},  // bridge south wall
        {{25.0, 11.0}, {210.0, 11.0}},    // right ramp north wall
        {{25.0, -11.0}, {210.0, -11.0}},  // right ramp south wall
        {{25.0, 11.0}, {25.0, 22.0}},     // right shoulder north
        {{25.0, -22.0}, {25.0, -11.0}},   // right shoulder south
        {{-85.0, 11.0}, {-70.0, 11.0}},   // left ramp north wall
        {{-85.0, -11.0}, {-70.0, -11.0}}, // left ramp south wall
        {{-70.0, 11.0}, {-70.0, 22.0}},   // left shoulder north
        {{-70.0, -22.0}, {-70.0, -11.0}}, // left shoulder south
        {{210.0, -11.0}, {210.0, 11.0}},  // east end cap
        {{-85.0, -11.0}, {-85.0, 11.0}},  // west end cap
    };
    add_pillar(v.obstacles, {-10.0, -6.0}, 0.6);
    add_pillar(v.obstacles, {-30.0, -6.0}, 0.6);
    add_pillar(v.obstacles, {-50.0, -6.0}, 0.6);
    v.exit_line = {{-82.0, -11.0}, {-82.0, 11.0}};
    v.waypoints = {{{-10.0, -6.0}, 2.0}, {{-30.0, -6.0}, 2.0}, {{-50.0, -6.0}, 2.0}};
    v.mean_wait = 60.0;
    v.spawn_region = {{30.0, -11.0}, {175.0, 11.0}};
    s.spawn_spacing = 0.55;
    s.agent_radius = 0.19;
    s.model = PedModelConfig{};
    s.geo = GeoOrigin{21.4211, 39.8718, 0.0, 6371000.0};
    return s;
}

}  // namespace ares
