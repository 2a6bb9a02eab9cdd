#include "ares/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ares/geo.hpp"
#include "ares/kde.hpp"
#include "ares/montecarlo.hpp"
#include "ares/scenario.hpp"
#include "ares/textio.hpp"

namespace ares {
namespace {

std::uint64_t default_seed() {
    const char* env = std::getenv("ARES_SEED");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        throw std::runtime_error("ARES_SEED must be a nonnegative integer");
    return value;
}

std::size_t steps_from_seconds(double seconds, double dt) {
    if (!(seconds > 0.0)) throw std::runtime_error("horizon must be > 0 seconds");
    if (!(dt > 0.0)) throw std::runtime_error("dt must be > 0");
    return static_cast<std::size_t>(std::llround(seconds / dt));
}

const char* phase_name(Phase kind) {
    switch (kind) {
        case Phase::Travelling: return "travelling";
        case Phase::Waiting: return "waiting";
        case Phase::Exiting: return "exiting";
        case Phase::Done: return "done";
    }
    return "unknown";
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out.flush()) throw std::runtime_error("failed writing output file: " + path);
}

struct SimulateArgs {
    std::string scenario_path;
    std::string method = "pressure";
    double R = 1.0;
    double E = 0.0;
    std::size_t N = 20;
    double horizon_seconds = 150.0;
    std::uint64_t seed = 0;
    bool no_early_exit = false;
    std::string dump_path;
};

int cmd_simulate(const SimulateArgs& a) {
    const Scenario scenario = load_scenario(a.scenario_path);
    TrialSpec spec;
    spec.assess.method = parse_method(a.method);
    spec.assess.R = a.R;
    spec.error_scale = a.E;
    spec.agent_count = a.N;
    spec.horizon = steps_from_seconds(a.horizon_seconds, scenario.model.dt);
    spec.seed = a.seed;
    spec.early_exit = !a.no_early_exit;

    std::ofstream dump;
    StepObserver observer;
    if (!a.dump_path.empty()) {
        dump.open(a.dump_path);
        if (!dump) throw std::runtime_error("cannot open output file: " + a.dump_path);
        dump << "step,id,x,y,vx,vy,phase\n";
        observer = [&dump](const World& world, std::size_t steps_done) {
            for (const AgentState& ag : world.agents)
                dump << steps_done << ',' << ag.id << ',' << format_number(ag.position.x) << ','
                     << format_number(ag.position.y) << ',' << format_number(ag.velocity.x)
                     << ',' << format_number(ag.velocity.y) << ','
                     << phase_name(ag.behavior.kind) << '\n';
        };
    }

    const TrialOutcome outcome =
        run_trial_multi(scenario, spec, {&spec.assess, 1}, observer).front();
    const DetectionReport& r = outcome.report;
    std::cout << "result method=" << method_name(r.method)
              << " stampede=" << (outcome.stampede ? 1 : 0)
              << " turbulence=" << (r.turbulence ? 1 : 0)
              << " max_value=" << format_number(r.max_value) << " step=" << r.step
              << " x=" << format_number(r.location.x) << " y=" << format_number(r.location.y)
              << " steps_executed=" << outcome.steps_executed << '\n';
    if (!outcome.stampede) return 0;

    std::cout << "ALERT step=" << r.step << " method=" << method_name(r.method)
              << " value=" << format_number(r.max_value) << " x=" << format_number(r.location.x)
              << " y=" << format_number(r.location.y);
    if (scenario.geo) {
        const auto [lat, lon] = to_global(*scenario.geo, r.location);
        std::cout << " lat=" << format_number(lat) << " lon=" << format_number(lon);
    }
    std::cout << '\n';
    return 2;
}

struct SweepArgs {
    std::string scenario_path;
    std::vector<std::string> methods{"pressure", "force", "density"};
    std::vector<double> radii{1.0};
    std::vector<double> errors{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<std::size_t> counts{1, 5, 10, 20, 40, 80, 160, 320, 640, 1280, 2560, 5120, 10240};
    std::size_t trials = 100;
    double horizon_seconds = 150.0;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    std::string out_path;
    double alert_threshold = 0.5;
};

int cmd_sweep(const SweepArgs& a) {
    const Scenario scenario = load_scenario(a.scenario_path);
    GridSpec grid;
    grid.methods.reserve(a.methods.size());
    for (const std::string& name : a.methods) grid.methods.push_back(parse_method(name));
    grid.radii = a.radii;
    grid.error_scales = a.errors;
    grid.agent_counts = a.counts;
    grid.trials = a.trials;
    grid.horizon = steps_from_seconds(a.horizon_seconds, scenario.model.dt);
    grid.master_seed = a.seed;
    grid.jobs = a.jobs;

    const ResultTable table = run_grid(scenario, grid);
    write_text(a.out_path, to_csv(table));
    // Alerts go to stderr so stdout stays a clean CSV stream.
    for (const ResultRow& row : table.rows)
        if (row.p >= a.alert_threshold)
            std::cerr << "ALERT method=" << method_name(row.method)
                      << " R=" << format_number(row.R) << " E=" << format_number(row.E)
                      << " N=" << row.N << " p=" << format_number(row.p) << '\n';
    return 0;
}

struct KalmanArgs {
    std::string scenario_path;
    std::size_t N = 10240;
    double duration_seconds = 150.0;
    std::vector<double> errors{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double q = KalmanConfig{}.q;
    double posn_var = KalmanConfig{}.posn_var;
    double vel_var = KalmanConfig{}.vel_var;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string kde_dir;
};

int cmd_kalman(const KalmanArgs& a) {
    const Scenario scenario = load_scenario(a.scenario_path);
    KalmanConfig filter;
    filter.dt = scenario.model.dt;
    filter.q = a.q;
    filter.posn_var = a.posn_var;
    filter.vel_var = a.vel_var;
    const std::size_t steps = steps_from_seconds(a.duration_seconds, scenario.model.dt);

    const FilterExperiment experiment =
        run_filter_experiment(scenario, a.N, steps, a.errors, filter, a.seed);
    write_text(a.out_path, mae_to_csv(experiment));

    if (!a.kde_dir.empty()) {
        auto write_kde = [&](const std::string& stem, std::span<const double> samples) {
            std::ostringstream csv;
            csv << "value,density\n";
            for (const auto& [value, density] : kde(samples))
                csv << format_number(value) << ',' << format_number(density) << '\n';
            write_text(a.kde_dir + "/" + stem + ".csv", csv.str());
        };
        for (std::size_t i = 0; i < experiment.error_scales.size(); ++i) {
            const std::string label = format_number(experiment.error_scales[i]);
            write_kde("kde_measured_E" + label, experiment.measured_samples[i]);
            write_kde("kde_estimated_E" + label, experiment.estimated_samples[i]);
        }
    }
    return 0;
}

struct ConvertArgs {
    std::string scenario_path;
    std::optional<double> lat0;
    std::optional<double> lon0;
    double rotation = 0.0;
    double earth_radius = 6371000.0;
    std::string in_path;
    std::string out_path;
};

std::vector<std::string> split_csv_row(const std::string& row) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(row);
    while (std::getline(in, field, ',')) {
        std::size_t b = 0, e = field.size();
        while (b < e && std::isspace(static_cast<unsigned char>(field[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(field[e - 1]))) --e;
        fields.push_back(field.substr(b, e - b));
    }
    return fields;
}

double parse_field(const std::string& token) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || token.empty() || !std::isfinite(value))
        throw std::runtime_error("not a number: '" + token + "'");
    return value;
}

int cmd_convert(const ConvertArgs& a) {
    GeoOrigin origin;
    if (!a.scenario_path.empty()) {
        const Scenario scenario = load_scenario(a.scenario_path);
        if (!scenario.geo)
            throw std::runtime_error("scenario file has no [geo] section to take the origin from");
        origin = *scenario.geo;
    } else if (a.lat0 && a.lon0) {
        origin = GeoOrigin{*a.lat0, *a.lon0, a.rotation, a.earth_radius};
    } else {
        throw std::runtime_error("convert needs either --scenario or both --lat0 and --lon0");
    }

    std::ifstream in(a.in_path);
    if (!in) throw std::runtime_error("cannot open input file: " + a.in_path);
    std::string header_row;
    if (!std::getline(in, header_row)) throw std::runtime_error("input file is empty");
    const std::vector<std::string> header = split_csv_row(header_row);
    bool with_velocity = false;
    if (header == std::vector<std::string>{"lat", "lon"}) {
        with_velocity = false;
    } else if (header == std::vector<std::string>{"lat", "lon", "speed", "bearing"}) {
        with_velocity = true;
    } else {
        throw std::runtime_error("input header must be lat,lon or lat,lon,speed,bearing");
    }

    std::ostringstream out;
    out << (with_velocity ? "x,y,vx,vy\n" : "x,y\n");
    std::string row;
    int line = 1;
    std::size_t converted = 0;
    while (std::getline(in, row)) {
        ++line;
        if (row.empty()) continue;
        try {
            const std::vector<std::string> fields = split_csv_row(row);
            if (fields.size() != (with_velocity ? 4u : 2u))
                throw std::runtime_error("wrong field count");
            const Vec2 local = to_local(origin, parse_field(fields[0]), parse_field(fields[1]));
            out << format_number(local.x) << ',' << format_number(local.y);
            if (with_velocity) {
                const Vec2 v =
                    velocity_to_local(origin, parse_field(fields[2]), parse_field(fields[3]));
                out << ',' << format_number(v.x) << ',' << format_number(v.y);
            }
            out << '\n';
            ++converted;
        } catch (const std::exception& e) {
            std::cerr << "warning: line " << line << " skipped: " << e.what() << '\n';
        }
    }
    if (converted == 0) {
        std::cerr << "error: no rows converted\n";
        return 1;
    }
    write_text(a.out_path, out.str());
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) try {
    const std::uint64_t seed = default_seed();

    CLI::App app{"crowd stampede risk assessment toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    sim_args.seed = seed;
    CLI::App* sim = app.add_subcommand("simulate", "run one trial and report detections");
    sim->add_option("--scenario", sim_args.scenario_path, "scenario file")->required();
    sim->add_option("--method", sim_args.method, "pressure|force|density")->capture_default_str();
    sim->add_option("--R", sim_args.R, "assessment radius, meters")->capture_default_str();
    sim->add_option("--E", sim_args.E, "start-position error scale, meters")->capture_default_str();
    sim->add_option("--N", sim_args.N, "crowd size")->capture_default_str();
    sim->add_option("--horizon", sim_args.horizon_seconds, "trial length, seconds")->capture_default_str();
    sim->add_option("--seed", sim_args.seed, "trial seed");
    sim->add_flag("--no-early-exit", sim_args.no_early_exit,
                  "run the full horizon even after a detection");
    sim->add_option("--dump", sim_args.dump_path, "write per-step agent states to this CSV");

    SweepArgs sweep_args;
    sweep_args.seed = seed;
    CLI::App* sweep = app.add_subcommand("sweep", "estimate p over a method/R/E/N grid");
    sweep->add_option("--scenario", sweep_args.scenario_path, "scenario file")->required();
    sweep->add_option("--methods", sweep_args.methods, "assessment methods")->delimiter(',');
    sweep->add_option("--R", sweep_args.radii, "assessment radii, meters")->delimiter(',');
    sweep->add_option("--E", sweep_args.errors, "error scales, meters")->delimiter(',');
    sweep->add_option("--N", sweep_args.counts, "crowd sizes")->delimiter(',');
    sweep->add_option("--trials", sweep_args.trials, "trials per cell")->capture_default_str();
    sweep->add_option("--horizon", sweep_args.horizon_seconds, "trial length, seconds")->capture_default_str();
    sweep->add_option("--jobs", sweep_args.jobs, "worker threads")->capture_default_str();
    sweep->add_option("--seed", sweep_args.seed, "master seed");
    sweep->add_option("--out", sweep_args.out_path, "result CSV path (default: stdout)");
    sweep->add_option("--alert-threshold", sweep_args.alert_threshold,
                      "emit an ALERT line for cells with p at or above this")->capture_default_str();

    KalmanArgs kalman_args;
    kalman_args.seed = seed;
    CLI::App* kalman = app.add_subcommand("kalman", "positioning-filter error study");
    kalman->add_option("--scenario", kalman_args.scenario_path, "scenario file")->required();
    kalman->add_option("--N", kalman_args.N, "crowd size")->capture_default_str();
    kalman->add_option("--S", kalman_args.duration_seconds, "recorded duration, seconds")->capture_default_str();
    kalman->add_option("--E", kalman_args.errors, "error scales, meters")->delimiter(',');
    kalman->add_option("--q", kalman_args.q, "filter process noise intensity")->capture_default_str();
    kalman->add_option("--posn-var", kalman_args.posn_var, "position measurement variance")
        ->capture_default_str();
    kalman->add_option("--vel-var", kalman_args.vel_var, "velocity measurement variance")->capture_default_str();
    kalman->add_option("--seed", kalman_args.seed, "master seed");
    kalman->add_option("--out", kalman_args.out_path, "MAE CSV path (default: stdout)");
    kalman->add_option("--kde-dir", kalman_args.kde_dir,
                       "also write per-E error density CSVs into this directory");

    ConvertArgs convert_args;
    CLI::App* convert = app.add_subcommand("convert", "convert global fixes to venue-local");
    convert->add_option("--scenario", convert_args.scenario_path,
                        "take the origin from this scenario's geo section");
    convert->add_option("--lat0", convert_args.lat0, "origin latitude, degrees");
    convert->add_option("--lon0", convert_args.lon0, "origin longitude, degrees");
    convert->add_option("--rotation", convert_args.rotation,
                        "venue frame rotation, radians counterclockwise")->capture_default_str();
    convert->add_option("--earth-radius", convert_args.earth_radius, "sphere radius, meters")->capture_default_str();
    convert->add_option("--in", convert_args.in_path, "input CSV of fixes")->required();
    convert->add_option("--out", convert_args.out_path, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*sim) return cmd_simulate(sim_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*kalman) return cmd_kalman(kalman_args);
    if (*convert) return cmd_convert(convert_args);
    return 1;
} catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
}

}  // namespace ares
