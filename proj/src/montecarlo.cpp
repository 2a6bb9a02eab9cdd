#include "ares/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "ares/noise.hpp"
#include "ares/pedmodel.hpp"
#include "ares/rng.hpp"
#include "ares/spatial_index.hpp"
#include "ares/textio.hpp"

namespace ares {
namespace {

// Matches the cell size the simulator itself uses for neighbor queries.
constexpr double kIndexCell = 1.25;

}  // namespace

std::vector<AgentState> spawn_agents(const Scenario& scenario, std::size_t count,
                                     std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("spawn: need at least one agent");
    const Rect rect = scenario.venue.spawn_region;
    const double spacing = scenario.spawn_spacing;
    const auto rows = static_cast<std::size_t>(std::floor(rect.height() / spacing));
    const auto cols = static_cast<std::size_t>(std::floor(rect.width() / spacing));
    if (rows == 0 || count > rows * cols)
        throw std::invalid_argument("spawn: rect holds " + std::to_string(rows * cols) +
                                    " agents at this spacing, asked for " + std::to_string(count));

    std::vector<AgentState> agents(count);
    for (std::size_t i = 0; i < count; ++i) {
        AgentState& a = agents[i];
        a.id = static_cast<int>(i);
        const std::size_t col = i / rows;
        const std::size_t row = i % rows;
        a.position = {rect.min.x + (static_cast<double>(col) + 0.5) * spacing,
                      rect.min.y + (static_cast<double>(row) + 0.5) * spacing};
        a.radius = scenario.agent_radius;
        Rng mass_rng(hash_combine(seed, stream::kMass, static_cast<std::uint64_t>(i)));
        a.mass = sample_mass(mass_rng);
        a.pref_speed = scenario.model.pref_speed;
        a.max_speed = scenario.model.max_speed;
        a.behavior = BehaviorPhase::travelling(0);
    }
    return agents;
}

std::vector<TrialOutcome> run_trial_multi(const Scenario& scenario, const TrialSpec& spec,
                                          std::span<const AssessmentConfig> configs,
                                          const StepObserver& observer) {
    if (configs.empty()) throw std::invalid_argument("trial: need an assessment config");
    if (!(spec.error_scale >= 0.0))
        throw std::invalid_argument("trial: error scale must be >= 0");
    PedModelConfig cfg = scenario.model;
    if (spec.dt > 0.0) cfg.dt = spec.dt;
    validate(cfg);

    World world{spawn_agents(scenario, spec.agent_count, spec.seed), spec.seed, 0};
    if (spec.error_scale > 0.0) {
        Rng noise_rng(hash_combine(spec.seed, stream::kNoise));
        perturb_positions(world.agents, spec.error_scale, noise_rng);
    }
    const WallIndex walls(scenario.venue, wall_query_margin(cfg));

    std::vector<TrialOutcome> out(configs.size());
    std::vector<DetectionReport> peak(configs.size());
    std::size_t pending = configs.size();

    auto evaluate_all = [&](std::size_t steps_done) {
        const SpatialIndex index = index_build(world.agents, kIndexCell);
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (out[i].stampede) continue;
            const DetectionReport r =
                evaluate(world.agents, index, configs[i], cfg.dt, static_cast<long>(steps_done));
            if (r.stampede) {
                out[i].stampede = true;
                out[i].report = r;
                out[i].steps_executed = steps_done;
                --pending;
            } else if (peak[i].step < 0 || r.max_value > peak[i].max_value) {
                peak[i] = r;
            }
        }
    };

    if (observer) observer(world, 0);
    evaluate_all(0);
    std::size_t steps_done = 0;
    while (steps_done < spec.horizon && (pending > 0 || !spec.early_exit)) {
        step(world, scenario.venue, walls, cfg);
        ++steps_done;
        if (observer) observer(world, steps_done);
        evaluate_all(steps_done);
        const bool all_done = std::all_of(world.agents.begin(), world.agents.end(),
                                          [](const AgentState& a) { return a.done(); });
        if (all_done) break;
    }

    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (out[i].stampede) continue;
        out[i].report = peak[i];
        out[i].steps_executed = steps_done;
    }
    return out;
}

TrialOutcome run_trial(const Scenario& scenario, const TrialSpec& spec) {
    return run_trial_multi(scenario, spec, {&spec.assess, 1}).front();
}

ProbabilityEstimate estimate(std::span<const std::uint8_t> indicators) {
    const std::size_t n = indicators.size();
    if (n < 2) throw std::invalid_argument("estimate: need at least two trials");
    double sum = 0.0;
    for (const std::uint8_t v : indicators) sum += v ? 1.0 : 0.0;
    const double p = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const std::uint8_t v : indicators) {
        const double d = (v ? 1.0 : 0.0) - p;
        ss += d * d;
    }
    ProbabilityEstimate e;
    e.n = n;
    e.p = p;
    e.sigma = std::sqrt(ss / (static_cast<double>(n) - 1.0));
    const double half = 1.96 * e.sigma / std::sqrt(static_cast<double>(n));
    e.ci_low = std::max(0.0, p - half);
    e.ci_high = std::min(1.0, p + half);
    return e;
}

std::uint64_t trial_seed(std::uint64_t master_seed, Method method, double error_scale,
                         std::size_t agent_count, std::size_t trial_index) {
    const auto error_milli = static_cast<std::uint64_t>(std::llround(error_scale * 1000.0));
    return hash_combine(master_seed, static_cast<std::uint64_t>(method) + 1, error_milli,
                        static_cast<std::uint64_t>(agent_count),
                        static_cast<std::uint64_t>(trial_index));
}

ResultTable run_grid(const Scenario& scenario, const GridSpec& grid) {
    if (grid.methods.empty() || grid.radii.empty() || grid.error_scales.empty() ||
        grid.agent_counts.empty())
        throw std::invalid_argument("grid: every axis needs at least one value");
    if (grid.trials < 2) throw std::invalid_argument("grid: need at least two trials per cell");
    for (const double R : grid.radii)
        if (!(R > 0.0)) throw std::invalid_argument("grid: R must be > 0");
    for (const double E : grid.error_scales)
        if (!(E >= 0.0)) throw std::invalid_argument("grid: E must be >= 0");
    const std::size_t jobs = std::max<std::size_t>(1, grid.jobs);
    const double dt_eff = grid.dt > 0.0 ? grid.dt : scenario.model.dt;

    const std::size_t n_r = grid.radii.size();
    const std::size_t n_e = grid.error_scales.size();
    const std::size_t n_n = grid.agent_counts.size();
    ResultTable table;
    table.rows.resize(grid.methods.size() * n_r * n_e * n_n);

    for (std::size_t mi = 0; mi < grid.methods.size(); ++mi) {
        for (std::size_t ei = 0; ei < n_e; ++ei) {
            for (std::size_t ni = 0; ni < n_n; ++ni) {
                // Every R shares the same simulated crowds, so one pass
                // through the trials covers the whole R axis.
                std::vector<AssessmentConfig> configs(n_r, grid.base);
                for (std::size_t ri = 0; ri < n_r; ++ri) {
                    configs[ri].method = grid.methods[mi];
                    configs[ri].R = grid.radii[ri];
                }

                std::vector<std::vector<TrialOutcome>> outcomes(grid.trials);
                std::atomic<std::size_t> cursor{0};
                std::mutex failure_mutex;
                std::exception_ptr failure;
                auto worker = [&]() {
                    for (;;) {
                        const std::size_t t = cursor.fetch_add(1);
                        if (t >= grid.trials) return;
                        try {
                            TrialSpec spec;
                            spec.error_scale = grid.error_scales[ei];
                            spec.agent_count = grid.agent_counts[ni];
                            spec.horizon = grid.horizon;
                            spec.dt = grid.dt;
                            spec.seed = trial_seed(grid.master_seed, grid.methods[mi],
                                                   grid.error_scales[ei], grid.agent_counts[ni], t);
                            outcomes[t] = run_trial_multi(scenario, spec, configs);
                        } catch (...) {
                            const std::lock_guard<std::mutex> lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                            return;
                        }
                    }
                };
                if (jobs == 1 || grid.trials == 1) {
                    worker();
                } else {
                    std::vector<std::thread> pool;
                    const std::size_t spawn = std::min(jobs, grid.trials);
                    pool.reserve(spawn);
                    for (std::size_t j = 0; j < spawn; ++j) pool.emplace_back(worker);
                    for (std::thread& th : pool) th.join();
                }
                if (failure) std::rethrow_exception(failure);

                for (std::size_t ri = 0; ri < n_r; ++ri) {
                    std::vector<std::uint8_t> indicators(grid.trials);
                    double runtime_sum = 0.0;
                    for (std::size_t t = 0; t < grid.trials; ++t) {
                        indicators[t] = outcomes[t][ri].stampede ? 1 : 0;
                        runtime_sum += static_cast<double>(outcomes[t][ri].steps_executed) *
                                       dt_eff * 1000.0;
                    }
                    const ProbabilityEstimate pe = estimate(indicators);
                    ResultRow& row = table.rows[((mi * n_r + ri) * n_e + ei) * n_n + ni];
                    row.method = grid.methods[mi];
                    row.R = grid.radii[ri];
                    row.E = grid.error_scales[ei];
                    row.N = grid.agent_counts[ni];
                    row.n = pe.n;
                    row.p = pe.p;
                    row.ci_low = pe.ci_low;
                    row.ci_high = pe.ci_high;
                    row.mean_runtime_ms = runtime_sum / static_cast<double>(grid.trials);
                }
            }
        }
    }
    return table;
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    out << "method,R,E,N,n,p,ci_low,ci_high,mean_runtime_ms\n";
    for (const ResultRow& r : table.rows)
        out << method_name(r.method) << ',' << format_number(r.R) << ',' << format_number(r.E)
            << ',' << r.N << ',' << r.n << ',' << format_number(r.p) << ','
            << format_number(r.ci_low) << ',' << format_number(r.ci_high) << ','
            << format_number(r.mean_runtime_ms) << '\n';
    return out.str();
}

FilterExperiment run_filter_experiment(const Scenario& scenario, std::size_t agent_count,
                                       std::size_t steps, std::span<const double> error_scales,
                                       const KalmanConfig& filter, std::uint64_t seed) {
    if (agent_count == 0) throw std::invalid_argument("filter experiment: need agents");
    if (steps == 0) throw std::invalid_argument("filter experiment: need at least one step");
    if (error_scales.empty()) throw std::invalid_argument("filter experiment: need error scales");
    for (const double E : error_scales)
        if (!(E >= 0.0)) throw std::invalid_argument("filter experiment: E must be >= 0");

    PedModelConfig cfg = scenario.model;
    validate(cfg);
    World world{spawn_agents(scenario, agent_count, seed), seed, 0};
    const WallIndex walls(scenario.venue, wall_query_margin(cfg));

    std::vector<Trajectory> trajectories(agent_count);
    for (Trajectory& t : trajectories) t.samples.reserve(steps + 1);
    auto record = [&]() {
        for (std::size_t i = 0; i < agent_count; ++i) {
            const AgentState& a = world.agents[i];
            trajectories[i].samples.push_back({static_cast<float>(a.position.x),
                                               static_cast<float>(a.position.y),
                                               static_cast<float>(a.velocity.x),
                                               static_cast<float>(a.velocity.y)});
        }
    };
    record();
    for (std::size_t s = 0; s < steps; ++s) {
        step(world, scenario.venue, walls, cfg);
        record();
    }

    FilterExperiment experiment;
    for (const double E : error_scales) {
        const std::uint64_t run_seed = hash_combine(
            seed, stream::kNoise, static_cast<std::uint64_t>(std::llround(E * 1000.0)));
        const auto errors = evaluate_filter(trajectories, E, filter, run_seed);
        std::vector<double> measured;
        std::vector<double> estimated;
        measured.reserve(errors.size());
        estimated.reserve(errors.size());
        for (const auto& [m, est] : errors) {
            measured.push_back(m);
            estimated.push_back(est);
        }
        experiment.error_scales.push_back(E);
        experiment.measured_mae.push_back(mae(measured));
        experiment.estimated_mae.push_back(mae(estimated));
        experiment.measured_samples.push_back(std::move(measured));
        experiment.estimated_samples.push_back(std::move(estimated));
    }
    return experiment;
}

std::string mae_to_csv(const FilterExperiment& experiment) {
    std::ostringstream out;
    out << "E,estimated,measured\n";
    for (std::size_t i = 0; i < experiment.error_scales.size(); ++i)
        out << format_number(experiment.error_scales[i]) << ','
            << format_number(experiment.estimated_mae[i]) << ','
            << format_number(experiment.measured_mae[i]) << '\n';
    return out.str();
}

}  // namespace ares
