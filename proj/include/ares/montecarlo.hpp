#pragma once

// Trial runner and probability estimation. A trial spawns a crowd on the
// scenario's grid, optionally perturbs the starting positions, then steps the
// simulator while an assessment method watches for a stampede signature. The
// estimator aggregates many independent trials into p with a normal-theory
// confidence interval.
//
// Determinism contract: every trial derives its own seed from
// (master seed, method, error scale, crowd size, trial index), so results are
// byte-identical no matter how many worker threads execute the grid. The
// detection radius R is deliberately left out of the trial seed: runs that
// differ only in R see identical crowds, which makes comparisons across R
// paired instead of independent.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ares/assess.hpp"
#include "ares/kalman.hpp"
#include "ares/scenario.hpp"

namespace ares {

struct TrialSpec {
    AssessmentConfig assess;
    double error_scale = 0.0;   // Rayleigh RMS of the start-position error, meters
    std::size_t agent_count = 0;
    std::size_t horizon = 1500;  // simulation steps per trial (150 s at the default dt)
    double dt = 0.0;             // 0 means: use the scenario's model dt
    std::uint64_t seed = 0;
    bool early_exit = true;     // stop stepping once the detector has fired
};

struct TrialOutcome {
    bool stampede = false;
    DetectionReport report;       // first triggering report, or the peak seen
    std::size_t steps_executed = 0;
};

struct ProbabilityEstimate {
    double p = 0.0;
    double ci_low = 0.0;   // p - 1.96 sigma/sqrt(n), clamped to [0, 1]
    double ci_high = 0.0;
    double sigma = 0.0;    // sample standard deviation (n-1 denominator)
    std::size_t n = 0;
};

// Packs `count` agents into the scenario's spawn rect on a column-major grid
// (columns fill bottom to top, advancing away from the venue). Masses are
// drawn per agent from a truncated normal; everything else starts at rest,
// headed for the first waypoint. Throws if the rect cannot hold `count`.
std::vector<AgentState> spawn_agents(const Scenario& scenario, std::size_t count,
                                     std::uint64_t seed);

TrialOutcome run_trial(const Scenario& scenario, const TrialSpec& spec);

// Called with the freshly spawned (possibly perturbed) crowd at steps_done = 0
// and again after every simulation step. Lets callers record trajectories
// without owning a second copy of the trial loop.
using StepObserver = std::function<void(const World& world, std::size_t steps_done)>;

// Runs one simulation evaluated by several assessment configs at once.
// Outcome i is identical to what run_trial would produce for configs[i] with
// the same spec, because the crowd dynamics do not depend on the observer.
std::vector<TrialOutcome> run_trial_multi(const Scenario& scenario, const TrialSpec& spec,
                                          std::span<const AssessmentConfig> configs,
                                          const StepObserver& observer = {});

// Mean, CI, and spread of a 0/1 indicator sample. Needs n >= 2.
ProbabilityEstimate estimate(std::span<const std::uint8_t> indicators);

std::uint64_t trial_seed(std::uint64_t master_seed, Method method, double error_scale,
                         std::size_t agent_count, std::size_t trial_index);

// Cartesian sweep over methods x R x E x N.
struct GridSpec {
    std::vector<Method> methods;
    std::vector<double> radii{1.0};
    std::vector<double> error_scales{0.0};
    std::vector<std::size_t> agent_counts;
    std::size_t trials = 100;
    std::size_t horizon = 1500;
    double dt = 0.0;
    std::uint64_t master_seed = 0;
    std::size_t jobs = 1;
    AssessmentConfig base;  // thresholds etc.; method and R are overwritten per cell
};

struct ResultRow {
    Method method;
    double R = 0.0;
    double E = 0.0;
    std::size_t N = 0;
    std::size_t n = 0;
    double p = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double mean_runtime_ms = 0.0;  // mean simulated trial duration
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

// Rows come out ordered by method, then R, then E, then N, each in the order
// its GridSpec vector lists, regardless of jobs.
ResultTable run_grid(const Scenario& scenario, const GridSpec& grid);

// Header: method,R,E,N,n,p,ci_low,ci_high,mean_runtime_ms
std::string to_csv(const ResultTable& table);

// Positioning-filter experiment: simulate one crowd noise-free, record every
// agent's trajectory, then replay the recordings through the filter at each
// error scale. measured is the raw final-step position error, estimated the
// filter's.
struct FilterExperiment {
    std::vector<double> error_scales;
    std::vector<double> measured_mae;
    std::vector<double> estimated_mae;
    std::vector<std::vector<double>> measured_samples;   // per error scale
    std::vector<std::vector<double>> estimated_samples;
};

FilterExperiment run_filter_experiment(const Scenario& scenario, std::size_t agent_count,
                                       std::size_t steps, std::span<const double> error_scales,
                                       const KalmanConfig& filter, std::uint64_t seed);

// Header: E,estimated,measured
std::string mae_to_csv(const FilterExperiment& experiment);

}  // namespace ares
