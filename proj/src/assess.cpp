#include "ares/assess.hpp"

#include <cmath>
#include <stdexcept>

namespace ares {
namespace {

void check_radius(double R) {
    if (!(R > 0.0)) throw std::invalid_argument("assess: R must be > 0");
}

struct WeightedStats {
    double density = 0.0;
    Vec2 mean_velocity;
    double variance = 0.0;
    bool populated = false;
};

WeightedStats weighted_stats(Vec2 center, std::span<const AgentState> agents,
                             const SpatialIndex& index, double R, double cutoff) {
    check_radius(R);
    if (cutoff == 0.0) cutoff = 3.0 * R;
    if (!(cutoff > 0.0)) throw std::invalid_argument("assess: cutoff must be > 0");
    const auto hits = neighbors_within(index, agents, center, cutoff);
    WeightedStats stats;
    if (hits.empty()) return stats;
    stats.populated = true;
    double weight_sum = 0.0;
    for (const auto& [id, d] : hits) {
        const double w = gauss_weight(d, R);
        stats.density += w;
        weight_sum += w;
        stats.mean_velocity += w * agents[id].velocity;
    }
    stats.mean_velocity = stats.mean_velocity / weight_sum;
    for (const auto& [id, d] : hits) {
        const double w = gauss_weight(d, R);
        stats.variance += w * (agents[id].velocity - stats.mean_velocity).norm_sq();
    }
    stats.variance /= weight_sum;
    return stats;
}

WeightedStats require_populated(Vec2 center, std::span<const AgentState> agents,
                                const SpatialIndex& index, double R, double cutoff) {
    WeightedStats stats = weighted_stats(center, agents, index, R, cutoff);
    if (!stats.populated)
        throw std::domain_error("assess: no agents within cutoff of evaluation point");
    return stats;
}

}  // namespace

const char* method_name(Method method) {
    switch (method) {
        case Method::Pressure: return "pressure";
        case Method::Force: return "force";
        case Method::Density: return "density";
    }
    throw std::invalid_argument("assess: unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "pressure") return Method::Pressure;
    if (name == "force") return Method::Force;
    if (name == "density") return Method::Density;
    throw std::invalid_argument("assess: unknown method '" + name + "'");
}

double gauss_weight(double d, double R) {
    check_radius(R);
    if (!(d >= 0.0)) throw std::invalid_argument("assess: distance must be >= 0");
    return std::exp(-d * d / (R * R)) / (M_PI * R * R);
}

double local_density(Vec2 center, std::span<const AgentState> agents, const SpatialIndex& index,
                     double R, double cutoff) {
    return weighted_stats(center, agents, index, R, cutoff).density;
}

Vec2 local_velocity(Vec2 center, std::span<const AgentState> agents, const SpatialIndex& index,
                    double R, double cutoff) {
    return require_populated(center, agents, index, R, cutoff).mean_velocity;
}

double velocity_variance(Vec2 center, std::span<const AgentState> agents,
                         const SpatialIndex& index, double R, double cutoff) {
    return require_populated(center, agents, index, R, cutoff).variance;
}

double crowd_pressure(Vec2 center, std::span<const AgentState> agents, const SpatialIndex& index,
                      double R, double cutoff) {
    const WeightedStats stats = require_populated(center, agents, index, R, cutoff);
    return stats.density * stats.variance;
}

double physical_force(double mass, Vec2 v_prev, Vec2 v_cur, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("assess: dt must be > 0");
    return mass * (v_cur - v_prev).norm() / dt;
}

double sample_mass(Rng& rng) {
    for (;;) {
        const double m = rng.normal(70.0, 10.0);
        if (m >= 50.0 && m <= 100.0) return m;
    }
}

double neighbor_density(long L, double R) {
    check_radius(R);
    if (L < 0) throw std::invalid_argument("assess: neighbor count must be >= 0");
    return static_cast<double>(L) / (M_PI * R * R);
}

DetectionReport evaluate(std::span<const AgentState> agents, const SpatialIndex& index,
                         const AssessmentConfig& cfg, double dt, long step) {
    if (!(dt > 0.0)) throw std::invalid_argument("assess: dt must be > 0");
    check_radius(cfg.R);
    DetectionReport report;
    report.method = cfg.method;
    report.step = step;
    bool any = false;
    for (const AgentState& agent : agents) {
        if (agent.done()) continue;
        double value = 0.0;
        switch (cfg.method) {
            case Method::Pressure: {
                const WeightedStats stats =
                    weighted_stats(agent.position, agents, index, cfg.R, cfg.cutoff());
                value = stats.density * stats.variance;
                break;
            }
            case Method::Force:
                value = physical_force(agent.mass, agent.prev_velocity, agent.velocity, dt);
                break;
            case Method::Density: {
                const auto hits = neighbors_within(index, agents, agent.position, cfg.R, agent.id);
                value = neighbor_density(static_cast<long>(hits.size()), cfg.R);
                break;
            }
        }
        if (!any || value > report.max_value) {
            report.max_value = value;
            report.location = agent.position;
            any = true;
        }
    }
    if (!any) return report;
    switch (cfg.method) {
        case Method::Pressure:
            report.stampede = report.max_value >= cfg.pressure_threshold;
            report.turbulence = report.max_value >= cfg.turbulence_threshold;
            break;
        case Method::Force:
            report.stampede = report.max_value >= cfg.force_threshold;
            break;
        case Method::Density:
            report.stampede = report.max_value >= cfg.density_threshold;
            break;
    }
    return report;
}

}  // namespace ares
