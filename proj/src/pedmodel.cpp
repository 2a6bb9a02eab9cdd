#include "ares/pedmodel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ares/rng.hpp"

namespace ares {
namespace {

constexpr double kParallelEps = 1e-9;

Vec2 line_direction(const HalfPlane& h) { return {h.normal.y, -h.normal.x}; }

// Deviation cost is (par^2 + bias^2 * perp^2) measured against the preferred
// direction; bias 1 (or no meaningful preferred direction) is Euclidean.
struct Metric {
    Vec2 e_par{1.0, 0.0};
    Vec2 e_perp{0.0, 1.0};
    double bias_sq = 1.0;
    bool isotropic = true;
};

Metric make_metric(Vec2 v_pref, double bias) {
    Metric m;
    if (bias == 1.0 || v_pref.norm_sq() <= 1e-12) return m;
    m.e_par = v_pref.normalized();
    m.e_perp = m.e_par.perp();
    m.bias_sq = bias * bias;
    m.isotropic = false;
    return m;
}

// Minimize the metric distance to opt over the part of line line_no that lies
// inside the speed disc and satisfies all earlier half-planes. dir_opt flips
// the objective to "furthest along direction opt" for the fallback stage.
bool lp_line(std::span<const HalfPlane> planes, std::size_t line_no, double radius, Vec2 opt,
             bool dir_opt, const Metric& m, Vec2& result) {
    const Vec2 point = planes[line_no].point;
    const Vec2 dir = line_direction(planes[line_no]);
    const double dot_pd = dot(point, dir);
    const double discriminant = dot_pd * dot_pd + radius * radius - point.norm_sq();
    if (discriminant < 0.0) return false;  // line misses the speed disc

    const double sqrt_disc = std::sqrt(discriminant);
    double t_left = -dot_pd - sqrt_disc;
    double t_right = -dot_pd + sqrt_disc;

    for (std::size_t j = 0; j < line_no; ++j) {
        const double a = dot(planes[j].normal, dir);
        const double b = dot(planes[j].normal, point - planes[j].point);
        if (std::abs(a) <= kParallelEps) {
            if (b < 0.0) return false;  // parallel and on the wrong side
            continue;
        }
        const double t = -b / a;
        if (a > 0.0)
            t_left = std::max(t_left, t);
        else
            t_right = std::min(t_right, t);
        if (t_left > t_right) return false;
    }

    if (dir_opt) {
        result = dot(opt, dir) > 0.0 ? point + t_right * dir : point + t_left * dir;
        return true;
    }

    double t_star;
    if (m.isotropic) {
        t_star = dot(opt - point, dir);
    } else {
        const Vec2 w0 = point - opt;
        const double d1 = dot(dir, m.e_par);
        const double d2 = dot(dir, m.e_perp);
        const double c1 = dot(w0, m.e_par);
        const double c2 = dot(w0, m.e_perp);
        t_star = -(c1 * d1 + m.bias_sq * c2 * d2) / (d1 * d1 + m.bias_sq * d2 * d2);
    }
    result = point + std::clamp(t_star, t_left, t_right) * dir;
    return true;
}

// Incremental LP over the half-planes in order; returns planes.size() on
// success or the index of the first plane that made the program infeasible,
// leaving result at the last feasible optimum.
std::size_t lp_planes(std::span<const HalfPlane> planes, double radius, Vec2 opt, bool dir_opt,
                      const Metric& m, Vec2& result) {
    if (dir_opt)
        result = opt * radius;
    else if (opt.norm_sq() > radius * radius)
        result = opt.normalized() * radius;
    else
        result = opt;

    for (std::size_t i = 0; i < planes.size(); ++i) {
        if (dot(planes[i].normal, result - planes[i].point) < 0.0) {
            const Vec2 saved = result;
            if (!lp_line(planes, i, radius, opt, dir_opt, m, result)) {
                result = saved;
                return i;
            }
        }
    }
    return planes.size();
}

// Fallback stage: the soft planes beginning at begin_line are infeasible
// together, so walk them again and move result to minimize the largest soft
// violation, never violating the first hard_count (wall) planes.
void lp_fallback(std::span<const HalfPlane> planes, std::size_t hard_count,
                 std::size_t begin_line, double radius, Vec2& result) {
    const Metric euclid;
    double depth = 0.0;
    for (std::size_t i = begin_line; i < planes.size(); ++i) {
        if (-dot(planes[i].normal, result - planes[i].point) <= depth) continue;
        std::vector<HalfPlane> proj(planes.begin(),
                                    planes.begin() + static_cast<std::ptrdiff_t>(hard_count));
        const Vec2 dir_i = line_direction(planes[i]);
        for (std::size_t j = hard_count; j < i; ++j) {
            const Vec2 dir_j = line_direction(planes[j]);
            const double denom = det(dir_i, dir_j);
            HalfPlane plane;
            if (std::abs(denom) <= kParallelEps) {
                if (dot(planes[i].normal, planes[j].normal) > 0.0) continue;
                plane.point = 0.5 * (planes[i].point + planes[j].point);
            } else {
                plane.point =
                    planes[i].point +
                    (det(dir_j, planes[i].point - planes[j].point) / denom) * dir_i;
            }
            plane.normal = (dir_j - dir_i).normalized().perp();
            proj.push_back(plane);
        }
        const Vec2 saved = result;
        if (lp_planes(proj, radius, planes[i].normal, true, euclid, result) < proj.size())
            result = saved;  // numerically unreachable; keep the best point
        depth = -dot(planes[i].normal, result - planes[i].point);
    }
}

// Reciprocal avoidance constraint of `self` against `other`, each side taking
// half the correction. Outside contact the velocity obstacle is the usual
// truncated cone (cutoff circle at rel_pos/tau, legs tangent to the combined
// disc); already-overlapping discs get a push-apart plane along the center
// line scaled to clear the overlap within one step.
HalfPlane agent_plane(const AgentState& self, const AgentState& other,
                      const PedModelConfig& cfg) {
    const Vec2 rel_pos = other.position - self.position;
    const Vec2 rel_vel = self.velocity - other.velocity;
    const double dist_sq = rel_pos.norm_sq();
    const double combined = self.radius + other.radius;
    const double combined_sq = combined * combined;

    Vec2 dir;
    Vec2 u;
    if (dist_sq > combined_sq) {
        const double inv_tau = 1.0 / cfg.tau;
        const Vec2 w = rel_vel - inv_tau * rel_pos;
        const double w_len_sq = w.norm_sq();
        const double dot1 = dot(w, rel_pos);
        if (dot1 < 0.0 && dot1 * dot1 > combined_sq * w_len_sq) {
            // Closest point of the velocity obstacle is on the cutoff circle.
            const double w_len = std::sqrt(w_len_sq);
            const Vec2 unit_w = w / w_len;
            dir = {unit_w.y, -unit_w.x};
            u = (combined * inv_tau - w_len) * unit_w;
        } else {
            // Closest point is on one of the legs.
            const double leg = std::sqrt(dist_sq - combined_sq);
            if (det(rel_pos, w) > 0.0) {
                dir = Vec2{rel_pos.x * leg - rel_pos.y * combined,
                           rel_pos.x * combined + rel_pos.y * leg} /
                      dist_sq;
            } else {
                dir = -Vec2{rel_pos.x * leg + rel_pos.y * combined,
                            -rel_pos.x * combined + rel_pos.y * leg} /
                      dist_sq;
            }
            u = dot(rel_vel, dir) * dir - rel_vel;
        }
    } else {
        const double inv_dt = 1.0 / cfg.dt;
        const Vec2 w = rel_vel - inv_dt * rel_pos;
        const double w_len = w.norm();
        Vec2 unit_w;
        if (w_len > 1e-12)
            unit_w = w / w_len;
        else if (dist_sq > 1e-18)
            unit_w = -rel_pos / std::sqrt(dist_sq);
        else
            // Coincident centers: split along a fixed axis, opposite ways.
            unit_w = self.id < other.id ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0};
        dir = {unit_w.y, -unit_w.x};
        u = (combined * inv_dt - w_len) * unit_w;
    }
    return {self.velocity + 0.5 * u, {-dir.y, dir.x}};
}

// A wall limits the approach speed toward it: the velocity component into the
// wall may not exceed gap / tau_obst, where gap is the clearance between the
// agent's rim and the segment.
HalfPlane wall_plane(const AgentState& agent, const Segment& seg, const PedModelConfig& cfg) {
    const Vec2 closest = closest_point_on_segment(seg, agent.position);
    const Vec2 away = agent.position - closest;
    const double d = away.norm();
    const Vec2 n = d > 1e-9 ? away / d : (seg.b - seg.a).normalized().perp();
    const double gap = std::max(0.0, d - agent.radius);
    return {-(gap / cfg.tau_obst) * n, n};
}

}  // namespace

void validate(const PedModelConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("pedmodel: dt must be > 0");
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("pedmodel: tau must be > 0");
    if (!(cfg.tau_obst > 0.0)) throw std::invalid_argument("pedmodel: tau_obst must be > 0");
    if (!(cfg.pref_speed > 0.0 && cfg.pref_speed <= cfg.max_speed))
        throw std::invalid_argument("pedmodel: need 0 < pref_speed <= max_speed");
    if (!(cfg.factor > 0.0)) throw std::invalid_argument("pedmodel: factor must be > 0");
    if (!(cfg.buffer >= 0.0)) throw std::invalid_argument("pedmodel: buffer must be >= 0");
    if (!(cfg.turning_bias > 0.0))
        throw std::invalid_argument("pedmodel: turning_bias must be > 0");
    if (!(cfg.max_pref_accel > 0.0))
        throw std::invalid_argument("pedmodel: max_pref_accel must be > 0");
    if (!(cfg.neighbor_limit_radius > 0.0))
        throw std::invalid_argument("pedmodel: neighbor_limit_radius must be > 0");
    if (cfg.neighbor_limit_count < 1)
        throw std::invalid_argument("pedmodel: neighbor_limit_count must be >= 1");
}

Vec2 preferred_velocity(const AgentState& agent, const VenueMap& map, const PedModelConfig& cfg) {
    Vec2 desired;
    switch (agent.behavior.kind) {
        case Phase::Travelling: {
            const int wp = agent.behavior.waypoint;
            if (wp < 0 || wp >= static_cast<int>(map.waypoints.size()))
                throw std::invalid_argument("pedmodel: waypoint index out of range");
            desired = (map.waypoints[wp].center - agent.position).normalized() * agent.pref_speed;
            break;
        }
        case Phase::Waiting:
            return {0.0, 0.0};  // stops dead; the ramp clamp does not apply
        case Phase::Exiting:
            desired = (closest_point_on_segment(map.exit_line, agent.position) - agent.position)
                          .normalized() *
                      agent.pref_speed;
            break;
        case Phase::Done:
            throw std::invalid_argument("pedmodel: preferred_velocity on a Done agent");
    }
    const Vec2 delta = desired - agent.pref_velocity;
    const double limit = cfg.max_pref_accel * cfg.dt;
    if (delta.norm_sq() > limit * limit)
        desired = agent.pref_velocity + delta.normalized() * limit;
    return desired;
}

ConstraintSet vo_halfplanes(const AgentState& agent, std::span<const AgentState> agents,
                            std::span<const std::pair<int, double>> neighbors,
                            std::span<const Segment> obstacles, const PedModelConfig& cfg) {
    ConstraintSet cs;
    cs.planes.reserve(neighbors.size() + 2);
    // A wall further away than this cannot bind anywhere inside the speed
    // disc (the permitted approach speed already exceeds max_speed).
    const double wall_range = agent.radius + cfg.tau_obst * agent.max_speed + 0.05;
    for (const Segment& seg : obstacles) {
        if (point_segment_distance(agent.position, seg) > wall_range) continue;
        cs.planes.push_back(wall_plane(agent, seg, cfg));
    }
    cs.hard_count = cs.planes.size();
    for (const auto& [id, dist] : neighbors) {
        (void)dist;
        cs.planes.push_back(agent_plane(agent, agents[id], cfg));
    }
    return cs;
}

double stride_cap(const AgentState& agent, Vec2 v_pref, std::span<const AgentState> agents,
                  std::span<const std::pair<int, double>> neighbors,
                  std::span<const Segment> obstacles, const PedModelConfig& cfg) {
    const double speed = v_pref.norm();
    if (speed <= 0.0) return agent.max_speed;
    const Vec2 heading = v_pref / speed;
    const double cos_half_angle = std::sqrt(0.5);

    double d_free = std::numeric_limits<double>::infinity();
    for (const auto& [id, dist] : neighbors) {
        if (dist <= 0.0) {
            d_free = 0.0;
            break;
        }
        const Vec2 delta = agents[id].position - agent.position;
        if (dot(delta, heading) < cos_half_angle * dist) continue;
        d_free = std::min(d_free, std::max(0.0, dist - agents[id].radius));
    }
    for (const Segment& seg : obstacles) {
        const Vec2 closest = closest_point_on_segment(seg, agent.position);
        const Vec2 delta = closest - agent.position;
        const double d = delta.norm();
        if (d <= 1e-12) {
            d_free = 0.0;
            break;
        }
        // Cone test on the globally closest point only; a wall whose nearest
        // point lies abeam does not shorten the stride even if it also spans
        // ahead, since the hard wall constraints own collision safety.
        if (dot(delta, heading) < cos_half_angle * d) continue;
        d_free = std::min(d_free, d);
    }
    if (!std::isfinite(d_free)) return agent.max_speed;
    const double cap = (d_free - cfg.buffer * agent.radius) / cfg.factor;
    return std::clamp(cap, 0.0, agent.max_speed);
}

Vec2 solve_velocity(std::span<const HalfPlane> planes, std::size_t hard_count, Vec2 v_pref,
                    double max_speed, double turning_bias) {
    if (!(max_speed > 0.0)) throw std::invalid_argument("pedmodel: max_speed must be > 0");
    if (!(turning_bias > 0.0)) throw std::invalid_argument("pedmodel: turning_bias must be > 0");
    if (hard_count > planes.size())
        throw std::invalid_argument("pedmodel: hard_count exceeds plane count");
    if (!v_pref.finite()) throw std::invalid_argument("pedmodel: non-finite preferred velocity");

    const Metric metric = make_metric(v_pref, turning_bias);
    Vec2 result;
    const std::size_t failed = lp_planes(planes, max_speed, v_pref, false, metric, result);
    if (failed < planes.size()) lp_fallback(planes, hard_count, failed, max_speed, result);
    if (!result.finite()) result = {0.0, 0.0};
    return result;
}

WallIndex::WallIndex(const VenueMap& map, double margin)
    : segments_(map.obstacles), margin_(margin) {
    if (!(margin_ > 0.0)) throw std::invalid_argument("pedmodel: wall margin must be > 0");
    for (std::size_t idx = 0; idx < segments_.size(); ++idx) {
        const Segment& s = segments_[idx];
        if ((s.b - s.a).norm_sq() <= 0.0)
            throw std::invalid_argument("pedmodel: zero-length obstacle segment");
        const int cx0 = static_cast<int>(std::floor((std::min(s.a.x, s.b.x) - margin_) / kCell));
        const int cx1 = static_cast<int>(std::floor((std::max(s.a.x, s.b.x) + margin_) / kCell));
        const int cy0 = static_cast<int>(std::floor((std::min(s.a.y, s.b.y) - margin_) / kCell));
        const int cy1 = static_cast<int>(std::floor((std::max(s.a.y, s.b.y) + margin_) / kCell));
        for (int cx = cx0; cx <= cx1; ++cx)
            for (int cy = cy0; cy <= cy1; ++cy) cells_[key(cx, cy)].push_back(idx);
    }
}

std::int64_t WallIndex::key(int cx, int cy) {
    return (static_cast<std::int64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::int64_t>(static_cast<std::uint32_t>(cy));
}

void WallIndex::candidates(Vec2 p, std::vector<Segment>& out) const {
    out.clear();
    const auto it = cells_.find(key(static_cast<int>(std::floor(p.x / kCell)),
                                    static_cast<int>(std::floor(p.y / kCell))));
    if (it == cells_.end()) return;
    for (const std::size_t idx : it->second) out.push_back(segments_[idx]);
}

void step(World& world, const VenueMap& map, const WallIndex& walls, const PedModelConfig& cfg) {
    validate(cfg);
    auto& agents = world.agents;
    const SpatialIndex index = index_build(agents, 1.25);
    const std::size_t n = agents.size();

    // Phase 1: pick velocities from the unmodified snapshot. Pure per agent.
    std::vector<Vec2> new_vel(n);
    std::vector<Vec2> new_pref(n);
    std::vector<Segment> wall_scratch;
    for (std::size_t i = 0; i < n; ++i) {
        AgentState& agent = agents[i];
        if (agent.done()) continue;
        const Vec2 desired = preferred_velocity(agent, map, cfg);
        const auto neighbors = nearest_k_within(index, agents, agent.position,
                                                cfg.neighbor_limit_radius,
                                                cfg.neighbor_limit_count, agent.id);
        walls.candidates(agent.position, wall_scratch);
        const double cap = stride_cap(agent, desired, agents, neighbors, wall_scratch, cfg);
        const double mag = desired.norm();
        const Vec2 v_pref = mag > cap ? desired * (cap / mag) : desired;
        const ConstraintSet cs = vo_halfplanes(agent, agents, neighbors, wall_scratch, cfg);
        new_vel[i] = solve_velocity(cs.planes, cs.hard_count, v_pref, agent.max_speed,
                                    cfg.turning_bias);
        new_pref[i] = v_pref;
    }

    // Phase 2: commit movement and behavior. Single owner.
    for (std::size_t i = 0; i < n; ++i) {
        AgentState& agent = agents[i];
        if (agent.done()) continue;
        agent.prev_velocity = agent.velocity;
        agent.pref_velocity = new_pref[i];

        const Vec2 from = agent.position;
        Vec2 delta = new_vel[i] * cfg.dt;
        if (delta.norm_sq() > 0.0) {
            // Never let a center cross a wall: stop just short of the first
            // segment the movement ray would hit.
            walls.candidates(from, wall_scratch);
            double t_hit = std::numeric_limits<double>::infinity();
            for (const Segment& seg : wall_scratch) {
                const auto t = segment_intersection_t(from, from + delta, seg.a, seg.b);
                if (t) t_hit = std::min(t_hit, *t);
            }
            if (std::isfinite(t_hit)) {
                const double len = delta.norm();
                delta = delta * std::max(0.0, t_hit - 1e-6 / len);
            }
        }
        agent.position = from + delta;
        agent.velocity = delta / cfg.dt;

        switch (agent.behavior.kind) {
            case Phase::Travelling: {
                const Waypoint& wp = map.waypoints[agent.behavior.waypoint];
                if (distance(agent.position, wp.center) <= wp.arrival_radius) {
                    Rng wait_rng(hash_combine(world.seed, stream::kWait,
                                              static_cast<std::uint64_t>(agent.id),
                                              static_cast<std::uint64_t>(world.step_index)));
                    agent.behavior = BehaviorPhase::waiting(wait_rng.exponential(map.mean_wait),
                                                            agent.behavior.waypoint);
                }
                break;
            }
            case Phase::Waiting:
                agent.behavior.remaining -= cfg.dt;
                if (agent.behavior.remaining <= 0.0) {
                    const int next = agent.behavior.waypoint + 1;
                    agent.behavior = next < static_cast<int>(map.waypoints.size())
                                         ? BehaviorPhase::travelling(next)
                                         : BehaviorPhase::exiting();
                }
                break;
            case Phase::Exiting:
            case Phase::Done:
                break;
        }
        if (segment_intersection_t(from, agent.position, map.exit_line.a, map.exit_line.b)) {
            agent.behavior = BehaviorPhase::done();
            agent.velocity = {0.0, 0.0};
        }
    }
    ++world.step_index;
}

void step(World& world, const VenueMap& map, const PedModelConfig& cfg) {
    const WallIndex walls(map, wall_query_margin(cfg));
    step(world, map, walls, cfg);
}

double wall_query_margin(const PedModelConfig& cfg) {
    // Must cover every wall query made during a step: stride lookahead,
    // binding wall constraints, and movement truncation.
    const double stride_range = cfg.buffer * 0.5 + cfg.factor * cfg.max_speed;
    const double constraint_range = 0.5 + cfg.tau_obst * cfg.max_speed;
    const double move_range = cfg.dt * cfg.max_speed;
    return std::max({4.0, stride_range, constraint_range, move_range}) + 0.1;
}

}  // namespace ares
