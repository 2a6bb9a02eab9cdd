#include "ares/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ares {
namespace {

std::int64_t cell_key(int cx, int cy) {
    return (static_cast<std::int64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::int64_t>(static_cast<std::uint32_t>(cy));
}

int cell_coord(double v, double cell_size) {
    return static_cast<int>(std::floor(v / cell_size));
}

using Hit = std::pair<int, double>;

bool hit_less(const Hit& a, const Hit& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
}

void collect(const SpatialIndex& index, std::span<const AgentState> agents, Vec2 center,
             double radius, int exclude_id, std::vector<Hit>& out) {
    out.clear();
    const int cx0 = cell_coord(center.x - radius, index.cell_size);
    const int cx1 = cell_coord(center.x + radius, index.cell_size);
    const int cy0 = cell_coord(center.y - radius, index.cell_size);
    const int cy1 = cell_coord(center.y + radius, index.cell_size);
    const double r_sq = radius * radius;
    for (int cx = cx0; cx <= cx1; ++cx) {
        for (int cy = cy0; cy <= cy1; ++cy) {
            auto it = index.cells.find(cell_key(cx, cy));
            if (it == index.cells.end()) continue;
            for (int id : it->second) {
                if (id == exclude_id) continue;
                const double d_sq = (agents[id].position - center).norm_sq();
                if (d_sq <= r_sq) out.emplace_back(id, std::sqrt(d_sq));
            }
        }
    }
}

}  // namespace

SpatialIndex index_build(std::span<const AgentState> agents, double cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("index_build: cell_size must be > 0");
    SpatialIndex index;
    index.cell_size = cell_size;
    index.cells.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentState& a = agents[i];
        if (a.id != static_cast<int>(i))
            throw std::invalid_argument("index_build: agents must be ordered by id");
        if (a.done()) continue;
        if (!a.position.finite())
            throw std::invalid_argument("index_build: non-finite agent position");
        const std::int64_t key = cell_key(cell_coord(a.position.x, cell_size),
                                          cell_coord(a.position.y, cell_size));
        index.cells[key].push_back(a.id);
        ++index.indexed_count;
    }
    return index;
}

std::vector<Hit> neighbors_within(const SpatialIndex& index, std::span<const AgentState> agents,
                                  Vec2 center, double radius, int exclude_id) {
    if (!(radius > 0.0)) throw std::invalid_argument("neighbors_within: radius must be > 0");
    std::vector<Hit> hits;
    collect(index, agents, center, radius, exclude_id, hits);
    std::sort(hits.begin(), hits.end(), hit_less);
    return hits;
}

std::vector<Hit> nearest_k_within(const SpatialIndex& index, std::span<const AgentState> agents,
                                  Vec2 center, double radius, std::size_t k, int exclude_id) {
    std::vector<Hit> hits;
    if (k == 0) return hits;
    // In dense crowds the k nearest agents sit well inside the full query
    // radius, so probe a small ball first and only fall back to the full
    // radius when it comes back short.
    const double probe = std::min(radius, std::max(index.cell_size, 1.25));
    if (probe < radius) {
        collect(index, agents, center, probe, exclude_id, hits);
        if (hits.size() < k) collect(index, agents, center, radius, exclude_id, hits);
    } else {
        collect(index, agents, center, radius, exclude_id, hits);
    }
    if (hits.size() > k) {
        std::nth_element(hits.begin(), hits.begin() + k - 1, hits.end(), hit_less);
        hits.resize(k);
    }
    std::sort(hits.begin(), hits.end(), hit_less);
    return hits;
}

std::vector<int> indexed_ids(const SpatialIndex& index) {
    std::vector<int> ids;
    ids.reserve(index.indexed_count);
    for (const auto& [key, bucket] : index.cells)
        ids.insert(ids.end(), bucket.begin(), bucket.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace ares
