#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ares/agent.hpp"

namespace ares {

// Uniform grid over agent positions. Cells are addressed by the floor of
// position / cell_size and hold agent ids in ascending order. Agents that
// have left the venue (Phase::Done) are not indexed.
struct SpatialIndex {
    double cell_size = 0.0;
    std::unordered_map<std::int64_t, std::vector<int>> cells;
    std::size_t indexed_count = 0;
};

// Requires cell_size > 0, finite positions, and agents[i].id == i.
SpatialIndex index_build(std::span<const AgentState> agents, double cell_size);

// All indexed agents with distance(position, center) <= radius, as (id, distance)
// pairs sorted by distance, ties by id. Pass exclude_id to drop one agent
// (typically the query agent itself); -1 keeps everyone.
std::vector<std::pair<int, double>> neighbors_within(const SpatialIndex& index,
                                                     std::span<const AgentState> agents,
                                                     Vec2 center, double radius,
                                                     int exclude_id = -1);

// The k nearest indexed agents within radius, same ordering and exclusion
// rules as neighbors_within. Returns fewer than k when the ball holds fewer.
std::vector<std::pair<int, double>> nearest_k_within(const SpatialIndex& index,
                                                     std::span<const AgentState> agents,
                                                     Vec2 center, double radius, std::size_t k,
                                                     int exclude_id = -1);

std::vector<int> indexed_ids(const SpatialIndex& index);

}  // namespace ares
