#include "ares/noise.hpp"

#include <stdexcept>

namespace ares {

double sample_error_magnitude(double E, Rng& rng) {
    if (!(E > 0.0)) throw std::invalid_argument("noise: RMS error must be > 0");
    return rng.rayleigh(E);
}

void perturb_positions(std::span<AgentState> agents, double E, Rng& rng) {
    if (!(E >= 0.0)) throw std::invalid_argument("noise: RMS error must be >= 0");
    if (E == 0.0) return;  // perfect positioning, bypass entirely
    for (AgentState& agent : agents) {
        const double magnitude = sample_error_magnitude(E, rng);
        agent.position += magnitude * rng.unit_vector();
    }
}

}  // namespace ares
