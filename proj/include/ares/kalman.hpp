#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ares {

// Constant-velocity tracking filter over the state (x, y, vx, vy).
// Measurements are full state vectors: noisy positions plus true velocities,
// the velocity channel weighted by vel_var.
//
// The defaults are a deployment tuning, deliberately blind to the actual
// error scale of any particular run: posn_var is E0^2/2 for a nominal
// E0 = 5 m, and q / vel_var are set so the filter smooths heavily instead of
// chasing fixes. A filter in the field has no way to know the true E, and
// evaluating it as configured is exactly what exposes the regime where raw
// fixes beat it (small E) and the regime where it pays off (large E).
struct KalmanConfig {
    double dt = 0.1;         // s
    double q = 1e-6;         // process-noise spectral density, m^2/s^3
    double posn_var = 12.5;  // measurement position variance per axis, m^2 (E0^2/2 at E0 = 5)
    double vel_var = 1e6;    // measurement velocity variance per axis, m^2/s^2
};

struct KalmanState {
    std::array<double, 4> mean{};  // x, y, vx, vy
    std::array<double, 16> cov{};  // row-major 4x4, symmetric PSD
};

// State pinned to the first measurement with the measurement covariance.
KalmanState kf_init(const std::array<double, 4>& z, const KalmanConfig& cfg);

// One predict/update cycle: constant-velocity transition with white-noise
// acceleration process covariance (density q), then a Joseph-form update
// against z = (x_noisy, y_noisy, vx_true, vy_true).
KalmanState kf_step(const KalmanState& state, const KalmanConfig& cfg,
                    const std::array<double, 4>& z);

// One agent's recorded track, samples[t] = (x, y, vx, vy) at step t.
struct Trajectory {
    std::vector<std::array<float, 4>> samples;
};

// Per-agent final-step errors of the noisy fix (measured) and the filter
// estimate (estimated) against the true position, after perturbing every
// recorded position with fresh noise of RMS magnitude E. Noise streams are
// derived from (seed, agent index), so agents are independent and the result
// does not depend on evaluation order. The filter runs with cfg exactly as
// given; it is not told the actual E.
std::vector<std::pair<double, double>> evaluate_filter(std::span<const Trajectory> trajectories,
                                                       double E, const KalmanConfig& cfg,
                                                       std::uint64_t seed);

// Arithmetic mean of error magnitudes; rejects an empty list.
double mae(std::span<const double> errors);

}  // namespace ares
