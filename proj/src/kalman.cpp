#include "ares/kalman.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "ares/noise.hpp"
#include "ares/rng.hpp"

namespace ares {
namespace {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

void check_config(const KalmanConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("filter: dt must be > 0");
    if (!(cfg.q >= 0.0)) throw std::invalid_argument("filter: q must be >= 0");
    if (!(cfg.posn_var > 0.0) || !(cfg.vel_var > 0.0))
        throw std::invalid_argument("filter: measurement variances must be > 0");
}

void check_measurement(const std::array<double, 4>& z) {
    for (const double v : z)
        if (!std::isfinite(v)) throw std::invalid_argument("filter: non-finite measurement");
}

Matrix4 measurement_cov(const KalmanConfig& cfg) {
    Vector4 diag;
    diag << cfg.posn_var, cfg.posn_var, cfg.vel_var, cfg.vel_var;
    return diag.asDiagonal();
}

Matrix4 transition(double dt) {
    Matrix4 F = Matrix4::Identity();
    F(0, 2) = dt;
    F(1, 3) = dt;
    return F;
}

// White-noise-acceleration covariance: per axis, blocks
// [dt^3/3, dt^2/2; dt^2/2, dt] scaled by q.
Matrix4 process_cov(double dt, double q) {
    Matrix4 Q = Matrix4::Zero();
    const double a = q * dt * dt * dt / 3.0;
    const double b = q * dt * dt / 2.0;
    const double c = q * dt;
    Q(0, 0) = a;
    Q(1, 1) = a;
    Q(0, 2) = b;
    Q(2, 0) = b;
    Q(1, 3) = b;
    Q(3, 1) = b;
    Q(2, 2) = c;
    Q(3, 3) = c;
    return Q;
}

KalmanState pack(const Vector4& mean, const Matrix4& cov) {
    KalmanState out;
    Vector4::Map(out.mean.data()) = mean;
    Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(out.cov.data()) = cov;
    return out;
}

void unpack(const KalmanState& state, Vector4& mean, Matrix4& cov) {
    mean = Vector4::Map(state.mean.data());
    cov = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(state.cov.data());
}

}  // namespace

KalmanState kf_init(const std::array<double, 4>& z, const KalmanConfig& cfg) {
    check_config(cfg);
    check_measurement(z);
    return pack(Vector4::Map(z.data()), measurement_cov(cfg));
}

KalmanState kf_step(const KalmanState& state, const KalmanConfig& cfg,
                    const std::array<double, 4>& z) {
    check_config(cfg);
    check_measurement(z);
    Vector4 mean;
    Matrix4 cov;
    unpack(state, mean, cov);

    const Matrix4 F = transition(cfg.dt);
    mean = F * mean;
    cov = F * cov * F.transpose() + process_cov(cfg.dt, cfg.q);

    // Measurement model is the identity, so the innovation covariance is
    // P + R and the gain reduces to P (P + R)^-1.
    const Matrix4 R = measurement_cov(cfg);
    const Matrix4 S = cov + R;
    const Matrix4 K = S.llt().solve(cov.transpose()).transpose();
    mean += K * (Vector4::Map(z.data()) - mean);
    const Matrix4 IK = Matrix4::Identity() - K;
    cov = IK * cov * IK.transpose() + K * R * K.transpose();
    cov = 0.5 * (cov + cov.transpose().eval());
    return pack(mean, cov);
}

std::vector<std::pair<double, double>> evaluate_filter(std::span<const Trajectory> trajectories,
                                                       double E, const KalmanConfig& cfg,
                                                       std::uint64_t seed) {
    if (!(E >= 0.0)) throw std::invalid_argument("filter: E must be >= 0");
    const KalmanConfig& run_cfg = cfg;
    check_config(run_cfg);
    if (trajectories.empty()) throw std::invalid_argument("filter: no trajectories");
    const std::size_t steps = trajectories.front().samples.size();
    if (steps == 0) throw std::invalid_argument("filter: empty trajectory");
    for (const Trajectory& t : trajectories)
        if (t.samples.size() != steps)
            throw std::invalid_argument("filter: trajectories must have equal step counts");

    std::vector<std::pair<double, double>> errors;
    errors.reserve(trajectories.size());
    for (std::size_t agent = 0; agent < trajectories.size(); ++agent) {
        const auto& samples = trajectories[agent].samples;
        Rng rng(hash_combine(seed, stream::kFilter, static_cast<std::uint64_t>(agent)));
        KalmanState state;
        double measured = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            const auto& s = samples[t];
            double nx = 0.0, ny = 0.0;
            if (E > 0.0) {
                const double magnitude = sample_error_magnitude(E, rng);
                const Vec2 offset = magnitude * rng.unit_vector();
                nx = offset.x;
                ny = offset.y;
            }
            const std::array<double, 4> z = {static_cast<double>(s[0]) + nx,
                                             static_cast<double>(s[1]) + ny,
                                             static_cast<double>(s[2]),
                                             static_cast<double>(s[3])};
            state = t == 0 ? kf_init(z, run_cfg) : kf_step(state, run_cfg, z);
            if (t + 1 == steps) measured = std::hypot(nx, ny);
        }
        const auto& last = samples.back();
        const double estimated = std::hypot(state.mean[0] - static_cast<double>(last[0]),
                                            state.mean[1] - static_cast<double>(last[1]));
        errors.emplace_back(measured, estimated);
    }
    return errors;
}

double mae(std::span<const double> errors) {
    if (errors.empty()) throw std::invalid_argument("filter: mae of an empty list");
    double sum = 0.0;
    for (const double e : errors) sum += e;
    return sum / static_cast<double>(errors.size());
}

}  // namespace ares
