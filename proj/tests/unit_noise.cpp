#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ares/agent.hpp"
#include "ares/noise.hpp"
#include "ares/rng.hpp"

using namespace ares;

TEST_CASE("error magnitudes follow the Rayleigh law") {
    Rng rng(101);
    const int n = 1000000;
    const double E = 1.0;
    std::vector<double> z(n);
    double sum = 0.0, sum_sq = 0.0;
    for (double& v : z) {
        v = sample_error_magnitude(E, rng);
        CHECK(v >= 0.0);
        sum += v;
        sum_sq += v * v;
    }

    // Mean E*sqrt(pi)/2, RMS exactly E.
    CHECK(sum / n == doctest::Approx(E * std::sqrt(M_PI) / 2.0).epsilon(0.01));
    CHECK(std::sqrt(sum_sq / n) == doctest::Approx(E).epsilon(0.01));

    // One-sample Kolmogorov-Smirnov statistic against 1 - exp(-z^2/E^2).
    std::sort(z.begin(), z.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-z[i] * z[i] / (E * E));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
    }
    CHECK(ks < 0.005);
}

TEST_CASE("median scales as E times sqrt(ln 2)") {
    Rng rng(55);
    const double E = 5.0;
    const int n = 200001;
    std::vector<double> z(n);
    for (double& v : z) v = sample_error_magnitude(E, rng);
    std::nth_element(z.begin(), z.begin() + n / 2, z.end());
    // Closed form 5 * sqrt(ln 2) = 4.1628...
    CHECK(z[n / 2] == doctest::Approx(4.1628).epsilon(0.01));
}

TEST_CASE("magnitude sampling rejects a non-positive scale") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_error_magnitude(0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_error_magnitude(-1.0, rng), std::invalid_argument);
}

TEST_CASE("perturb_positions at E = 0 is the identity and draws nothing") {
    std::vector<AgentState> agents(3);
    for (int i = 0; i < 3; ++i) {
        agents[i].id = i;
        agents[i].position = {1.0 * i, -2.0 * i};
        agents[i].velocity = {0.3, 0.4};
    }
    const std::vector<AgentState> before = agents;
    Rng rng(9);
    const std::uint64_t probe_before = Rng(9).next_u64();
    perturb_positions(agents, 0.0, rng);
    for (int i = 0; i < 3; ++i) {
        CHECK(agents[i].position == before[i].position);
        CHECK(agents[i].velocity == before[i].velocity);
    }
    // The stream was not advanced.
    CHECK(rng.next_u64() == probe_before);

    CHECK_THROWS_AS(perturb_positions(agents, -0.5, rng), std::invalid_argument);
}

TEST_CASE("perturb_positions displaces positions only, by Rayleigh magnitudes") {
    const int n = 200000;
    std::vector<AgentState> agents(n);
    for (int i = 0; i < n; ++i) {
        agents[i].id = i;
        agents[i].position = {0.0, 0.0};
        agents[i].velocity = {1.0, -0.5};
    }
    const double E = 2.0;
    Rng rng(77);
    perturb_positions(agents, E, rng);

    double sum_sq = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    int moved = 0, outside = 0;
    std::vector<int> direction_bins(36, 0);
    for (const AgentState& a : agents) {
        CHECK(a.velocity == Vec2{1.0, -0.5});
        const Vec2 d = a.position;
        if (d.norm_sq() > 0.0) ++moved;
        if (d.norm() > 2.0 * E) ++outside;
        sum_sq += d.norm_sq();
        sx += d.x;
        sy += d.y;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        int bin = static_cast<int>((std::atan2(d.y, d.x) + M_PI) / (2.0 * M_PI) * 36.0);
        direction_bins[std::clamp(bin, 0, 35)]++;
    }
    CHECK(moved == n);
    CHECK(outside > 0);  // Rayleigh tails push some agents far out
    CHECK(std::sqrt(sum_sq / n) == doctest::Approx(E).epsilon(0.01));

    // Components are zero-mean with variance E^2/2 each (the two-axis normal
    // construction behind the Rayleigh magnitude).
    CHECK(sx / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(sy / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(sxx / n == doctest::Approx(E * E / 2.0).epsilon(0.02));
    CHECK(syy / n == doctest::Approx(E * E / 2.0).epsilon(0.02));

    // Direction uniformity: chi-squared over 36 bins, 35 dof. 57.34 is the
    // 99th percentile, so a healthy sampler fails this about 1% of the time;
    // the seed is fixed, making the check reproducible.
    const double expected = static_cast<double>(n) / 36.0;
    double chi_sq = 0.0;
    for (int c : direction_bins) chi_sq += (c - expected) * (c - expected) / expected;
    CHECK(chi_sq < 57.34);
}

TEST_CASE("perturbation is reproducible for a fixed seed") {
    std::vector<AgentState> a(50), b(50);
    for (int i = 0; i < 50; ++i) {
        a[i].id = b[i].id = i;
        a[i].position = b[i].position = {0.1 * i, 0.2 * i};
    }
    Rng ra(4242), rb(4242);
    perturb_positions(a, 3.0, ra);
    perturb_positions(b, 3.0, rb);
    for (int i = 0; i < 50; ++i) CHECK(a[i].position == b[i].position);
}
