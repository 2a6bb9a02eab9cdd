#include "ares/kde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ares {

std::vector<std::pair<double, double>> kde(std::span<const double> samples, double bandwidth) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("kde: need at least 2 samples");
    for (const double s : samples)
        if (!std::isfinite(s)) throw std::invalid_argument("kde: non-finite sample");

    double h = bandwidth;
    if (h <= 0.0) {
        double mean = 0.0;
        for (const double s : samples) mean += s;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const double s : samples) ss += (s - mean) * (s - mean);
        const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
        h = 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
    }
    if (!(h > 0.0)) throw std::invalid_argument("kde: degenerate samples (zero spread)");

    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it - 3.0 * h;
    const double hi = *hi_it + 3.0 * h;
    constexpr std::size_t kPoints = 512;
    const double dx = (hi - lo) / static_cast<double>(kPoints - 1);
    const double inv_norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * M_PI));

    std::vector<std::pair<double, double>> curve;
    curve.reserve(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i) {
        const double x = lo + dx * static_cast<double>(i);
        double density = 0.0;
        for (const double s : samples) {
            const double u = (x - s) / h;
            density += std::exp(-0.5 * u * u);
        }
        curve.emplace_back(x, density * inv_norm);
    }
    return curve;
}

}  // namespace ares
