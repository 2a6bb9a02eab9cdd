#pragma once

#include <span>
#include <utility>
#include <vector>

namespace ares {

// Gaussian-kernel density estimate on a 512-point grid spanning
// [min - 3h, max + 3h]. bandwidth <= 0 selects Silverman's rule
// h = 1.06 * sigma * n^(-1/5) with the sample standard deviation.
// Needs at least two distinct samples.
std::vector<std::pair<double, double>> kde(std::span<const double> samples,
                                           double bandwidth = 0.0);

}  // namespace ares
