#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace infodelta {

// Parameters of the additive seasonal-trend decomposition. Window sizes are
// point counts; even values are bumped to the next odd number.
struct StlConfig {
    int period = 7;            // 0 disables the seasonal component
    int trend_window = 91;
    int seasonal_window = 0;   // 0: one window spanning every cycle of a subseries
    int seasonal_degree = 1;
    int trend_degree = 1;
    int low_pass_window = 0;   // 0: smallest odd number >= period
    int inner_loops = 2;
    int outer_loops = 0;       // robustness iterations; 0 is the non-robust fit
};

struct Decomposition {
    std::vector<double> observed;
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> remainder;
    int period = 0;

    std::size_t size() const { return observed.size(); }
};

Decomposition stl_decompose(std::span<const double> series, const StlConfig& config);

Decomposition stl_decompose(std::span<const double> series, int period, int trend_window,
                            int inner_loops, int outer_loops);

// Largest |observed - (seasonal + trend + remainder)|.
double recomposition_error(const Decomposition& d);

}  // namespace infodelta
