#pragma once

#include <cstdint>
#include <functional>

#include "chatelet/forms.hpp"

namespace chatelet {

struct GridResult {
    long double value = 0;
    long double error = 0;  // |I(N) - I(N/2)|
    int per_axis = 0;
    std::uint64_t cells = 0;  // evaluations at the finest grid
    bool converged = false;
};

using Integrand = std::function<long double(const double*)>;

// Midpoint rule on a uniform grid, bisecting every cell until the change between two
// consecutive grids is within rel_tol (or abs_tol for values near zero) or the next grid
// would exceed max_cells.
GridResult midpoint_adaptive(const Integrand& g, const Box& box, double rel_tol, double abs_tol,
                             std::uint64_t max_cells, unsigned threads, int start_per_axis = 16);

// Midpoint rule at a fixed resolution; error is the change against half the resolution.
GridResult midpoint_fixed(const Integrand& g, const Box& box, int per_axis, unsigned threads);

// Plain midpoint sum at one resolution.
long double midpoint_sum(const Integrand& g, const Box& box, int per_axis, unsigned threads);

struct McResult {
    long double mean = 0;  // integral estimate
    long double stderr_ = 0;
    std::uint64_t samples = 0;
};

// Monte Carlo over the box. Sample k uses a counter-based generator keyed by (seed, k), so
// the estimate does not depend on the thread count.
McResult monte_carlo(const Integrand& g, const Box& box, std::uint64_t samples, std::uint64_t seed, unsigned threads);

// splitmix64 finaliser; uniform double in [0, 1) for counter (seed, index).
std::uint64_t splitmix64(std::uint64_t x);
double counter_uniform(std::uint64_t seed, std::uint64_t index);

}  // namespace chatelet
