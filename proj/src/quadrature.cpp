#include "chatelet/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "chatelet/errors.hpp"
#include "chatelet/parallel.hpp"

namespace chatelet {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    return double(splitmix64(splitmix64(seed) ^ index) >> 11) * 0x1.0p-53;
}

long double midpoint_sum(const Integrand& g, const Box& box, int N, unsigned threads) {
    const int V = int(box.intervals.size());
    std::vector<double> h(V);
    long double cell = 1;
    for (int j = 0; j < V; ++j) {
        h[j] = (box.intervals[j].second - box.intervals[j].first) / N;
        cell *= h[j];
    }
    std::uint64_t rest = 1;
    for (int j = 1; j < V; ++j) rest *= std::uint64_t(N);
    std::vector<long double> partial(N, 0);
    parallel_chunks(std::size_t(N), threads, [&](std::size_t c) {
        std::vector<double> t(V);
        t[0] = box.intervals[0].first + (double(c) + 0.5) * h[0];
        long double s = 0;
        for (std::uint64_t idx = 0; idx < rest; ++idx) {
            std::uint64_t x = idx;
            for (int j = V - 1; j >= 1; --j) {
                t[j] = box.intervals[j].first + (double(x % N) + 0.5) * h[j];
                x /= N;
            }
            s += g(t.data());
        }
        partial[c] = s;
    });
    long double total = 0;
    for (long double v : partial) total += v;
    return total * cell;
}

GridResult midpoint_fixed(const Integrand& g, const Box& box, int per_axis, unsigned threads) {
    if (per_axis < 2 || per_axis % 2) throw DomainError("grid resolution must be even and >= 2");
    GridResult r;
    long double coarse = midpoint_sum(g, box, per_axis / 2, threads);
    r.value = midpoint_sum(g, box, per_axis, threads);
    r.error = std::fabs(r.value - coarse);
    r.per_axis = per_axis;
    r.cells = std::uint64_t(std::pow(double(per_axis), double(box.intervals.size())));
    r.converged = true;
    return r;
}

GridResult midpoint_adaptive(const Integrand& g, const Box& box, double rel_tol, double abs_tol,
                             std::uint64_t max_cells, unsigned threads, int start) {
    const int V = int(box.intervals.size());
    auto cells_at = [&](int N) { return std::pow(double(N), double(V)); };
    if (cells_at(start) > double(max_cells)) throw ResourceError("quadrature: starting grid exceeds the cell budget");
    GridResult r;
    int N = start;
    long double prev = midpoint_sum(g, box, N, threads);
    r.value = prev;
    r.per_axis = N;
    r.cells = std::uint64_t(cells_at(N));
    r.error = std::numeric_limits<long double>::infinity();
    while (cells_at(2 * N) <= double(max_cells)) {
        N *= 2;
        long double cur = midpoint_sum(g, box, N, threads);
        r.value = cur;
        r.error = std::fabs(cur - prev);
        r.per_axis = N;
        r.cells = std::uint64_t(cells_at(N));
        if (r.error <= rel_tol * std::fabs(cur) || r.error <= abs_tol) {
            r.converged = true;
            return r;
        }
        prev = cur;
    }
    return r;
}

McResult monte_carlo(const Integrand& g, const Box& box, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
    const int V = int(box.intervals.size());
    long double vol = 1;
    for (auto [lo, hi] : box.intervals) vol *= hi - lo;
    const std::uint64_t chunk = 1 << 14;
    std::size_t nchunks = std::size_t((samples + chunk - 1) / chunk);
    std::vector<long double> s1(nchunks, 0), s2(nchunks, 0);
    parallel_chunks(nchunks, threads, [&](std::size_t c) {
        std::vector<double> t(V);
        std::uint64_t lo = c * chunk, hi = std::min(samples, lo + chunk);
        long double a = 0, b = 0;
        for (std::uint64_t k = lo; k < hi; ++k) {
            for (int j = 0; j < V; ++j) {
                auto [l, h] = box.intervals[j];
                t[j] = l + (h - l) * counter_uniform(seed, k * std::uint64_t(V) + std::uint64_t(j));
            }
            long double v = g(t.data());
            a += v;
            b += v * v;
        }
        s1[c] = a;
        s2[c] = b;
    });
    long double a = 0, b = 0;
    for (std::size_t c = 0; c < nchunks; ++c) {
        a += s1[c];
        b += s2[c];
    }
    McResult r;
    r.samples = samples;
    if (samples == 0) return r;
    long double mean = a / samples, var = std::max(0.0L, b / samples - mean * mean);
    r.mean = vol * mean;
    r.stderr_ = vol * std::sqrt(var / samples);
    return r;
}

}  // namespace chatelet
