#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "chatelet/int128.hpp"

namespace chatelet {

// Deterministic Miller-Rabin; exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);
bool is_prime(i128 n);

// All primes <= limit, ascending.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

using Factorization = std::vector<std::pair<i128, int>>;

// Prime factorization of |n| (n != 0), primes ascending. Handles |n| < 2^64 fully and
// larger n whose cofactor after trial division to 10^6 fits in 64 bits.
Factorization factor(i128 n);

// Smallest-prime-factor table for 0..limit.
class SpfSieve {
public:
    static constexpr std::uint64_t kMaxLimit = 100'000'000;
    explicit SpfSieve(std::uint64_t limit);
    std::uint64_t limit() const { return limit_; }
    std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
    // Requires 1 <= n <= limit.
    Factorization factor(std::uint64_t n) const;

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
};

}  // namespace chatelet
