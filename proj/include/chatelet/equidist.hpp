#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "chatelet/int128.hpp"
#include "chatelet/parallel.hpp"
#include "chatelet/primes.hpp"
#include "chatelet/rational.hpp"

namespace chatelet {

// W_z = prod_{p <= z} p^(m_p) and eps_tilde = sum_{p <= z} p^(-1 - m_p).
struct WzSpec {
    int z = 1;
    std::map<std::int64_t, int> m_p;
    i128 W = 1;
    Rational eps_tilde;
    // eps_tilde <= 3 / 2^(min m_p); only meaningful when every m_p >= 2.
    std::optional<bool> eps_bound_holds;

    int level(std::int64_t p) const;
};

WzSpec build_wz(int z, int uniform_level);
WzSpec build_wz(int z, const std::map<std::int64_t, int>& levels);

// Even valuation at every prime p > z with (D/p) = -1.
bool inert_even_above(i128 D, int z, const Factorization& f);

// #{1 <= c <= T : c = a' mod W', v_p(c) even for inert p > z}. Uses a smallest-prime-factor
// sieve when T <= SpfSieve::kMaxLimit and the progression is long; short progressions are
// factored candidate by candidate.
i128 f_count(i128 D, int z, i128 Wp, i128 ap, i128 T, const Exec& exec = {});

// Same count against a caller-owned sieve (T <= sieve.limit()).
i128 f_count(i128 D, int z, i128 Wp, i128 ap, i128 T, const SpfSieve& sieve, const Exec& exec = {});

// gamma_0 T / sqrt(pi log T) * (1 + (D/a')) / W' * prod_{p <= z} (1 - 1/p)^(-1/2).
long double f_count_main_term(i128 D, int z, i128 Wp, i128 ap, long double T, long double gamma0);

// Product over primes z < p <= P_max of the gamma_0 Euler factors.
long double gamma0_partial(i128 D, int z, std::uint32_t P_max);

// (D, s)_R = 1, (D, s a_1...a_R)_p = 1 for p <= z, (D / (a_i / gcd(a_i, W))) = 1 for all i.
bool joint_admissible(i128 D, int s, const std::vector<i128>& a, const WzSpec& wz);

long double equidist_main_term(i128 D, int s, const std::vector<i128>& a, const WzSpec& wz,
                               const std::vector<long double>& x, long double gamma0);

struct SplitCheck {
    bool holds;
    i128 lhs;
    i128 rhs;
    bool indicator;
    std::vector<i128> F;  // F_i(x_i / gcd(a_i, W))
};

// v_p(a_i) < 2 [(m_p - 3) / (2R)] for every p <= z and i.
bool splitting_precondition(const std::vector<i128>& a, const WzSpec& wz);

SplitCheck splitting_check(i128 D, int s, const std::vector<i128>& a, const WzSpec& wz,
                           const std::vector<i128>& x, const Exec& exec = {});

}  // namespace chatelet
