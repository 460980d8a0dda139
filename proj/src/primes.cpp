#include "chatelet/primes.hpp"

#include <algorithm>
#include <numeric>

namespace chatelet {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return std::uint64_t(u128(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Brent's variant of Pollard rho; n odd composite.
std::uint64_t rho(std::uint64_t n) {
    for (std::uint64_t c = 1;; ++c) {
        std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
        std::uint64_t r = 1;
        const std::uint64_t m = 128;
        auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = f(y);
            std::uint64_t k = 0;
            do {
                ys = y;
                for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_u64(std::uint64_t n, std::vector<std::uint64_t>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    std::uint64_t d = rho(n);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    static const std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : small) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : small) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

bool is_prime(i128 n) {
    if (n < 2) return false;
    if (n <= i128(UINT64_MAX)) return is_prime(std::uint64_t(n));
    throw ResourceError("primality test limited to 64-bit inputs");
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(std::uint32_t(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

Factorization factor(i128 n) {
    if (n == 0) throw DomainError("cannot factor zero");
    u128 m = n < 0 ? u128(0) - u128(n) : u128(n);
    std::vector<std::uint64_t> ps;
    if (m > UINT64_MAX) {
        for (std::uint64_t p = 2; p <= 1'000'000 && m > UINT64_MAX; p += (p == 2 ? 1 : 2)) {
            while (m % p == 0) {
                ps.push_back(p);
                m /= p;
            }
        }
        if (m > UINT64_MAX) throw ResourceError("factor: cofactor above 2^64 after trial division");
    }
    std::uint64_t r = std::uint64_t(m);
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
        while (r % p == 0) {
            ps.push_back(p);
            r /= p;
        }
    }
    factor_u64(r, ps);
    std::sort(ps.begin(), ps.end());
    Factorization out;
    for (std::uint64_t p : ps) {
        if (!out.empty() && out.back().first == i128(p))
            ++out.back().second;
        else
            out.emplace_back(i128(p), 1);
    }
    return out;
}

SpfSieve::SpfSieve(std::uint64_t limit) : limit_(limit) {
    if (limit > kMaxLimit) throw ResourceError("smallest-prime-factor sieve capped at 10^8 entries");
    spf_.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] != 0) continue;
        spf_[i] = std::uint32_t(i);
        for (std::uint64_t j = i * i; j <= limit; j += i)
            if (spf_[j] == 0) spf_[j] = std::uint32_t(i);
    }
}

Factorization SpfSieve::factor(std::uint64_t n) const {
    Factorization out;
    while (n > 1) {
        std::uint32_t p = spf_[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(i128(p), e);
    }
    return out;
}

}  // namespace chatelet
