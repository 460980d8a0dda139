#include "chatelet/quad_norms.hpp"

#include <algorithm>

#include "chatelet/local_arith.hpp"
#include "chatelet/primes.hpp"

namespace chatelet {

QuadraticField::QuadraticField(i128 D) : D_(D) {
    if (D == 0 || D == 1) throw DomainError("D must differ from 0 and 1");
    i128 a = abs128(D);
    for (i128 k = 2; k * k <= a; ++k)
        if (a % (k * k) == 0) throw DomainError("D = " + chatelet::to_string(D) + " is not square-free");
    bad_.push_back(2);
    for (auto& [p, e] : factor(D))
        if (p != 2) bad_.push_back(p);
}

Rational norm_of(const QuadraticField& K, const Rational& x, const Rational& y) {
    return x * x - Rational(K.D()) * y * y;
}

NormMode parse_norm_mode(const std::string& s) {
    if (s == "conditions") return NormMode::conditions;
    if (s == "hasse") return NormMode::hasse;
    if (s == "hensel") return NormMode::hensel;
    throw DomainError("unknown norm mode '" + s + "'");
}

std::string to_string(NormMode m) {
    switch (m) {
        case NormMode::conditions: return "conditions";
        case NormMode::hasse: return "hasse";
        default: return "hensel";
    }
}

namespace {

bool by_conditions(i128 D, i128 m) {
    if (D < 0 && m < 0) return false;
    for (auto& [p, e] : factor(m)) {
        if (p == 2 || D % p == 0) continue;
        if (kronecker(D, p) == -1 && (e & 1)) return false;
    }
    for (auto& [p, e] : factor(D)) {
        if (p == 2) continue;
        auto [v, u] = vp(m, p);
        int lhs = kronecker(u, p);
        if ((v & 1) == 0 && lhs != 1) return false;
        if ((v & 1) == 1 && lhs != kronecker(-D / p, p)) return false;
    }
    // 2-adic point: only v_2(m) mod 2 and the odd part mod 16 matter.
    auto [v2, u2] = vp(m, 2);
    i128 reduced = mod128(u2, 16) * ((v2 & 1) ? 2 : 1);
    return hilbert(D, reduced, Place::prime(2)) == 1;
}

std::vector<i128> relevant_primes(i128 D, i128 m) {
    std::vector<i128> ps{2};
    for (auto& [p, e] : factor(D)) ps.push_back(p);
    for (auto& [p, e] : factor(m)) ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

}  // namespace

bool is_norm(const QuadraticField& K, i128 m, NormMode mode) {
    if (m == 0) return true;
    const i128 D = K.D();
    switch (mode) {
        case NormMode::conditions: return by_conditions(D, m);
        case NormMode::hasse:
            if (hilbert(D, m, Place::real()) != 1) return false;
            for (i128 p : relevant_primes(D, m))
                if (hilbert(D, m, Place::prime(p)) != 1) return false;
            return true;
        case NormMode::hensel:
            if (D < 0 && m < 0) return false;
            for (i128 p : relevant_primes(D, m))
                if (!hensel_conic_soluble(D, m, p)) return false;
            return true;
    }
    return false;
}

std::uint64_t NormTable::memory_bytes(std::uint64_t limit) { return limit / 8 + limit / 16 + 64; }

NormTable::NormTable(const QuadraticField& K, std::uint64_t limit) : D_(K.D()), limit_(limit) {
    odd_inert_.assign(limit / 64 + 1, 0);
    // Odd-only sieve of Eratosthenes; bit i stands for 2i + 1.
    std::vector<std::uint64_t> comp(limit / 128 + 1, 0);
    auto is_comp = [&](std::uint64_t n) { return (comp[n >> 7] >> ((n >> 1) & 63)) & 1; };
    for (std::uint64_t p = 3; p * p <= limit; p += 2) {
        if (is_comp(p)) continue;
        for (std::uint64_t j = p * p; j <= limit; j += 2 * p) comp[j >> 7] |= std::uint64_t(1) << ((j >> 1) & 63);
    }
    for (std::uint64_t p = 3; p <= limit; p += 2) {
        if (is_comp(p) || kronecker(D_, i128(p)) != -1) continue;
        // Multiples p^k * j with p not dividing j have valuation exactly k.
        int k = 1;
        for (u128 pk = p; pk <= limit; pk *= p, ++k) {
            if ((k & 1) == 0) continue;
            std::uint64_t step = std::uint64_t(pk);
            std::uint64_t c = 0;
            for (std::uint64_t a = step; a <= limit; a += step) {
                if (++c == p) {
                    c = 0;
                    continue;
                }
                odd_inert_[a >> 6] |= std::uint64_t(1) << (a & 63);
            }
        }
    }
    for (i128 p : K.bad_primes()) {
        Local L;
        L.p = std::int64_t(p);
        L.unit_mod = p == 2 ? 8 : std::int64_t(p);
        L.ok.assign(2 * L.unit_mod, 0);
        for (int parity = 0; parity < 2; ++parity)
            for (std::int64_t r = 1; r < L.unit_mod; ++r) {
                if (r % L.p == 0) continue;
                i128 value = parity ? i128(r) * p : i128(r);
                L.ok[parity * L.unit_mod + r] = hilbert(D_, value, Place::prime(p)) == 1;
            }
        local_.push_back(std::move(L));
    }
}

bool NormTable::contains(std::int64_t m) const {
    if (m == 0) return true;
    if (D_ < 0 && m < 0) return false;
    std::uint64_t a = m < 0 ? std::uint64_t(-m) : std::uint64_t(m);
    if (!inert_even(a)) return false;
    for (const Local& L : local_) {
        int v = 0;
        std::int64_t u = m;
        if (L.p == 2) {
            v = __builtin_ctzll(a);
            u = m >> v;
        } else {
            while (u % L.p == 0) {
                u /= L.p;
                ++v;
            }
        }
        std::int64_t r = u % L.unit_mod;
        if (r < 0) r += L.unit_mod;
        if (!L.ok[(v & 1) * L.unit_mod + r]) return false;
    }
    return true;
}

}  // namespace chatelet
