#pragma once
// Independent brute-force oracles shared by the unit and acceptance tests. None of them
// calls the closed forms they are used to check.

#include <cstdint>
#include <vector>

#include "chatelet/forms.hpp"
#include "chatelet/int128.hpp"
#include "chatelet/local_arith.hpp"

namespace oracle {

using chatelet::i128;

inline i128 powi(i128 b, int e) {
    i128 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Euler's criterion for an odd prime p.
inline int legendre_euler(i128 a, i128 p) {
    i128 r = chatelet::mod128(a, p);
    if (r == 0) return 0;
    i128 acc = 1, base = r, e = (p - 1) / 2;
    while (e) {
        if (e & 1) acc = acc * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return acc == 1 ? 1 : -1;
}

// Any (x, y, z) mod p^k, not all divisible by p, with x^2 - a y^2 - b z^2 = 0 mod p^k.
inline bool conic_triple_search(i128 a, i128 b, i128 p, int k) {
    i128 q = powi(p, k);
    for (i128 x = 0; x < q; ++x)
        for (i128 y = 0; y < q; ++y)
            for (i128 z = 0; z < q; ++z) {
                if (x % p == 0 && y % p == 0 && z % p == 0) continue;
                i128 v = x * x - a * y * y - b * z * z;
                if (chatelet::mod128(v, q) == 0) return true;
            }
    return false;
}

inline bool is_sum_of_two_squares(std::int64_t m) {
    if (m < 0) return false;
    for (std::int64_t x = 0; x * x <= m; ++x) {
        std::int64_t r = m - x * x;
        std::int64_t y = 0;
        while (y * y < r) ++y;
        if (y * y == r) return true;
    }
    return false;
}

inline bool square_free(i128 a) {
    if (a < 0) a = -a;
    for (i128 k = 2; k * k <= a; ++k)
        if (a % (k * k) == 0) return false;
    return true;
}

inline int mobius(std::int64_t n) {
    int mu = 1;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    return n > 1 ? -mu : mu;
}

// Number of t in Z^2 with 0 < max|t_i| <= P, gcd = 1, first nonzero coordinate positive.
inline i128 primitive_half_plane(std::int64_t P) {
    i128 s = 0;
    for (std::int64_t k = 1; k <= P; ++k) {
        int mu = mobius(k);
        if (!mu) continue;
        i128 r = P / k;
        s += mu * ((2 * r + 1) * (2 * r + 1) - 1);
    }
    return s / 2;
}

// Values of every form at t, reduced mod q, straight from the monomial lists.
inline std::vector<i128> form_values_mod(const chatelet::FormSystem& sys, const std::vector<i128>& t, i128 q) {
    std::vector<i128> out;
    for (const auto& f : sys.forms()) {
        i128 acc = 0;
        for (const auto& m : f) {
            i128 v = chatelet::mod128(m.coeff, q);
            for (std::size_t j = 0; j < t.size(); ++j)
                for (int e = 0; e < m.exps[j]; ++e) v = v * t[j] % q;
            acc = (acc + v) % q;
        }
        out.push_back(acc);
    }
    return out;
}

// Visits every t in (Z/q)^(n+1) with the form values mod q.
template <class F>
void for_each_residue(const chatelet::FormSystem& sys, i128 q, F&& f) {
    const int V = sys.vars();
    std::vector<i128> t(V, 0);
    for (;;) {
        f(t, form_values_mod(sys, t, q));
        int j = V - 1;
        while (j >= 0 && ++t[j] == q) t[j--] = 0;
        if (j < 0) return;
    }
}

// #{t mod q : f(t) = nu mod q}.
inline i128 fiber_count_direct(const chatelet::FormSystem& sys, const std::vector<i128>& nu, i128 q) {
    i128 c = 0;
    for_each_residue(sys, q, [&](const std::vector<i128>&, const std::vector<i128>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != chatelet::mod128(nu[i], q)) return;
        ++c;
    });
    return c;
}

// Truncated local conditions counted point by point over t mod prod p^L: valuation caps
// (L - 3 at 2, L at odd p), Hilbert symbols of D against prod f at each p, and Kronecker
// symbols of D against s_i f_i / gcd(f_i, q). With all_equal the Kronecker values only
// need to agree with each other. Returns (count, q^(n+1)).
inline std::pair<i128, i128> truncated_count(const chatelet::FormSystem& sys, i128 D, const std::vector<int>& s,
                                             const std::vector<std::pair<i128, int>>& levels, bool all_equal = false) {
    i128 q = 1;
    for (auto [p, L] : levels) q *= powi(p, L);
    i128 count = 0;
    for_each_residue(sys, q, [&](const std::vector<i128>&, const std::vector<i128>& v) {
        i128 X = 1;
        for (i128 r : v) {
            if (r == 0) return;
            X = X * r % q;
        }
        if (X == 0) return;
        for (auto [p, L] : levels) {
            int e = 0;
            for (i128 y = X; y % p == 0; y /= p) ++e;
            if (e >= (p == 2 ? L - 3 : L)) return;
            if (chatelet::hilbert(D, X, p) != 1) return;
        }
        int first = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            int k = chatelet::kronecker(D, s[i] * (v[i] / chatelet::gcd128(v[i], q)));
            if (k == 0) return;
            if (!all_equal && k != 1) return;
            if (i == 0) first = k;
            if (k != first) return;
        }
        ++count;
    });
    i128 total = 1;
    for (int j = 0; j < sys.vars(); ++j) total *= q;
    return {count, total};
}

}  // namespace oracle
