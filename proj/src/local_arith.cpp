#include "chatelet/local_arith.hpp"

#include <algorithm>
#include <vector>

#include "chatelet/primes.hpp"

namespace chatelet {

Place Place::prime(i128 p) {
    if (!is_prime(p)) throw DomainError("place parameter " + to_string(p) + " is not prime");
    return Place(p);
}

ValuationSplit vp(i128 n, i128 p) {
    if (n == 0) throw DomainError("valuation of zero is infinite");
    if (p < 2) throw DomainError("valuation needs a prime p >= 2");
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return {e, n};
}

int kronecker(i128 a, i128 n) {
    if (a == 0 && n == 0) throw DomainError("kronecker(0, 0) is undefined");
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int k = 1;
    // (a/2) = 0 for even a, +1 for a = ±1 mod 8, -1 for a = ±3 mod 8.
    static const int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
    while ((n & 1) == 0) {
        n >>= 1;
        k *= tab2[int(a & 7)];
    }
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    // Jacobi symbol (a/n), n odd positive.
    u128 nn = u128(n);
    u128 aa = u128(mod128(a, n));
    while (aa != 0) {
        while ((aa & 1) == 0) {
            aa >>= 1;
            unsigned r = unsigned(nn & 7);
            if (r == 3 || r == 5) k = -k;
        }
        std::swap(aa, nn);
        if ((aa & 3) == 3 && (nn & 3) == 3) k = -k;
        aa %= nn;
    }
    return nn == 1 ? k : 0;
}

int hilbert(i128 a, i128 b, const Place& v) {
    if (a == 0 || b == 0) throw DomainError("hilbert symbol needs nonzero arguments");
    if (v.is_real()) return (a < 0 && b < 0) ? -1 : 1;
    const i128 p = v.p();
    auto [alpha, u] = vp(a, p);
    auto [beta, w] = vp(b, p);
    if (p == 2) {
        auto eps = [](i128 x) { return int(mod128(x, 4) == 3); };
        auto omega = [](i128 x) {
            i128 r = mod128(x, 8);
            return int(r == 3 || r == 5);
        };
        int e = (eps(u) & eps(w)) ^ ((alpha & 1) & omega(w)) ^ ((beta & 1) & omega(u));
        return e ? -1 : 1;
    }
    int s = 1;
    if ((alpha & 1) && (beta & 1) && mod128(p, 4) == 3) s = -s;
    if (alpha & 1) s *= kronecker(w, p);
    if (beta & 1) s *= kronecker(u, p);
    return s;
}

int hilbert_product(i128 a, i128 b) {
    if (a == 0 || b == 0) throw DomainError("hilbert symbol needs nonzero arguments");
    int s = hilbert(a, b, Place::real()) * hilbert(a, b, Place::prime(2));
    std::vector<i128> ps;
    for (auto& [p, e] : factor(a)) ps.push_back(p);
    for (auto& [p, e] : factor(b)) ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (i128 p : ps)
        if (p != 2) s *= hilbert(a, b, Place::prime(p));
    return s;
}

bool conic_has_primitive_solution_mod(i128 a, i128 b, i128 p, int k) {
    const i128 q = checked_pow(p, unsigned(k));
    if (q > (i128(1) << 60)) throw ResourceError("oracle modulus too large");
    a = mod128(a, q);
    b = mod128(b, q);
    // Charts: x = 1; x = 0 mod p, y = 1; x = y = 0 mod p, z = 1. In each chart the form
    // x^2 - a y^2 - b z^2 splits as A(u) + B(w) in the two free coordinates, which are
    // lifted digit by digit while it vanishes mod the current power. Matching digits
    // goes through a sorted table of B so a node costs p log p instead of p^2.
    struct Node {
        i128 u, w;
        int level;
        i128 pj;
    };
    for (int chart = 0; chart < 3; ++chart) {
        auto A = [&](i128 u, i128 mod) {
            i128 u2 = u % mod * (u % mod) % mod;
            switch (chart) {
                case 0: return mod128(1 - a % mod * u2, mod);
                case 1: return mod128(u2 - a, mod);
                default: return mod128(u2 - b, mod);
            }
        };
        auto B = [&](i128 w, i128 mod) {
            i128 w2 = w % mod * (w % mod) % mod;
            return mod128(-((chart == 2 ? a : b) % mod) * w2, mod);
        };
        const bool u_divisible = chart >= 1;
        const bool w_divisible = chart == 2;
        std::vector<Node> stack{{0, 0, 0, 1}};
        std::vector<std::pair<i128, i128>> table;
        while (!stack.empty()) {
            Node nd = stack.back();
            stack.pop_back();
            const i128 next = nd.pj * p;
            const i128 t_end = (nd.level == 0 && w_divisible) ? 1 : p;
            const i128 s_end = (nd.level == 0 && u_divisible) ? 1 : p;
            table.clear();
            for (i128 t = 0; t < t_end; ++t) table.emplace_back(B(nd.w + nd.pj * t, next), t);
            std::sort(table.begin(), table.end());
            for (i128 s = 0; s < s_end; ++s) {
                const i128 u = nd.u + nd.pj * s;
                const i128 target = mod128(-A(u, next), next);
                auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(target, i128(0)));
                for (; it != table.end() && it->first == target; ++it) {
                    if (nd.level + 1 == k) return true;
                    stack.push_back({u, nd.w + nd.pj * it->second, nd.level + 1, next});
                }
            }
        }
    }
    return false;
}

bool hensel_conic_soluble(i128 a, i128 b, i128 p) {
    if (a == 0 || b == 0) throw DomainError("conic coefficients must be nonzero");
    int k = vp(checked_mul(4, checked_mul(a, b)), p).exponent + 3;
    return conic_has_primitive_solution_mod(a, b, p, k);
}

}  // namespace chatelet
