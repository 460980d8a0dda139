#include "chatelet/equidist.hpp"

#include <cmath>
#include <numbers>

#include "chatelet/local_arith.hpp"

namespace chatelet {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

WzSpec finish(int z, std::map<std::int64_t, int> levels) {
    WzSpec w;
    w.z = z;
    w.m_p = std::move(levels);
    int min_m = 1 << 30;
    for (auto [p, m] : w.m_p) {
        if (m < 1) throw DomainError("levels m_p must be >= 1");
        w.W = checked_mul(w.W, checked_pow(p, unsigned(m)));
        w.eps_tilde += Rational(1, checked_pow(p, unsigned(m + 1)));
        min_m = std::min(min_m, m);
    }
    if (!w.m_p.empty() && min_m >= 2) w.eps_bound_holds = w.eps_tilde <= Rational(3, checked_pow(2, unsigned(min_m)));
    return w;
}

}  // namespace

int WzSpec::level(std::int64_t p) const {
    auto it = m_p.find(p);
    return it == m_p.end() ? 0 : it->second;
}

WzSpec build_wz(int z, int uniform_level) {
    if (z < 2) throw DomainError("build_wz needs z >= 2");
    std::map<std::int64_t, int> levels;
    for (auto p : primes_up_to(std::uint32_t(z))) levels[p] = uniform_level;
    return finish(z, std::move(levels));
}

WzSpec build_wz(int z, const std::map<std::int64_t, int>& levels) {
    if (z < 2) throw DomainError("build_wz needs z >= 2");
    std::map<std::int64_t, int> full;
    for (auto p : primes_up_to(std::uint32_t(z))) {
        auto it = levels.find(p);
        if (it == levels.end()) throw DomainError("missing level for prime " + std::to_string(p));
        full[p] = it->second;
    }
    for (auto& [p, m] : levels)
        if (!full.count(p)) throw DomainError("level given for " + std::to_string(p) + ", which is not a prime <= z");
    return finish(z, std::move(full));
}

bool inert_even_above(i128 D, int z, const Factorization& f) {
    for (auto [p, e] : f)
        if (p > z && (e & 1) && kronecker(D, p) == -1) return false;
    return true;
}

namespace {

template <class Factor>
i128 count_progression(i128 D, int z, i128 Wp, i128 ap, i128 T, const Exec& exec, Factor&& fac) {
    if (Wp < 1) throw DomainError("f_count: modulus must be positive");
    i128 first = mod128(ap - 1, Wp) + 1;
    if (T < first) return 0;
    i128 n = (T - first) / Wp + 1;
    if (n > i128(exec.budget)) throw ResourceError("f_count: progression longer than the budget");
    const std::size_t chunk = 1 << 16;
    std::size_t nchunks = std::size_t((n + chunk - 1) / chunk);
    std::vector<i128> partial(nchunks, 0);
    parallel_chunks(nchunks, exec.threads, [&](std::size_t c) {
        i128 lo = i128(c) * chunk, hi = std::min<i128>(n, lo + chunk), cnt = 0;
        for (i128 k = lo; k < hi; ++k)
            if (inert_even_above(D, z, fac(first + k * Wp))) ++cnt;
        partial[c] = cnt;
    });
    i128 total = 0;
    for (i128 v : partial) total += v;
    return total;
}

}  // namespace

i128 f_count(i128 D, int z, i128 Wp, i128 ap, i128 T, const SpfSieve& sieve, const Exec& exec) {
    if (T > i128(sieve.limit())) throw ResourceError("f_count: T exceeds the sieve limit");
    return count_progression(D, z, Wp, ap, T, exec, [&](i128 c) { return sieve.factor(std::uint64_t(c)); });
}

i128 f_count(i128 D, int z, i128 Wp, i128 ap, i128 T, const Exec& exec) {
    if (Wp < 1) throw DomainError("f_count: modulus must be positive");
    if (T < 1) return 0;
    i128 n = T / Wp + 1;
    if (T <= i128(SpfSieve::kMaxLimit) && n > 100'000) {
        SpfSieve sieve(static_cast<std::uint64_t>(T));
        return f_count(D, z, Wp, ap, T, sieve, exec);
    }
    if (n > 1'000'000) throw ResourceError("f_count: T beyond the sieve cap with a long progression");
    return count_progression(D, z, Wp, ap, T, exec, [](i128 c) { return factor(c); });
}

long double f_count_main_term(i128 D, int z, i128 Wp, i128 ap, long double T, long double gamma0) {
    if (T <= 1) return 0;
    long double v = gamma0 * T / std::sqrt(std::numbers::pi_v<long double> * std::log(T));
    v *= (1 + kronecker(D, ap)) / (long double)Wp;
    for (auto p : primes_up_to(std::uint32_t(std::max(z, 1)))) v /= std::sqrt(1 - 1.0L / p);
    return v;
}

long double gamma0_partial(i128 D, int z, std::uint32_t P_max) {
    if (P_max < std::uint32_t(z)) throw DomainError("gamma0_partial needs P_max >= z");
    long double log_sum = 0;
    for (auto p : primes_up_to(P_max)) {
        if (p <= std::uint32_t(z)) continue;
        long double x = 1.0L / p;
        log_sum += 0.5L * std::log1p(-x);
        int k = kronecker(D, p);
        if (k == 1) log_sum -= std::log1p(-x);
        else if (k == -1) log_sum -= std::log1p(-x * x);
    }
    return std::exp(log_sum);
}

bool joint_admissible(i128 D, int s, const std::vector<i128>& a, const WzSpec& wz) {
    if (s != 1 && s != -1) throw DomainError("sign must be +1 or -1");
    if (hilbert(D, s, Place::real()) != 1) return false;
    for (i128 ai : a)
        if (mod128(ai, wz.W) == 0) return false;
    for (auto [p, m] : wz.m_p) {
        int h = hilbert(D, s, Place::prime(p));
        for (i128 ai : a) h *= hilbert(D, ai, Place::prime(p));
        if (h != 1) return false;
    }
    for (i128 ai : a)
        if (kronecker(D, ai / gcd128(ai, wz.W)) != 1) return false;
    return true;
}

long double equidist_main_term(i128 D, int s, const std::vector<i128>& a, const WzSpec& wz,
                               const std::vector<long double>& x, long double gamma0) {
    if (x.size() != a.size()) throw DomainError("need one x_i per residue");
    for (long double xi : x)
        if (xi < 3) throw DomainError("equidist_main_term needs x_i >= 3");
    if (!joint_admissible(D, s, a, wz)) return 0;
    const int R = int(a.size());
    long double M = std::pow(2 * gamma0 / std::sqrt(std::numbers::pi_v<long double>), R);
    for (auto [p, m] : wz.m_p) M *= std::pow(1 - 1.0L / p, -R / 2.0L);
    long double v = M;
    for (long double xi : x) v *= xi / std::sqrt(std::log(xi)) / (long double)wz.W;
    return v;
}

bool splitting_precondition(const std::vector<i128>& a, const WzSpec& wz) {
    const std::int64_t R = std::int64_t(a.size());
    for (auto [p, m] : wz.m_p) {
        std::int64_t bound = 2 * floor_div(m - 3, 2 * R);
        for (i128 ai : a) {
            i128 r = mod128(ai, wz.W);
            if (r == 0) return false;
            if (vp(r, p).exponent >= bound) return false;
        }
    }
    return true;
}

SplitCheck splitting_check(i128 D, int s, const std::vector<i128>& a_in, const WzSpec& wz,
                           const std::vector<i128>& x, const Exec& exec) {
    if (a_in.size() != x.size() || a_in.empty()) throw DomainError("need one bound per residue");
    if (!splitting_precondition(a_in, wz))
        throw PreconditionError("residues violate v_p(a_i) < 2[(m_p - 3)/(2R)]");
    const int R = int(a_in.size());
    std::vector<i128> a(R);
    for (int i = 0; i < R; ++i) a[i] = mod128(a_in[i], wz.W);
    std::vector<std::int64_t> primes;
    for (auto [p, m] : wz.m_p) primes.push_back(p);

    // Per coordinate: number of admissible m_i for each vector of Hilbert symbols at p <= z.
    i128 tuples = 1;
    std::vector<std::map<std::uint64_t, i128>> classes(R);
    for (int i = 0; i < R; ++i) {
        i128 n = x[i] < a[i] ? 0 : (x[i] - a[i]) / wz.W + 1;
        tuples = checked_mul(tuples, std::max<i128>(n, 1));
        if (n > i128(exec.budget)) throw ResourceError("splitting_check: too many candidates");
        std::vector<std::pair<bool, std::uint64_t>> seen(static_cast<std::size_t>(n));
        parallel_chunks(std::size_t(n), exec.threads, [&](std::size_t k) {
            i128 m = a[i] + i128(k) * wz.W;
            bool ok = inert_even_above(D, wz.z, factor(m));
            std::uint64_t key = 0;
            for (std::size_t j = 0; j < primes.size(); ++j)
                if (hilbert(D, m, Place::prime(primes[j])) == -1) key |= 1ull << j;
            seen[k] = {ok, key};
        });
        for (auto [ok, key] : seen)
            if (ok) classes[i][key] += 1;
    }
    if (tuples > i128(exec.budget)) throw ResourceError("splitting_check: (x/W)^R exceeds the budget");

    std::uint64_t need = 0;
    for (std::size_t j = 0; j < primes.size(); ++j)
        if (hilbert(D, s, Place::prime(primes[j])) == -1) need |= 1ull << j;
    // Combine: the Hilbert product at each p is the xor of the per-coordinate keys.
    std::map<std::uint64_t, i128> acc{{0, 1}};
    for (int i = 0; i < R; ++i) {
        std::map<std::uint64_t, i128> next;
        for (auto [k1, c1] : acc)
            for (auto [k2, c2] : classes[i]) next[k1 ^ k2] = checked_add(next[k1 ^ k2], checked_mul(c1, c2));
        acc = std::move(next);
    }
    i128 lhs = 0;
    if (hilbert(D, s, Place::real()) == 1 && acc.count(need)) lhs = acc[need];

    SplitCheck out{false, lhs, 0, false, {}};
    out.indicator = hilbert(D, s, Place::real()) == 1;
    for (auto p : primes) {
        int h = hilbert(D, s, Place::prime(p));
        for (i128 ai : a) h *= hilbert(D, ai, Place::prime(p));
        if (h != 1) out.indicator = false;
    }
    i128 rhs = 1;
    for (int i = 0; i < R; ++i) {
        i128 g = gcd128(a[i], wz.W);
        i128 F = f_count(D, wz.z, wz.W / g, a[i] / g, x[i] / g, exec);
        out.F.push_back(F);
        rhs = checked_mul(rhs, F);
    }
    out.rhs = out.indicator ? rhs : 0;
    out.holds = out.lhs == out.rhs;
    return out;
}

}  // namespace chatelet
