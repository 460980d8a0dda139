#include "chatelet/leading_constant.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "chatelet/local_arith.hpp"
#include "chatelet/primes.hpp"
#include "chatelet/quadrature.hpp"

namespace chatelet {

namespace {

std::uint64_t pow_checked(std::uint64_t p, int e, std::uint64_t limit, const char* what) {
    i128 r = 1;
    for (int k = 0; k < e; ++k) {
        r *= p;
        if (r > i128(limit)) throw ResourceError(what);
    }
    return std::uint64_t(r);
}

int vp_u64(std::uint64_t x, std::uint64_t p) {
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

// p^-e as an exact rational.
Rational inv_pow(std::int64_t p, int e) { return Rational(1, checked_pow(p, unsigned(e))); }

long double good_norm(std::int64_t p, int R) {
    return std::pow(1.0L - 1.0L / static_cast<long double>(p), -static_cast<long double>(R) / 2);
}

}  // namespace

int TruncationSpec::level(std::int64_t p) const {
    auto it = levels.find(p);
    return it == levels.end() ? T : it->second;
}

void TruncationSpec::validate() const {
    if (T < 2) throw DomainError("truncation level T must be at least 2");
    for (auto [p, l] : levels) {
        if (p < 2 || !is_prime(std::uint64_t(p))) throw DomainError("level override at a non-prime");
        if (l < 1) throw DomainError("level overrides must be at least 1");
    }
}

std::vector<std::int64_t> truncation_primes(i128 D, const TruncationSpec& trunc) {
    trunc.validate();
    if (D == 0) throw DomainError("D must be nonzero");
    std::vector<std::int64_t> ps;
    for (std::uint32_t p : primes_up_to(std::uint32_t(trunc.T))) ps.push_back(p);
    for (auto [p, e] : factor(checked_mul(2, D))) ps.push_back(std::int64_t(p));
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

int valuation_cap(std::int64_t p, int level) { return p == 2 ? level - 3 : level; }

// ---------------------------------------------------------------------------------------

LocalCharacters::LocalCharacters(i128 D) : D_(D) {
    if (D == 0) throw DomainError("D must be nonzero");
    std::vector<std::uint64_t> mods;
    for (auto [p, e] : factor(checked_mul(2, D))) {
        bad_.push_back(std::int64_t(p));
        e_.push_back(p == 2 ? 3 : 1);
        mods.push_back(p == 2 ? 8 : std::uint64_t(p));
    }
    i128 M = 1;
    for (auto m : mods) M = checked_mul(M, m);
    for (std::size_t j = 0; j < bad_.size(); ++j) {
        const i128 m = mods[j], rest = M / m;
        // rest^-1 mod m
        i128 inv = 1;
        while ((rest % m) * inv % m != 1) ++inv;
        std::vector<int> tab(m, 0);
        for (i128 u = 1; u < m; ++u) {
            if (u % bad_[j] == 0) continue;
            // lift = u mod m, 1 mod rest
            i128 lift = mod128(1 + rest * mod128((u - 1) * inv, m), M);
            if (lift == 0) lift = M;
            tab[std::size_t(u)] = kronecker(D, lift);
        }
        table_.push_back(std::move(tab));
    }
}

bool LocalCharacters::is_bad(std::int64_t p) const {
    return std::find(bad_.begin(), bad_.end(), p) != bad_.end();
}

int LocalCharacters::digits(std::int64_t p) const {
    for (std::size_t j = 0; j < bad_.size(); ++j)
        if (bad_[j] == p) return e_[j];
    return 0;
}

int LocalCharacters::chi(std::int64_t p, std::uint64_t unit) const {
    for (std::size_t j = 0; j < bad_.size(); ++j)
        if (bad_[j] == p) return table_[j][unit % table_[j].size()];
    throw DomainError("local character requested at a good prime");
}

int LocalCharacters::kappa(std::int64_t p) const {
    if (!is_bad(p)) return kronecker(D_, p);
    int k = 1;
    for (std::size_t j = 0; j < bad_.size(); ++j)
        if (bad_[j] != p) k *= table_[j][std::uint64_t(p) % table_[j].size()];
    return k;
}

int LocalCharacters::sign(int s) const { return s > 0 ? 1 : kronecker(D_, -1); }

// ---------------------------------------------------------------------------------------

namespace {

struct ProfileWalk {
    const CompiledSystem& cs;
    std::int64_t p;
    int cap, k, V, R;
    std::uint64_t pk;  // p^k
    std::uint64_t budget;
    std::atomic<std::uint64_t>& visited;
    std::vector<std::uint64_t> units;  // residues mod p^k prime to p

    struct Choice {
        int lambda;
        std::uint64_t unit;
        Rational prob;
    };

    void add(ValuationProfile& out, std::vector<int> key, const Rational& mass) const {
        auto [it, fresh] = out.emplace(std::move(key), mass);
        if (!fresh) it->second += mass;
    }

    // Haar-distributed lifts of the unresolved forms; the rest are fixed.
    void distribute(ValuationProfile& out, const std::vector<std::vector<Choice>>& choices, const Rational& mass) const {
        std::vector<int> key(2 * R, 0);
        // depth-first with the running valuation sum
        auto rec = [&](auto&& self, int i, int sum, const Rational& m) -> void {
            if (i == R) {
                add(out, key, m);
                return;
            }
            for (const Choice& c : choices[i]) {
                if (sum + c.lambda >= cap) continue;
                key[i] = c.lambda;
                key[R + i] = int(c.unit);
                self(self, i + 1, sum + c.lambda, m * c.prob);
            }
        };
        rec(rec, 0, 0, mass);
    }

    void walk(ValuationProfile& out, std::vector<std::uint64_t>& t, int j, const Rational& mass) {
        const std::uint64_t q = pow_checked(std::uint64_t(p), j, (std::uint64_t(1) << 62), "p^level too large");
        std::vector<std::uint64_t> vals(R);
        cs.eval_mod_wide(t.data(), q, vals.data());
        int lower = 0;
        std::vector<int> lam(R), unres;
        for (int i = 0; i < R; ++i) {
            if (vals[i] == 0) {
                lam[i] = -1;
                lower += j;
                unres.push_back(i);
            } else {
                lam[i] = vp_u64(vals[i], p);
                lower += lam[i];
                if (j - lam[i] < k) unres.push_back(i);
            }
        }
        if (lower >= cap) return;
        auto unit_of = [&](int i, int known) {
            std::uint64_t u = vals[i];
            for (int e = 0; e < lam[i]; ++e) u /= std::uint64_t(p);
            std::uint64_t m = 1;
            for (int e = 0; e < known; ++e) m *= std::uint64_t(p);
            return u % m;
        };
        if (unres.empty()) {
            std::vector<int> key(2 * R, 0);
            for (int i = 0; i < R; ++i) {
                key[i] = lam[i];
                key[R + i] = int(unit_of(i, k));
            }
            add(out, std::move(key), mass);
            return;
        }
        if (int(unres.size()) <= V) {
            std::vector<std::uint64_t> J(unres.size() * V);
            cs.jacobian_mod(t.data(), std::uint64_t(p), unres, J.data());
            if (rank_mod(J.data(), int(unres.size()), V, std::uint64_t(p)) == int(unres.size())) {
                std::vector<std::vector<Choice>> choices(R);
                std::size_t ui = 0;
                for (int i = 0; i < R; ++i) {
                    const bool open = ui < unres.size() && unres[ui] == i;
                    if (open) ++ui;
                    if (!open) {
                        choices[i].push_back({lam[i], unit_of(i, k), Rational(1)});
                    } else if (lam[i] >= 0) {
                        const int known = j - lam[i];
                        const std::uint64_t u0 = unit_of(i, known);
                        std::uint64_t step = 1;
                        for (int e = 0; e < known; ++e) step *= std::uint64_t(p);
                        const Rational pr = inv_pow(p, k - known);
                        for (std::uint64_t u = u0; u < pk; u += step) choices[i].push_back({lam[i], u, pr});
                    } else {
                        for (int r = 0; j + r < cap; ++r) {
                            if (k == 0) {
                                choices[i].push_back({j + r, 0, Rational(p - 1) * inv_pow(p, r + 1)});
                            } else {
                                const Rational pr = inv_pow(p, r + k);
                                for (std::uint64_t u : units) choices[i].push_back({j + r, u, pr});
                            }
                        }
                    }
                }
                distribute(out, choices, mass);
                return;
            }
        }
        const std::uint64_t nchild = pow_checked(std::uint64_t(p), V, budget, "p^(n+1) exceeds the budget");
        if (visited.fetch_add(nchild) + nchild > budget) throw ResourceError("valuation tree exceeds the node budget");
        const Rational child_mass = mass * inv_pow(p, V);
        std::vector<std::uint64_t> c(V, 0), base = t;
        for (std::uint64_t idx = 0; idx < nchild; ++idx) {
            std::uint64_t r = idx;
            for (int v = V - 1; v >= 0; --v) {
                c[v] = r % std::uint64_t(p);
                r /= std::uint64_t(p);
                t[v] = base[v] + c[v] * q;
            }
            walk(out, t, j + 1, child_mass);
        }
        t = base;
    }
};

// Profile over t not divisible by p.
ValuationProfile profile_nonzero(const CompiledSystem& cs, std::int64_t p, int cap, int k, const Exec& exec,
                                 std::atomic<std::uint64_t>& visited) {
    const int V = cs.vars(), R = cs.R();
    ProfileWalk base{cs, p, cap, k, V, R, 1, exec.budget, visited, {}};
    for (int e = 0; e < k; ++e) base.pk *= std::uint64_t(p);
    for (std::uint64_t u = 1; u < base.pk; ++u)
        if (u % std::uint64_t(p)) base.units.push_back(u);
    const std::uint64_t n1 = pow_checked(std::uint64_t(p), V, exec.budget, "p^(n+1) exceeds the budget");
    if (visited.fetch_add(n1) + n1 > exec.budget) throw ResourceError("valuation tree exceeds the node budget");
    std::vector<ValuationProfile> parts(n1 - 1);
    const Rational mass = inv_pow(p, V);
    parallel_chunks(n1 - 1, exec.threads, [&](std::size_t c0) {
        ProfileWalk w = base;
        std::uint64_t r = c0 + 1;
        std::vector<std::uint64_t> t(V);
        for (int v = V - 1; v >= 0; --v) {
            t[v] = r % std::uint64_t(p);
            r /= std::uint64_t(p);
        }
        w.walk(parts[c0], t, 1, mass);
    });
    ValuationProfile out;
    for (auto& part : parts)
        for (auto& [key, m] : part) {
            auto [it, fresh] = out.emplace(key, m);
            if (!fresh) it->second += m;
        }
    return out;
}

}  // namespace

ValuationProfile valuation_profile(const FormSystem& sys, std::int64_t p, int cap, int k, const Exec& exec) {
    if (p < 2 || !is_prime(std::uint64_t(p))) throw DomainError("valuation_profile needs a prime");
    if (k < 0) throw DomainError("unit digits must be non-negative");
    CompiledSystem cs(sys);
    const int V = sys.vars(), R = sys.R(), shift = sys.d() * R;
    std::atomic<std::uint64_t> visited{0};
    // VP(cap) = NZ(cap) + p^-V shift_d VP(cap - dR)
    ValuationProfile out;
    Rational scale(1);
    for (int depth = 0; cap - depth * shift > 0; ++depth) {
        ValuationProfile part = profile_nonzero(cs, p, cap - depth * shift, k, exec, visited);
        for (auto& [key, m] : part) {
            std::vector<int> shifted = key;
            for (int i = 0; i < R; ++i) shifted[i] += depth * sys.d();
            auto [it, fresh] = out.emplace(std::move(shifted), m * scale);
            if (!fresh) it->second += m * scale;
        }
        scale *= inv_pow(p, V);
    }
    return out;
}

ValuationProfile valuation_profile_direct(const FormSystem& sys, std::int64_t p, int level, int cap, int k,
                                          const Exec& exec) {
    if (cap - 1 + k > level) throw DomainError("level too small to read the requested unit digits");
    CompiledSystem cs(sys);
    const int V = sys.vars(), R = sys.R();
    const std::uint64_t q = pow_checked(std::uint64_t(p), level, std::uint64_t(1) << 32, "p^level must be below 2^32");
    pow_checked(q, V, exec.budget, "(p^level)^(n+1) exceeds the budget");
    std::uint64_t pk = 1;
    for (int e = 0; e < k; ++e) pk *= std::uint64_t(p);
    std::vector<std::map<std::vector<int>, i128>> parts(q);
    parallel_chunks(q, exec.threads, [&](std::size_t c) {
        std::vector<std::uint64_t> t(V, 0), vals(R);
        t[0] = c;
        auto& local = parts[c];
        for (;;) {
            cs.eval_mod(t.data(), q, vals.data());
            std::vector<int> key(2 * R, 0);
            int sum = 0;
            bool ok = true;
            for (int i = 0; i < R && ok; ++i) {
                if (vals[i] == 0) {
                    ok = false;
                    break;
                }
                int v = vp_u64(vals[i], std::uint64_t(p));
                std::uint64_t u = vals[i];
                for (int e = 0; e < v; ++e) u /= std::uint64_t(p);
                key[i] = v;
                key[R + i] = int(u % pk);
                sum += v;
            }
            if (ok && sum < cap) ++local[key];
            int j = V - 1;
            while (j >= 1 && ++t[j] == q) t[j--] = 0;
            if (j < 1) break;
        }
    });
    std::map<std::vector<int>, i128> counts;
    for (auto& part : parts)
        for (auto& [key, n] : part) counts[key] += n;
    const i128 total = checked_pow(q, unsigned(V));
    ValuationProfile out;
    for (auto& [key, n] : counts) out.emplace(key, Rational(n, total));
    return out;
}

// ---------------------------------------------------------------------------------------

Rational gamma_T_direct(const FormSystem& sys, i128 D, const SignVector& s, const TruncationSpec& trunc,
                        const Exec& exec) {
    if (int(s.size()) != sys.R()) throw DomainError("sign vector length differs from R");
    const auto ps = truncation_primes(D, trunc);
    i128 qq = 1;
    for (auto p : ps) qq = checked_mul(qq, checked_pow(p, unsigned(trunc.level(p))));
    if (qq >= (i128(1) << 32)) throw ResourceError("truncation modulus must be below 2^32");
    const std::uint64_t q = std::uint64_t(qq);
    const int V = sys.vars(), R = sys.R();
    pow_checked(q, V, exec.budget, "modulus^(n+1) exceeds the budget");
    for (auto p : ps)
        if (valuation_cap(p, trunc.level(p)) <= 0) return Rational(0);

    // Cap and Hilbert conditions on X = prod f_i mod q, Kronecker conditions on each f_i.
    std::vector<char> ok_prod(q, 0), kr_plus(q, 0), kr_minus(q, 0);
    parallel_chunks((q + 4095) / 4096, exec.threads, [&](std::size_t c) {
        for (std::uint64_t X = c * 4096; X < std::min<std::uint64_t>(q, (c + 1) * 4096); ++X) {
            if (X == 0) continue;
            bool ok = true;
            for (auto p : ps) {
                if (vp_u64(X, std::uint64_t(p)) >= valuation_cap(p, trunc.level(p)) ||
                    hilbert(D, i128(X), Place::prime(p)) != 1) {
                    ok = false;
                    break;
                }
            }
            ok_prod[X] = ok;
            const i128 g = gcd128(X, qq);
            const i128 cof = i128(X) / g;
            kr_plus[X] = kronecker(D, cof) == 1;
            kr_minus[X] = kronecker(D, -cof) == 1;
        }
    });

    std::vector<i128> partial(q, 0);
    CompiledSystem cs(sys);
    parallel_chunks(q, exec.threads, [&](std::size_t c) {
        std::vector<std::uint64_t> t(V, 0), vals(R);
        t[0] = c;
        i128 n = 0;
        for (;;) {
            cs.eval_mod(t.data(), q, vals.data());
            u128 X = 1;
            bool ok = true;
            for (int i = 0; i < R && ok; ++i) {
                ok = (s[i] > 0 ? kr_plus : kr_minus)[vals[i]];
                X = X * vals[i] % q;
            }
            if (ok && ok_prod[std::uint64_t(X)]) ++n;
            int j = V - 1;
            while (j >= 1 && ++t[j] == q) t[j--] = 0;
            if (j < 1) break;
        }
        partial[c] = n;
    });
    i128 total = 0;
    for (i128 n : partial) total += n;
    return Rational(total, checked_pow(qq, unsigned(V)));
}

// ---------------------------------------------------------------------------------------

long double PrimeFactor::normalized(unsigned mask, int R) const {
    return good_norm(p, R) * E[mask].to_long_double();
}

namespace {

PrimeFactor prime_factor(const FormSystem& sys, i128 D, const LocalCharacters& chars, std::int64_t p, int level,
                         const Exec& exec) {
    const int R = sys.R();
    PrimeFactor f;
    f.p = p;
    f.level = level;
    f.cap = valuation_cap(p, level);
    f.bad = chars.is_bad(p);
    f.E.assign(std::size_t(1) << R, Rational(0));
    if (f.cap <= 0) return f;
    const int k = chars.digits(p);
    const int kap = chars.kappa(p);
    const int dp = f.bad ? 0 : kronecker(D, p);
    const ValuationProfile prof = valuation_profile(sys, p, f.cap, k, exec);
    std::uint64_t pk = 1;
    for (int e = 0; e < k; ++e) pk *= std::uint64_t(p);
    for (const auto& [key, mass] : prof) {
        int sum = 0;
        for (int i = 0; i < R; ++i) sum += key[i];
        int hil;
        if (f.bad) {
            std::uint64_t U = 1;
            for (int i = 0; i < R; ++i) U = U * std::uint64_t(key[R + i]) % pk;
            const i128 X = (sum & 1) ? i128(U) * p : i128(U);
            hil = hilbert(D, X, Place::prime(p));
        } else {
            hil = (sum & 1) ? dp : 1;
        }
        if (hil != 1) continue;
        std::vector<int> psi(R);
        for (int i = 0; i < R; ++i) {
            int v = (key[i] & 1) ? kap : 1;
            if (f.bad) v *= chars.chi(p, std::uint64_t(key[R + i]));
            psi[i] = v;
        }
        for (unsigned mask = 0; mask < (1u << R); ++mask) {
            int sg = 1;
            for (int i = 0; i < R; ++i)
                if (mask >> i & 1) sg *= psi[i];
            if (sg > 0)
                f.E[mask] += mass;
            else
                f.E[mask] -= mass;
        }
    }
    return f;
}

}  // namespace

GammaTCrt::GammaTCrt(const FormSystem& sys, i128 D, const TruncationSpec& trunc, const Exec& exec)
    : R_(sys.R()), D_(D) {
    const LocalCharacters chars(D);
    for (auto p : truncation_primes(D, trunc)) primes_.push_back(prime_factor(sys, D, chars, p, trunc.level(p), exec));
}

Rational GammaTCrt::combine(const SignVector& s, bool even_only) const {
    if (int(s.size()) != R_) throw DomainError("sign vector length differs from R");
    const LocalCharacters chars(D_);
    Rational acc(0);
    for (unsigned mask = 0; mask < (1u << R_); ++mask) {
        if (even_only && (__builtin_popcount(mask) & 1)) continue;
        int sg = 1;
        for (int i = 0; i < R_; ++i)
            if (mask >> i & 1) sg *= chars.sign(s[i]);
        Rational term(sg);
        for (const auto& f : primes_) term *= f.E[mask];
        acc += term;
    }
    acc *= Rational(even_only ? 2 : 1, checked_pow(2, unsigned(R_)));
    return acc;
}

Rational GammaTCrt::gamma_T(const SignVector& s) const { return combine(s, false); }
Rational GammaTCrt::all_equal(const SignVector& s) const { return combine(s, true); }

long double GammaTCrt::normalization() const {
    long double n = 1;
    for (const auto& f : primes_) n *= good_norm(f.p, R_);
    return n;
}

Rational gamma_T_crt(const FormSystem& sys, i128 D, const SignVector& s, const TruncationSpec& trunc,
                     const Exec& exec) {
    return GammaTCrt(sys, D, trunc, exec).gamma_T(s);
}

std::vector<long double> good_factor(const FormSystem& sys, i128 D, std::int64_t p, int level, const Exec& exec) {
    const LocalCharacters chars(D);
    if (chars.is_bad(p)) throw DomainError("good_factor needs p not dividing 2D");
    if (!is_prime(std::uint64_t(p))) throw DomainError("good_factor needs a prime");
    const PrimeFactor f = prime_factor(sys, D, chars, p, level, exec);
    std::vector<long double> out;
    for (unsigned mask = 0; mask < f.E.size(); ++mask) out.push_back(f.normalized(mask, sys.R()));
    return out;
}

// ---------------------------------------------------------------------------------------

namespace {

GammaEstimate fit_estimate(std::vector<int> Ts, std::vector<Rational> raw, std::vector<long double> norm) {
    GammaEstimate e;
    e.T = std::move(Ts);
    e.raw = std::move(raw);
    e.normalized = std::move(norm);
    e.gamma = e.normalized.back();
    long double prev = -1;
    for (std::size_t k = 0; k + 1 < e.T.size(); ++k) {
        const long double step = std::fabs(e.normalized[k + 1] - e.normalized[k]);
        e.amplitude = std::max(e.amplitude, step * std::pow(2.0L, e.T[k] / 2.0L));
        if (prev >= 0 && step > prev) e.envelope_monotone = false;
        prev = step;
    }
    e.error = e.amplitude * std::pow(2.0L, -e.T.back() / 2.0L);
    return e;
}

void check_T_list(const std::vector<int>& T_list) {
    if (T_list.size() < 2) throw InconclusiveError("gamma_estimate needs at least two truncation levels", "");
    for (std::size_t k = 0; k + 1 < T_list.size(); ++k)
        if (T_list[k] >= T_list[k + 1]) throw DomainError("T_list must be strictly increasing");
}

}  // namespace

GammaEstimate gamma_estimate(const FormSystem& sys, i128 D, const SignVector& s, const std::vector<int>& T_list,
                             const std::map<std::int64_t, int>& overrides, const Exec& exec) {
    check_T_list(T_list);
    std::vector<Rational> raw;
    std::vector<long double> norm;
    for (int T : T_list) {
        GammaTCrt crt(sys, D, TruncationSpec{T, overrides}, exec);
        raw.push_back(crt.gamma_T(s));
        norm.push_back(raw.back().to_long_double() * crt.normalization());
    }
    return fit_estimate(T_list, raw, norm);
}

GammaInf gamma_infinity(const FormSystem& sys, const SignVector& s, const GammaInfSpec& spec, const Exec& exec) {
    if (int(s.size()) != sys.R()) throw DomainError("sign vector length differs from R");
    const int V = sys.vars(), R = sys.R();
    int per_axis = spec.per_axis;
    if (per_axis <= 0) {
        if (V == 2) {
            per_axis = 1024;
        } else {
            per_axis = int(std::floor(std::pow(static_cast<long double>(exec.budget), 1.0L / V)));
            per_axis -= per_axis & 1;
        }
    }
    if (per_axis < 2 || per_axis % 2) throw DomainError("grid resolution must be even and at least 2");
    pow_checked(std::uint64_t(per_axis), V, exec.budget, "grid exceeds the budget");
    CompiledSystem cs(sys);
    Integrand g = [&cs, &s, R](const double* t) -> long double {
        double vals[64];
        std::vector<double> big;
        double* out = vals;
        if (R > 64) {
            big.resize(R);
            out = big.data();
        }
        cs.eval_real(t, out);
        for (int i = 0; i < R; ++i)
            if (s[i] * out[i] <= 0) return 0;
        return 1;
    };
    const Box box = Box::unit(V);
    GammaInf r;
    const GridResult grid = midpoint_fixed(g, box, per_axis, exec.threads);
    r.value = grid.value;
    r.error = grid.error;
    r.per_axis = per_axis;
    if (spec.mc_samples > 0) {
        const McResult mc = monte_carlo(g, box, spec.mc_samples, spec.seed, exec.threads);
        r.mc_mean = mc.mean;
        r.mc_stderr = mc.stderr_;
        r.mc_disagrees = std::fabs(mc.mean - grid.value) > 3 * mc.stderr_ + grid.error + 1e-12L;
    }
    return r;
}

bool sign_admissible(i128 D, const SignVector& s) {
    int prod = 1;
    for (int v : s) prod *= v;
    return D > 0 || prod > 0;
}

GammaTotal gamma_total(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const std::vector<int>& T_list,
                       const std::map<std::int64_t, int>& overrides, const Exec& exec) {
    check_T_list(T_list);
    std::vector<GammaTCrt> crts;
    for (int T : T_list) crts.emplace_back(sys, D, TruncationSpec{T, overrides}, exec);
    GammaTotal tot;
    for (const SignVector& s : all_sign_vectors(sys.R())) {
        if (!sign_admissible(D, s)) continue;
        GammaTotalEntry e;
        e.s = s;
        e.inf = gamma_infinity(sys, s, quad, exec);
        std::vector<Rational> raw;
        std::vector<long double> norm;
        for (const auto& c : crts) {
            raw.push_back(c.gamma_T(s));
            norm.push_back(raw.back().to_long_double() * c.normalization());
        }
        e.est = fit_estimate(T_list, raw, norm);
        tot.value += e.inf.value * e.est.gamma;
        tot.error += e.inf.error * std::fabs(e.est.gamma) + e.inf.value * e.est.error;
        tot.entries.push_back(std::move(e));
    }
    return tot;
}

// ---------------------------------------------------------------------------------------

long double zeta(int s) {
    if (s < 2) throw DomainError("zeta needs s >= 2");
    const std::int64_t N = 1'000'000;
    long double acc = 0;
    for (std::int64_t n = N; n >= 1; --n) acc += std::pow(static_cast<long double>(n), -static_cast<long double>(s));
    const long double Nl = N;
    return acc + std::pow(Nl, 1.0L - s) / (s - 1) - std::pow(Nl, -static_cast<long double>(s)) / 2;
}

long double theorem_constant(int n, int R, int d, long double gamma) {
    const long double pi = std::numbers::pi_v<long double>;
    return gamma / 2 * std::pow(static_cast<long double>(n + 1), R / 2.0L) / zeta(n + 1) *
           std::pow(2.0L / std::sqrt(pi * d), static_cast<long double>(R));
}

long double predict_N(int n, int R, int d, long double gamma, long double B) {
    if (!(B > 1)) throw DomainError("predict_N needs B > 1");
    if (gamma == 0) return 0;
    return theorem_constant(n, R, d, gamma) * B / std::pow(std::log(B), R / 2.0L);
}

i128 brsub_order(int d, int R) {
    if (d < 1 || R < 1) throw DomainError("brsub_order needs d, R >= 1");
    return checked_pow(2, unsigned(d % 2 == 0 ? R : R - 1));
}

LrsInvariants lrs_invariants(int n, int R, int d) {
    if (n < 1 || R < 1 || d < 1) throw DomainError("invariants need n, R, d >= 1");
    LrsInvariants inv;
    inv.alpha_star = Rational(1, n + 1);
    inv.Delta = Rational(R, 2);
    inv.eta = Rational(n + 1, d);
    inv.Gamma_factor = std::pow(std::numbers::pi_v<long double>, R / 2.0L);
    inv.br_order = brsub_order(d, R);
    inv.fujita_product = std::pow(static_cast<long double>(n + 1) / d, R / 2.0L);
    return inv;
}

namespace {

struct SignData {
    SignVector s;
    GammaInf inf;
    long double gamma_hat = 0;  // normalized gamma_T
    long double all_equal = 0;  // normalized all-equal measure
};

std::vector<SignData> sign_data(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const TruncationSpec& trunc,
                                const Exec& exec) {
    const GammaTCrt crt(sys, D, trunc, exec);
    const long double norm = crt.normalization();
    std::vector<SignData> out;
    for (const SignVector& s : all_sign_vectors(sys.R())) {
        if (!sign_admissible(D, s)) continue;
        SignData sd;
        sd.s = s;
        sd.inf = gamma_infinity(sys, s, quad, exec);
        sd.gamma_hat = crt.gamma_T(s).to_long_double() * norm;
        sd.all_equal = crt.all_equal(s).to_long_double() * norm;
        out.push_back(std::move(sd));
    }
    return out;
}

LrsResult assemble_lrs(const FormSystem& sys, const std::vector<SignData>& data) {
    const int n = sys.n(), R = sys.R(), d = sys.d();
    LrsResult r;
    r.inv = lrs_invariants(n, R, d);
    const long double pre = (n + 1) / 2.0L / zeta(n + 1);
    long double sum = 0, err = 0;
    for (const auto& sd : data) {
        LrsSign ls;
        ls.s = sd.s;
        ls.gamma_inf = sd.inf.value;
        ls.gamma_inf_error = sd.inf.error;
        ls.measure = d % 2 == 0 ? sd.gamma_hat : sd.all_equal;
        sum += ls.gamma_inf * ls.measure;
        err += ls.gamma_inf_error * std::fabs(ls.measure);
        r.signs.push_back(ls);
    }
    r.tau = pre * sum;
    const long double k = r.inv.alpha_star.to_long_double() * static_cast<long double>(r.inv.br_order) /
                          r.inv.Gamma_factor * r.inv.fujita_product;
    r.c_pred = k * r.tau;
    r.c_pred_error = k * pre * err;
    return r;
}

}  // namespace

LrsResult lrs_constant(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const TruncationSpec& trunc,
                       const Exec& exec) {
    return assemble_lrs(sys, sign_data(sys, D, quad, trunc, exec));
}

CompareReport constants_compare(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const TruncationSpec& trunc,
                                const Exec& exec) {
    const auto data = sign_data(sys, D, quad, trunc, exec);
    const LrsResult lrs = assemble_lrs(sys, data);
    long double gamma = 0, gerr = 0;
    for (const auto& sd : data) {
        gamma += sd.inf.value * sd.gamma_hat;
        gerr += sd.inf.error * std::fabs(sd.gamma_hat);
    }
    CompareReport c;
    c.theorem = theorem_constant(sys.n(), sys.R(), sys.d(), gamma);
    c.lrs = lrs.c_pred;
    c.abs_diff = std::fabs(c.theorem - c.lrs);
    const long double scale = std::max(std::fabs(c.theorem), std::fabs(c.lrs));
    c.rel_diff = scale > 0 ? c.abs_diff / scale : 0;
    c.quad_bound = theorem_constant(sys.n(), sys.R(), sys.d(), gerr) + lrs.c_pred_error;
    c.within_bound = c.abs_diff <= c.quad_bound + 1e-12L * scale;
    return c;
}

}  // namespace chatelet
