#include "chatelet/densities.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chatelet/local_arith.hpp"
#include "chatelet/primes.hpp"

namespace chatelet {

namespace {

std::uint64_t pow_u64(std::uint64_t p, int e, std::uint64_t limit, const char* what) {
    i128 r = 1;
    for (int k = 0; k < e; ++k) {
        r *= p;
        if (r > i128(limit)) throw ResourceError(what);
    }
    return std::uint64_t(r);
}

void require_prime(std::uint64_t p) {
    if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
}

struct FiberWalk {
    const CompiledSystem& cs;
    const std::vector<int>& rows;
    std::uint64_t p;
    int m;
    std::vector<std::uint64_t> target;  // nu mod p^m
    std::vector<std::uint64_t> pw;      // p^0 .. p^m
    std::uint64_t budget;
    std::atomic<std::uint64_t>& visited;

    bool matches(const std::uint64_t* t, int level, std::uint64_t* vals) const {
        cs.eval_mod(t, pw[level], vals);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (vals[rows[r]] != target[r] % pw[level]) return false;
        return true;
    }

    i128 lifts(int j) const {
        const int free = cs.vars() - int(rows.size());
        return checked_pow(i128(p), unsigned((m - j) * free));
    }

    i128 walk(std::vector<std::uint64_t>& t, int j, std::vector<std::uint64_t>& vals,
              std::vector<std::uint64_t>& J) const {
        if (j == m) return 1;
        const int V = cs.vars();
        const int Rr = int(rows.size());
        if (Rr <= V) {
            cs.jacobian_mod(t.data(), p, rows, J.data());
            if (rank_mod(J.data(), Rr, V, p) == Rr) return lifts(j);
        }
        std::uint64_t nchildren = pw[1];
        for (int k = 1; k < V; ++k) nchildren *= p;
        if (visited.fetch_add(nchildren) + nchildren > budget)
            throw ResourceError("fiber tree exceeds the node budget");
        std::vector<std::uint64_t> base = t;
        i128 total = 0;
        for (std::uint64_t u = 0; u < nchildren; ++u) {
            std::uint64_t x = u;
            for (int k = V - 1; k >= 0; --k) {
                t[k] = base[k] + (x % p) * pw[j];
                x /= p;
            }
            if (matches(t.data(), j + 1, vals.data())) total = checked_add(total, walk(t, j + 1, vals, J));
        }
        t = base;
        return total;
    }
};

}  // namespace

namespace {

i128 fiber_count_rec(const CompiledSystem& cs, const std::vector<int>& rows, const std::vector<std::uint64_t>& nu,
                     std::uint64_t p, int m, const Exec& exec, std::atomic<std::uint64_t>& visited) {
    const int V = cs.vars();
    FiberWalk w{cs, rows, p, m, nu, {}, exec.budget, visited};
    w.pw.push_back(1);
    for (int k = 1; k <= m; ++k) w.pw.push_back(w.pw.back() * p);
    std::uint64_t n1 = pow_u64(p, V, exec.budget, "p^(n+1) exceeds the budget");
    if (visited.fetch_add(n1) + n1 > exec.budget) throw ResourceError("fiber tree exceeds the node budget");
    // Chunk 0 is t = 0 mod p, handled below by homogeneity.
    std::vector<i128> partial(n1, 0);
    parallel_chunks(n1 - 1, exec.threads, [&](std::size_t c0) {
        std::size_t c = c0 + 1;
        std::vector<std::uint64_t> t(V), vals(cs.R()), J(rows.size() * V + 1);
        std::uint64_t x = c;
        for (int k = V - 1; k >= 0; --k) {
            t[k] = x % p;
            x /= p;
        }
        if (w.matches(t.data(), 1, vals.data())) partial[c] = w.walk(t, 1, vals, J);
    });
    i128 total = 0;
    for (i128 v : partial) total = checked_add(total, v);

    // t = p t': f(t) = p^d f(t'), and t' only matters mod p^(m-1).
    const int d = cs.d();
    const int k = std::min(d, m);
    for (std::uint64_t v : nu)
        if (v % w.pw[k] != 0) return total;
    if (m <= d) return checked_add(total, checked_pow(i128(p), unsigned((m - 1) * V)));
    std::vector<std::uint64_t> inner;
    for (std::uint64_t v : nu) inner.push_back(v / w.pw[d]);
    i128 sub = fiber_count_rec(cs, rows, inner, p, m - d, exec, visited);
    return checked_add(total, checked_mul(checked_pow(i128(p), unsigned((d - 1) * V)), sub));
}

}  // namespace

i128 fiber_count(const CompiledSystem& cs, const std::vector<int>& rows, const std::vector<i128>& nu,
                 std::uint64_t p, int m, const Exec& exec) {
    require_prime(p);
    if (m < 1) throw DomainError("level must be >= 1");
    if (nu.size() != rows.size()) throw DomainError("need one target per selected form");
    for (int r : rows)
        if (r < 0 || r >= cs.R()) throw DomainError("form index out of range");
    std::uint64_t q = pow_u64(p, m, 0xFFFFFFFFull, "p^m must stay below 2^32");
    std::vector<std::uint64_t> target;
    for (i128 v : nu) target.push_back(std::uint64_t(mod128(v, q)));
    std::atomic<std::uint64_t> visited{0};
    return fiber_count_rec(cs, rows, target, p, m, exec, visited);
}

Rational local_density(const FormSystem& sys, const std::vector<i128>& nu, std::uint64_t p, int m,
                       const Exec& exec) {
    if (int(nu.size()) != sys.R()) throw DomainError("nu must have R entries");
    CompiledSystem cs(sys);
    std::vector<int> rows(sys.R());
    for (int i = 0; i < sys.R(); ++i) rows[i] = i;
    i128 count = fiber_count(cs, rows, nu, p, m, exec);
    int e = m * (sys.vars() - sys.R());
    if (e >= 0) return Rational(count, checked_pow(p, unsigned(e)));
    return Rational(checked_mul(count, checked_pow(p, unsigned(-e))));
}

SigmaResult sigma_p(const FormSystem& sys, const std::vector<i128>& nu, std::uint64_t p, int window,
                    const Exec& exec) {
    if (window < 2) throw DomainError("stability window must be >= 2");
    SigmaResult res;
    auto partial = [&] {
        std::ostringstream os;
        for (auto& [m, v] : res.levels) os << (m > 1 ? ", " : "") << "m=" << m << ": " << v.str();
        return os.str();
    };
    for (int m = 1;; ++m) {
        if (i128(checked_pow(i128(p), unsigned(m))) > i128(0xFFFFFFFFull))
            throw InconclusiveError("sigma_p did not stabilise below the 32-bit modulus limit", partial());
        Rational v;
        try {
            v = local_density(sys, nu, p, m, exec);
        } catch (const ResourceError&) {
            throw InconclusiveError("sigma_p did not stabilise within the budget", partial());
        }
        res.levels.push_back({m, v});
        int n = int(res.levels.size());
        if (n >= window) {
            bool same = true;
            for (int k = n - window; k < n; ++k) same = same && res.levels[k].second == v;
            if (same) {
                res.value = v;
                res.stable_from = n - window + 1;
                return res;
            }
        }
    }
}

Rational singular_series_flat(const FormSystem& sys, const std::vector<i128>& nu, const WzSpec& wz,
                              const Exec& exec) {
    if (int(nu.size()) != sys.R()) throw DomainError("nu must have R entries");
    const int V = sys.vars(), R = sys.R();
    if (wz.W == 1) return Rational(1);
    if (wz.W > i128(0xFFFFFFFFull)) throw ResourceError("W_z must stay below 2^32");
    const std::uint64_t W = std::uint64_t(wz.W);
    pow_u64(W, V, exec.budget, "W_z^(n+1) exceeds the budget");
    CompiledSystem cs(sys);
    std::vector<std::uint64_t> target;
    for (i128 v : nu) target.push_back(std::uint64_t(mod128(v, wz.W)));
    std::uint64_t rest = 1;
    for (int k = 1; k < V; ++k) rest *= W;
    std::vector<i128> partial(W, 0);
    parallel_chunks(W, exec.threads, [&](std::size_t c) {
        std::vector<std::uint64_t> t(V), vals(R);
        t[0] = c;
        i128 cnt = 0;
        for (std::uint64_t idx = 0; idx < rest; ++idx) {
            std::uint64_t x = idx;
            for (int k = V - 1; k >= 1; --k) {
                t[k] = x % W;
                x /= W;
            }
            cs.eval_mod(t.data(), W, vals.data());
            if (vals == target) ++cnt;
        }
        partial[c] = cnt;
    });
    i128 total = 0;
    for (i128 v : partial) total += v;
    int e = V - R;
    if (e >= 0) return Rational(total, checked_pow(wz.W, unsigned(e)));
    return Rational(checked_mul(total, checked_pow(wz.W, unsigned(-e))));
}

TailMass tail_mass(const FormSystem& sys, int i, std::uint64_t p, int k, const Exec& exec) {
    if (i < 0 || i >= sys.R()) throw DomainError("form index out of range");
    CompiledSystem cs(sys);
    i128 count = fiber_count(cs, {i}, {0}, p, k, exec);
    i128 pk = checked_pow(i128(p), unsigned(k));
    Rational mass(count, checked_pow(pk, unsigned(sys.vars())));
    return {mass, mass * Rational(pk)};
}

BatemanHorn bateman_horn_partial(const FormSystem& sys, std::uint32_t P_max, const Exec& exec) {
    BatemanHorn out;
    if (P_max < 2) return out;
    const int V = sys.vars(), R = sys.R();
    CompiledSystem cs(sys);
    long double log_sum = 0;
    for (std::uint32_t p : primes_up_to(P_max)) {
        std::uint64_t total = pow_u64(p, V, exec.budget, "p^(n+1) exceeds the budget");
        std::uint64_t rest = total / p;
        std::vector<std::uint64_t> partial(p, 0);
        parallel_chunks(p, exec.threads, [&](std::size_t c) {
            std::vector<std::uint64_t> t(V), vals(R);
            t[0] = c;
            std::uint64_t nonzero = 0;
            for (std::uint64_t idx = 0; idx < rest; ++idx) {
                std::uint64_t x = idx;
                for (int k = V - 1; k >= 1; --k) {
                    t[k] = x % p;
                    x /= p;
                }
                cs.eval_mod(t.data(), p, vals.data());
                bool ok = true;
                for (auto v : vals) ok = ok && v != 0;
                nonzero += ok;
            }
            partial[c] = nonzero;
        });
        std::uint64_t nonzero = 0;
        for (auto v : partial) nonzero += v;
        Rational f = Rational(i128(nonzero), i128(total)) * pow(Rational(p, p - 1), R);
        out.factors.push_back({p, f});
        log_sum += std::log(f.to_long_double());
    }
    out.value = std::exp(log_sum);
    return out;
}

std::vector<std::string> profile_names() { return {"unit", "zero", "norm_indicator"}; }

ProgressionProfile make_profile(const std::string& name, const ProfileParams& pp) {
    ProgressionProfile prof;
    prof.name = name;
    const int R = pp.R;
    prof.omega = [](const long double*, int) { return 1.0L; };
    if (name == "unit") {
        prof.rho = [R](const std::vector<std::uint64_t>&, std::uint64_t q) { return std::pow((long double)q, -R); };
        prof.C = 0;
    } else if (name == "zero") {
        prof.rho = [](const std::vector<std::uint64_t>&, std::uint64_t) { return 0.0L; };
    } else if (name == "norm_indicator") {
        long double M = std::pow(2 * pp.gamma0 / std::sqrt(std::numbers::pi_v<long double>), R);
        for (auto [p, m] : pp.wz.m_p) M *= std::pow(1 - 1.0L / p, -R / 2.0L);
        WzSpec wz = pp.wz;
        i128 D = pp.D;
        int s = pp.s;
        prof.rho = [=](const std::vector<std::uint64_t>& a, std::uint64_t q) {
            if (i128(q) != wz.W) throw DomainError("norm_indicator profile is defined modulo W_z only");
            std::vector<i128> ai(a.begin(), a.end());
            return joint_admissible(D, s, ai, wz) ? M * std::pow((long double)q, -R) : 0.0L;
        };
        prof.omega = [](const long double* x, int r) {
            long double v = 1;
            for (int i = 0; i < r; ++i) v /= std::sqrt(std::log(x[i]));
            return v;
        };
        prof.C = 0;
    } else {
        throw DomainError("unknown profile '" + name + "'");
    }
    return prof;
}

MainTerm vachms_main_term(const FormSystem& sys, const Box& box, const SignVector& s, const WzSpec& wz,
                          const ProgressionProfile& profile, long double P, const QuadratureSpec& quad,
                          const Exec& exec) {
    const int V = sys.vars(), R = sys.R();
    box.validate(V);
    if (int(s.size()) != R) throw DomainError("sign vector must have R entries");
    if (P < 1) throw DomainError("P must be >= 1");
    if (wz.W > i128(0xFFFFFFFFull)) throw ResourceError("W_z must stay below 2^32");
    const std::uint64_t W = std::uint64_t(wz.W);
    pow_u64(W, V, exec.budget, "W_z^(n+1) exceeds the budget");
    CompiledSystem cs(sys);

    std::uint64_t rest = 1;
    for (int k = 1; k < V; ++k) rest *= W;
    std::vector<long double> partial(W, 0);
    parallel_chunks(W, exec.threads, [&](std::size_t c) {
        std::vector<std::uint64_t> t(V), vals(R), a(R);
        t[0] = c;
        long double acc = 0;
        for (std::uint64_t idx = 0; idx < rest; ++idx) {
            std::uint64_t x = idx;
            for (int k = V - 1; k >= 1; --k) {
                t[k] = x % W;
                x /= W;
            }
            cs.eval_mod(t.data(), W, vals.data());
            for (int j = 0; j < R; ++j) a[j] = s[j] > 0 ? vals[j] : (W - vals[j]) % W;
            acc += profile.rho(a, W);
        }
        partial[c] = acc;
    });
    long double residues = 0;
    for (long double v : partial) residues += v;
    residues /= std::pow((long double)W, V - R);

    MainTerm out;
    out.residue_sum = residues;
    const long double Pd = std::pow(P, (long double)sys.d());
    const long double floor_val = 1 / Pd;
    auto g = [&](const double* t) -> long double {
        double f[64];
        long double x[64];
        cs.eval_real(t, f);
        for (int j = 0; j < R; ++j) {
            long double y = s[j] * (long double)f[j];
            if (y <= floor_val) return 0;
            x[j] = Pd * y;
        }
        return profile.omega(x, R);
    };
    if (R > 64) throw DomainError("at most 64 forms");
    GridResult q = midpoint_adaptive(g, box, quad.rel_tol, quad.abs_tol, quad.max_cells, exec.threads);
    out.integral = q.value;
    out.integral_error = q.error;
    out.integral_converged = q.converged;
    out.value = out.integral * residues;
    return out;
}

}  // namespace chatelet
