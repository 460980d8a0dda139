#include "chatelet/lattice_count.hpp"

#include <chrono>
#include <functional>
#include <cmath>
#include <numeric>

#include "chatelet/local_arith.hpp"
#include "chatelet/primes.hpp"

namespace chatelet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
    if (a == 0) return b;
    if (b == 0) return a;
    int shift = __builtin_ctzll(a | b);
    a >>= __builtin_ctzll(a);
    do {
        b >>= __builtin_ctzll(b);
        if (a > b) std::swap(a, b);
        b -= a;
    } while (b != 0);
    return a << shift;
}

// Bound on |prod f_i| over the box of radius P.
i128 product_bound(const FormSystem& sys, std::int64_t P) {
    i128 pd = checked_pow(P, unsigned(sys.d()));
    i128 b = 1;
    for (i128 s : coefficient_sums(sys)) {
        i128 r;
        if (__builtin_mul_overflow(b, checked_mul(s, pd), &r)) return -1;
        b = r;
    }
    return b;
}

// Visits every point of [-P, P]^V whose leading coordinate equals `lead` (points in
// row-major order). f(const int64_t* t).
template <class F>
void visit_slab(int V, std::int64_t P, std::int64_t lead, int first, F&& f) {
    std::vector<std::int64_t> t(V, 0);
    t[first] = lead;
    if (first == V - 1) {
        f(t.data());
        return;
    }
    for (int j = first + 1; j < V; ++j) t[j] = -P;
    for (;;) {
        for (std::int64_t x = -P; x <= P; ++x) {
            t[V - 1] = x;
            f(t.data());
        }
        int j = V - 2;
        while (j > first && t[j] == P) t[j--] = -P;
        if (j <= first) return;
        ++t[j];
    }
}

i128 pow_points(std::int64_t side, int dims) {
    i128 r = 1;
    for (int i = 0; i < dims; ++i) {
        if (__builtin_mul_overflow(r, i128(side), &r)) return -1;
    }
    return r;
}

// The four conditions of the capped count.
class CappedTest {
public:
    CappedTest(const QuadraticField& K, Caps caps, i128 max_value) : K_(K), caps_(caps) {
        if (caps.z < 2 || caps.alpha < 1) throw DomainError("caps need z >= 2 and alpha >= 1");
        for (std::uint32_t p : primes_up_to(std::uint32_t(caps.z))) small_.push_back(p);
        if (max_value >= 0 && max_value <= 20'000'000) spf_ = std::make_unique<SpfSieve>(std::uint64_t(max_value));
    }

    // Conditions (ii)-(iv); the real-place condition is handled by the caller.
    bool finite_ok(const i128* f, int R) const {
        for (int i = 0; i < R; ++i)
            if (f[i] == 0) return false;
        for (std::int64_t p : small_) {
            int sym = 1;
            for (int i = 0; i < R; ++i) {
                if (vp(f[i], p).exponent >= 2 * caps_.alpha) return false;
                sym *= hilbert(K_.D(), f[i], Place::prime(p));
            }
            if (sym != 1) return false;
        }
        for (int i = 0; i < R; ++i) {
            Factorization fac = (spf_ && abs128(f[i]) <= i128(spf_->limit())) ? spf_->factor(std::uint64_t(abs128(f[i])))
                                                                               : factor(f[i]);
            for (auto& [p, e] : fac)
                if (p > caps_.z && (e & 1) && kronecker(K_.D(), p) == -1) return false;
        }
        return true;
    }

    bool real_ok(const i128* f, int R) const {
        if (K_.D() > 0) return true;
        int s = 1;
        for (int i = 0; i < R; ++i) s *= f[i] < 0 ? -1 : 1;
        return s > 0;
    }

private:
    QuadraticField K_;
    Caps caps_;
    std::vector<std::int64_t> small_;
    std::unique_ptr<SpfSieve> spf_;
};

// Per-chunk evaluation context.
struct Evaluator {
    const CompiledSystem& cs;
    bool fast;
    std::vector<std::int64_t> v64;
    std::vector<i128> v128, t128;

    Evaluator(const CompiledSystem& c, std::int64_t radius)
        : cs(c), fast(c.fits_int64(radius)), v64(c.R()), v128(c.R()), t128(c.vars()) {}

    const i128* values(const std::int64_t* t) {
        if (fast) {
            cs.eval_int64(t, v64.data());
            for (int i = 0; i < cs.R(); ++i) v128[i] = v64[i];
        } else {
            for (int j = 0; j < cs.vars(); ++j) t128[j] = t[j];
            cs.eval_checked(t128.data(), v128.data());
        }
        return v128.data();
    }
};

i128 product_of(const i128* v, int R) {
    i128 p = 1;
    for (int i = 0; i < R; ++i) p = checked_mul(p, v[i]);
    return p;
}

}  // namespace

NormOracle::NormOracle(const QuadraticField& K, NormMode mode, i128 max_abs) : K_(K), mode_(mode) {
    if (mode == NormMode::hasse && max_abs >= 0 && max_abs <= i128(kTableLimit))
        table_ = std::make_shared<NormTable>(K, std::uint64_t(std::max<i128>(max_abs, 1)));
}

bool NormOracle::contains(i128 m, Memo& memo) const {
    if (table_ && abs128(m) <= i128(table_->limit())) return table_->contains(std::int64_t(m));
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    bool r = is_norm(K_, m, mode_);
    if (memo.size() > (1u << 20)) memo.clear();
    memo.emplace(m, r);
    return r;
}

CountResult count_N(const CountQuery& q, const Exec& exec) {
    auto t0 = Clock::now();
    if (q.bound < 1) throw DomainError("height bound B must be >= 1");
    const FormSystem& sys = q.sys;
    const int V = sys.vars(), R = sys.R();
    const std::int64_t P = integer_root(q.bound, unsigned(V));
    // Half-space size: ((2P+1)^V - 1) / 2.
    i128 box = pow_points(2 * P + 1, V);
    if (box < 0 || (box - 1) / 2 > i128(exec.budget))
        throw ResourceError("count_N: " + to_string(box < 0 ? box : (box - 1) / 2) + " points exceed the budget of " +
                            std::to_string(exec.budget));
    CountResult res;
    res.radius = P;
    res.points_scanned = std::uint64_t((box - 1) / 2);
    if (P == 0) {
        res.layout = "empty box";
        res.elapsed = seconds_since(t0);
        return res;
    }
    CompiledSystem cs(sys);
    NormOracle oracle(q.K, q.mode, product_bound(sys, P));
    // Chunk (k, a): t_0 = ... = t_{k-1} = 0, t_k = a in [1, P], later coordinates free.
    std::vector<std::pair<int, std::int64_t>> chunks;
    for (int k = 0; k < V; ++k)
        for (std::int64_t a = 1; a <= P; ++a) chunks.emplace_back(k, a);
    std::vector<i128> partial(chunks.size(), 0);
    const bool exclude_zero = q.zero_policy == ZeroPolicy::exclude;
    parallel_chunks(chunks.size(), exec.threads, [&](std::size_t c) {
        auto [k, a] = chunks[c];
        Evaluator ev(cs, P);
        NormOracle::Memo memo;
        i128 count = 0;
        visit_slab(V, P, a, k, [&](const std::int64_t* t) {
            const i128* f = ev.values(t);
            i128 prod;
            if (ev.fast && R == 1) {
                prod = f[0];
            } else {
                prod = product_of(f, R);
            }
            if (prod == 0) {
                if (exclude_zero) return;
            } else if (!oracle.contains(prod, memo)) {
                return;
            }
            std::uint64_t g = std::uint64_t(a);
            for (int j = k + 1; j < V && g != 1; ++j) g = gcd64(g, std::uint64_t(t[j] < 0 ? -t[j] : t[j]));
            if (g == 1) ++count;
        });
        partial[c] = count;
    });
    for (i128 v : partial) res.value += v;
    res.chunks = chunks.size();
    res.layout = "half-space by leading nonzero coordinate, " + std::to_string(chunks.size()) + " chunks";
    res.elapsed = seconds_since(t0);
    return res;
}

namespace {

// Counts points of [-P, P]^V \ {0} accepted by `accept(values, point)`, with an optional
// histogram by max-norm.
template <class Accept>
CountResult count_box(const FormSystem& sys, std::int64_t P, const Exec& exec, Accept&& accept,
                      std::vector<i128>* by_height = nullptr) {
    auto t0 = Clock::now();
    const int V = sys.vars();
    i128 box = pow_points(2 * P + 1, V);
    if (box < 0 || box - 1 > i128(exec.budget))
        throw ResourceError("box enumeration of " + (box < 0 ? std::string("> 2^127") : to_string(box - 1)) +
                            " points exceeds the budget of " + std::to_string(exec.budget));
    CountResult res;
    res.radius = P;
    res.points_scanned = std::uint64_t(box - 1);
    CompiledSystem cs(sys);
    const std::size_t nchunks = std::size_t(2 * P + 1);
    std::vector<i128> partial(nchunks, 0);
    std::vector<std::vector<i128>> hist(by_height ? nchunks : 0);
    parallel_chunks(nchunks, exec.threads, [&](std::size_t c) {
        std::int64_t lead = std::int64_t(c) - P;
        Evaluator ev(cs, P);
        auto state = accept.make_state();
        i128 count = 0;
        std::vector<i128>* h = nullptr;
        if (by_height) {
            hist[c].assign(std::size_t(P + 1), 0);
            h = &hist[c];
        }
        visit_slab(V, P, lead, 0, [&](const std::int64_t* t) {
            std::int64_t height = 0;
            for (int j = 0; j < V; ++j) height = std::max<std::int64_t>(height, t[j] < 0 ? -t[j] : t[j]);
            if (height == 0) return;
            if (!accept(ev.values(t), state)) return;
            ++count;
            if (h) ++(*h)[height];
        });
        partial[c] = count;
    });
    for (i128 v : partial) res.value += v;
    if (by_height) {
        by_height->assign(std::size_t(P + 1), 0);
        for (auto& hc : hist)
            for (std::size_t i = 0; i < hc.size(); ++i) (*by_height)[i] += hc[i];
    }
    res.chunks = nchunks;
    res.layout = "full box by first coordinate, " + std::to_string(nchunks) + " chunks";
    res.elapsed = seconds_since(t0);
    return res;
}

struct UncappedAccept {
    const NormOracle& oracle;
    int R;
    bool exclude_zero;
    NormOracle::Memo make_state() const { return {}; }
    bool operator()(const i128* f, NormOracle::Memo& memo) const {
        i128 prod = product_of(f, R);
        if (prod == 0) return !exclude_zero;
        return oracle.contains(prod, memo);
    }
};

struct CappedAccept {
    const CappedTest& test;
    int R;
    std::optional<SignVector> sign;  // when set: sign pattern filter instead of the real condition
    int make_state() const { return 0; }
    bool operator()(const i128* f, int&) const {
        if (sign) {
            for (int i = 0; i < R; ++i)
                if ((f[i] > 0 ? 1 : -1) != (*sign)[i] || f[i] == 0) return false;
        } else if (!test.real_ok(f, R)) {
            return false;
        }
        return test.finite_ok(f, R);
    }
};

struct SignedUncappedAccept {
    const NormOracle& oracle;
    int R;
    SignVector sign;
    NormOracle::Memo make_state() const { return {}; }
    bool operator()(const i128* f, NormOracle::Memo& memo) const {
        for (int i = 0; i < R; ++i)
            if (f[i] == 0 || (f[i] > 0 ? 1 : -1) != sign[i]) return false;
        return oracle.contains(product_of(f, R), memo);
    }
};

i128 max_form_value(const FormSystem& sys, std::int64_t P) {
    i128 pd = checked_pow(P, unsigned(sys.d()));
    i128 m = 0;
    for (i128 s : coefficient_sums(sys)) m = std::max(m, checked_mul(s, pd));
    return m;
}

}  // namespace

CountResult count_N0(const CountQuery& q, const Exec& exec) {
    if (q.bound < 0) throw DomainError("box radius must be >= 0");
    const std::int64_t P = std::int64_t(q.bound);
    const int R = q.sys.R();
    if (q.caps) {
        CappedTest test(q.K, *q.caps, max_form_value(q.sys, P));
        return count_box(q.sys, P, exec, CappedAccept{test, R, std::nullopt});
    }
    NormOracle oracle(q.K, q.mode, product_bound(q.sys, P));
    return count_box(q.sys, P, exec, UncappedAccept{oracle, R, q.zero_policy == ZeroPolicy::exclude});
}

std::vector<int> mobius_table(std::int64_t limit) {
    std::vector<int> mu(std::size_t(limit + 1), 1);
    if (limit >= 0) mu[0] = 0;
    std::vector<bool> comp(std::size_t(limit + 1), false);
    for (std::int64_t p = 2; p <= limit; ++p) {
        if (comp[p]) continue;
        for (std::int64_t j = p; j <= limit; j += p) {
            if (j > p) comp[j] = true;
            mu[j] = -mu[j];
        }
        for (std::int64_t j = p * p; j <= limit; j += p * p) mu[j] = 0;
    }
    return mu;
}

MobiusCheck mobius_identity_check(const FormSystem& sys, const QuadraticField& K, i128 B, const Exec& exec) {
    if ((sys.d() * sys.R()) % 2 != 0)
        throw PreconditionError("the Moebius descent needs dR even (scaling by k multiplies the product by k^(dR))");
    CountQuery q{sys, K, B, std::nullopt};
    CountResult n = count_N(q, exec);
    const std::int64_t P = n.radius;
    std::vector<i128> by_height;
    NormOracle oracle(K, NormMode::hasse, product_bound(sys, P));
    count_box(sys, P, exec, UncappedAccept{oracle, sys.R(), false}, &by_height);
    std::vector<i128> cumulative(by_height.size(), 0);
    for (std::size_t h = 1; h < by_height.size(); ++h) cumulative[h] = cumulative[h - 1] + by_height[h];
    std::vector<int> mu = mobius_table(P);
    i128 sum = 0;
    for (std::int64_t k = 1; k <= P; ++k) sum += mu[k] * cumulative[std::size_t(P / k)];
    return {2 * n.value == sum, 2 * n.value, sum, P};
}

SignPartitionCheck sign_partition_check(const FormSystem& sys, const QuadraticField& K, std::int64_t P,
                                        std::optional<Caps> caps, const Exec& exec) {
    SignPartitionCheck out{false, 0, {}};
    const int R = sys.R();
    i128 rhs = 0;
    if (caps) {
        CappedTest test(K, *caps, max_form_value(sys, P));
        out.total = count_box(sys, P, exec, CappedAccept{test, R, std::nullopt}).value;
        for (const SignVector& s : all_sign_vectors(R)) {
            int prod = 1;
            for (int v : s) prod *= v;
            if (K.D() < 0 && prod < 0) continue;
            i128 c = count_box(sys, P, exec, CappedAccept{test, R, s}).value;
            out.by_sign[sign_label(s)] = c;
            rhs += c;
        }
    } else {
        NormOracle oracle(K, NormMode::hasse, product_bound(sys, P));
        out.total = count_box(sys, P, exec, UncappedAccept{oracle, R, true}).value;
        for (const SignVector& s : all_sign_vectors(R)) {
            int prod = 1;
            for (int v : s) prod *= v;
            if (K.D() < 0 && prod < 0) continue;
            i128 c = count_box(sys, P, exec, SignedUncappedAccept{oracle, R, s}).value;
            out.by_sign[sign_label(s)] = c;
            rhs += c;
        }
    }
    out.holds = out.total == rhs;
    return out;
}

TupleCount count_norm_tuples(const QuadraticField& K, const std::vector<std::int64_t>& bounds,
                             std::optional<Congruence> congruence, const Exec& exec) {
    auto t0 = Clock::now();
    const int R = int(bounds.size());
    if (R < 1) throw DomainError("need at least one bound");
    i128 points = 1, maxprod = 1;
    for (std::int64_t N : bounds) {
        if (N < 1) throw DomainError("bounds must be >= 1");
        points = checked_mul(points, 2 * N);
        maxprod = checked_mul(maxprod, N);
    }
    if (points > i128(exec.budget)) throw ResourceError("count_norm_tuples: tuple count exceeds the budget");
    std::int64_t step = 1;
    if (congruence) {
        if (congruence->index < 0 || congruence->index >= R) throw DomainError("congruence index out of range");
        step = std::int64_t(checked_pow(congruence->p, unsigned(2 * congruence->alpha)));
    }
    NormOracle oracle(K, NormMode::hasse, maxprod);
    // Chunk by the first coordinate.
    const std::int64_t N0 = bounds[0];
    std::vector<std::int64_t> firsts;
    for (std::int64_t a = -N0; a <= N0; ++a) {
        if (a == 0) continue;
        if (congruence && congruence->index == 0 && a % step != 0) continue;
        firsts.push_back(a);
    }
    std::vector<i128> partial(firsts.size(), 0);
    parallel_chunks(firsts.size(), exec.threads, [&](std::size_t c) {
        NormOracle::Memo memo;
        std::vector<std::int64_t> t(R);
        t[0] = firsts[c];
        i128 count = 0;
        // Odometer over coordinates 1..R-1, skipping zero and congruence failures.
        auto valid = [&](int j, std::int64_t v) {
            return v != 0 && !(congruence && congruence->index == j && v % step != 0);
        };
        std::function<void(int, i128)> rec = [&](int j, i128 prod) {
            if (j == R) {
                if (oracle.contains(prod, memo)) ++count;
                return;
            }
            if (j == R - 1) {
                for (std::int64_t v = -bounds[j]; v <= bounds[j]; ++v)
                    if (valid(j, v) && oracle.contains(prod * v, memo)) ++count;
                return;
            }
            for (std::int64_t v = -bounds[j]; v <= bounds[j]; ++v)
                if (valid(j, v)) rec(j + 1, prod * v);
        };
        rec(1, t[0]);
        partial[c] = count;
    });
    TupleCount out;
    for (i128 v : partial) out.result.value += v;
    out.result.points_scanned = std::uint64_t(points);
    out.result.chunks = firsts.size();
    out.result.layout = "by first coordinate";
    double minlog = 1e300, prodN = 1;
    for (std::int64_t N : bounds) {
        minlog = std::min(minlog, std::log(double(N)));
        prodN *= double(N);
    }
    out.bound_shape = minlog > 0 ? prodN / std::pow(minlog, R / 2.0) : prodN;
    out.ratio = double(out.result.value) / out.bound_shape;
    out.result.elapsed = seconds_since(t0);
    return out;
}

}  // namespace chatelet
