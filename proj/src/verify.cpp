#include "chatelet/verify.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "chatelet/densities.hpp"
#include "chatelet/equidist.hpp"
#include "chatelet/forms.hpp"
#include "chatelet/lattice_count.hpp"
#include "chatelet/leading_constant.hpp"
#include "chatelet/local_arith.hpp"
#include "chatelet/primes.hpp"
#include "chatelet/quad_norms.hpp"

namespace chatelet {

namespace {

struct Recorder {
    std::string suite;
    std::vector<CheckResult>& out;

    void check(const std::string& name, bool pass, const std::string& detail = {}) {
        out.push_back({suite, name, pass, detail});
    }
    // Runs body; exceptions count as failures.
    void guarded(const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool pass = false;
        try {
            pass = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        check(name, pass, detail);
    }
};

Form quad(i128 a, i128 b, i128 c) {
    Form f;
    if (a) f.push_back({a, {2, 0}});
    if (b) f.push_back({b, {1, 1}});
    if (c) f.push_back({c, {0, 2}});
    return f;
}

void suite_local_arith(Recorder& r, const Exec&) {
    r.guarded("hilbert symmetric and bimultiplicative", [](std::string& d) {
        for (i128 p : {2, 3, 5, 7})
            for (i128 a = -12; a <= 12; ++a)
                for (i128 b = -12; b <= 12; ++b) {
                    if (!a || !b) continue;
                    if (hilbert(a, b, p) != hilbert(b, a, p)) {
                        d = "asymmetric at a=" + to_string(a) + " b=" + to_string(b);
                        return false;
                    }
                    for (i128 c : {-3, 2, 5})
                        if (hilbert(a * c, b, p) != hilbert(a, b, p) * hilbert(c, b, p)) {
                            d = "not multiplicative at p=" + to_string(p);
                            return false;
                        }
                }
        return true;
    });
    r.guarded("product formula", [](std::string& d) {
        for (i128 a = -40; a <= 40; ++a)
            for (i128 b = -40; b <= 40; ++b)
                if (a && b && hilbert_product(a, b) != 1) {
                    d = to_string(a) + "," + to_string(b);
                    return false;
                }
        return true;
    });
    r.guarded("closed form matches Hensel search", [](std::string& d) {
        for (i128 p : {2, 3, 5})
            for (i128 a = -10; a <= 10; ++a)
                for (i128 b = -10; b <= 10; ++b) {
                    if (!a || !b) continue;
                    if ((hilbert(a, b, p) == 1) != hensel_conic_soluble(a, b, p)) {
                        d = "p=" + to_string(p) + " a=" + to_string(a) + " b=" + to_string(b);
                        return false;
                    }
                }
        return true;
    });
    r.guarded("kronecker multiplicative in the lower argument", [](std::string&) {
        for (i128 D : {-7, -4, -3, 5, 8, 12})
            for (i128 m = 1; m < 60; ++m)
                for (i128 n = 1; n < 60; ++n)
                    if (kronecker(D, m * n) != kronecker(D, m) * kronecker(D, n)) return false;
        return true;
    });
}

void suite_quad_norms(Recorder& r, const Exec&) {
    r.guarded("norm modes agree", [](std::string& d) {
        for (i128 D : {-1, 2, -3, 5, -5, 13}) {
            QuadraticField K(D);
            for (i128 m = -300; m <= 300; ++m) {
                if (!m) continue;
                const bool h = is_norm(K, m, NormMode::hasse);
                if (h != is_norm(K, m, NormMode::conditions) || h != is_norm(K, m, NormMode::hensel)) {
                    d = "D=" + to_string(D) + " m=" + to_string(m);
                    return false;
                }
            }
        }
        return true;
    });
    r.guarded("norm table matches is_norm", [](std::string&) {
        for (i128 D : {-1, 3, -7}) {
            QuadraticField K(D);
            NormTable tab(K, 5000);
            for (std::int64_t m = -5000; m <= 5000; ++m)
                if (m && tab.contains(m) != is_norm(K, m)) return false;
        }
        return true;
    });
    r.guarded("norms are closed under products", [](std::string&) {
        QuadraticField K(-5);
        for (i128 x = -6; x <= 6; ++x)
            for (i128 y = -6; y <= 6; ++y) {
                Rational n = norm_of(K, x, y);
                if (n == Rational(0)) continue;
                if (!is_norm(K, n.num() * 7 * 7)) return false;
                if (!is_norm(K, n.num() * 6)) return false;  // 6 = N(1 + sqrt(-5))
            }
        return true;
    });
}

void suite_forms(Recorder& r, const Exec& exec) {
    const FormSystem s(2, 3, {{{3, {3, 0, 0}}, {-5, {1, 1, 1}}, {7, {0, 1, 2}}}, {{1, {0, 0, 3}}, {2, {2, 1, 0}}}});
    r.guarded("homogeneity", [&](std::string&) {
        for (i128 x = -4; x <= 4; ++x)
            for (i128 lam : {-3, 2, 5}) {
                std::vector<i128> t{x, x + 2, 1 - x}, lt{lam * x, lam * (x + 2), lam * (1 - x)};
                auto a = evaluate(s, t), b = evaluate(s, lt);
                for (int i = 0; i < 2; ++i)
                    if (b[i] != lam * lam * lam * a[i]) return false;
            }
        return true;
    });
    r.guarded("modular evaluation agrees with exact", [&](std::string&) {
        CompiledSystem cs(s);
        for (std::uint64_t q : {7ull, 64ull, 1000003ull})
            for (std::uint64_t x = 0; x < 20; ++x) {
                std::vector<std::uint64_t> t{x % q, (3 * x + 1) % q, (x * x) % q};
                std::vector<std::uint64_t> m(2), w(2);
                cs.eval_mod(t.data(), q, m.data());
                cs.eval_mod_wide(t.data(), q, w.data());
                auto e = evaluate(s, {i128(t[0]), i128(t[1]), i128(t[2])}, i128(q));
                for (int i = 0; i < 2; ++i)
                    if (m[i] != w[i] || i128(m[i]) != e[i]) return false;
            }
        return true;
    });
    r.guarded("sign vectors enumerate {-1,+1}^R", [](std::string&) {
        for (int R = 1; R <= 4; ++R) {
            auto v = all_sign_vectors(R);
            if (int(v.size()) != (1 << R)) return false;
            for (auto& sv : v)
                if (parse_sign_vector(sign_label(sv), R) != sv) return false;
        }
        return true;
    });
    r.guarded("rank defect count is thread independent", [&](std::string&) {
        FormSystem t(1, 2, {quad(1, 0, 1), quad(1, 1, 3)});
        return rank_defect_count(t, 7, Exec{1, exec.budget}) == rank_defect_count(t, 7, Exec{4, exec.budget});
    });
}

void suite_lattice_count(Recorder& r, const Exec& exec) {
    const FormSystem sq(1, 2, {quad(1, 0, 1)});
    r.guarded("x^2 + y^2 at B = 1 gives 4", [&](std::string& d) {
        auto res = count_N(CountQuery{sq, QuadraticField(-1), 1, std::nullopt}, exec);
        d = to_string(res.value);
        return res.value == 4;
    });
    r.guarded("Mobius identity", [&](std::string& d) {
        for (auto [f, D] : std::vector<std::pair<Form, i128>>{{quad(1, 0, 1), -1}, {quad(1, 0, -2), 2}, {quad(1, 1, -1), 5}}) {
            auto m = mobius_identity_check(FormSystem(1, 2, {f}), QuadraticField(D), 900, exec);
            if (!m.holds) {
                d = "D=" + to_string(D);
                return false;
            }
        }
        return true;
    });
    r.guarded("sign partition", [&](std::string&) {
        FormSystem p(1, 2, {quad(1, 0, -2), quad(1, 1, -1)});
        return sign_partition_check(p, QuadraticField(2), 25, Caps{3, 1}, exec).holds &&
               sign_partition_check(p, QuadraticField(2), 25, std::nullopt, exec).holds;
    });
    r.guarded("thread count does not change counts", [&](std::string&) {
        CountQuery q{sq, QuadraticField(-1), 20000, std::nullopt};
        return count_N(q, Exec{1, exec.budget}).value == count_N(q, Exec{3, exec.budget}).value;
    });
}

void suite_densities(Recorder& r, const Exec& exec) {
    const FormSystem sq(1, 2, {quad(1, 0, 1)});
    r.guarded("fibers partition the residues", [&](std::string&) {
        CompiledSystem cs(sq);
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            const int m = 2;
            const std::uint64_t q = p * p;
            i128 total = 0;
            for (std::uint64_t nu = 0; nu < q; ++nu) total += fiber_count(cs, {0}, {i128(nu)}, p, m, exec);
            if (total != i128(q * q)) return false;
        }
        return true;
    });
    r.guarded("local density at a unit stabilises", [&](std::string& d) {
        auto s = sigma_p(sq, {1}, 5, 2, exec);
        d = s.value.str();
        return s.value == Rational(4, 5);
    });
    r.guarded("Bateman-Horn factor at a split prime", [&](std::string& d) {
        auto bh = bateman_horn_partial(sq, 5, exec);
        for (auto& [p, f] : bh.factors)
            if (p == 5) {
                d = f.str();
                return f == Rational(4, 5);
            }
        return false;
    });
}

void suite_equidist(Recorder& r, const Exec& exec) {
    r.guarded("W_z construction", [](std::string&) {
        auto w = build_wz(3, 3);
        return w.W == 216 && w.eps_tilde == Rational(1, 16) + Rational(1, 81);
    });
    r.guarded("F counts add up over residues", [&](std::string&) {
        const i128 T = 5000;
        i128 whole = f_count(-1, 3, 1, 0, T, exec), parts = 0;
        for (i128 a = 0; a < 12; ++a) parts += f_count(-1, 3, 12, a, T, exec);
        return whole == parts;
    });
    r.guarded("splitting identity", [&](std::string& d) {
        auto wz = build_wz(5, 5);
        int seen = 0;
        for (i128 a = 1; a < 60 && seen < 4; a += 4) {
            if (!splitting_precondition({a}, wz)) continue;
            auto c = splitting_check(-1, 1, {a}, wz, {20 * wz.W}, exec);
            if (!c.holds) {
                d = "a=" + to_string(a);
                return false;
            }
            ++seen;
        }
        return seen > 0;
    });
}

void suite_leading_constant(Recorder& r, const Exec& exec) {
    const FormSystem sq(1, 2, {quad(1, 0, 1)});
    const FormSystem pair(1, 2, {quad(1, 0, 1), quad(1, 0, 2)});
    r.guarded("direct and CRT truncations agree", [&](std::string& d) {
        const Rational a = gamma_T_direct(sq, -1, {1}, TruncationSpec{4}, exec);
        const Rational b = gamma_T_crt(sq, -1, {1}, TruncationSpec{4}, exec);
        d = a.str() + " vs " + b.str();
        if (a != b || a != Rational(40, 81)) return false;
        TruncationSpec t{4, {{3, 1}, {5, 1}}};
        GammaTCrt crt(pair, 5, t, exec);
        for (const auto& s : all_sign_vectors(2))
            if (crt.gamma_T(s) != gamma_T_direct(pair, 5, s, t, exec)) return false;
        return true;
    });
    r.guarded("T = 2 truncation is empty", [&](std::string&) {
        return gamma_T_crt(pair, -1, {1, 1}, TruncationSpec{2}, exec) == Rational(0);
    });
    r.guarded("Brauer order and invariants", [](std::string&) {
        auto inv = lrs_invariants(5, 2, 2);
        return brsub_order(2, 3) == 8 && brsub_order(3, 3) == 4 && brsub_order(3, 1) == 1 &&
               inv.alpha_star == Rational(1, 6) && inv.eta == Rational(3) && inv.br_order == 4;
    });
    r.guarded("theorem and LRS constants agree", [&](std::string& d) {
        GammaInfSpec quad_spec;
        quad_spec.per_axis = 256;
        quad_spec.mc_samples = 20000;
        auto c = constants_compare(pair, -1, quad_spec, TruncationSpec{4}, exec);
        std::ostringstream os;
        os << "rel " << double(c.rel_diff);
        d = os.str();
        return c.rel_diff <= 1e-9;
    });
}

const std::map<std::string, std::function<void(Recorder&, const Exec&)>>& registry() {
    static const std::map<std::string, std::function<void(Recorder&, const Exec&)>> r{
        {"local_arith", suite_local_arith},       {"quad_norms", suite_quad_norms},
        {"forms", suite_forms},                   {"lattice_count", suite_lattice_count},
        {"densities", suite_densities},           {"equidist", suite_equidist},
        {"leading_constant", suite_leading_constant},
    };
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (auto& [k, v] : registry()) out.push_back(k);
    return out;
}

std::vector<CheckResult> run_suite(const std::string& name, const Exec& exec) {
    std::vector<CheckResult> out;
    if (name == "all") {
        for (auto& [k, fn] : registry()) {
            Recorder rec{k, out};
            fn(rec, exec);
        }
        return out;
    }
    auto it = registry().find(name);
    if (it == registry().end()) throw DomainError("unknown suite " + name);
    Recorder rec{name, out};
    it->second(rec, exec);
    return out;
}

}  // namespace chatelet
