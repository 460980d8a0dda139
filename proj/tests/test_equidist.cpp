#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

#include "chatelet/equidist.hpp"
#include "chatelet/local_arith.hpp"

using namespace chatelet;

namespace {

// Direct restatement of the F count: trial-divide every candidate.
i128 f_count_brute(i128 D, int z, i128 Wp, i128 ap, i128 T) {
    i128 c = 0;
    for (i128 n = 1; n <= T; ++n) {
        if (mod128(n - ap, Wp) != 0) continue;
        i128 m = n;
        bool ok = true;
        for (i128 p = 2; p * p <= m; ++p) {
            int e = 0;
            while (m % p == 0) m /= p, ++e;
            if (p > z && (e & 1) && kronecker(D, p) == -1) ok = false;
        }
        if (m > 1 && m > z && kronecker(D, m) == -1) ok = false;
        c += ok;
    }
    return c;
}

}  // namespace

TEST_CASE("build_wz examples") {
    auto w = build_wz(3, 3);
    CHECK(w.W == 216);
    CHECK(w.eps_tilde == Rational(1, 16) + Rational(1, 81));
    CHECK(*w.eps_bound_holds);
    auto w2 = build_wz(2, 2);
    CHECK(w2.W == 4);
    CHECK(w2.eps_tilde == Rational(1, 8));
    CHECK(build_wz(5, 5).W == 24'300'000);
    CHECK(!build_wz(5, 1).eps_bound_holds.has_value());
    CHECK(build_wz(5, {{2, 7}, {3, 7}, {5, 7}}).W == i128(21'870'000'000));
    CHECK_THROWS_AS(build_wz(1, 2), DomainError);
    CHECK_THROWS_AS(build_wz(5, {{2, 3}, {3, 3}}), DomainError);
    CHECK_THROWS_AS(build_wz(200, 40), ResourceError);
}

TEST_CASE("eps_tilde bound holds for levels >= 2") {
    for (int z : {2, 3, 5, 7, 11, 13})
        for (int m = 2; m <= 4; ++m) {
            auto w = build_wz(z, m);
            REQUIRE(w.eps_bound_holds.has_value());
            CHECK(*w.eps_bound_holds);
        }
}

TEST_CASE("f_count examples") {
    CHECK(f_count(-1, 2, 4, 1, 30) == 7);
    CHECK(f_count(-1, 2, 4, 3, 2) == 0);
    CHECK(f_count(5, 3, 7, 2, 1) == 0);
    for (i128 D : {-1, 2, -3, 5})
        for (i128 a : {1, 3, 5, 7})
            CHECK(f_count(D, 3, 8, a, 2000) == f_count_brute(D, 3, 8, a, 2000));
}

TEST_CASE("f_count: sieve and per-candidate paths agree") {
    SpfSieve sieve(300'000);
    for (i128 a : {1, 5, 9})
        CHECK(f_count(-1, 2, 12, a, 300'000, sieve) == f_count(-1, 2, 12, a, 300'000));
    CHECK(f_count(-1, 2, 4, 1, 2'000'000) == f_count(-1, 2, 4, 1, 2'000'000, SpfSieve(2'000'000)));
}

TEST_CASE("f_count is additive over residue classes") {
    // Classes mod 12 refining 1 mod 4.
    i128 total = f_count(-1, 2, 4, 1, 100'000);
    i128 split = f_count(-1, 2, 12, 1, 100'000) + f_count(-1, 2, 12, 5, 100'000) + f_count(-1, 2, 12, 9, 100'000);
    CHECK(total == split);
}

TEST_CASE("gamma0_partial") {
    CHECK(gamma0_partial(-1, 5, 5) == 1);
    long double g = gamma0_partial(-1, 5, 1'000'000);
    CHECK(std::fabs(double(g) - 1) < 0.1);
    long double a = std::fabs(gamma0_partial(-1, 1000, 10'000'000) - 1);
    long double b = std::fabs(gamma0_partial(-1, 100'000, 10'000'000) - 1);
    CHECK(a > b);
    // Cauchy in P_max.
    long double g3 = gamma0_partial(-2, 7, 1000), g4 = gamma0_partial(-2, 7, 10'000), g5 = gamma0_partial(-2, 7, 100'000);
    CHECK(std::fabs(g5 - g4) < std::fabs(g4 - g3));
    CHECK_THROWS_AS(gamma0_partial(-1, 10, 5), DomainError);
}

TEST_CASE("equidist_main_term") {
    WzSpec wz = build_wz(5, 3);
    // 3 is not a norm from Q(i) locally at 3.
    CHECK(equidist_main_term(-1, 1, {3}, wz, {1e6L}, 1) == 0);
    CHECK(equidist_main_term(-1, -1, {1}, wz, {1e6L}, 1) == 0);
    long double g0 = 0.97L;
    long double v = equidist_main_term(-1, 1, {1}, wz, {1e6L}, g0);
    long double M = 2 * g0 / std::sqrt(std::acos(-1.0L));
    for (int p : {2, 3, 5}) M /= std::sqrt(1 - 1.0L / p);
    CHECK(std::fabs(double(v / (M * 1e6L / std::sqrt(std::log(1e6L)) / 27'000) - 1)) < 1e-15);
    CHECK_THROWS_AS(equidist_main_term(-1, 1, {1}, wz, {2}, g0), DomainError);
}

TEST_CASE("splitting identity, R = 1") {
    WzSpec wz = build_wz(5, 5);
    int tested = 0;
    for (i128 D : {-1, 2, -2, 5}) {
        for (i128 a : {1, 7, 13, 2 * 17, 3 * 101, 5 * 89, 41, 30 * 7 + 1}) {
            if (!splitting_precondition({a}, wz)) continue;
            for (int s : {1, -1}) {
                auto r = splitting_check(D, s, {a}, wz, {20 * wz.W});
                CHECK_MESSAGE(r.holds, "D=" << int(D) << " a=" << int(a));
                ++tested;
            }
        }
    }
    CHECK(tested >= 20);
    CHECK_THROWS_AS(splitting_check(-1, 1, {4}, wz, {20 * wz.W}), PreconditionError);
}

TEST_CASE("splitting identity, R = 2") {
    WzSpec wz = build_wz(5, 7);
    for (auto a : std::vector<std::vector<i128>>{{1, 1}, {1, 13}, {2 * 17, 41}, {3, 5 * 7}}) {
        REQUIRE(splitting_precondition(a, wz));
        auto r = splitting_check(-1, 1, a, wz, {20 * wz.W, 20 * wz.W});
        CHECK(r.holds);
    }
}

TEST_CASE("splitting identity on small moduli matches brute force") {
    // Small W keeps the left side enumerable against an independent count.
    WzSpec wz = build_wz(3, {{2, 7}, {3, 5}});
    for (i128 D : {-1, 3})
        for (i128 a : {1, 5, 7, 11, 2 * 5, 3 * 7}) {
            if (!splitting_precondition({a}, wz)) continue;
            i128 x = 30 * wz.W;
            auto r = splitting_check(D, 1, {a}, wz, {x});
            i128 brute = 0;
            for (i128 m = a; m <= x; m += wz.W) {
                if (hilbert(D, m, Place::prime(2)) != 1 || hilbert(D, m, Place::prime(3)) != 1) continue;
                bool ok = true;
                for (auto [p, e] : factor(m))
                    if (p > 3 && (e & 1) && kronecker(D, p) == -1) ok = false;
                brute += ok;
            }
            CHECK(r.lhs == brute);
            CHECK(r.holds);
        }
}
