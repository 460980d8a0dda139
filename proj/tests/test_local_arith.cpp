#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "chatelet/local_arith.hpp"
#include "chatelet/primes.hpp"

using namespace chatelet;

TEST_CASE("vp splits off the prime power") {
    auto s = vp(12, 2);
    CHECK(s.exponent == 2);
    CHECK(s.unit == 3);
    s = vp(5, 3);
    CHECK(s.exponent == 0);
    CHECK(s.unit == 5);
    s = vp(-250, 5);
    CHECK(s.exponent == 3);
    CHECK(s.unit == -2);
    CHECK_THROWS_AS(vp(0, 7), DomainError);
}

TEST_CASE("kronecker examples and conventions") {
    CHECK(kronecker(5, 1) == 1);
    CHECK(kronecker(-1, 3) == -1);
    CHECK(kronecker(2, 7) == 1);
    CHECK(kronecker(5, 2) == -1);
    CHECK(kronecker(1, 2) == 1);
    CHECK(kronecker(6, 4) == 0);
    CHECK(kronecker(3, -1) == 1);
    CHECK(kronecker(-3, -1) == -1);
    CHECK(kronecker(7, 0) == 0);
    CHECK(kronecker(-1, 0) == 1);
    CHECK_THROWS_AS(kronecker(0, 0), DomainError);
}

TEST_CASE("kronecker matches Euler's criterion and is multiplicative") {
    for (i128 p : {3, 5, 7, 11, 13, 101, 1009})
        for (i128 a = -60; a <= 60; ++a) CHECK(kronecker(a, p) == oracle::legendre_euler(a, p));
    for (i128 D : {-15, -7, -5, -3, -2, -1, 2, 3, 5, 6, 13})
        for (i128 m = -40; m <= 40; ++m)
            for (i128 n = -40; n <= 40; ++n) {
                if (m == 0 || n == 0) continue;
                CHECK(kronecker(D, m * n) == kronecker(D, m) * kronecker(D, n));
            }
}

TEST_CASE("kronecker zero exactly on common factors") {
    for (i128 D = -30; D <= 30; ++D)
        for (i128 n = -30; n <= 30; ++n) {
            if (D == 0 && n == 0) continue;
            bool common = gcd128(D, n) > 1 || (n == 0 && abs128(D) != 1);
            CHECK((kronecker(D, n) == 0) == common);
        }
}

TEST_CASE("(D / .) is periodic mod 4|D| on integers coprime to 2D, including negatives") {
    for (i128 D : {-13, -7, -6, -5, -3, -2, -1, 2, 3, 5, 6, 7, 10, 13, 14}) {
        i128 M = 4 * abs128(D);
        for (i128 c = -300; c <= 300; ++c) {
            if (gcd128(c, 2 * D) != 1) continue;
            CHECK(kronecker(D, c) == kronecker(D, mod128(c, M)));
        }
    }
}

TEST_CASE("hilbert examples") {
    CHECK(hilbert(2, 3, Place::prime(5)) == 1);
    CHECK(hilbert(5, 2, Place::prime(2)) == -1);
    CHECK(hilbert(-1, -1, Place::real()) == -1);
    CHECK(hilbert(-1, -1, Place::prime(2)) == -1);
    CHECK(hilbert(-1, 3, Place::prime(3)) == -1);
    CHECK_THROWS_AS(hilbert(0, 3, Place::prime(3)), DomainError);
    CHECK_THROWS_AS(Place::prime(9), DomainError);
}

TEST_CASE("hilbert_product examples") {
    CHECK(hilbert_product(3, 10) == 1);
    CHECK(hilbert_product(-1, -1) == 1);
    for (i128 a = -25; a <= 25; ++a)
        if (a != 0) CHECK(hilbert_product(a, a * a) == 1);
}

TEST_CASE("hilbert symbol algebraic properties") {
    std::vector<Place> places{Place::real()};
    for (i128 p : {2, 3, 5, 7, 11, 13}) places.push_back(Place::prime(p));
    for (const Place& v : places)
        for (i128 a = -18; a <= 18; ++a)
            for (i128 b = -18; b <= 18; ++b) {
                if (a == 0 || b == 0) continue;
                CHECK(hilbert(a, b, v) == hilbert(b, a, v));
                CHECK(hilbert(a, -a, v) == 1);
                for (i128 k : {2, 3, 6})
                    CHECK(hilbert(a, b * k * k, v) == hilbert(a, b, v));
                for (i128 c : {-7, -2, 3, 10, 12})
                    CHECK(hilbert(a, b * c, v) == hilbert(a, b, v) * hilbert(a, c, v));
            }
}

TEST_CASE("product formula on a window") {
    for (i128 a = -60; a <= 60; ++a)
        for (i128 b = -60; b <= 60; ++b)
            if (a != 0 && b != 0) CHECK(hilbert_product(a, b) == 1);
}

TEST_CASE("lifting-tree oracle agrees with plain triple search") {
    for (i128 p : {2, 3, 5})
        for (i128 a = -6; a <= 6; ++a)
            for (i128 b = -6; b <= 6; ++b) {
                if (a == 0 || b == 0) continue;
                int k = vp(4 * a * b, p).exponent + 3;
                if (oracle::powi(p, k) > 130) continue;
                CHECK(conic_has_primitive_solution_mod(a, b, p, k) == oracle::conic_triple_search(a, b, p, k));
            }
}

TEST_CASE("closed form matches the Hensel oracle") {
    for (i128 p : {2, 3, 5, 7})
        for (i128 a = -12; a <= 12; ++a)
            for (i128 b = -12; b <= 12; ++b) {
                if (a == 0 || b == 0) continue;
                CHECK((hilbert(a, b, Place::prime(p)) == 1) == hensel_conic_soluble(a, b, p));
            }
    CHECK_FALSE(hensel_conic_soluble(5, 2, 2));
}

TEST_CASE("factor and primality") {
    CHECK(is_prime(std::uint64_t(2)));
    CHECK_FALSE(is_prime(std::uint64_t(1)));
    CHECK(is_prime(std::uint64_t(1'000'000'007)));
    CHECK_FALSE(is_prime(std::uint64_t(3215031751ull)));  // strong pseudoprime to bases 2, 3, 5, 7
    CHECK(is_prime(std::uint64_t(18446744073709551557ull)));
    auto f = factor(i128(-360));
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::pair<i128, int>(2, 3));
    CHECK(f[1] == std::pair<i128, int>(3, 2));
    CHECK(f[2] == std::pair<i128, int>(5, 1));
    i128 big = i128(1'000'000'007) * 998'244'353;
    auto g = factor(big);
    REQUIRE(g.size() == 2);
    CHECK(g[0].first == 998'244'353);
    CHECK(g[1].first == 1'000'000'007);
    SpfSieve s(1000);
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        i128 prod = 1;
        for (auto [p, e] : s.factor(n)) prod *= oracle::powi(p, e);
        CHECK(prod == i128(n));
    }
}
