#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "two_adic_table.hpp"

#include <random>

#include "chatelet/quad_norms.hpp"

using namespace chatelet;

static const i128 kFields[] = {-1, 2, -2, 3, -3, 5, -5, 13};

TEST_CASE("field validation") {
    CHECK_THROWS_AS(QuadraticField(0), DomainError);
    CHECK_THROWS_AS(QuadraticField(1), DomainError);
    CHECK_THROWS_AS(QuadraticField(12), DomainError);
    CHECK(QuadraticField(-15).bad_primes() == std::vector<i128>{2, 3, 5});
}

TEST_CASE("norm_of examples") {
    CHECK(norm_of(QuadraticField(-1), 2, 1) == Rational(5));
    CHECK(norm_of(QuadraticField(2), 1, 2) == Rational(-7));
    CHECK(norm_of(QuadraticField(5), 0, 0) == Rational(0));
    CHECK(norm_of(QuadraticField(3), Rational(1, 2), Rational(1, 3)) == Rational(1, 4) - Rational(1, 3));
}

TEST_CASE("is_norm examples in every mode") {
    for (NormMode m : {NormMode::conditions, NormMode::hasse, NormMode::hensel}) {
        CHECK(is_norm(QuadraticField(-1), 5, m));
        CHECK_FALSE(is_norm(QuadraticField(-1), 3, m));
        CHECK(is_norm(QuadraticField(2), -7, m));
        CHECK(is_norm(QuadraticField(-1), 0, m));
        CHECK_FALSE(is_norm(QuadraticField(-5), -1, m));
    }
    CHECK_FALSE(conic_has_primitive_solution_mod(-1, 3, 3, 3));
}

TEST_CASE("three modes agree on a window") {
    for (i128 D : kFields) {
        QuadraticField K(D);
        for (i128 m = -600; m <= 600; ++m) {
            if (m == 0) continue;
            bool h = is_norm(K, m, NormMode::hasse);
            CHECK(h == is_norm(K, m, NormMode::conditions));
            CHECK(h == is_norm(K, m, NormMode::hensel));
        }
    }
}

TEST_CASE("D = -1 norms are sums of two squares") {
    QuadraticField K(-1);
    for (std::int64_t m = -200; m <= 2000; ++m)
        CHECK(is_norm(K, m) == (m == 0 || oracle::is_sum_of_two_squares(m)));
}

TEST_CASE("closure, square scaling, sign condition") {
    for (i128 D : kFields) {
        QuadraticField K(D);
        std::vector<i128> norms;
        for (i128 m = -80; m <= 80; ++m)
            if (m != 0 && is_norm(K, m)) norms.push_back(m);
        for (i128 a : norms)
            for (i128 b : norms) CHECK(is_norm(K, a * b));
        for (i128 m = -80; m <= 80; ++m) {
            if (m == 0) continue;
            for (i128 k : {2, 3, 5, 7}) CHECK(is_norm(K, m) == is_norm(K, m * k * k));
            if (D < 0 && m < 0) CHECK_FALSE(is_norm(K, m));
        }
    }
}

TEST_CASE("witness soundness on random pairs") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dist(-3000, 3000);
    for (i128 D : kFields) {
        QuadraticField K(D);
        for (int i = 0; i < 1250; ++i) {
            i128 x = dist(rng), y = dist(rng);
            i128 m = x * x - D * y * y;
            if (m != 0) CHECK(is_norm(K, m));
        }
    }
}

TEST_CASE("norm table agrees with the hasse backend") {
    for (i128 D : {-1, 2, -2, 3, -3, 5, -5, 13, -6, 10, -15}) {
        QuadraticField K(D);
        NormTable T(K, 30000);
        for (std::int64_t m = -30000; m <= 30000; m += (m % 7 == 0 ? 1 : 3)) CHECK(T.contains(m) == is_norm(K, m));
    }
}

TEST_CASE("2-adic table: only the D = 7 mod 8, a = 6 mod 8 class disagrees with the symbol") {
    auto table = load_two_adic_table(std::string(CHATELET_FIXTURES) + "/two_adic_table.json");
    auto [checked, bad] = compare_two_adic_table(table);
    CHECK(checked > 10000);
    REQUIRE_FALSE(bad.empty());
    for (const auto& m : bad) {
        CHECK(m.D_mod == 8);
        CHECK(m.D_res == 7);
        CHECK(m.a_res_mod8 == 6);
        CHECK(m.table);
        CHECK_FALSE(m.symbol);
        // The symbol side is confirmed by the exhaustive oracle.
        CHECK_FALSE(hensel_conic_soluble(m.D, m.a, 2));
    }
}
