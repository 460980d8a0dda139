#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "systems.hpp"

#include <cmath>
#include <random>

#include "chatelet/forms.hpp"

using namespace chatelet;
using fixtures::binary_quadratic;

TEST_CASE("evaluate examples") {
    FormSystem s = fixtures::sum_of_squares();
    CHECK(evaluate(s, {3, 4}) == std::vector<i128>{25});
    CHECK(evaluate(s, {3, 4}, 7) == std::vector<i128>{4});
    FormSystem s2(1, 2, {{{1, {2, 0}}}, {{1, {0, 2}}}});
    CHECK(evaluate(s2, {2, 5}) == std::vector<i128>{4, 25});
    CHECK_THROWS_AS(evaluate(s, {1, 2, 3}), DomainError);
    FormSystem huge(1, 9, {{{1, {9, 0}}}});
    CHECK_THROWS_AS(evaluate(huge, {i128(1) << 20, 1}), ResourceError);
}

TEST_CASE("homogeneity is exact") {
    FormSystem s(2, 3, {{{3, {3, 0, 0}}, {-5, {1, 1, 1}}, {7, {0, 1, 2}}}, {{1, {0, 0, 3}}, {2, {2, 1, 0}}}});
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(-50, 50);
    for (int it = 0; it < 500; ++it) {
        std::vector<i128> t{d(rng), d(rng), d(rng)};
        i128 lam = d(rng);
        std::vector<i128> lt{lam * t[0], lam * t[1], lam * t[2]};
        auto a = evaluate(s, t), b = evaluate(s, lt);
        for (int i = 0; i < 2; ++i) CHECK(b[i] == lam * lam * lam * a[i]);
    }
}

TEST_CASE("compiled evaluators agree") {
    FormSystem s(2, 3, {{{3, {3, 0, 0}}, {-5, {1, 1, 1}}, {7, {0, 1, 2}}}, {{1, {0, 0, 3}}, {2, {2, 1, 0}}}});
    CompiledSystem cs(s);
    REQUIRE(cs.fits_int64(1000));
    for (std::int64_t a = -6; a <= 6; ++a)
        for (std::int64_t b = -6; b <= 6; ++b)
            for (std::int64_t c = -6; c <= 6; ++c) {
                std::int64_t t[3] = {a * 37, b * 11, c * 5};
                std::int64_t o64[2];
                i128 t128[3] = {t[0], t[1], t[2]}, o128[2];
                cs.eval_int64(t, o64);
                cs.eval_checked(t128, o128);
                CHECK(o64[0] == o128[0]);
                CHECK(o64[1] == o128[1]);
                std::uint64_t q = 1296, tm[3], om[2];
                for (int j = 0; j < 3; ++j) tm[j] = std::uint64_t(mod128(t[j], q));
                cs.eval_mod(tm, q, om);
                CHECK(om[0] == std::uint64_t(mod128(o128[0], q)));
                CHECK(om[1] == std::uint64_t(mod128(o128[1], q)));
            }
}

TEST_CASE("sign_pattern") {
    CHECK(sign_pattern(fixtures::sum_of_squares(), {1, 1}) == SignVector{1});
    FormSystem xy = fixtures::one_form(0, 1, 0);
    CHECK(sign_pattern(xy, {1, -1}) == SignVector{-1});
    FormSystem x2(1, 2, {{{1, {2, 0}}}});
    CHECK_THROWS_AS(sign_pattern(x2, {0, 1}), ZeroValueError);
}

TEST_CASE("rank_defect_count examples") {
    CHECK(rank_defect_count(fixtures::sum_of_squares(), 3) == 1);
    FormSystem lin(1, 1, {{{1, {1, 0}}}});
    CHECK(rank_defect_count(lin, 5) == 0);
    FormSystem s2(1, 2, {{{1, {2, 0}}}, {{1, {0, 2}}}});
    CHECK(rank_defect_count(s2, 3) == 5);
    CHECK_THROWS_AS(rank_defect_count(s2, 9), DomainError);
    Exec tiny{1, 10};
    CHECK_THROWS_AS(rank_defect_count(s2, 5, tiny), ResourceError);
}

TEST_CASE("rank_defect_count brute force cross-check and thread independence") {
    FormSystem s(2, 2, {{{1, {2, 0, 0}}, {1, {0, 2, 0}}, {-3, {0, 0, 2}}}, {{1, {1, 1, 0}}, {2, {0, 0, 2}}}});
    for (std::uint64_t p : {3, 5, 7, 11}) {
        // Rank < 2 of the 2x3 Jacobian iff all 2x2 minors vanish.
        std::uint64_t brute = 0;
        for (std::uint64_t x = 0; x < p; ++x)
            for (std::uint64_t y = 0; y < p; ++y)
                for (std::uint64_t z = 0; z < p; ++z) {
                    std::int64_t r1[3] = {std::int64_t(2 * x), std::int64_t(2 * y), -6 * std::int64_t(z)};
                    std::int64_t r2[3] = {std::int64_t(y), std::int64_t(x), 4 * std::int64_t(z)};
                    bool all_zero = true;
                    for (int i = 0; i < 3; ++i)
                        for (int j = i + 1; j < 3; ++j)
                            if (mod128(r1[i] * r2[j] - r1[j] * r2[i], p) != 0) all_zero = false;
                    brute += all_zero;
                }
        CHECK(rank_defect_count(s, p, Exec{1}) == brute);
        CHECK(rank_defect_count(s, p, Exec{4}) == brute);
    }
}

TEST_CASE("birch_c_prime follows the formula") {
    FormSystem r1 = fixtures::sum_of_squares();
    auto a = birch_c_prime(r1, 20);
    CHECK(a.c_prime == Rational(4));
    CHECK(a.condition_holds);
    auto b = birch_c_prime(r1, 5);
    CHECK(b.c_prime == Rational(1, 4));
    CHECK(b.condition_holds);
    FormSystem r2(1, 2, {{{1, {2, 0}}}, {{1, {0, 2}}}});
    auto c = birch_c_prime(r2, 4);
    CHECK(c.c_prime == Rational(-1));
    CHECK_FALSE(c.condition_holds);
    FormSystem lin(1, 1, {{{1, {1, 0}}}});
    CHECK_THROWS_AS(birch_c_prime(lin, 3), DomainError);
}

TEST_CASE("box_bound") {
    CHECK(box_bound(fixtures::sum_of_squares(), Box::unit(2)).b == 4);
    CHECK(box_bound(fixtures::one_form(3, -5, 0), Box{{{0, 0.5}, {-0.25, 0.75}}}).b == 16);
    FormSystem s2(1, 2, {{{1, {2, 0}}}, {{2, {0, 2}}}});
    auto bb = box_bound(s2, Box::unit(2));
    CHECK(bb.b == 4);
    CHECK(bb.b_i == std::vector<i128>{2, 4});
    CHECK_THROWS_AS(box_bound(s2, Box{{{-2, 0}, {0, 1}}}), DomainError);
}

TEST_CASE("box_bound dominates sampled values") {
    FormSystem s(2, 3, {{{3, {3, 0, 0}}, {-5, {1, 1, 1}}, {7, {0, 1, 2}}}, {{1, {0, 0, 3}}, {2, {2, 1, 0}}}});
    auto bb = box_bound(s, Box::unit(3));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int it = 0; it < 10000; ++it) {
        double t[3] = {u(rng), u(rng), u(rng)};
        double f1 = 3 * t[0] * t[0] * t[0] - 5 * t[0] * t[1] * t[2] + 7 * t[1] * t[2] * t[2];
        double f2 = t[2] * t[2] * t[2] + 2 * t[0] * t[0] * t[1];
        CHECK(2 * std::abs(f1) <= double(bb.b_i[0]));
        CHECK(2 * std::abs(f2) <= double(bb.b_i[1]));
    }
}

TEST_CASE("system JSON round trip and validation") {
    std::string text = R"({"n":1,"d":2,"R":2,"D":-1,"forms":[[[1,[2,0]],[1,[0,2]]],[[1,[2,0]],[2,[0,2]]]],"frakB":2})";
    FormSystem s = FormSystem::from_json_text(text);
    CHECK(s.R() == 2);
    CHECK(s.D() == std::optional<i128>(-1));
    CHECK(s.declared_frakB() == std::optional<i128>(2));
    FormSystem t = FormSystem::from_json_text(s.to_json_text());
    CHECK(t.to_json_text() == s.to_json_text());
    CHECK_THROWS_AS(FormSystem::from_json_text(R"({"n":1,"d":2,"forms":[[[1,[2,1]]]]})"), DomainError);
    CHECK_THROWS_AS(FormSystem::from_json_text(R"({"n":1,"d":2,"forms":[[[1,[2]]]]})"), DomainError);
    CHECK_THROWS_AS(FormSystem::from_json_text(R"({"n":1,"d":2,"R":3,"forms":[[[1,[2,0]]]]})"), DomainError);
    CHECK_THROWS_AS(FormSystem::from_json_text(R"({"n":1,"d":2,"forms":[[[0,[2,0]]]]})"), DomainError);
    CHECK_THROWS_AS(FormSystem::from_json_text("not json"), DomainError);
}

TEST_CASE("sign vectors") {
    auto all = all_sign_vectors(2);
    REQUIRE(all.size() == 4);
    CHECK(sign_label(all[0]) == "--");
    CHECK(sign_label(all[3]) == "++");
    CHECK(parse_sign_vector("+-", 2) == SignVector{1, -1});
    CHECK(parse_sign_vector("1,-1", 2) == SignVector{1, -1});
    CHECK(parse_sign_vector("-1", 1) == SignVector{-1});
    CHECK_THROWS_AS(parse_sign_vector("+", 2), DomainError);
}
