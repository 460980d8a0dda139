#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chatelet/int128.hpp"
#include "chatelet/rational.hpp"

namespace chatelet {

// Q(sqrt D) for square-free D not in {0, 1}.
class QuadraticField {
public:
    explicit QuadraticField(i128 D);
    i128 D() const { return D_; }
    // Primes dividing 2D, ascending.
    const std::vector<i128>& bad_primes() const { return bad_; }

private:
    i128 D_;
    std::vector<i128> bad_;
};

Rational norm_of(const QuadraticField& K, const Rational& x, const Rational& y);

enum class NormMode { conditions, hasse, hensel };

NormMode parse_norm_mode(const std::string& s);
std::string to_string(NormMode m);

// Whether m = x^2 - D y^2 for rationals x, y. m = 0 is a norm.
bool is_norm(const QuadraticField& K, i128 m, NormMode mode = NormMode::hasse);

// Fast membership for |m| <= limit: a bit table of values having an odd valuation at some
// inert prime, plus the symbols at p | 2D and the sign. Agrees with is_norm(.., hasse).
class NormTable {
public:
    NormTable(const QuadraticField& K, std::uint64_t limit);
    std::uint64_t limit() const { return limit_; }
    bool contains(std::int64_t m) const;  // requires |m| <= limit
    // Inert-prime part only: true iff every inert p has even v_p(m).
    bool inert_even(std::uint64_t a) const { return !((odd_inert_[a >> 6] >> (a & 63)) & 1); }
    static std::uint64_t memory_bytes(std::uint64_t limit);

private:
    i128 D_;
    std::uint64_t limit_;
    std::vector<std::uint64_t> odd_inert_;
    // For each p | 2D: sign table indexed by (v_p parity, unit residue mod p or mod 8).
    struct Local {
        std::int64_t p;
        std::int64_t unit_mod;
        std::vector<std::int8_t> ok;  // index parity * unit_mod + residue
    };
    std::vector<Local> local_;
};

}  // namespace chatelet
