#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "chatelet/errors.hpp"

namespace chatelet {

using i128 = __int128;
using u128 = unsigned __int128;

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw ResourceError("128-bit overflow in addition");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw ResourceError("128-bit overflow in subtraction");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("128-bit overflow in multiplication");
    return r;
}

inline i128 checked_pow(i128 base, unsigned e) {
    i128 r = 1;
    while (e--) r = checked_mul(r, base);
    return r;
}

inline i128 abs128(i128 a) { return a < 0 ? checked_sub(0, a) : a; }

inline i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Least non-negative residue.
inline i128 mod128(i128 a, i128 m) {
    i128 r = a % m;
    return r < 0 ? r + m : r;
}

std::string to_string(i128 v);

// Accepts an optional sign followed by decimal digits; throws DomainError otherwise.
i128 parse_i128(std::string_view s);

// Largest r >= 0 with r^k <= n (n >= 0, k >= 1).
std::int64_t integer_root(i128 n, unsigned k);

}  // namespace chatelet
