#include "chatelet/int128.hpp"

#include <algorithm>

namespace chatelet {

std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    u128 u = neg ? u128(0) - u128(v) : u128(v);
    std::string s;
    while (u != 0) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

i128 parse_i128(std::string_view s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    if (i == s.size()) throw DomainError("not an integer: '" + std::string(s) + "'");
    i128 r = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw DomainError("not an integer: '" + std::string(s) + "'");
        r = checked_add(checked_mul(r, 10), s[i] - '0');
    }
    return neg ? -r : r;
}

std::int64_t integer_root(i128 n, unsigned k) {
    if (n < 0 || k == 0) throw DomainError("integer_root needs n >= 0 and k >= 1");
    if (k == 1) {
        if (n > INT64_MAX) throw ResourceError("integer_root: result exceeds 64 bits");
        return std::int64_t(n);
    }
    auto fits = [&](std::int64_t r) {
        i128 p = 1;
        for (unsigned i = 0; i < k; ++i) {
            if (__builtin_mul_overflow(p, i128(r), &p) || p > n) return false;
        }
        return true;
    };
    std::int64_t lo = 0, hi = 1;
    while (fits(hi)) {
        lo = hi;
        if (hi > INT64_MAX / 2) break;
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (fits(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace chatelet
