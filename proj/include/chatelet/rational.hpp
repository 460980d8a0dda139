#pragma once

#include <compare>
#include <string>

#include "chatelet/int128.hpp"

namespace chatelet {

// Exact fraction num/den with den > 0 and gcd(num, den) = 1. Overflow throws.
class Rational {
public:
    Rational() = default;
    Rational(i128 n) : num_(n) {}  // NOLINT: implicit from integers is intended
    Rational(i128 n, i128 d);

    i128 num() const { return num_; }
    i128 den() const { return den_; }

    Rational operator-() const { return Rational(checked_sub(0, num_), den_, raw_tag{}); }
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    long double to_long_double() const;
    double to_double() const { return static_cast<double>(to_long_double()); }
    std::string str() const;

    static Rational parse(const std::string& s);

private:
    struct raw_tag {};
    Rational(i128 n, i128 d, raw_tag) : num_(n), den_(d) {}
    i128 num_ = 0;
    i128 den_ = 1;
};

Rational pow(const Rational& base, int e);

}  // namespace chatelet
