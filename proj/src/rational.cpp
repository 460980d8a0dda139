#include "chatelet/rational.hpp"

namespace chatelet {

Rational::Rational(i128 n, i128 d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
        n = checked_sub(0, n);
        d = checked_sub(0, d);
    }
    i128 g = gcd128(n, d);
    num_ = n / g;
    den_ = d / g;
}

Rational& Rational::operator+=(const Rational& o) {
    i128 g = gcd128(den_, o.den_);
    i128 a = checked_mul(num_, o.den_ / g);
    i128 b = checked_mul(o.num_, den_ / g);
    *this = Rational(checked_add(a, b), checked_mul(den_ / g, o.den_));
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    i128 g1 = gcd128(num_, o.den_);
    i128 g2 = gcd128(o.num_, den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    *this = Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw DomainError("division by zero rational");
    return *this *= Rational(o.den_, o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    Rational d = a - b;
    return d.num_ <=> i128(0);
}

long double Rational::to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
}

std::string Rational::str() const {
    if (den_ == 1) return to_string(num_);
    return to_string(num_) + "/" + to_string(den_);
}

Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_i128(s));
    return Rational(parse_i128(std::string_view(s).substr(0, slash)),
                    parse_i128(std::string_view(s).substr(slash + 1)));
}

Rational pow(const Rational& base, int e) {
    if (e < 0) return pow(Rational(1) / base, -e);
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace chatelet
