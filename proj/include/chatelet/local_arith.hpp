#pragma once

#include <string>

#include "chatelet/int128.hpp"

namespace chatelet {

// A place of Q: the real place or a finite prime.
class Place {
public:
    static Place real() { return Place(0); }
    static Place prime(i128 p);  // DomainError unless p is prime

    bool is_real() const { return p_ == 0; }
    i128 p() const { return p_; }
    std::string str() const { return is_real() ? "real" : to_string(p_); }

private:
    explicit Place(i128 p) : p_(p) {}
    i128 p_;
};

struct ValuationSplit {
    int exponent;
    i128 unit;
};

ValuationSplit vp(i128 n, i128 p);

int kronecker(i128 a, i128 n);

int hilbert(i128 a, i128 b, const Place& v);
inline int hilbert(i128 a, i128 b, i128 p) { return hilbert(a, b, p == 0 ? Place::real() : Place::prime(p)); }

// Product of hilbert(a, b, v) over the real place and every p | 2ab.
int hilbert_product(i128 a, i128 b);

// Exhaustive check for a solution of x^2 - a y^2 = b z^2 mod p^k with (x, y, z) not all
// divisible by p. Independent of the closed-form symbol; used as its oracle.
bool conic_has_primitive_solution_mod(i128 a, i128 b, i128 p, int k);

// Local solubility of x^2 - a y^2 = b z^2 over Q_p via the oracle above at
// k = v_p(4ab) + 3.
bool hensel_conic_soluble(i128 a, i128 b, i128 p);

}  // namespace chatelet
