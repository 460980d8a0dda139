#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chatelet/int128.hpp"
#include "chatelet/parallel.hpp"
#include "chatelet/rational.hpp"

namespace chatelet {

struct Monomial {
    i128 coeff;
    std::vector<int> exps;
};

using Form = std::vector<Monomial>;

// R integer forms of common degree d in the n + 1 variables x_0..x_n.
class FormSystem {
public:
    FormSystem(int n, int d, std::vector<Form> forms, std::optional<i128> frakB = std::nullopt,
               std::optional<i128> D = std::nullopt);

    int n() const { return n_; }
    int vars() const { return n_ + 1; }
    int d() const { return d_; }
    int R() const { return int(forms_.size()); }
    const std::vector<Form>& forms() const { return forms_; }
    const std::optional<i128>& declared_frakB() const { return frakB_; }
    const std::optional<i128>& D() const { return D_; }

    FormSystem subsystem(const std::vector<int>& indices) const;

    static FormSystem from_json_text(const std::string& text);
    static FormSystem load(const std::string& path);
    std::string to_json_text() const;

private:
    int n_, d_;
    std::vector<Form> forms_;
    std::optional<i128> frakB_, D_;
};

// Sum of |coefficients| of each form.
std::vector<i128> coefficient_sums(const FormSystem& sys);

// Flattened copy of a system for hot loops.
class CompiledSystem {
public:
    explicit CompiledSystem(const FormSystem& sys);

    int vars() const { return vars_; }
    int R() const { return R_; }
    int d() const { return d_; }

    // Exact values; overflow throws.
    void eval_checked(const i128* t, i128* out) const;
    // No overflow checks: callers must certify sum|c| * max|t|^d < 2^63 for every form
    // (see fits_int64).
    void eval_int64(const std::int64_t* t, std::int64_t* out) const;
    void eval_real(const double* t, double* out) const;
    bool fits_int64(std::int64_t radius) const;
    // Residues mod q for t already reduced mod q; requires q < 2^32.
    void eval_mod(const std::uint64_t* t, std::uint64_t q, std::uint64_t* out) const;
    // Same with 128-bit products; q < 2^63.
    void eval_mod_wide(const std::uint64_t* t, std::uint64_t q, std::uint64_t* out) const;
    // Jacobian rows of the forms in `rows` at t mod p, row-major into out.
    void jacobian_mod(const std::uint64_t* t, std::uint64_t p, const std::vector<int>& rows,
                      std::uint64_t* out) const;

private:
    struct Term {
        int form;
        i128 coeff;
        std::int64_t coeff64;
        std::vector<int> exps;
    };
    int vars_, R_, d_;
    std::vector<Term> terms_;
    std::vector<std::vector<std::vector<Term>>> partials_;  // [form][var]
    std::vector<i128> coeff_sums_;
    std::vector<double> coeff_real_;
};

std::vector<i128> evaluate(const FormSystem& sys, const std::vector<i128>& t,
                           std::optional<i128> modulus = std::nullopt);

using SignVector = std::vector<int>;

SignVector sign_pattern(const FormSystem& sys, const std::vector<double>& t);

// All sign vectors in {-1,+1}^R, lexicographic with -1 first.
std::vector<SignVector> all_sign_vectors(int R);
std::string sign_label(const SignVector& s);
SignVector parse_sign_vector(const std::string& s, int R);

// Rank of the rows x cols matrix J over F_p; J is overwritten.
int rank_mod(std::uint64_t* J, int rows, int cols, std::uint64_t p);

std::uint64_t rank_defect_count(const FormSystem& sys, std::uint64_t p, const Exec& exec = {});

struct BirchCPrime {
    Rational c_prime;
    bool condition_holds;
};

BirchCPrime birch_c_prime(const FormSystem& sys, i128 frakB);

struct Box {
    std::vector<std::pair<double, double>> intervals;
    static Box unit(int vars) { return Box{std::vector<std::pair<double, double>>(vars, {-1.0, 1.0})}; }
    void validate(int vars) const;
};

struct BoxBound {
    std::vector<i128> b_i;
    i128 b;
};

BoxBound box_bound(const FormSystem& sys, const Box& box);

}  // namespace chatelet
