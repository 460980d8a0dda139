#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chatelet/forms.hpp"
#include "chatelet/parallel.hpp"
#include "chatelet/rational.hpp"

namespace chatelet {

// Truncation level T with optional per-prime levels. The primes in play are p <= T
// together with every p | 2D; each sits at level(p).
struct TruncationSpec {
    int T = 4;
    std::map<std::int64_t, int> levels;

    TruncationSpec() = default;
    TruncationSpec(int T_, std::map<std::int64_t, int> levels_ = {}) : T(T_), levels(std::move(levels_)) {}  // NOLINT

    int level(std::int64_t p) const;
    void validate() const;
};

std::vector<std::int64_t> truncation_primes(i128 D, const TruncationSpec& trunc);

// Valuation cap at p: v_p(prod f) < cap. Level - 3 at 2, the level itself at odd p.
int valuation_cap(std::int64_t p, int level);

// Kronecker (D/.) restricted to integers prime to 2D, split into local characters
// chi_p on (Z/p^e)^*, e = 3 at 2 and 1 at odd p | D.
class LocalCharacters {
public:
    explicit LocalCharacters(i128 D);
    bool is_bad(std::int64_t p) const;
    int digits(std::int64_t p) const;  // e for bad p, 0 otherwise
    int chi(std::int64_t p, std::uint64_t unit) const;  // bad p only
    // Value of (D/.) at the prime p read through the other local characters; (D/p) for good p.
    int kappa(std::int64_t p) const;
    int sign(int s) const;  // (D/-1) or 1

private:
    i128 D_;
    std::vector<std::int64_t> bad_;
    std::vector<int> e_;
    std::vector<std::vector<int>> table_;
};

// Law of (v_p(f_i), unit of f_i mod p^k) over t in Z_p^(n+1), restricted to
// sum v_p(f_i) < cap. Key: lambda_1..lambda_R then u_1..u_R (u = 0 when k = 0).
using ValuationProfile = std::map<std::vector<int>, Rational>;

// Residue tree with a Hensel shortcut: once the unresolved forms have a Jacobian of full
// rank mod p their values are Haar-distributed on the current class. Points with
// t = 0 mod p reduce to the cap minus dR by homogeneity. Budget counts visited nodes.
ValuationProfile valuation_profile(const FormSystem& sys, std::int64_t p, int cap, int k, const Exec& exec = {});
// Enumeration over t mod p^level; needs cap - 1 + k <= level.
ValuationProfile valuation_profile_direct(const FormSystem& sys, std::int64_t p, int level, int cap, int k,
                                          const Exec& exec = {});

// Exact count of the truncated local conditions over t mod prod p^level(p), divided by
// the modulus^(n+1).
Rational gamma_T_direct(const FormSystem& sys, i128 D, const SignVector& s, const TruncationSpec& trunc,
                        const Exec& exec = {});

struct PrimeFactor {
    std::int64_t p = 0;
    int level = 0;
    int cap = 0;
    bool bad = false;
    std::vector<Rational> E;  // indexed by subset bitmask of {1..R}

    // (1 - 1/p)^(-R/2) E(I).
    long double normalized(unsigned mask, int R) const;
};

// The same quantity through the product over primes:
//   gamma_T(s) = 2^-R sum_I (D / prod_{i in I} s_i) prod_p E_p(I)
// with E_p(I) the p-adic mean of the cap and Hilbert indicators times prod_{i in I} psi_p(f_i).
class GammaTCrt {
public:
    GammaTCrt(const FormSystem& sys, i128 D, const TruncationSpec& trunc, const Exec& exec = {});
    Rational gamma_T(const SignVector& s) const;
    // Measure of the set where the cofactor characters are all equal (rather than all +1).
    Rational all_equal(const SignVector& s) const;
    long double normalization() const;  // prod_p (1 - 1/p)^(-R/2)
    const std::vector<PrimeFactor>& primes() const { return primes_; }
    int R() const { return R_; }

private:
    Rational combine(const SignVector& s, bool even_only) const;
    int R_;
    i128 D_;
    std::vector<PrimeFactor> primes_;
};

Rational gamma_T_crt(const FormSystem& sys, i128 D, const SignVector& s, const TruncationSpec& trunc,
                     const Exec& exec = {});

// Factor at one prime p not dividing 2D, for every subset I, normalized by (1-1/p)^(-R/2).
std::vector<long double> good_factor(const FormSystem& sys, i128 D, std::int64_t p, int level, const Exec& exec = {});

struct GammaEstimate {
    std::vector<int> T;
    std::vector<Rational> raw;
    std::vector<long double> normalized;
    long double gamma = 0;      // last normalized value
    long double amplitude = 0;  // c in |step| <= c 2^(-T/2)
    long double error = 0;      // amplitude * 2^(-T_last/2)
    bool envelope_monotone = true;
};

// T_list is increasing; overrides apply at every T.
GammaEstimate gamma_estimate(const FormSystem& sys, i128 D, const SignVector& s, const std::vector<int>& T_list,
                             const std::map<std::int64_t, int>& overrides = {}, const Exec& exec = {});

struct GammaInfSpec {
    int per_axis = 0;  // 0: 1024 for two variables, else budget^(1/(n+1))
    std::uint64_t mc_samples = 200'000;
    std::uint64_t seed = 0;
};

struct GammaInf {
    long double value = 0;
    long double error = 0;
    int per_axis = 0;
    long double mc_mean = 0;
    long double mc_stderr = 0;
    bool mc_disagrees = false;  // |grid - mc| > 3 sigma + grid error
};

// Volume of {t in [-1,1]^(n+1) : sign f_j(t) = s_j}.
GammaInf gamma_infinity(const FormSystem& sys, const SignVector& s, const GammaInfSpec& spec = {},
                        const Exec& exec = {});

bool sign_admissible(i128 D, const SignVector& s);

struct GammaTotalEntry {
    SignVector s;
    GammaInf inf;
    GammaEstimate est;
};

struct GammaTotal {
    long double value = 0;
    long double error = 0;
    std::vector<GammaTotalEntry> entries;  // admissible signs only
};

GammaTotal gamma_total(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const std::vector<int>& T_list,
                       const std::map<std::int64_t, int>& overrides = {}, const Exec& exec = {});

long double zeta(int s);

// (gamma/2) (n+1)^(R/2) / zeta(n+1) (2/sqrt(pi d))^R B / (log B)^(R/2).
long double predict_N(int n, int R, int d, long double gamma, long double B);
long double theorem_constant(int n, int R, int d, long double gamma);

i128 brsub_order(int d, int R);

struct LrsInvariants {
    Rational alpha_star;
    Rational Delta;
    Rational eta;
    long double Gamma_factor = 0;
    i128 br_order = 0;
    long double fujita_product = 0;
};

LrsInvariants lrs_invariants(int n, int R, int d);

struct LrsSign {
    SignVector s;
    long double gamma_inf = 0;
    long double gamma_inf_error = 0;
    long double measure = 0;  // normalized t_S measure at the truncation
};

struct LrsResult {
    LrsInvariants inv;
    long double tau = 0;
    long double c_pred = 0;
    long double c_pred_error = 0;
    std::vector<LrsSign> signs;
};

LrsResult lrs_constant(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const TruncationSpec& trunc,
                       const Exec& exec = {});

struct CompareReport {
    long double theorem = 0;
    long double lrs = 0;
    long double abs_diff = 0;
    long double rel_diff = 0;
    long double quad_bound = 0;  // propagated gamma_infinity error
    bool within_bound = false;
};

CompareReport constants_compare(const FormSystem& sys, i128 D, const GammaInfSpec& quad, const TruncationSpec& trunc,
                                const Exec& exec = {});

}  // namespace chatelet
