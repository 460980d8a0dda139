#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chatelet/equidist.hpp"
#include "chatelet/forms.hpp"
#include "chatelet/quadrature.hpp"
#include "chatelet/rational.hpp"

namespace chatelet {

// #{t mod p^m : f_i(t) = nu_i mod p^m for i in rows}. Walks the tree of residues level by
// level and stops at nodes where the Jacobian of the selected forms has full rank mod p,
// where each node at level j >= 1 has exactly p^((m-j)(n+1-|rows|)) lifts. Points with
// t = 0 mod p reduce to level m - d by homogeneity. Budget counts visited nodes.
i128 fiber_count(const CompiledSystem& cs, const std::vector<int>& rows, const std::vector<i128>& nu,
                 std::uint64_t p, int m, const Exec& exec = {});

// #{t mod p^m : f(t) = nu} / p^(m(n+1-R)).
Rational local_density(const FormSystem& sys, const std::vector<i128>& nu, std::uint64_t p, int m,
                       const Exec& exec = {});

struct SigmaResult {
    Rational value;
    int stable_from = 0;  // first level of the stable window
    std::vector<std::pair<int, Rational>> levels;
};

// Raises the level until `window` consecutive levels agree. InconclusiveError when the
// budget or the 32-bit modulus limit is reached first.
SigmaResult sigma_p(const FormSystem& sys, const std::vector<i128>& nu, std::uint64_t p, int window = 2,
                    const Exec& exec = {});

// #{t mod W : f(t) = nu} / W^(n+1-R) by direct enumeration.
Rational singular_series_flat(const FormSystem& sys, const std::vector<i128>& nu, const WzSpec& wz,
                              const Exec& exec = {});

struct TailMass {
    Rational mass;    // #{x mod p^k : p^k | f_i(x)} / p^(k(n+1))
    Rational scaled;  // p^k * mass
};

TailMass tail_mass(const FormSystem& sys, int i, std::uint64_t p, int k, const Exec& exec = {});

struct BatemanHorn {
    long double value = 1;
    std::vector<std::pair<std::uint32_t, Rational>> factors;  // (p, #{prod f != 0}/p^(n+1) * ...)
};

// Product over p <= P_max of (1 - dens_p(prod f = 0)) (1 - 1/p)^(-R).
BatemanHorn bateman_horn_partial(const FormSystem& sys, std::uint32_t P_max, const Exec& exec = {});

// rho(a, q) on residue vectors mod q and omega on R positive reals.
struct ProgressionProfile {
    std::string name;
    std::function<long double(const std::vector<std::uint64_t>&, std::uint64_t)> rho;
    std::function<long double(const long double*, int)> omega;
    double C = 0;
};

struct ProfileParams {
    int R = 1;
    i128 D = -1;
    int s = 1;  // product of the signs, for norm_indicator
    WzSpec wz;
    long double gamma0 = 1;
};

// Built-in profiles: "unit" (rho = q^(-R), omega = 1), "zero" (rho = 0), "norm_indicator"
// (joint admissibility times (2 gamma_0 / sqrt(pi))^R prod_{p <= z}(1-1/p)^(-R/2) / q^R,
// omega = prod (log x_i)^(-1/2)).
ProgressionProfile make_profile(const std::string& name, const ProfileParams& params);
std::vector<std::string> profile_names();

struct QuadratureSpec {
    double rel_tol = 1e-4;
    double abs_tol = 1e-12;
    std::uint64_t max_cells = 1ull << 24;
};

struct MainTerm {
    long double value = 0;
    long double integral = 0;
    long double integral_error = 0;
    bool integral_converged = false;
    long double residue_sum = 0;  // sum_t rho(s f(t) mod W, W) / W^(n+1-R)
};

MainTerm vachms_main_term(const FormSystem& sys, const Box& box, const SignVector& s, const WzSpec& wz,
                          const ProgressionProfile& profile, long double P, const QuadratureSpec& quad = {},
                          const Exec& exec = {});

}  // namespace chatelet
