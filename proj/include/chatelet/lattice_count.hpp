#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chatelet/forms.hpp"
#include "chatelet/parallel.hpp"
#include "chatelet/quad_norms.hpp"

namespace chatelet {

enum class ZeroPolicy { include, exclude };

// Conditions of the capped count: Hilbert symbols at p <= z, v_p(f_i) < 2 alpha at p <= z,
// even valuations at inert p > z.
struct Caps {
    int z;
    int alpha;
};

struct CountQuery {
    FormSystem sys;
    QuadraticField K;
    i128 bound;  // height B for count_N, box radius P for count_N0
    std::optional<Caps> caps;
    ZeroPolicy zero_policy = ZeroPolicy::include;
    NormMode mode = NormMode::hasse;
};

struct CountResult {
    i128 value = 0;
    std::uint64_t points_scanned = 0;
    double elapsed = 0;         // seconds
    std::int64_t radius = 0;    // box radius actually enumerated
    std::size_t chunks = 0;     // work units in the partition
    std::string layout;         // how the box was split
};

struct I128Hash {
    std::size_t operator()(i128 v) const {
        std::uint64_t lo = std::uint64_t(v), hi = std::uint64_t(u128(v) >> 64);
        return std::hash<std::uint64_t>()(lo ^ (hi * 0x9E3779B97F4A7C15ull));
    }
};

// Membership in N_D for values up to a certified bound. Uses a NormTable when the bound
// is small enough and the mode is hasse; otherwise decides each value with is_norm and a
// bounded per-caller memo.
class NormOracle {
public:
    NormOracle(const QuadraticField& K, NormMode mode, i128 max_abs);
    using Memo = std::unordered_map<i128, bool, I128Hash>;
    bool contains(i128 m, Memo& memo) const;
    bool uses_table() const { return table_ != nullptr; }
    static constexpr std::uint64_t kTableLimit = 1'000'000'000;

private:
    QuadraticField K_;
    NormMode mode_;
    std::shared_ptr<const NormTable> table_;
};

CountResult count_N(const CountQuery& q, const Exec& exec = {});
CountResult count_N0(const CountQuery& q, const Exec& exec = {});

struct MobiusCheck {
    bool holds;
    i128 twice_N;       // 2 N(B)
    i128 mobius_sum;    // sum_k mu(k) N_0(floor(P / k))
    std::int64_t radius;
};

MobiusCheck mobius_identity_check(const FormSystem& sys, const QuadraticField& K, i128 B, const Exec& exec = {});

struct SignPartitionCheck {
    bool holds;
    i128 total;                          // capped N_0(P)
    std::map<std::string, i128> by_sign; // admissible sign vectors only
};

SignPartitionCheck sign_partition_check(const FormSystem& sys, const QuadraticField& K, std::int64_t P,
                                        std::optional<Caps> caps, const Exec& exec = {});

struct Congruence {
    int index;  // 0-based
    std::int64_t p;
    int alpha;  // requires p^(2 alpha) | n_index
};

struct TupleCount {
    CountResult result;
    double bound_shape;  // N_1...N_R / min(log N_i)^(R/2)
    double ratio;        // value / bound_shape
};

TupleCount count_norm_tuples(const QuadraticField& K, const std::vector<std::int64_t>& bounds,
                             std::optional<Congruence> congruence = std::nullopt, const Exec& exec = {});

std::vector<int> mobius_table(std::int64_t limit);

}  // namespace chatelet
