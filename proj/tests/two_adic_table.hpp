#pragma once

#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "chatelet/local_arith.hpp"
#include "json.hpp"
#include "oracles.hpp"

struct TwoAdicEntry {
    int D_mod, D_res, a_mod;
    std::vector<int> a_res;
};

inline std::vector<TwoAdicEntry> load_two_adic_table(const std::string& path) {
    std::ifstream in(path);
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<TwoAdicEntry> out;
    for (auto& e : j["entries"])
        out.push_back({e["D_mod"].get<int>(), e["D_res"].get<int>(), e["a_mod"].get<int>(),
                       e["a_res"].get<std::vector<int>>()});
    return out;
}

struct TwoAdicMismatch {
    int D_mod, D_res;
    int a_res_mod8;
    std::int64_t D, a;
    bool table, symbol;
};

// Compares the table with hilbert(D, a, 2) for square-free D in each class (|D| <= 200)
// and square-free a with |a| <= 400. Returns (cases checked, mismatches).
inline std::pair<long, std::vector<TwoAdicMismatch>> compare_two_adic_table(const std::vector<TwoAdicEntry>& table) {
    long checked = 0;
    std::vector<TwoAdicMismatch> bad;
    for (const auto& e : table) {
        for (std::int64_t D = -200; D <= 200; ++D) {
            if (D == 0 || D == 1 || !oracle::square_free(D)) continue;
            if (chatelet::mod128(D, e.D_mod) != e.D_res) continue;
            for (std::int64_t a = -400; a <= 400; ++a) {
                if (a == 0 || !oracle::square_free(a)) continue;
                int r = int(chatelet::mod128(a, e.a_mod));
                bool in_table = false;
                for (int x : e.a_res) in_table |= x == r;
                bool sym = chatelet::hilbert(D, a, chatelet::Place::prime(2)) == 1;
                ++checked;
                if (in_table != sym) bad.push_back({e.D_mod, e.D_res, int(chatelet::mod128(a, 8)), D, a, in_table, sym});
            }
        }
    }
    return {checked, bad};
}
