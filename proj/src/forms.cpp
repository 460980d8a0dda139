#include "chatelet/forms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "chatelet/primes.hpp"
#include "json.hpp"

namespace chatelet {

namespace {

using json = nlohmann::json;

i128 json_int(const json& j, const char* what) {
    if (j.is_number_integer()) return i128(j.get<std::int64_t>());
    if (j.is_string()) return parse_i128(j.get<std::string>());
    throw DomainError(std::string("system JSON: ") + what + " must be an integer");
}

json int_json(i128 v) {
    if (v >= INT64_MIN && v <= INT64_MAX) return json(std::int64_t(v));
    return json(to_string(v));
}

}  // namespace

FormSystem::FormSystem(int n, int d, std::vector<Form> forms, std::optional<i128> frakB, std::optional<i128> D)
    : n_(n), d_(d), forms_(std::move(forms)), frakB_(frakB), D_(D) {
    if (n < 0) throw DomainError("n must be >= 0");
    if (d < 1) throw DomainError("degree must be >= 1");
    if (forms_.empty()) throw DomainError("a system needs at least one form");
    for (std::size_t i = 0; i < forms_.size(); ++i) {
        if (forms_[i].empty()) throw DomainError("form " + std::to_string(i) + " is empty");
        for (const Monomial& m : forms_[i]) {
            if (m.coeff == 0) throw DomainError("zero coefficient in form " + std::to_string(i));
            if (int(m.exps.size()) != n + 1)
                throw DomainError("monomial in form " + std::to_string(i) + " needs " + std::to_string(n + 1) +
                                  " exponents");
            int deg = 0;
            for (int e : m.exps) {
                if (e < 0) throw DomainError("negative exponent");
                deg += e;
            }
            if (deg != d) throw DomainError("form " + std::to_string(i) + " is not homogeneous of degree " + std::to_string(d));
        }
    }
}

FormSystem FormSystem::subsystem(const std::vector<int>& indices) const {
    std::vector<Form> fs;
    for (int i : indices) fs.push_back(forms_.at(i));
    return FormSystem(n_, d_, std::move(fs), std::nullopt, D_);
}

FormSystem FormSystem::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("system JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("d") || !j.contains("forms"))
        throw DomainError("system JSON needs keys n, d, forms");
    int n = j["n"].get<int>();
    int d = j["d"].get<int>();
    std::vector<Form> forms;
    for (const json& jf : j["forms"]) {
        Form f;
        for (const json& jm : jf) {
            if (!jm.is_array() || jm.size() != 2) throw DomainError("system JSON: monomial must be [coeff, [exponents]]");
            Monomial m{json_int(jm[0], "coefficient"), jm[1].get<std::vector<int>>()};
            f.push_back(std::move(m));
        }
        forms.push_back(std::move(f));
    }
    if (j.contains("R") && j["R"].get<int>() != int(forms.size()))
        throw DomainError("system JSON: R does not match the number of forms");
    std::optional<i128> frakB, D;
    if (j.contains("frakB") && !j["frakB"].is_null()) frakB = json_int(j["frakB"], "frakB");
    if (j.contains("D") && !j["D"].is_null()) D = json_int(j["D"], "D");
    return FormSystem(n, d, std::move(forms), frakB, D);
}

FormSystem FormSystem::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read system file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string FormSystem::to_json_text() const {
    json j;
    j["n"] = n_;
    j["d"] = d_;
    j["R"] = R();
    json jf = json::array();
    for (const Form& f : forms_) {
        json a = json::array();
        for (const Monomial& m : f) a.push_back(json::array({int_json(m.coeff), m.exps}));
        jf.push_back(a);
    }
    j["forms"] = jf;
    if (frakB_) j["frakB"] = int_json(*frakB_);
    if (D_) j["D"] = int_json(*D_);
    return j.dump();
}

std::vector<i128> coefficient_sums(const FormSystem& sys) {
    std::vector<i128> out;
    for (const Form& f : sys.forms()) {
        i128 s = 0;
        for (const Monomial& m : f) s = checked_add(s, abs128(m.coeff));
        out.push_back(s);
    }
    return out;
}

CompiledSystem::CompiledSystem(const FormSystem& sys) : vars_(sys.vars()), R_(sys.R()), d_(sys.d()) {
    partials_.assign(R_, std::vector<std::vector<Term>>(vars_));
    for (int i = 0; i < R_; ++i) {
        for (const Monomial& m : sys.forms()[i]) {
            std::int64_t c64 = (m.coeff >= INT64_MIN && m.coeff <= INT64_MAX) ? std::int64_t(m.coeff) : 0;
            terms_.push_back({i, m.coeff, c64, m.exps});
            for (int j = 0; j < vars_; ++j) {
                if (m.exps[j] == 0) continue;
                Term t{i, checked_mul(m.coeff, m.exps[j]), 0, m.exps};
                t.exps[j] -= 1;
                partials_[i][j].push_back(std::move(t));
            }
        }
    }
    coeff_sums_ = coefficient_sums(sys);
    for (const Term& term : terms_) coeff_real_.push_back(double(term.coeff));
}

void CompiledSystem::eval_checked(const i128* t, i128* out) const {
    for (int i = 0; i < R_; ++i) out[i] = 0;
    for (const Term& term : terms_) {
        i128 v = term.coeff;
        for (int j = 0; j < vars_; ++j)
            for (int e = 0; e < term.exps[j]; ++e) v = checked_mul(v, t[j]);
        out[term.form] = checked_add(out[term.form], v);
    }
}

bool CompiledSystem::fits_int64(std::int64_t radius) const {
    const i128 limit = i128(1) << 62;
    i128 pw = 1;
    for (int e = 0; e < d_; ++e) {
        if (__builtin_mul_overflow(pw, i128(radius), &pw) || pw > limit) return false;
    }
    for (i128 s : coeff_sums_) {
        i128 b;
        if (__builtin_mul_overflow(s, pw, &b) || b > limit) return false;
    }
    for (const Term& term : terms_)
        if (term.coeff64 != term.coeff) return false;
    return true;
}

void CompiledSystem::eval_real(const double* t, double* out) const {
    for (int i = 0; i < R_; ++i) out[i] = 0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const Term& term = terms_[k];
        double v = coeff_real_[k];
        for (int j = 0; j < vars_; ++j)
            for (int e = 0; e < term.exps[j]; ++e) v *= t[j];
        out[term.form] += v;
    }
}

void CompiledSystem::eval_int64(const std::int64_t* t, std::int64_t* out) const {
    for (int i = 0; i < R_; ++i) out[i] = 0;
    for (const Term& term : terms_) {
        std::int64_t v = term.coeff64;
        for (int j = 0; j < vars_; ++j)
            for (int e = 0; e < term.exps[j]; ++e) v *= t[j];
        out[term.form] += v;
    }
}

void CompiledSystem::eval_mod(const std::uint64_t* t, std::uint64_t q, std::uint64_t* out) const {
    for (int i = 0; i < R_; ++i) out[i] = 0;
    for (const Term& term : terms_) {
        std::uint64_t v = std::uint64_t(mod128(term.coeff, q));
        for (int j = 0; j < vars_; ++j)
            for (int e = 0; e < term.exps[j]; ++e) v = v * t[j] % q;
        out[term.form] = (out[term.form] + v) % q;
    }
}

void CompiledSystem::eval_mod_wide(const std::uint64_t* t, std::uint64_t q, std::uint64_t* out) const {
    for (int i = 0; i < R_; ++i) out[i] = 0;
    for (const Term& term : terms_) {
        u128 v = u128(mod128(term.coeff, q));
        for (int j = 0; j < vars_; ++j)
            for (int e = 0; e < term.exps[j]; ++e) v = v * t[j] % q;
        out[term.form] = std::uint64_t((out[term.form] + v) % q);
    }
}

void CompiledSystem::jacobian_mod(const std::uint64_t* t, std::uint64_t p, const std::vector<int>& rows,
                                  std::uint64_t* out) const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int j = 0; j < vars_; ++j) {
            std::uint64_t acc = 0;
            for (const Term& term : partials_[rows[r]][j]) {
                std::uint64_t v = std::uint64_t(mod128(term.coeff, p));
                for (int k = 0; k < vars_; ++k)
                    for (int e = 0; e < term.exps[k]; ++e) v = v * (t[k] % p) % p;
                acc = (acc + v) % p;
            }
            out[r * vars_ + j] = acc;
        }
    }
}

std::vector<i128> evaluate(const FormSystem& sys, const std::vector<i128>& t, std::optional<i128> modulus) {
    if (int(t.size()) != sys.vars()) throw DomainError("point has wrong number of coordinates");
    if (modulus && *modulus <= 0) throw DomainError("modulus must be positive");
    CompiledSystem cs(sys);
    std::vector<i128> out(sys.R());
    cs.eval_checked(t.data(), out.data());
    if (modulus)
        for (i128& v : out) v = mod128(v, *modulus);
    return out;
}

SignVector sign_pattern(const FormSystem& sys, const std::vector<double>& t) {
    if (int(t.size()) != sys.vars()) throw DomainError("point has wrong number of coordinates");
    SignVector s;
    for (const Form& f : sys.forms()) {
        long double v = 0;
        for (const Monomial& m : f) {
            long double term = static_cast<long double>(m.coeff);
            for (int j = 0; j < sys.vars(); ++j) term *= std::pow(static_cast<long double>(t[j]), m.exps[j]);
            v += term;
        }
        if (v == 0) throw ZeroValueError("form vanishes at the given point");
        s.push_back(v > 0 ? 1 : -1);
    }
    return s;
}

std::vector<SignVector> all_sign_vectors(int R) {
    std::vector<SignVector> out;
    for (unsigned mask = 0; mask < (1u << R); ++mask) {
        SignVector s(R);
        for (int i = 0; i < R; ++i) s[i] = (mask >> (R - 1 - i)) & 1 ? 1 : -1;
        out.push_back(s);
    }
    return out;
}

std::string sign_label(const SignVector& s) {
    std::string out;
    for (int v : s) out.push_back(v > 0 ? '+' : '-');
    return out;
}

SignVector parse_sign_vector(const std::string& str, int R) {
    SignVector s;
    std::string tok;
    std::stringstream ss(str);
    if (str.find(',') == std::string::npos && !str.empty() && (str[0] == '+' || str[0] == '-') &&
        str.find('1') == std::string::npos) {
        for (char c : str) s.push_back(c == '+' ? 1 : -1);
    } else {
        while (std::getline(ss, tok, ',')) {
            if (tok == "1" || tok == "+1" || tok == "+") s.push_back(1);
            else if (tok == "-1" || tok == "-") s.push_back(-1);
            else throw DomainError("sign entries must be +1 or -1");
        }
    }
    if (int(s.size()) != R) throw DomainError("sign vector must have R = " + std::to_string(R) + " entries");
    return s;
}

int rank_mod(std::uint64_t* J, int rows, int cols, std::uint64_t p) {
    const int R = rows, V = cols;
    int rank = 0;
    for (int col = 0; col < V && rank < R; ++col) {
        int piv = -1;
        for (int r = rank; r < R; ++r)
            if (J[r * V + col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        for (int k = 0; k < V; ++k) std::swap(J[piv * V + k], J[rank * V + k]);
        std::uint64_t inv = 1, b = J[rank * V + col], e = p - 2;
        while (e) {
            if (e & 1) inv = inv * b % p;
            b = b * b % p;
            e >>= 1;
        }
        for (int r = 0; r < R; ++r) {
            if (r == rank || J[r * V + col] == 0) continue;
            std::uint64_t f = J[r * V + col] * inv % p;
            for (int k = 0; k < V; ++k) J[r * V + k] = (J[r * V + k] + (p - f) * J[rank * V + k]) % p;
        }
        ++rank;
    }
    return rank;
}

std::uint64_t rank_defect_count(const FormSystem& sys, std::uint64_t p, const Exec& exec) {
    if (!is_prime(p)) throw DomainError("rank_defect_count needs a prime");
    const int V = sys.vars(), R = sys.R();
    i128 total = checked_pow(p, unsigned(V));
    if (total > i128(exec.budget)) throw ResourceError("rank_defect_count: p^(n+1) exceeds the budget");
    CompiledSystem cs(sys);
    std::vector<int> rows(R);
    for (int i = 0; i < R; ++i) rows[i] = i;
    // Chunk by the leading coordinate.
    std::vector<std::uint64_t> partial(p, 0);
    std::uint64_t rest = std::uint64_t(total) / p;
    parallel_chunks(p, exec.threads, [&](std::size_t c) {
        std::vector<std::uint64_t> t(V), J(R * V);
        std::uint64_t count = 0;
        for (std::uint64_t idx = 0; idx < rest; ++idx) {
            t[0] = c;
            std::uint64_t x = idx;
            for (int j = V - 1; j >= 1; --j) {
                t[j] = x % p;
                x /= p;
            }
            cs.jacobian_mod(t.data(), p, rows, J.data());
            if (rank_mod(J.data(), R, V, p) < R) ++count;
        }
        partial[c] = count;
    });
    std::uint64_t sum = 0;
    for (std::uint64_t v : partial) sum += v;
    return sum;
}

BirchCPrime birch_c_prime(const FormSystem& sys, i128 frakB) {
    const int d = sys.d(), R = sys.R();
    if (d == 1) throw DomainError("c' is undefined for d = 1");
    if (frakB <= 0) throw DomainError("frakB must be positive");
    Rational inner = Rational(frakB, checked_mul(checked_pow(2, unsigned(d - 1)), R * (d - 1))) - Rational(R + 1);
    i128 threshold = checked_mul(checked_mul(R, R + 1), checked_mul(checked_pow(2, unsigned(d - 1)), d - 1));
    return {inner / Rational(2), frakB > threshold};
}

void Box::validate(int vars) const {
    if (int(intervals.size()) != vars) throw DomainError("box needs one interval per variable");
    for (auto [a, b] : intervals)
        if (!(a <= b) || a < -1.0 || b > 1.0) throw DomainError("box intervals must lie inside [-1, 1]");
}

BoxBound box_bound(const FormSystem& sys, const Box& box) {
    box.validate(sys.vars());
    BoxBound out{{}, 0};
    for (i128 s : coefficient_sums(sys)) {
        out.b_i.push_back(checked_mul(2, s));
        out.b = std::max(out.b, out.b_i.back());
    }
    return out;
}

}  // namespace chatelet
