// chatelet command-line tool. Exit codes: 0 ok, 1 invariant failure, 2 usage or domain
// error, 3 resource/budget exhaustion or an inconclusive computation.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chatelet/densities.hpp"
#include "chatelet/equidist.hpp"
#include "chatelet/forms.hpp"
#include "chatelet/lattice_count.hpp"
#include "chatelet/leading_constant.hpp"
#include "chatelet/local_arith.hpp"
#include "chatelet/quad_norms.hpp"
#include "chatelet/verify.hpp"

#ifndef CHATELET_VERSION
#define CHATELET_VERSION "0.0.0"
#endif

using json = nlohmann::json;
using namespace chatelet;

namespace {

struct InvariantFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json j128(i128 v) {
    if (v >= INT64_MIN && v <= INT64_MAX) return json(std::int64_t(v));
    return json(to_string(v));
}

json jrat(const Rational& r) { return json(r.str()); }
json jld(long double v) { return json(static_cast<double>(v)); }

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(s);
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::vector<i128> parse_list(const std::string& s) {
    std::vector<i128> out;
    for (auto& t : split(s)) out.push_back(parse_i128(t));
    return out;
}

std::map<std::int64_t, int> parse_levels(const std::string& s) {
    std::map<std::int64_t, int> out;
    for (auto& t : split(s)) {
        auto kv = split(t, ':');
        if (kv.size() != 2) throw DomainError("level override must look like p:level");
        out[std::int64_t(parse_i128(kv[0]))] = int(parse_i128(kv[1]));
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Output of one command: a JSON document and, where natural, a table for CSV.
struct Artifact {
    json data;
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;
    std::optional<json> scalar;
};

std::string render(const Artifact& a, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        os << a.data.dump(2) << "\n";
    } else if (format == "csv") {
        std::vector<std::string> header = a.header;
        std::vector<std::vector<json>> rows = a.rows;
        if (header.empty()) {
            header = {"key", "value"};
            if (a.data.is_object())
                for (auto& [k, v] : a.data.items()) rows.push_back({json(k), v});
            else
                rows.push_back({json("value"), a.data});
        }
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
        os << "\r\n";
        for (auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(scalar_text(r[i]));
            os << "\r\n";
        }
    } else {
        if (a.scalar)
            os << scalar_text(*a.scalar) << "\n";
        else
            os << a.data.dump(2) << "\n";
    }
    return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Everything a leaf command may read. Strings hold 128-bit integers and lists.
struct Options {
    unsigned threads = default_threads();
    std::uint64_t seed = 0;
    std::uint64_t budget = 100'000'000;
    std::string out, log, format = "text";

    std::string system, D, a, b, p = "", n, m, x, y, mode = "hasse", B, P, caps, zero = "include";
    std::string bounds, congruence, nu, T = "4,5", overrides, sign, W, aprime, Tcount, xs, suite = "all";
    std::string profile = "unit";
    int level = 3, z = 3, window = 2, form = 0, k = 1, grid = 0, pmax = 1000, s = 1;
    std::uint64_t mc = 200'000, max_cells = 1ull << 24;
    double rel_tol = 1e-4;
    bool direct = false;

    Exec exec() const { return Exec{threads, budget}; }
};

struct Leaf {
    std::string name;
    std::function<Artifact(const Options&, json&)> run;  // second argument collects inputs
};

FormSystem load_system(const Options& o, json& in) {
    if (o.system.empty()) throw DomainError("--system is required");
    FormSystem sys = FormSystem::load(o.system);
    in["system"] = json::parse(sys.to_json_text());
    return sys;
}

i128 resolve_D(const Options& o, const std::optional<FormSystem>& sys, json& in) {
    i128 D;
    if (!o.D.empty())
        D = parse_i128(o.D);
    else if (sys && sys->D())
        D = *sys->D();
    else
        throw DomainError("--D is required (or a D entry in the system file)");
    in["D"] = j128(D);
    return D;
}

i128 need(const std::string& v, const char* flag, json& in) {
    if (v.empty()) throw DomainError(std::string(flag) + " is required");
    i128 r = parse_i128(v);
    in[std::string(flag).substr(flag[1] == '-' ? 2 : 1)] = j128(r);
    return r;
}

json count_json(const CountResult& r) {
    return {{"value", j128(r.value)}, {"points_scanned", r.points_scanned}, {"radius", r.radius},
            {"chunks", r.chunks}, {"layout", r.layout}};
}

std::optional<Caps> parse_caps(const Options& o, json& in) {
    if (o.caps.empty()) return std::nullopt;
    auto v = split(o.caps, ':');
    if (v.size() != 2) throw DomainError("--caps must look like z:alpha");
    in["caps"] = o.caps;
    return Caps{int(parse_i128(v[0])), int(parse_i128(v[1]))};
}

GammaInfSpec quad_spec(const Options& o, json& in) {
    GammaInfSpec q;
    q.per_axis = o.grid;
    q.mc_samples = o.mc;
    q.seed = o.seed;
    in["grid"] = o.grid;
    in["mc"] = o.mc;
    return q;
}

Artifact scalar(json v, json data = nullptr) {
    Artifact a;
    a.data = data.is_null() ? json{{"value", v}} : data;
    a.scalar = v;
    return a;
}

// ---- symbol ------------------------------------------------------------------------

Artifact symbol_hilbert(const Options& o, json& in) {
    i128 a = need(o.a, "-a", in), b = need(o.b, "-b", in);
    in["p"] = o.p.empty() ? "real" : o.p;
    const bool real = o.p.empty() || o.p == "real" || o.p == "inf" || o.p == "0";
    int v = real ? hilbert(a, b, Place::real()) : hilbert(a, b, Place::prime(parse_i128(o.p)));
    return scalar(v);
}

Artifact symbol_kronecker(const Options& o, json& in) {
    return scalar(kronecker(need(o.a, "-a", in), need(o.n, "-n", in)));
}

Artifact symbol_vp(const Options& o, json& in) {
    auto s = vp(need(o.n, "-n", in), need(o.p, "-p", in));
    Artifact a = scalar(s.exponent, {{"exponent", s.exponent}, {"unit", j128(s.unit)}});
    return a;
}

Artifact symbol_product(const Options& o, json& in) {
    return scalar(hilbert_product(need(o.a, "-a", in), need(o.b, "-b", in)));
}

// ---- norm --------------------------------------------------------------------------

Artifact norm_is(const Options& o, json& in) {
    QuadraticField K(resolve_D(o, std::nullopt, in));
    i128 m = need(o.m, "-m", in);
    in["mode"] = o.mode;
    return scalar(is_norm(K, m, parse_norm_mode(o.mode)));
}

Artifact norm_of_cmd(const Options& o, json& in) {
    QuadraticField K(resolve_D(o, std::nullopt, in));
    if (o.x.empty() || o.y.empty()) throw DomainError("-x and -y are required");
    in["x"] = o.x;
    in["y"] = o.y;
    return scalar(jrat(norm_of(K, Rational::parse(o.x), Rational::parse(o.y))));
}

// ---- count -------------------------------------------------------------------------

CountQuery make_query(const Options& o, json& in, const std::string& bound_flag) {
    FormSystem sys = load_system(o, in);
    QuadraticField K(resolve_D(o, sys, in));
    i128 bound = need(bound_flag == "--B" ? o.B : o.P, bound_flag.c_str(), in);
    CountQuery q{sys, K, bound, parse_caps(o, in)};
    if (o.zero != "include" && o.zero != "exclude") throw DomainError("--zero must be include or exclude");
    q.zero_policy = o.zero == "include" ? ZeroPolicy::include : ZeroPolicy::exclude;
    q.mode = parse_norm_mode(o.mode);
    in["zero"] = o.zero;
    in["mode"] = o.mode;
    return q;
}

Artifact count_n(const Options& o, json& in) {
    auto r = count_N(make_query(o, in, "--B"), o.exec());
    return scalar(j128(r.value), count_json(r));
}

Artifact count_n0(const Options& o, json& in) {
    auto r = count_N0(make_query(o, in, "--P"), o.exec());
    return scalar(j128(r.value), count_json(r));
}

Artifact count_mobius(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    QuadraticField K(resolve_D(o, sys, in));
    auto m = mobius_identity_check(sys, K, need(o.B, "--B", in), o.exec());
    if (!m.holds) throw InvariantFailure("Mobius identity fails");
    return scalar(m.holds, {{"holds", m.holds}, {"twice_N", j128(m.twice_N)}, {"mobius_sum", j128(m.mobius_sum)},
                            {"radius", m.radius}});
}

Artifact count_partition(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    QuadraticField K(resolve_D(o, sys, in));
    auto c = sign_partition_check(sys, K, std::int64_t(need(o.P, "--P", in)), parse_caps(o, in), o.exec());
    if (!c.holds) throw InvariantFailure("sign partition fails");
    Artifact a;
    a.data = {{"holds", c.holds}, {"total", j128(c.total)}};
    a.header = {"sign", "count"};
    for (auto& [s, v] : c.by_sign) {
        a.data["by_sign"][s] = j128(v);
        a.rows.push_back({json(s), j128(v)});
    }
    return a;
}

Artifact count_tuples(const Options& o, json& in) {
    QuadraticField K(resolve_D(o, std::nullopt, in));
    std::vector<std::int64_t> bounds;
    for (i128 v : parse_list(o.bounds)) bounds.push_back(std::int64_t(v));
    if (bounds.empty()) throw DomainError("--bounds is required");
    in["bounds"] = o.bounds;
    std::optional<Congruence> cong;
    if (!o.congruence.empty()) {
        auto v = split(o.congruence, ':');
        if (v.size() != 3) throw DomainError("--congruence must look like index:p:alpha");
        cong = Congruence{int(parse_i128(v[0])), std::int64_t(parse_i128(v[1])), int(parse_i128(v[2]))};
        in["congruence"] = o.congruence;
    }
    auto t = count_norm_tuples(K, bounds, cong, o.exec());
    json d = count_json(t.result);
    d["bound_shape"] = t.bound_shape;
    d["ratio"] = t.ratio;
    return scalar(j128(t.result.value), d);
}

// ---- density -----------------------------------------------------------------------

std::vector<i128> need_nu(const Options& o, json& in) {
    if (o.nu.empty()) throw DomainError("--nu is required");
    in["nu"] = o.nu;
    return parse_list(o.nu);
}

Artifact density_local(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    auto nu = need_nu(o, in);
    in["m"] = o.level;
    return scalar(jrat(local_density(sys, nu, std::uint64_t(need(o.p, "-p", in)), o.level, o.exec())));
}

Artifact density_sigma(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    auto nu = need_nu(o, in);
    in["window"] = o.window;
    auto s = sigma_p(sys, nu, std::uint64_t(need(o.p, "-p", in)), o.window, o.exec());
    Artifact a = scalar(jrat(s.value));
    a.data = {{"value", jrat(s.value)}, {"stable_from", s.stable_from}};
    a.header = {"level", "density"};
    for (auto& [m, v] : s.levels) {
        a.data["levels"].push_back({m, jrat(v)});
        a.rows.push_back({json(m), jrat(v)});
    }
    return a;
}

Artifact density_series(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    auto nu = need_nu(o, in);
    in["z"] = o.z;
    in["level"] = o.level;
    return scalar(jrat(singular_series_flat(sys, nu, build_wz(o.z, o.level), o.exec())));
}

Artifact density_tail(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    in["form"] = o.form;
    in["k"] = o.k;
    auto t = tail_mass(sys, o.form, std::uint64_t(need(o.p, "-p", in)), o.k, o.exec());
    return scalar(jrat(t.mass), {{"mass", jrat(t.mass)}, {"scaled", jrat(t.scaled)}});
}

Artifact density_bh(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    in["pmax"] = o.pmax;
    auto bh = bateman_horn_partial(sys, std::uint32_t(o.pmax), o.exec());
    Artifact a = scalar(jld(bh.value));
    a.data = {{"value", jld(bh.value)}};
    a.header = {"p", "factor"};
    for (auto& [p, f] : bh.factors) {
        a.data["factors"].push_back({p, jrat(f)});
        a.rows.push_back({json(p), jrat(f)});
    }
    return a;
}

Artifact density_vachms(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    const i128 D = resolve_D(o, sys, in);
    SignVector s = o.sign.empty() ? SignVector(sys.R(), 1) : parse_sign_vector(o.sign, sys.R());
    WzSpec wz = build_wz(o.z, o.level);
    ProfileParams pp;
    pp.R = sys.R();
    pp.D = D;
    pp.s = 1;
    for (int v : s) pp.s *= v;
    pp.wz = wz;
    pp.gamma0 = gamma0_partial(D, o.z, 1'000'000);
    QuadratureSpec q;
    q.rel_tol = o.rel_tol;
    q.max_cells = o.max_cells;
    const long double P = static_cast<long double>(need(o.P, "--P", in));
    in["profile"] = o.profile;
    in["sign"] = sign_label(s);
    in["z"] = o.z;
    in["level"] = o.level;
    in["rel_tol"] = o.rel_tol;
    in["max_cells"] = o.max_cells;
    auto mt = vachms_main_term(sys, Box::unit(sys.vars()), s, wz, make_profile(o.profile, pp), P, q, o.exec());
    return scalar(jld(mt.value), {{"value", jld(mt.value)},
                                  {"integral", jld(mt.integral)},
                                  {"integral_error", jld(mt.integral_error)},
                                  {"integral_converged", mt.integral_converged},
                                  {"residue_sum", jld(mt.residue_sum)}});
}

// ---- constant ----------------------------------------------------------------------

std::vector<int> parse_T(const Options& o, json& in) {
    std::vector<int> T;
    for (i128 v : parse_list(o.T)) T.push_back(int(v));
    if (T.empty()) throw DomainError("--T is required");
    in["T"] = o.T;
    return T;
}

Artifact constant_report(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    const i128 D = resolve_D(o, sys, in);
    auto T = parse_T(o, in);
    auto ov = parse_levels(o.overrides);
    in["overrides"] = o.overrides;
    const GammaInfSpec q = quad_spec(o, in);
    const Exec ex = o.exec();
    GammaTotal tot = gamma_total(sys, D, q, T, ov, ex);
    json d;
    for (auto& e : tot.entries) {
        const std::string lab = sign_label(e.s);
        d["gamma_inf"][lab] = {{"value", jld(e.inf.value)}, {"error", jld(e.inf.error)},
                               {"mc_mean", jld(e.inf.mc_mean)}, {"mc_stderr", jld(e.inf.mc_stderr)},
                               {"mc_disagrees", e.inf.mc_disagrees}};
        for (std::size_t k = 0; k < e.est.T.size(); ++k)
            d["gamma_T"][std::to_string(e.est.T[k])][lab] = {{"raw", jrat(e.est.raw[k])},
                                                             {"normalized", jld(e.est.normalized[k])}};
        d["gamma"][lab] = {{"value", jld(e.est.gamma)}, {"model_error", jld(e.est.error)},
                           {"amplitude", jld(e.est.amplitude)}, {"envelope_monotone", e.est.envelope_monotone}};
    }
    d["gamma_total"] = {{"value", jld(tot.value)}, {"error", jld(tot.error)}};
    if (!o.B.empty()) {
        const long double B = static_cast<long double>(need(o.B, "--B", in));
        d["prediction"] = {{"B", jld(B)}, {"N", jld(predict_N(sys.n(), sys.R(), sys.d(), tot.value, B))}};
    }
    const TruncationSpec last{T.back(), ov};
    LrsResult lrs = lrs_constant(sys, D, q, last, ex);
    d["lrs"] = {{"alpha_star", jrat(lrs.inv.alpha_star)},   {"Delta", jrat(lrs.inv.Delta)},
                {"eta", jrat(lrs.inv.eta)},                 {"Gamma_factor", jld(lrs.inv.Gamma_factor)},
                {"br_order", j128(lrs.inv.br_order)},       {"fujita_product", jld(lrs.inv.fujita_product)},
                {"tau", jld(lrs.tau)},                      {"c_pred", jld(lrs.c_pred)}};
    CompareReport c = constants_compare(sys, D, q, last, ex);
    d["compare"] = {{"theorem", jld(c.theorem)}, {"lrs", jld(c.lrs)},          {"abs", jld(c.abs_diff)},
                    {"rel", jld(c.rel_diff)},    {"bound", jld(c.quad_bound)}, {"within_bound", c.within_bound}};
    if (!c.within_bound) throw InvariantFailure("theorem and LRS constants differ beyond the quadrature bound");
    Artifact a;
    a.data = d;
    a.header = {"sign", "gamma_inf", "gamma_inf_error", "gamma", "gamma_error"};
    for (auto& e : tot.entries)
        a.rows.push_back({json(sign_label(e.s)), jld(e.inf.value), jld(e.inf.error), jld(e.est.gamma), jld(e.est.error)});
    return a;
}

Artifact constant_gamma_t(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    const i128 D = resolve_D(o, sys, in);
    auto T = parse_T(o, in);
    TruncationSpec tr{T.front(), parse_levels(o.overrides)};
    in["overrides"] = o.overrides;
    in["direct"] = o.direct;
    Artifact a;
    a.header = {"sign", "gamma_T", "normalized"};
    GammaTCrt crt(sys, D, tr, o.exec());
    for (const auto& s : all_sign_vectors(sys.R())) {
        if (!o.sign.empty() && parse_sign_vector(o.sign, sys.R()) != s) continue;
        const Rational g = crt.gamma_T(s);
        if (o.direct) {
            const Rational g2 = gamma_T_direct(sys, D, s, tr, o.exec());
            if (g2 != g) throw InvariantFailure("direct and CRT truncations differ at " + sign_label(s));
        }
        const long double nrm = g.to_long_double() * crt.normalization();
        a.data[sign_label(s)] = {{"gamma_T", jrat(g)}, {"normalized", jld(nrm)}};
        a.rows.push_back({json(sign_label(s)), jrat(g), jld(nrm)});
        if (!o.sign.empty()) a.scalar = jrat(g);
    }
    return a;
}

Artifact constant_good_factor(const Options& o, json& in) {
    FormSystem sys = load_system(o, in);
    const i128 D = resolve_D(o, sys, in);
    const std::int64_t p = std::int64_t(need(o.p, "-p", in));
    in["level"] = o.level;
    auto gf = good_factor(sys, D, p, o.level, o.exec());
    const long double target = std::pow(1.0L - kronecker(D, p) / static_cast<long double>(p), -sys.R() / 2.0L);
    Artifact a;
    a.header = {"subset_mask", "factor", "scaled_deviation"};
    a.data["target"] = jld(target);
    for (std::size_t mask = 0; mask < gf.size(); ++mask) {
        const long double dev = p * std::fabs(gf[mask] - target);
        a.data["factors"].push_back({{"mask", mask}, {"factor", jld(gf[mask])}, {"scaled_deviation", jld(dev)}});
        a.rows.push_back({json(mask), jld(gf[mask]), jld(dev)});
    }
    return a;
}

// ---- equidist ----------------------------------------------------------------------

Artifact equidist_wz(const Options& o, json& in) {
    in["z"] = o.z;
    in["level"] = o.level;
    WzSpec w = build_wz(o.z, o.level);
    json d{{"W", j128(w.W)}, {"eps_tilde", jrat(w.eps_tilde)}};
    if (w.eps_bound_holds) d["eps_bound_holds"] = *w.eps_bound_holds;
    return scalar(j128(w.W), d);
}

Artifact equidist_fcount(const Options& o, json& in) {
    const i128 D = resolve_D(o, std::nullopt, in);
    in["z"] = o.z;
    return scalar(j128(f_count(D, o.z, need(o.W, "--W", in), need(o.aprime, "--residue", in),
                               need(o.Tcount, "--count-to", in), o.exec())));
}

Artifact equidist_gamma0(const Options& o, json& in) {
    const i128 D = resolve_D(o, std::nullopt, in);
    in["z"] = o.z;
    in["pmax"] = o.pmax;
    return scalar(jld(gamma0_partial(D, o.z, std::uint32_t(o.pmax))));
}

Artifact equidist_split(const Options& o, json& in) {
    const i128 D = resolve_D(o, std::nullopt, in);
    in["z"] = o.z;
    in["level"] = o.level;
    in["s"] = o.s;
    if (o.a.empty() || o.xs.empty()) throw DomainError("-a and --x are required");
    in["a"] = o.a;
    in["x"] = o.xs;
    WzSpec wz = build_wz(o.z, o.level);
    auto c = splitting_check(D, o.s, parse_list(o.a), wz, parse_list(o.xs), o.exec());
    if (!c.holds) throw InvariantFailure("splitting identity fails");
    json d{{"holds", c.holds}, {"lhs", j128(c.lhs)}, {"rhs", j128(c.rhs)}, {"indicator", c.indicator}};
    for (i128 f : c.F) d["F"].push_back(j128(f));
    return scalar(j128(c.lhs), d);
}

// ---- verify ------------------------------------------------------------------------

Artifact verify_cmd(const Options& o, json& in) {
    in["suite"] = o.suite;
    auto res = run_suite(o.suite, o.exec());
    Artifact a;
    a.header = {"suite", "check", "pass", "detail"};
    bool all = true;
    for (auto& r : res) {
        all = all && r.pass;
        a.data["checks"].push_back({{"suite", r.suite}, {"check", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        a.rows.push_back({json(r.suite), json(r.name), json(r.pass ? "PASS" : "FAIL"), json(r.detail)});
    }
    a.data["pass"] = all;
    std::ostringstream os;
    for (auto& r : res) os << (r.pass ? "PASS " : "FAIL ") << r.suite << ": " << r.name << (r.detail.empty() ? "" : "  [" + r.detail + "]") << "\n";
    std::string txt = os.str();
    if (!txt.empty()) txt.pop_back();
    a.scalar = json(txt);
    if (!all) {
        a.data["failed"] = true;
    }
    return a;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counting and leading-constant toolkit for norm forms along polynomial systems"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "seed for Monte Carlo");
    app.add_option("--budget", o.budget, "max points / residues / tree nodes per call");
    app.add_option("--out", o.out, "write the artifact here instead of stdout");
    app.add_option("--log", o.log, "append a JSON-lines run record");
    app.add_option("--format", o.format, "text|csv|json")->check(CLI::IsMember({"text", "csv", "json"}));
    app.set_version_flag("--version", CHATELET_VERSION);

    std::string chosen;
    std::function<Artifact(const Options&, json&)> run;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc,
                    std::function<Artifact(const Options&, json&)> fn) {
        CLI::App* sc = parent->add_subcommand(name, desc);
        std::string full = parent == &app ? name : parent->get_name() + " " + name;
        sc->callback([&, full, fn] {
            chosen = full;
            run = fn;
        });
        return sc;
    };
    auto sys_opts = [&](CLI::App* sc) {
        sc->add_option("--system", o.system, "system JSON file");
        sc->add_option("--D", o.D, "field discriminant parameter (overrides the system file)");
    };

    CLI::App* sym = app.add_subcommand("symbol", "local symbols")->require_subcommand(1);
    auto* h = leaf(sym, "hilbert", "Hilbert symbol (a,b)_p", symbol_hilbert);
    h->add_option("-a", o.a)->required();
    h->add_option("-b", o.b)->required();
    h->add_option("-p", o.p, "prime, or 'real'");
    auto* kr = leaf(sym, "kronecker", "Kronecker symbol (a/n)", symbol_kronecker);
    kr->add_option("-a", o.a)->required();
    kr->add_option("-n", o.n)->required();
    auto* v = leaf(sym, "vp", "p-adic valuation and unit", symbol_vp);
    v->add_option("-n", o.n)->required();
    v->add_option("-p", o.p)->required();
    auto* hp = leaf(sym, "product", "product of (a,b)_v over all places", symbol_product);
    hp->add_option("-a", o.a)->required();
    hp->add_option("-b", o.b)->required();

    CLI::App* nrm = app.add_subcommand("norm", "norms from Q(sqrt D)")->require_subcommand(1);
    auto* ni = leaf(nrm, "is", "is m a norm", norm_is);
    ni->add_option("--D", o.D)->required();
    ni->add_option("-m", o.m)->required();
    ni->add_option("--mode", o.mode, "conditions|hasse|hensel");
    auto* no = leaf(nrm, "of", "N(x + y sqrt D)", norm_of_cmd);
    no->add_option("--D", o.D)->required();
    no->add_option("-x", o.x)->required();
    no->add_option("-y", o.y)->required();

    CLI::App* cnt = app.add_subcommand("count", "lattice counts")->require_subcommand(1);
    auto count_opts = [&](CLI::App* sc) {
        sys_opts(sc);
        sc->add_option("--caps", o.caps, "z:alpha valuation caps");
        sc->add_option("--zero", o.zero, "include|exclude");
        sc->add_option("--mode", o.mode, "conditions|hasse|hensel");
    };
    auto* cN = leaf(cnt, "N", "N(B)", count_n);
    count_opts(cN);
    cN->add_option("--B", o.B)->required();
    auto* cN0 = leaf(cnt, "N0", "N_0(P)", count_n0);
    count_opts(cN0);
    cN0->add_option("--P", o.P)->required();
    auto* cm = leaf(cnt, "mobius", "Mobius descent check", count_mobius);
    sys_opts(cm);
    cm->add_option("--B", o.B)->required();
    auto* cp = leaf(cnt, "partition", "sign partition check", count_partition);
    count_opts(cp);
    cp->add_option("--P", o.P)->required();
    auto* ct = leaf(cnt, "tuples", "norm tuples in a box", count_tuples);
    ct->add_option("--D", o.D)->required();
    ct->add_option("--bounds", o.bounds, "N_1,...,N_R")->required();
    ct->add_option("--congruence", o.congruence, "index:p:alpha");

    CLI::App* den = app.add_subcommand("density", "local densities")->require_subcommand(1);
    auto* dl = leaf(den, "local", "fiber density at level m", density_local);
    sys_opts(dl);
    dl->add_option("--nu", o.nu)->required();
    dl->add_option("-p", o.p)->required();
    dl->add_option("--m", o.level);
    auto* ds = leaf(den, "sigma", "p-adic density until stable", density_sigma);
    sys_opts(ds);
    ds->add_option("--nu", o.nu)->required();
    ds->add_option("-p", o.p)->required();
    ds->add_option("--window", o.window);
    auto* dse = leaf(den, "series", "flat singular series mod W_z", density_series);
    sys_opts(dse);
    dse->add_option("--nu", o.nu)->required();
    dse->add_option("--z", o.z);
    dse->add_option("--level", o.level);
    auto* dt = leaf(den, "tail", "mass of p^k | f_i", density_tail);
    sys_opts(dt);
    dt->add_option("--form", o.form);
    dt->add_option("-p", o.p)->required();
    dt->add_option("-k", o.k);
    auto* db = leaf(den, "bh", "Bateman-Horn partial product", density_bh);
    sys_opts(db);
    db->add_option("--pmax", o.pmax);
    auto* dv = leaf(den, "vachms", "main term of the progression sum", density_vachms);
    sys_opts(dv);
    dv->add_option("--P", o.P)->required();
    dv->add_option("--profile", o.profile, "unit|zero|norm_indicator");
    dv->add_option("--sign", o.sign);
    dv->add_option("--z", o.z);
    dv->add_option("--level", o.level);
    dv->add_option("--rel-tol", o.rel_tol);
    dv->add_option("--max-cells", o.max_cells);

    CLI::App* con = app.add_subcommand("constant", "leading constant")->require_subcommand(1);
    auto* cr = leaf(con, "report", "gamma_inf, gamma_T, gamma, prediction, LRS comparison", constant_report);
    sys_opts(cr);
    cr->add_option("--T", o.T, "increasing truncation levels");
    cr->add_option("--override", o.overrides, "p:level,...");
    cr->add_option("--grid", o.grid, "grid points per axis (0 = default)");
    cr->add_option("--mc", o.mc, "Monte Carlo samples");
    cr->add_option("--B", o.B, "height for the prediction");
    auto* cg = leaf(con, "gamma-t", "truncated density per sign", constant_gamma_t);
    sys_opts(cg);
    cg->add_option("--T", o.T);
    cg->add_option("--override", o.overrides);
    cg->add_option("--sign", o.sign);
    cg->add_flag("--direct", o.direct, "also enumerate directly and compare");
    auto* cgf = leaf(con, "good-factor", "per-prime factor for each subset", constant_good_factor);
    sys_opts(cgf);
    cgf->add_option("-p", o.p)->required();
    cgf->add_option("--level", o.level);

    CLI::App* eq = app.add_subcommand("equidist", "progressions of norm values")->require_subcommand(1);
    auto* ew = leaf(eq, "wz", "W_z and eps_tilde", equidist_wz);
    ew->add_option("--z", o.z);
    ew->add_option("--level", o.level);
    auto* ef = leaf(eq, "fcount", "F count in a progression", equidist_fcount);
    ef->add_option("--D", o.D)->required();
    ef->add_option("--z", o.z);
    ef->add_option("--W", o.W)->required();
    ef->add_option("--residue", o.aprime)->required();
    ef->add_option("--count-to", o.Tcount)->required();
    auto* eg = leaf(eq, "gamma0", "gamma_0 partial product", equidist_gamma0);
    eg->add_option("--D", o.D)->required();
    eg->add_option("--z", o.z);
    eg->add_option("--pmax", o.pmax);
    auto* es = leaf(eq, "split", "exact splitting identity", equidist_split);
    es->add_option("--D", o.D)->required();
    es->add_option("--z", o.z);
    es->add_option("--level", o.level);
    es->add_option("-a", o.a)->required();
    es->add_option("--x", o.xs)->required();
    es->add_option("--s", o.s);

    auto* ver = leaf(&app, "verify", "run invariant self-checks", verify_cmd);
    ver->add_option("--suite", o.suite, "suite name or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    json inputs;
    int rc = 0;
    Artifact art;
    std::string error;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        art = run(o, inputs);
        if (art.data.contains("failed")) rc = 1;
    } catch (const InvariantFailure& e) {
        error = e.what();
        rc = 1;
    } catch (const ResourceError& e) {
        error = e.what();
        rc = 3;
    } catch (const InconclusiveError& e) {
        error = std::string(e.what()) + (e.partial.empty() ? "" : " (" + e.partial + ")");
        rc = 3;
    } catch (const std::invalid_argument& e) {  // DomainError, PreconditionError
        error = e.what();
        rc = 2;
    } catch (const std::domain_error& e) {
        error = e.what();
        rc = 2;
    } catch (const std::exception& e) {
        error = e.what();
        rc = 3;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (error.empty() || rc == 1) {
        const std::string text = render(art, o.format);
        if (!art.data.is_null()) {
            if (o.out.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(o.out, std::ios::binary);
                if (!f) {
                    std::cerr << "cannot write " << o.out << "\n";
                    return 2;
                }
                f << text;
            }
        }
    }
    if (!error.empty()) std::cerr << "error: " << error << "\n";

    if (!o.log.empty()) {
        json key{{"command", chosen}, {"inputs", inputs}, {"seed", o.seed}};
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(key.dump())));
        json rec{{"command", chosen},   {"query_hash", hash}, {"inputs", inputs},
                 {"outputs", art.data}, {"elapsed", elapsed}, {"seed", o.seed},
                 {"version", CHATELET_VERSION}, {"exit_code", rc}, {"threads", o.threads}};
        if (!error.empty()) rec["error"] = error;
        std::ofstream lf(o.log, std::ios::app);
        if (!lf) {
            std::cerr << "cannot append to " << o.log << "\n";
            return rc ? rc : 2;
        }
        lf << rec.dump() << "\n";
    }
    return rc;
}
