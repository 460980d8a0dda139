#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chatelet/errors.hpp"
#include "chatelet/forms.hpp"
#include "chatelet/lattice_count.hpp"
#include "chatelet/leading_constant.hpp"
#include "chatelet/local_arith.hpp"
#include "chatelet/quad_norms.hpp"
#include "chatelet/verify.hpp"

namespace py = pybind11;
using namespace chatelet;

// Python int <-> __int128, through the decimal string when it leaves int64.
namespace pybind11::detail {
template <>
struct type_caster<__int128> {
    PYBIND11_TYPE_CASTER(__int128, const_name("int"));

    bool load(handle src, bool) {
        if (!src || !PyLong_Check(src.ptr())) return false;
        int overflow = 0;
        long long v = PyLong_AsLongLongAndOverflow(src.ptr(), &overflow);
        if (!overflow) {
            if (v == -1 && PyErr_Occurred()) {
                PyErr_Clear();
                return false;
            }
            value = v;
            return true;
        }
        try {
            value = parse_i128(std::string(py::str(src)));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }

    static handle cast(__int128 v, return_value_policy, handle) {
        if (v >= INT64_MIN && v <= INT64_MAX) return PyLong_FromLongLong(static_cast<long long>(v));
        std::string s = chatelet::to_string(v);
        return PyLong_FromString(s.c_str(), nullptr, 10);
    }
};
}  // namespace pybind11::detail

namespace {

Exec make_exec(unsigned threads, std::uint64_t budget) {
    Exec e;
    if (threads) e.threads = threads;
    if (budget) e.budget = budget;
    return e;
}

py::tuple as_pair(const Rational& r) { return py::make_tuple(r.num(), r.den()); }

}  // namespace

PYBIND11_MODULE(_chatelet, m) {
    m.doc() = "Exact local arithmetic, norm tests, point counts and leading constants.";

    static py::exception<ResourceError> resource_exc(m, "ResourceError", PyExc_RuntimeError);
    static py::exception<InconclusiveError> inconclusive_exc(m, "InconclusiveError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ResourceError& e) {
            resource_exc(e.what());
        } catch (const InconclusiveError& e) {
            inconclusive_exc(e.what());
        }
    });
    // invalid_argument already maps to ValueError; domain_error does too.

    m.def("kronecker", &kronecker, py::arg("a"), py::arg("n"));
    m.def(
        "hilbert", [](i128 a, i128 b, i128 p) { return hilbert(a, b, p); }, py::arg("a"), py::arg("b"),
        py::arg("p"), "Hilbert symbol (a, b)_p; p = 0 is the real place.");
    m.def("hilbert_product", &hilbert_product, py::arg("a"), py::arg("b"));
    m.def("hensel_conic_soluble", &hensel_conic_soluble, py::arg("a"), py::arg("b"), py::arg("p"));
    m.def(
        "vp",
        [](i128 n, i128 p) {
            auto s = vp(n, p);
            return py::make_tuple(s.exponent, s.unit);
        },
        py::arg("n"), py::arg("p"));

    m.def(
        "is_norm",
        [](i128 D, i128 value, const std::string& mode) {
            return is_norm(QuadraticField(D), value, parse_norm_mode(mode));
        },
        py::arg("D"), py::arg("m"), py::arg("mode") = "hasse");

    m.def(
        "count_N",
        [](const std::string& system_json, i128 D, i128 B, unsigned threads, std::uint64_t budget) {
            CountQuery q{FormSystem::from_json_text(system_json), QuadraticField(D), B};
            CountResult r;
            {
                py::gil_scoped_release release;
                r = count_N(q, make_exec(threads, budget));
            }
            py::dict out;
            out["value"] = r.value;
            out["points_scanned"] = r.points_scanned;
            out["radius"] = r.radius;
            return out;
        },
        py::arg("system_json"), py::arg("D"), py::arg("B"), py::arg("threads") = 0, py::arg("budget") = 0);

    m.def(
        "gamma_T",
        [](const std::string& system_json, i128 D, const std::string& signs, int T,
           const std::map<std::int64_t, int>& levels, unsigned threads, std::uint64_t budget) {
            FormSystem sys = FormSystem::from_json_text(system_json);
            SignVector s = parse_sign_vector(signs, sys.R());
            GammaTCrt crt(sys, D, TruncationSpec(T, levels), make_exec(threads, budget));
            py::dict out;
            out["gamma_T"] = as_pair(crt.gamma_T(s));
            out["normalization"] = static_cast<double>(crt.normalization());
            return out;
        },
        py::arg("system_json"), py::arg("D"), py::arg("signs"), py::arg("T") = 4,
        py::arg("levels") = std::map<std::int64_t, int>{}, py::arg("threads") = 0, py::arg("budget") = 0);

    m.def(
        "constants_compare",
        [](const std::string& system_json, i128 D, int T, const std::map<std::int64_t, int>& levels,
           unsigned threads, std::uint64_t budget) {
            FormSystem sys = FormSystem::from_json_text(system_json);
            CompareReport r;
            {
                py::gil_scoped_release release;
                r = constants_compare(sys, D, GammaInfSpec{}, TruncationSpec(T, levels), make_exec(threads, budget));
            }
            py::dict out;
            out["theorem"] = static_cast<double>(r.theorem);
            out["lrs"] = static_cast<double>(r.lrs);
            out["abs_diff"] = static_cast<double>(r.abs_diff);
            out["rel_diff"] = static_cast<double>(r.rel_diff);
            out["within_bound"] = r.within_bound;
            return out;
        },
        py::arg("system_json"), py::arg("D"), py::arg("T") = 4, py::arg("levels") = std::map<std::int64_t, int>{},
        py::arg("threads") = 0, py::arg("budget") = 0);

    m.def("zeta", [](int s) { return static_cast<double>(zeta(s)); }, py::arg("s"));
    m.def("brsub_order", &brsub_order, py::arg("d"), py::arg("R"));

    m.def(
        "verify",
        [](const std::string& suite) {
            py::list out;
            for (const auto& c : run_suite(suite)) {
                py::dict d;
                d["suite"] = c.suite;
                d["name"] = c.name;
                d["pass"] = c.pass;
                d["detail"] = c.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("suite") = "all");
    m.def("suite_names", &suite_names);
}
