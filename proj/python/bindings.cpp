#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quotver/parse.hpp"
#include "quotver/scenario.hpp"
#include "quotver/singularity.hpp"

namespace py = pybind11;
using namespace qv;

namespace {

std::string str_of(const py::handle& x) { return py::str(x).cast<std::string>(); }

// Coefficients given as int, str ("1/3") or fractions.Fraction.
std::vector<mpq_class> rationals(const py::sequence& cs) {
    std::vector<mpq_class> out;
    for (const auto& c : cs) {
        mpq_class q(str_of(c));
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

SingularityType make_type(long long r, const std::vector<long long>& b) {
    std::vector<long long> w;
    for (long long x : b) w.push_back(((x % r) + r) % r);
    return SingularityType(r, w);
}

std::vector<std::string> tau_strings(const Chart& c) {
    std::vector<std::string> out;
    for (const auto& t : c.action.tau()) out.push_back(t.str());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact verification of quotient singularity constructions";

    py::register_exception<ScenarioInputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<StepResult>(m, "Step")
        .def_readonly("id", &StepResult::id)
        .def_readonly("kind", &StepResult::kind)
        .def_property_readonly("status", [](const StepResult& s) { return to_string(s.status); })
        .def_readonly("citation", &StepResult::citation)
        .def_readonly("detail", &StepResult::detail)
        .def("__repr__", [](const StepResult& s) { return "<Step " + s.id + " " + to_string(s.status) + ">"; });

    py::class_<Report>(m, "Report")
        .def_readonly("scenario", &Report::scenario)
        .def_readonly("title", &Report::title)
        .def_readonly("steps", &Report::steps)
        .def_readonly("verdict", &Report::verdict)
        .def_readonly("expected_verdict", &Report::expected_verdict)
        .def_readonly("limit_seconds", &Report::limit_seconds)
        .def_readonly("seconds", &Report::seconds)
        .def_property_readonly("passed", &Report::passed)
        .def_property_readonly("exit_code", &Report::exit_code)
        .def("json", &Report::json, py::arg("with_timing") = false)
        .def("table", &Report::table)
        .def("__repr__", [](const Report& r) {
            return "<Report " + r.scenario + " " + (r.passed() ? "PASS" : "FAIL") + " verdict=" + r.verdict + ">";
        });

    m.def(
        "verify",
        [](const std::string& path, const std::string& chart, std::optional<int> max_scan_degree) {
            RunOptions o;
            o.chart = chart;
            o.max_scan_degree = max_scan_degree;
            py::gil_scoped_release release;
            return run_scenario_file(path, o);
        },
        py::arg("path"), py::arg("chart") = "", py::arg("max_scan_degree") = py::none(),
        "Run a scenario file and return its report.");

    m.def(
        "summary",
        [](const std::string& path) {
            auto s = scenario_summary(path);
            py::dict d;
            d["id"] = s.id;
            d["title"] = s.title;
            d["path"] = s.path;
            d["base"] = s.base;
            return d;
        },
        py::arg("path"));

    m.def("explain", &explain_step, py::arg("path"), py::arg("step_id"));

    m.def(
        "reid_tai",
        [](long long r, const std::vector<long long>& b) {
            auto res = reid_tai(make_type(r, b));
            return py::make_tuple(to_string(res.verdict), res.sums);
        },
        py::arg("r"), py::arg("weights"), "Reid-Tai verdict and the sums for i = 1..r-1.");

    m.def(
        "reid_tai_pair",
        [](long long r, const std::vector<long long>& b, const py::sequence& c) {
            auto res = reid_tai_pair(make_type(r, b), rationals(c));
            std::vector<std::string> sums;
            for (const auto& s : res.sums) sums.push_back(s.get_str());
            return py::make_tuple(res.ok, res.reason, sums);
        },
        py::arg("r"), py::arg("weights"), py::arg("coefficients"));

    m.def(
        "equivalent_types",
        [](long long r, const std::vector<long long>& a, const std::vector<long long>& b) {
            return make_type(r, a).equivalent(make_type(r, b));
        },
        py::arg("r"), py::arg("a"), py::arg("b"), "Same cyclic quotient up to generator change and order.");

    py::class_<Chart>(m, "Chart")
        .def_readonly("name", &Chart::name)
        .def_readonly("stage", &Chart::stage)
        .def_readonly("parent", &Chart::parent)
        .def_readonly("provenance", &Chart::provenance)
        .def_property_readonly("p", [](const Chart& c) { return c.ring()->p(); })
        .def_property_readonly("coords", [](const Chart& c) { return c.ring()->names(); })
        .def_property_readonly("tau", &tau_strings)
        .def_property_readonly("divisors",
                               [](const Chart& c) {
                                   std::map<std::string, std::string> d;
                                   for (const auto& [k, f] : c.divisors) d[k] = f.str();
                                   return d;
                               })
        .def("sigma", [](const Chart& c, const std::string& f) { return c.action.sigma(parse_frac(c.ring(), f)).str(); })
        .def("I", [](const Chart& c, const std::string& f) { return c.action.I(parse_frac(c.ring(), f)).str(); })
        .def("trace", [](const Chart& c, const std::string& f) { return c.action.trace(parse_frac(c.ring(), f)).str(); })
        .def("norm", [](const Chart& c, const std::string& f) { return c.action.norm(parse_frac(c.ring(), f)).str(); })
        .def("equal",
             [](const Chart& c, const std::string& a, const std::string& b) {
                 return parse_frac(c.ring(), a).equals(parse_frac(c.ring(), b));
             })
        .def("check_order", [](const Chart& c) {
            py::gil_scoped_release release;
            return c.action.check_order();
        })
        .def("__repr__", [](const Chart& c) { return "<Chart " + c.name + " stage " + std::to_string(c.stage) + ">"; });

    m.def("charts", &scenario_charts, py::arg("path"), "Chart tree of a scenario, without running checks.");
}
