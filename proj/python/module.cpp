#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flatpop/certificate.hpp"
#include "flatpop/driver.hpp"
#include "flatpop/extraction.hpp"
#include "flatpop/problem_file.hpp"
#include "flatpop/result_document.hpp"

namespace py = pybind11;
using namespace flatpop;

namespace {

std::vector<WeightedPoint> weighted(const std::vector<std::vector<double>>& points, const std::vector<double>& weights) {
    if (points.size() != weights.size()) {
        throw std::invalid_argument("points and weights differ in length");
    }
    std::vector<WeightedPoint> out;
    for (std::size_t j = 0; j < points.size(); ++j) {
        out.push_back({weights[j], points[j]});
    }
    return out;
}

py::dict flatness_dict(const FlatnessReport& f) {
    py::list tested;
    for (const auto& t : f.tested_orders) {
        py::dict d;
        d["t"] = t.t;
        d["rank_low"] = t.rank_low;
        d["rank_high"] = t.rank_high;
        d["flat"] = t.flat();
        tested.append(d);
    }
    py::dict d;
    d["rank_profile"] = f.rank_profile;
    d["tested_orders"] = tested;
    d["flat_order"] = f.flat_order ? py::cast(*f.flat_order) : py::none();
    return d;
}

HierarchyOptions hierarchy_options(std::optional<int> k_min, std::optional<int> k_max, double rank_tol,
                                   double solver_tol, double verify_tol, std::uint64_t seed,
                                   std::optional<int> monitor_degree, bool trace_phase) {
    HierarchyOptions o;
    o.k_min = k_min;
    o.k_max = k_max;
    o.rank_tol = rank_tol;
    o.solver_tol = solver_tol;
    o.verify_tol = verify_tol;
    o.seed = seed;
    o.monitor_degree = monitor_degree;
    o.trace_phase = trace_phase;
    return o;
}

}  // namespace

PYBIND11_MODULE(_flatpop, m) {
    m.doc() = "Polynomial optimization with moment relaxations and flat-truncation certificates";
    m.attr("__version__") = FLATPOP_VERSION;

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ExtractionError>(m, "ExtractionError", PyExc_RuntimeError);

    py::class_<Polynomial>(m, "Polynomial")
        .def(py::init([](const std::string& text, int nvars) { return parse_polynomial(text, nvars); }),
             py::arg("text"), py::arg("nvars"))
        .def_property_readonly("nvars", &Polynomial::nvars)
        .def_property_readonly("degree", &Polynomial::degree)
        .def("__call__", [](const Polynomial& p, const std::vector<double>& x) { return p.evaluate(x); })
        .def("derivative", [](const Polynomial& p, int i) { return partial_derivative(p, i); }, py::arg("i"))
        .def("terms",
             [](const Polynomial& p) {
                 py::dict d;
                 for (const auto& [mono, c] : p.terms()) {
                     d[py::tuple(py::cast(mono.exponents()))] = c;
                 }
                 return d;
             })
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self * double())
        .def("__rmul__", [](const Polynomial& p, double s) { return p * s; }, py::is_operator())
        .def(-py::self)
        .def(py::self == py::self)
        .def("__str__", [](const Polynomial& p) { return to_string(p); })
        .def("__repr__", [](const Polynomial& p) { return "Polynomial('" + to_string(p) + "')"; });

    py::enum_<Flavor>(m, "Flavor")
        .value("putinar", Flavor::putinar)
        .value("schmudgen", Flavor::schmudgen)
        .value("sos_unconstrained", Flavor::sos_unconstrained)
        .value("gradient", Flavor::gradient)
        .value("jacobian_single", Flavor::jacobian_single);
    m.def("parse_flavor", &parse_flavor, py::arg("name"));

    py::class_<Problem>(m, "Problem")
        .def(py::init([](const Polynomial& f, std::vector<Polynomial> g, std::vector<Polynomial> h,
                         std::optional<double> ball_radius) {
                 Problem p(f, std::move(g), std::move(h));
                 p.ball_radius = ball_radius;
                 p.validate();
                 return p;
             }),
             py::arg("objective"), py::arg("inequalities") = std::vector<Polynomial>{},
             py::arg("equalities") = std::vector<Polynomial>{}, py::arg("ball_radius") = py::none())
        .def_readonly("objective", &Problem::objective)
        .def_readonly("inequalities", &Problem::inequalities)
        .def_readonly("equalities", &Problem::equalities)
        .def_readonly("ball_radius", &Problem::ball_radius)
        .def_property_readonly("nvars", &Problem::nvars)
        .def_property_readonly("variables", &Problem::names)
        .def("minimum_order", [](const Problem& p, Flavor f) { return minimum_order(p, f); }, py::arg("flavor"))
        .def("__str__", [](const Problem& p) { return print_problem(p); });
    m.def("parse_problem", [](const std::string& text) { return parse_problem(text); }, py::arg("text"));
    m.def("print_problem", &print_problem, py::arg("problem"));

    m.def(
        "atomic_tms",
        [](const std::vector<std::vector<double>>& points, const std::vector<double>& weights, int half_degree) {
            return atomic_tms(weighted(points, weights), half_degree).values();
        },
        py::arg("points"), py::arg("weights"), py::arg("half_degree"),
        "Moments sum_j w_j [u_j]_{2k} in graded-lex order.");
    m.def(
        "monomials",
        [](int nvars, int max_degree) {
            std::vector<std::vector<int>> out;
            for (const auto& mono : shared_basis(nvars, max_degree)->monomials()) {
                out.push_back(mono.exponents());
            }
            return out;
        },
        py::arg("nvars"), py::arg("max_degree"), "Exponent vectors of the graded-lex basis.");
    m.def(
        "moment_matrix",
        [](const Eigen::VectorXd& y, int nvars, int half_degree, int t) {
            return moment_matrix(Tms(nvars, half_degree, y), t);
        },
        py::arg("moments"), py::arg("nvars"), py::arg("half_degree"), py::arg("t"));
    m.def(
        "localizing_matrix",
        [](const Eigen::VectorXd& y, int nvars, int half_degree, const Polynomial& h, int order) {
            return assemble_localizing(Tms(nvars, half_degree, y), h, order).entries;
        },
        py::arg("moments"), py::arg("nvars"), py::arg("half_degree"), py::arg("h"), py::arg("order"));
    m.def("numerical_rank", &numerical_rank, py::arg("matrix"), py::arg("eps") = kDefaultRankTol);
    m.def(
        "check_flat_truncation",
        [](const Eigen::VectorXd& y, int nvars, int half_degree, int d_f, int d_g, double eps) {
            return flatness_dict(check_flat_truncation(Tms(nvars, half_degree, y), d_f, d_g, eps));
        },
        py::arg("moments"), py::arg("nvars"), py::arg("half_degree"), py::arg("d_f"), py::arg("d_g"),
        py::arg("eps") = kDefaultRankTol);
    m.def(
        "extract_atoms",
        [](const Eigen::VectorXd& y, int nvars, int half_degree, int rank, double pivot_tol, std::uint64_t seed) {
            ExtractionOptions o;
            o.pivot_tol = pivot_tol;
            o.seed = seed;
            const auto a = extract_atoms(Tms(nvars, half_degree, y), rank, o);
            py::dict d;
            d["atoms"] = a.atoms;
            d["weights"] = a.weights;
            d["residual"] = a.residual;
            d["pivots"] = a.pivots;
            return d;
        },
        py::arg("moments"), py::arg("nvars"), py::arg("half_degree"), py::arg("rank"),
        py::arg("pivot_tol") = ExtractionOptions{}.pivot_tol, py::arg("seed") = 0);

    m.def(
        "solve_relaxation",
        [](const Problem& p, Flavor flavor, int k, double tol, std::uint64_t seed) {
            const auto ms = build_relaxation(p, flavor, k);
            SdpOptions o;
            o.gap_tol = tol;
            o.feas_tol = tol;
            o.seed = seed;
            const auto sol = solve(ms.to_sdp(), o);
            py::dict d;
            d["status"] = to_string(sol.status);
            d["diagnostic"] = sol.diagnostic;
            d["primal_value"] = sol.primal_value;
            d["dual_value"] = sol.dual_value;
            d["iterations"] = sol.iterations;
            d["moments"] = sol.y;
            if (sol.status == SdpStatus::optimal) {
                const auto cert = extract_dual_certificate(sol, ms);
                d["certificate_residual"] = cert.residual;
                py::list grams;
                for (const auto& g : cert.grams) {
                    grams.append(py::make_tuple(g.label, g.matrix));
                }
                d["grams"] = grams;
            }
            return d;
        },
        py::arg("problem"), py::arg("flavor"), py::arg("k"), py::arg("tol") = 1e-8, py::arg("seed") = 0,
        "Solve one moment relaxation; returns status, values, moments and Gram matrices.");

    m.def(
        "run_document",
        [](const Problem& p, Flavor flavor, std::optional<int> k_min, std::optional<int> k_max, double rank_tol,
           double solver_tol, double verify_tol, std::uint64_t seed, std::optional<int> monitor_degree,
           bool trace_phase) {
            const auto o = hierarchy_options(k_min, k_max, rank_tol, solver_tol, verify_tol, seed, monitor_degree,
                                             trace_phase);
            HierarchyRun run;
            {
                py::gil_scoped_release release;
                run = run_hierarchy(p, flavor, o);
            }
            return result_document(p, run, o);
        },
        py::arg("problem"), py::arg("flavor") = Flavor::putinar, py::arg("k_min") = py::none(),
        py::arg("k_max") = py::none(), py::arg("rank_tol") = kDefaultRankTol, py::arg("solver_tol") = 1e-8,
        py::arg("verify_tol") = 1e-6, py::arg("seed") = 0, py::arg("monitor_degree") = py::none(),
        py::arg("trace_phase") = true);

    m.def(
        "compare_document",
        [](const Problem& p, const std::vector<Flavor>& flavors, int k_lo, int k_hi) {
            FlavorComparison cmp;
            {
                py::gil_scoped_release release;
                cmp = compare_flavors(p, flavors, k_lo, k_hi);
            }
            return comparison_document(p, cmp);
        },
        py::arg("problem"), py::arg("flavors"), py::arg("k_lo"), py::arg("k_hi"));
}
