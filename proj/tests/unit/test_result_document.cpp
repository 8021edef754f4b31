#include <doctest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "flatpop/problem_file.hpp"
#include "flatpop/result_document.hpp"

using namespace flatpop;
using json = nlohmann::json;

namespace {

Problem interval() { return parse_problem("vars: x1\nminimize: -x1^2\nsubject_to:\n  1 - x1^2 >= 0\n"); }

json document(const Problem& p, Flavor fl, const HierarchyOptions& o) {
    return json::parse(result_document(p, run_hierarchy(p, fl, o), o));
}

// Every number is finite; non-finite values are written as null.
bool all_finite(const json& j) {
    if (j.is_number_float()) {
        return std::isfinite(j.get<double>());
    }
    if (j.is_structured()) {
        for (const auto& v : j) {
            if (!all_finite(v)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("certified document") {
    HierarchyOptions o;
    o.k_min = 1;
    const auto d = document(interval(), Flavor::putinar, o);
    CHECK(d["tool"]["name"] == "flatpop");
    CHECK(d["tool"]["schema"] == kResultSchemaVersion);
    CHECK(d["status"] == "certified");
    CHECK(d["flavor"] == "putinar");
    CHECK(d["options"]["seed"] == 0);
    CHECK(d["degrees"]["d_f"] == 1);
    REQUIRE(d["orders"].size() == 2);
    CHECK(d["orders"][0]["flat_order"].is_null());
    CHECK(d["orders"][1]["flat_order"] == 2);
    CHECK(d["orders"][1]["rank_profile"] == json::array({1, 2, 2}));
    CHECK(d["orders"][1]["moments"].size() == 5);
    CHECK(d["orders"][1]["moments"][2]["exponents"] == json::array({2}));
    const auto& c = d["certificate"];
    REQUIRE(c.is_object());
    CHECK(c["atoms"].size() == 2);
    CHECK(c["weights"].size() == 2);
    CHECK(c["rank"] == 2);
    CHECK(c["atom_checks"].size() == 2);
    CHECK(d["failure"].is_null());
    CHECK(d["problem"]["text"] == print_problem(interval()));
    CHECK(all_finite(d));
}

TEST_CASE("exhausted document has no atoms") {
    HierarchyOptions o;
    o.k_min = 1;
    o.k_max = 1;
    const auto d = document(interval(), Flavor::putinar, o);
    CHECK(d["status"] == "exhausted");
    CHECK(d["certificate"].is_null());
    CHECK(d["lower_bound"].get<double>() <= -1.0 + 1e-7);
}

TEST_CASE("unbounded relaxation is explained") {
    const auto p = parse_problem("vars: x, y\nminimize: x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1\n");
    HierarchyOptions o;
    o.k_max = 3;
    const auto d = document(p, Flavor::sos_unconstrained, o);
    CHECK(d["status"] == "solver_failed");
    CHECK(d["failure"]["status"] == "dual_infeasible_or_unbounded");
    CHECK(d["failure"]["meaning"].is_string());
    CHECK(d["orders"][0]["status"] == "dual_infeasible_or_unbounded");
    CHECK(all_finite(d));
}

TEST_CASE("documents differ only in timings") {
    HierarchyOptions o;
    o.k_min = 1;
    auto a = document(interval(), Flavor::putinar, o);
    auto b = document(interval(), Flavor::putinar, o);
    a.erase("timings");
    b.erase("timings");
    CHECK(a == b);
}

TEST_CASE("comparison document") {
    const auto cmp = compare_flavors(interval(), {Flavor::putinar, Flavor::schmudgen}, 1, 2);
    const auto d = json::parse(comparison_document(interval(), cmp));
    CHECK(d["rows"].size() == 4);
    CHECK(d["all_checks_passed"] == true);
    CHECK(d["checks"].size() >= 3);
}
