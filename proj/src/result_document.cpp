#include "flatpop/result_document.hpp"

#include <cmath>

#include <json.hpp>

#include "flatpop/problem_file.hpp"

namespace flatpop {

namespace {

using json = nlohmann::ordered_json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        a.push_back(num(x));
    }
    return a;
}

json tool() { return {{"name", "flatpop"}, {"version", FLATPOP_VERSION}, {"schema", kResultSchemaVersion}}; }

json problem_json(const Problem& prob) {
    const auto names = prob.names();
    json ineq = json::array();
    for (const auto& g : prob.inequalities) {
        ineq.push_back(to_string(g, names));
    }
    json eq = json::array();
    for (const auto& h : prob.equalities) {
        eq.push_back(to_string(h, names));
    }
    return {{"variables", names},
            {"objective", to_string(prob.objective, names)},
            {"inequalities", ineq},
            {"equalities", eq},
            {"ball_radius", prob.ball_radius ? num(*prob.ball_radius) : json(nullptr)},
            {"text", print_problem(prob)}};
}

json flatness_json(const FlatnessReport& f) {
    json tested = json::array();
    for (const auto& t : f.tested_orders) {
        tested.push_back({{"t", t.t}, {"rank_low", t.rank_low}, {"rank_high", t.rank_high}, {"flat", t.flat()}});
    }
    return {{"rank_profile", f.rank_profile},
            {"tested", tested},
            {"flat_order", f.flat_order ? json(*f.flat_order) : json(nullptr)}};
}

// [{"exponents": [...], "value": v}, ...] in graded order.
json moments_json(const OrderRecord& r) {
    if (r.moments.size() == 0) {
        return nullptr;
    }
    const auto& basis = *shared_basis(r.nvars, 2 * r.k);
    json out = json::array();
    for (Eigen::Index i = 0; i < r.moments.size(); ++i) {
        out.push_back({{"exponents", basis[static_cast<std::size_t>(i)].exponents()}, {"value", num(r.moments[i])}});
    }
    return out;
}

json order_json(const OrderRecord& r) {
    json attempts = json::array();
    for (const auto& a : r.attempts) {
        attempts.push_back({{"t", a.t},
                            {"rank", a.rank},
                            {"extracted", a.extracted},
                            {"verified", a.verified},
                            {"message", a.message}});
    }
    json o = {{"k", r.k},
              {"status", to_string(r.status)},
              {"diagnostic", r.diagnostic},
              {"primal_value", num(r.primal_value)},
              {"dual_value", num(r.dual_value)},
              {"gap", num(r.gap)},
              {"iterations", r.iterations},
              {"certificate_residual", r.certificate_residual ? num(*r.certificate_residual) : json(nullptr)},
              {"trace_phase", r.trace_phase_used}};
    if (r.flatness) {
        const auto f = flatness_json(*r.flatness);
        o["rank_profile"] = f["rank_profile"];
        o["tested_orders"] = f["tested"];
        o["flat_order"] = f["flat_order"];
    } else {
        o["rank_profile"] = nullptr;
        o["tested_orders"] = nullptr;
        o["flat_order"] = nullptr;
    }
    o["extraction_attempts"] = attempts;
    o["moments"] = moments_json(r);
    return o;
}

json certificate_json(const CertifiedResult& c) {
    json atoms = json::array();
    for (const auto& a : c.measure.atoms) {
        atoms.push_back(nums(a));
    }
    json checks = json::array();
    for (const auto& a : c.verification.atoms) {
        checks.push_back({{"objective", num(a.objective)},
                          {"objective_error", num(a.objective_error)},
                          {"inequality_values", nums(a.inequality_values)},
                          {"equality_values", nums(a.equality_values)}});
    }
    return {{"f_min", num(c.f_min)},
            {"order", c.order_k},
            {"flat_order", c.flat_t},
            {"rank", static_cast<int>(c.measure.size())},
            {"atoms", atoms},
            {"weights", nums(c.measure.weights)},
            {"extraction_residual", num(c.measure.residual)},
            {"moment_residual", num(c.verification.moment_residual)},
            {"pivots", c.measure.pivots},
            {"extraction_seed", c.measure.seed},
            {"atom_checks", checks}};
}

}  // namespace

std::string result_document(const Problem& prob, const HierarchyRun& run, const HierarchyOptions& opts,
                            int indent) {
    json doc;
    doc["tool"] = tool();
    doc["problem"] = problem_json(prob);
    doc["flavor"] = to_string(run.flavor);
    doc["options"] = {{"order_min", run.k_min},
                      {"order_max", run.k_max},
                      {"rank_tolerance", num(opts.rank_tol)},
                      {"solver_tolerance", num(opts.solver_tol)},
                      {"verify_tolerance", num(opts.verify_tol)},
                      {"seed", opts.seed},
                      {"trace_phase", opts.trace_phase}};
    doc["degrees"] = {{"d_f", run.degrees.d_f}, {"d_g", run.degrees.d_g}};
    doc["status"] = to_string(run.outcome);
    json orders = json::array();
    for (const auto& r : run.orders) {
        orders.push_back(order_json(r));
    }
    doc["orders"] = orders;

    // Best bound: the largest value among optimal orders.
    json bound = nullptr;
    for (const auto& r : run.orders) {
        if (r.status == SdpStatus::optimal && std::isfinite(r.primal_value) &&
            (bound.is_null() || r.primal_value > bound.get<double>())) {
            bound = r.primal_value;
        }
    }
    doc["lower_bound"] = bound;
    doc["certificate"] = run.certificate ? certificate_json(*run.certificate) : json(nullptr);
    if (run.failed_order) {
        std::string diagnostic;
        for (const auto& r : run.orders) {
            if (r.k == *run.failed_order) {
                diagnostic = r.diagnostic;
            }
        }
        json f = {{"order", *run.failed_order},
                  {"status", to_string(*run.failed_status)},
                  {"diagnostic", diagnostic}};
        if (*run.failed_status == SdpStatus::dual_infeasible_or_unbounded) {
            f["meaning"] = "relaxation unbounded below: its bound is -infinity";
        }
        doc["failure"] = f;
    } else {
        doc["failure"] = nullptr;
    }
    json trace = json::array();
    for (const auto& m : run.monitor_trace) {
        trace.push_back({{"k", m.k}, {"delta", num(m.delta)}});
    }
    doc["monitor"] = {{"degree", run.monitor_degree}, {"trace", trace}};
    json per_order = json::array();
    for (const auto& r : run.orders) {
        per_order.push_back({{"k", r.k}, {"seconds", num(r.seconds)}});
    }
    doc["timings"] = {{"total_seconds", num(run.seconds)}, {"orders", per_order}};
    return doc.dump(indent);
}

std::string comparison_document(const Problem& prob, const FlavorComparison& cmp, int indent) {
    json doc;
    doc["tool"] = tool();
    doc["problem"] = problem_json(prob);
    json rows = json::array();
    json timings = json::array();
    for (const auto& r : cmp.rows) {
        rows.push_back({{"flavor", to_string(r.flavor)},
                        {"k", r.k},
                        {"status", r.status ? json(to_string(*r.status)) : json("not_applicable")},
                        {"message", r.message},
                        {"value", r.status == SdpStatus::optimal ? num(r.value) : json(nullptr)},
                        {"flat", r.flat}});
        timings.push_back({{"flavor", to_string(r.flavor)}, {"k", r.k}, {"seconds", num(r.seconds)}});
    }
    doc["rows"] = rows;
    json checks = json::array();
    for (const auto& c : cmp.checks) {
        checks.push_back({{"check", c.description}, {"passed", c.passed}});
    }
    doc["checks"] = checks;
    doc["all_checks_passed"] = cmp.all_passed();
    doc["timings"] = timings;
    return doc.dump(indent);
}

}  // namespace flatpop
