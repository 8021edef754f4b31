// flatpop: certify global minima of polynomial problems with the moment hierarchy.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "flatpop/driver.hpp"
#include "flatpop/problem_file.hpp"
#include "flatpop/result_document.hpp"

namespace {

enum Exit { kCertified = 0, kUsage = 1, kExhausted = 2, kSolverFailed = 3 };

std::string read_input(const std::string& path) {
    if (path == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text << "\n";
}

void apply_thread_limit() {
    if (const char* env = std::getenv("FLATPOP_NUM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            Eigen::setNbThreads(n);
        }
    }
}

std::vector<flatpop::Flavor> applicable_flavors(const flatpop::Problem& prob) {
    using flatpop::Flavor;
    std::vector<Flavor> out{Flavor::putinar};
    const auto gs = prob.effective_inequalities();
    if (gs.size() <= flatpop::kMaxSchmudgenConstraints) {
        out.push_back(Flavor::schmudgen);
    }
    if (gs.empty() && prob.equalities.empty()) {
        if (prob.objective.degree() % 2 == 0) {
            out.push_back(Flavor::sos_unconstrained);
        }
        out.push_back(Flavor::gradient);
    }
    if (gs.size() == 1 && prob.equalities.empty()) {
        out.push_back(Flavor::jacobian_single);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global polynomial optimization with flat-truncation certificates"};
    app.set_version_flag("--version", std::string(FLATPOP_VERSION));

    std::string input;
    std::string flavor_name = "putinar";
    std::optional<int> order_min;
    std::optional<int> order_max;
    double rank_tol = flatpop::kDefaultRankTol;
    double solver_tol = 1e-8;
    double verify_tol = 1e-6;
    std::uint64_t seed = 0;
    std::optional<int> monitor_degree;
    bool compare = false;
    bool no_trace_phase = false;
    std::string export_path;
    std::string out_path;

    app.add_option("problem", input, "Problem file ('-' reads standard input)")->required();
    app.add_option("--flavor", flavor_name, "Relaxation flavor")
        ->check(CLI::IsMember({"putinar", "schmudgen", "sos", "gradient", "jacobian"}))
        ->capture_default_str();
    app.add_option("--order-min", order_min, "First relaxation order k (default: smallest admissible)");
    app.add_option("--order-max", order_max, "Last relaxation order k (default: order-min + 4)");
    app.add_option("--rank-tol", rank_tol, "Relative eigenvalue threshold of numerical rank")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--solver-tol", solver_tol, "Gap and feasibility tolerance of the SDP solver")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--verify-tol", verify_tol, "Tolerance for checking extracted minimizers")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", seed, "Seed for the solver start and the extraction")->capture_default_str();
    app.add_option("--monitor-degree", monitor_degree, "Half degree t0 of the monitored moment truncation");
    app.add_flag("--compare", compare, "Tabulate bounds of every applicable flavor instead of certifying");
    app.add_flag("--no-trace-phase", no_trace_phase, "Do not re-solve for a minimum-trace optimizer");
    app.add_option("--export-sdp", export_path, "Write the first relaxation in SDPA sparse format");
    app.add_option("--out", out_path, "Result document path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    apply_thread_limit();
    try {
        const std::string text = read_input(input);
        flatpop::Problem prob = [&] {
            try {
                return flatpop::parse_problem(text);
            } catch (const flatpop::ParseError& e) {
                throw std::runtime_error(input + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                                         ": " + e.detail());
            }
        }();
        const flatpop::Flavor flavor = flatpop::parse_flavor(flavor_name);

        flatpop::HierarchyOptions opts;
        opts.k_min = order_min;
        opts.k_max = order_max;
        opts.rank_tol = rank_tol;
        opts.solver_tol = solver_tol;
        opts.verify_tol = verify_tol;
        opts.seed = seed;
        opts.monitor_degree = monitor_degree;
        opts.trace_phase = !no_trace_phase;

        if (compare) {
            const auto flavors = applicable_flavors(prob);
            const int lo = order_min.value_or(flatpop::minimum_order(prob, flatpop::Flavor::putinar));
            const int hi = order_max.value_or(lo + 2);
            if (hi < lo) {
                throw std::invalid_argument("--order-max is below --order-min");
            }
            const auto cmp = flatpop::compare_flavors(prob, flavors, lo, hi, opts);
            write_output(out_path, flatpop::comparison_document(prob, cmp));
            return cmp.all_passed() ? kCertified : kExhausted;
        }

        if (!export_path.empty()) {
            const int k = order_min.value_or(flatpop::minimum_order(prob, flavor));
            std::ofstream out(export_path);
            if (!out) {
                throw std::runtime_error("cannot write '" + export_path + "'");
            }
            flatpop::write_sdpa(flatpop::build_relaxation(prob, flavor, k).to_sdp(), out);
        }

        const auto run = flatpop::run_hierarchy(prob, flavor, opts);
        write_output(out_path, flatpop::result_document(prob, run, opts));
        switch (run.outcome) {
            case flatpop::RunOutcome::certified: return kCertified;
            case flatpop::RunOutcome::exhausted: return kExhausted;
            case flatpop::RunOutcome::solver_failed: return kSolverFailed;
        }
        return kSolverFailed;
    } catch (const std::exception& e) {
        std::cerr << "flatpop: " << e.what() << "\n";
        return kUsage;
    }
}
