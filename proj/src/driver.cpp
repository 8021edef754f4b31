#include "flatpop/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "flatpop/certificate.hpp"

namespace flatpop {

std::string to_string(RunOutcome o) {
    switch (o) {
        case RunOutcome::certified: return "certified";
        case RunOutcome::exhausted: return "exhausted";
        case RunOutcome::solver_failed: return "solver_failed";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

SdpOptions solver_options(const HierarchyOptions& opts) {
    SdpOptions s;
    s.gap_tol = opts.solver_tol;
    s.feas_tol = opts.solver_tol;
    s.seed = opts.seed;
    s.max_iter = opts.max_iter;
    return s;
}

// Tries every flat order of the report, smallest first.
std::optional<CertifiedResult> certify(const Problem& prob, const Tms& y, const FlatnessReport& flat,
                                       double f_star, const HierarchyOptions& opts,
                                       std::vector<ExtractionAttempt>& attempts) {
    for (int t : flat.flat_orders()) {
        ExtractionAttempt at;
        at.t = t;
        at.rank = flat.rank_profile[static_cast<std::size_t>(t)];
        const Tms z = y.truncate(t);
        try {
            ExtractionOptions eo;
            eo.seed = opts.seed;
            AtomicMeasure m = extract_atoms(z, at.rank, eo);
            at.extracted = true;
            VerificationReport rep = verify_atoms(m, prob, z, f_star, opts.verify_tol);
            at.verified = rep.passed;
            if (!rep.passed) {
                at.message = rep.failures.front();
                attempts.push_back(at);
                continue;
            }
            attempts.push_back(at);
            return CertifiedResult{std::move(m), std::move(rep), f_star, y.half_degree(), t};
        } catch (const ExtractionError& e) {
            at.message = e.what();
            attempts.push_back(at);
        }
    }
    return std::nullopt;
}

}  // namespace

HierarchyRun run_hierarchy(const Problem& prob, Flavor flavor, const HierarchyOptions& opts) {
    const auto start = Clock::now();
    prob.validate();
    HierarchyRun run;
    run.flavor = flavor;
    run.degrees = degree_integers(prob, flavor);
    const int kmin_auto = minimum_order(prob, flavor);
    run.k_min = opts.k_min.value_or(kmin_auto);
    run.k_max = opts.k_max.value_or(run.k_min + 4);
    if (run.k_min < kmin_auto) {
        throw std::invalid_argument("order " + std::to_string(run.k_min) + " is below the minimum order " +
                                    std::to_string(kmin_auto) + " of the " + to_string(flavor) + " relaxation");
    }
    if (run.k_max < run.k_min) {
        throw std::invalid_argument("maximum order " + std::to_string(run.k_max) + " is below the minimum order " +
                                    std::to_string(run.k_min));
    }
    const SdpOptions sopts = solver_options(opts);
    std::map<int, Eigen::VectorXd> moments;
    int r_guess = 1;
    bool any_bounded = false;
    bool hard_failure = false;

    for (int k = run.k_min; k <= run.k_max; ++k) {
        const auto t0 = Clock::now();
        OrderRecord rec;
        rec.k = k;
        const MomentSdp ms = build_relaxation(prob, flavor, k);
        const SdpSolution sol = solve(ms.to_sdp(), sopts);
        rec.status = sol.status;
        rec.diagnostic = sol.diagnostic;
        rec.primal_value = sol.primal_value;
        rec.dual_value = sol.dual_value;
        rec.gap = sol.gap;
        rec.iterations = sol.iterations;
        if (sol.status != SdpStatus::optimal) {
            rec.seconds = seconds_since(t0);
            run.orders.push_back(std::move(rec));
            // An unbounded relaxation is a valid (-infinity) bound; higher
            // orders may still be bounded.
            if (sol.status == SdpStatus::dual_infeasible_or_unbounded) {
                if (!run.failed_order) {
                    run.failed_order = k;
                    run.failed_status = sol.status;
                }
                continue;
            }
            run.failed_order = k;
            run.failed_status = sol.status;
            hard_failure = true;
            break;
        }
        any_bounded = true;
        rec.certificate_residual = extract_dual_certificate(sol, ms).residual;
        Tms y = ms.moments(sol.y);
        moments.emplace(k, sol.y);
        FlatnessReport flat = check_flat_truncation(y, run.degrees.d_f, run.degrees.d_g, opts.rank_tol);
        if (!flat.flat_order && opts.trace_phase) {
            const double bound = sol.primal_value + 1e-7 * (1.0 + std::abs(sol.primal_value));
            const SdpSolution low = solve(ms.to_trace_sdp(bound), sopts);
            if (low.status == SdpStatus::optimal) {
                Tms y2 = ms.moments(low.y);
                FlatnessReport flat2 = check_flat_truncation(y2, run.degrees.d_f, run.degrees.d_g, opts.rank_tol);
                if (flat2.flat_order) {
                    y = std::move(y2);
                    flat = std::move(flat2);
                    rec.trace_phase_used = true;
                }
            }
        }
        std::optional<CertifiedResult> cert;
        if (flat.flat_order) {
            cert = certify(prob, y, flat, sol.primal_value, opts, rec.attempts);
            r_guess = flat.rank_profile[static_cast<std::size_t>(*flat.flat_order)];
        }
        rec.flatness = std::move(flat);
        rec.moments = y.values();
        rec.nvars = y.nvars();
        rec.seconds = seconds_since(t0);
        run.orders.push_back(std::move(rec));
        if (cert) {
            run.outcome = RunOutcome::certified;
            run.certificate = std::move(cert);
            break;
        }
    }

    if (run.outcome != RunOutcome::certified) {
        if (hard_failure || !any_bounded) {
            run.outcome = RunOutcome::solver_failed;
        } else {
            run.outcome = RunOutcome::exhausted;
            run.failed_order.reset();
            run.failed_status.reset();
        }
    } else {
        run.failed_order.reset();
        run.failed_status.reset();
    }

    run.monitor_degree = opts.monitor_degree.value_or(
        std::max(run.degrees.d_f, run.degrees.d_g + r_guess - 1));
    const auto len = static_cast<Eigen::Index>(basis_size(prob.nvars(), 2 * run.monitor_degree));
    for (auto it = moments.begin(); it != moments.end(); ++it) {
        const auto next = std::next(it);
        if (next == moments.end() || next->first != it->first + 1) {
            continue;
        }
        if (it->first < run.monitor_degree) {
            continue;
        }
        const double delta = (next->second.head(len) - it->second.head(len)).norm();
        run.monitor_trace.push_back({next->first, delta});
    }
    run.seconds = seconds_since(start);
    return run;
}

bool FlavorComparison::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

FlavorComparison compare_flavors(const Problem& prob, const std::vector<Flavor>& flavors, int k_lo, int k_hi,
                                 const HierarchyOptions& opts) {
    FlavorComparison out;
    const SdpOptions sopts = solver_options(opts);
    std::map<std::pair<Flavor, int>, double> values;
    for (Flavor fl : flavors) {
        for (int k = k_lo; k <= k_hi; ++k) {
            ComparisonRow row;
            row.flavor = fl;
            row.k = k;
            const auto t0 = Clock::now();
            try {
                const MomentSdp ms = build_relaxation(prob, fl, k);
                const SdpSolution sol = solve(ms.to_sdp(), sopts);
                row.status = sol.status;
                row.message = sol.diagnostic;
                row.value = sol.primal_value;
                if (sol.status == SdpStatus::optimal) {
                    const auto d = degree_integers(prob, fl);
                    if (k >= std::max(d.d_f, d.d_g)) {
                        row.flat = check_flat_truncation(ms.moments(sol.y), d.d_f, d.d_g, opts.rank_tol)
                                       .flat_order.has_value();
                    }
                    values[{fl, k}] = sol.primal_value;
                }
            } catch (const std::exception& e) {
                row.message = e.what();
            }
            row.seconds = seconds_since(t0);
            out.rows.push_back(std::move(row));
        }
    }

    auto value = [&](Flavor fl, int k) -> std::optional<double> {
        const auto it = values.find({fl, k});
        if (it == values.end()) {
            return std::nullopt;
        }
        return it->second;
    };
    auto describe = [](const std::string& what, int k, double a, double b) {
        std::ostringstream s;
        s << what << " at k=" << k << ": " << a << " vs " << b;
        return s.str();
    };
    for (int k = k_lo + 1; k <= k_hi; ++k) {
        const auto prev = value(Flavor::putinar, k - 1);
        const auto cur = value(Flavor::putinar, k);
        if (prev && cur) {
            out.checks.push_back({describe("putinar nondecreasing", k, *prev, *cur), *cur >= *prev - kDominanceTol});
        }
    }
    const bool single = prob.effective_inequalities().size() <= 1;
    for (int k = k_lo; k <= k_hi; ++k) {
        const auto p = value(Flavor::putinar, k);
        const auto s = value(Flavor::schmudgen, k);
        if (!p || !s) {
            continue;
        }
        out.checks.push_back({describe("putinar <= schmudgen", k, *p, *s), *p <= *s + kDominanceTol});
        if (single) {
            out.checks.push_back(
                {describe("putinar == schmudgen (one inequality)", k, *p, *s), std::abs(*p - *s) <= kDominanceTol});
        }
    }
    return out;
}

}  // namespace flatpop
