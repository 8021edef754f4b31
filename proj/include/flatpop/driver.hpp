#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flatpop/extraction.hpp"
#include "flatpop/moment.hpp"
#include "flatpop/relaxation.hpp"
#include "flatpop/sdp.hpp"

namespace flatpop {

struct HierarchyOptions {
    std::optional<int> k_min;  // minimum_order when unset
    std::optional<int> k_max;  // k_min + 4 when unset
    double rank_tol = kDefaultRankTol;
    double solver_tol = 1e-8;
    /// Tolerance of verify_atoms.
    double verify_tol = 1e-6;
    std::uint64_t seed = 0;
    /// t0 of the asymptotic trace; derived from the last rank seen when unset.
    std::optional<int> monitor_degree;
    /// Re-solve for a minimum-trace optimizer when the first one is not flat.
    bool trace_phase = true;
    int max_iter = 100;
};

struct ExtractionAttempt {
    int t = 0;
    int rank = 0;
    bool extracted = false;
    bool verified = false;
    std::string message;
};

struct OrderRecord {
    int k = 0;
    SdpStatus status = SdpStatus::numerical_failure;
    std::string diagnostic;
    double primal_value = 0.0;  // f_k^*, moment side
    double dual_value = 0.0;    // f_k, SOS side
    double gap = 0.0;
    int iterations = 0;
    /// Coefficient residual of the SOS identity at gamma = f_k.
    std::optional<double> certificate_residual;
    /// Flatness of the moment vector that was used for extraction.
    std::optional<FlatnessReport> flatness;
    /// Set when the minimum-trace re-solve supplied that moment vector.
    bool trace_phase_used = false;
    /// That moment vector (graded order, degree 2k); empty unless optimal.
    Eigen::VectorXd moments;
    int nvars = 0;
    std::vector<ExtractionAttempt> attempts;
    double seconds = 0.0;
};

enum class RunOutcome { certified, exhausted, solver_failed };
std::string to_string(RunOutcome o);

struct CertifiedResult {
    AtomicMeasure measure;
    VerificationReport verification;
    double f_min = 0.0;
    int order_k = 0;
    int flat_t = 0;
};

struct MonitorPoint {
    int k = 0;
    double delta = 0.0;  // ||y^(k)|_{2 t0} - y^(k-1)|_{2 t0}||_2
};

struct HierarchyRun {
    Flavor flavor = Flavor::putinar;
    DegreeIntegers degrees{0, 0};
    int k_min = 0;
    int k_max = 0;
    std::vector<OrderRecord> orders;
    RunOutcome outcome = RunOutcome::exhausted;
    std::optional<CertifiedResult> certificate;
    /// First failing order and its status when outcome is solver_failed.
    std::optional<int> failed_order;
    std::optional<SdpStatus> failed_status;
    int monitor_degree = 0;
    std::vector<MonitorPoint> monitor_trace;
    double seconds = 0.0;
};

/// Solve k = k_min..k_max, test flat truncation, extract and verify atoms.
/// Stops at the first certificate or at a solver failure. Unbounded orders
/// (bound -infinity) are recorded and skipped; the run is solver_failed if no
/// order was bounded, exhausted if some were but none certified.
HierarchyRun run_hierarchy(const Problem& prob, Flavor flavor, const HierarchyOptions& opts = {});

struct ComparisonRow {
    Flavor flavor = Flavor::putinar;
    int k = 0;
    std::optional<SdpStatus> status;  // unset when the flavor does not apply
    std::string message;
    double value = 0.0;
    bool flat = false;
    double seconds = 0.0;
};

struct DominanceCheck {
    std::string description;
    bool passed = true;
};

struct FlavorComparison {
    std::vector<ComparisonRow> rows;
    std::vector<DominanceCheck> checks;
    bool all_passed() const;
};

inline constexpr double kDominanceTol = 1e-7;

/// Bounds per (flavor, k). Checks that putinar values are nondecreasing in k,
/// putinar <= schmudgen, and that the two coincide for a single inequality.
FlavorComparison compare_flavors(const Problem& prob, const std::vector<Flavor>& flavors, int k_lo, int k_hi,
                                 const HierarchyOptions& opts = {});

}  // namespace flatpop
