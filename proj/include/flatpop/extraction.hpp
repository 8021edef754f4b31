#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatpop/moment.hpp"
#include "flatpop/relaxation.hpp"

namespace flatpop {

/// z ~ sum_j weights[j] [atoms[j]]_{2t}.
struct AtomicMeasure {
    std::vector<std::vector<double>> atoms;
    std::vector<double> weights;
    int order = 0;              // t
    double residual = 0.0;      // ||z - sum_j lambda_j [u_j]_{2t}||_inf
    std::vector<std::string> pivots;  // monomials spanning the quotient, x1..xn names
    std::uint64_t seed = 0;     // seed of the combination that succeeded

    std::size_t size() const { return atoms.size(); }
    std::vector<WeightedPoint> weighted_points() const;
};

/// Recoverable: the driver moves on to a larger flat order or the next k.
class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExtractionOptions {
    /// Pivot threshold, relative to the largest row norm of the factor V.
    double pivot_tol = 1e-4;
    /// Largest tolerated subdiagonal of the real Schur form, relative.
    double complex_tol = 1e-6;
    /// Largest tolerated negative weight before clipping.
    double clip_tol = 1e-6;
    /// Weight-fit residual, relative to max(1, ||z||_inf).
    double residual_tol = 1e-5;
    std::uint64_t seed = 0;
    int retries = 3;
};

/// Henrion-Lasserre style extraction from a flat tms z of degree 2t with
/// rank M_t(z) = r. Throws ExtractionError on failure.
AtomicMeasure extract_atoms(const Tms& z, int rank, const ExtractionOptions& opts = {});
AtomicMeasure extract_atoms(const Tms& z, int rank, double eps, std::uint64_t seed);

struct AtomCheck {
    std::vector<double> point;
    double objective = 0.0;
    double objective_error = 0.0;           // |f(u) - f_star|
    std::vector<double> inequality_values;  // g_i(u), ball last if present
    std::vector<double> equality_values;    // h_j(u)
    bool feasible = true;
    bool optimal = true;
};

struct VerificationReport {
    bool passed = false;
    double f_star = 0.0;
    double tolerance = 0.0;
    double moment_residual = 0.0;
    std::vector<AtomCheck> atoms;
    std::vector<std::string> failures;
};

/// Checks g_i(u) >= -tol, |h_j(u)| <= tol, |f(u) - f_star| <= tol max(1, |f_star|)
/// at every atom, and that the atoms reproduce z within the same scaled tolerance.
VerificationReport verify_atoms(const AtomicMeasure& measure, const Problem& prob, const Tms& z,
                                double f_star, double tol);

}  // namespace flatpop
