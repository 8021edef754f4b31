#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flatpop {

/// One linear matrix inequality F0 + sum_i y_i F_i >= 0, stored as upper-triangular
/// triplets. `var == kConstant` marks entries of F0.
struct PencilBlock {
    static constexpr Eigen::Index kConstant = -1;

    struct Entry {
        Eigen::Index var;
        int row;
        int col;
        double value;
    };

    Eigen::Index side = 0;
    std::vector<Entry> entries;

    /// Adds value at (row, col) and, implicitly, (col, row).
    void add(Eigen::Index var, int row, int col, double value);
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

/// minimize c^T y  s.t.  every pencil block >= 0,  E y = d.
struct SdpProblem {
    Eigen::Index nvar = 0;
    Eigen::VectorXd objective;
    std::vector<PencilBlock> blocks;
    Eigen::MatrixXd eq_matrix;  // rows x nvar, may have zero rows
    Eigen::VectorXd eq_rhs;

    void validate() const;
};

enum class SdpStatus {
    optimal,
    primal_infeasible,
    dual_infeasible_or_unbounded,
    max_iterations,
    numerical_failure,
};

std::string to_string(SdpStatus s);

struct SdpOptions {
    int max_iter = 100;
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    std::uint64_t seed = 0;
    /// Run the interior-point iteration in long double.
    bool extended_precision = true;
    bool verbose = false;  // per-iteration trace on stderr
};

/// The moment side is the primal (variables y), the dual multipliers X_b >= 0
/// are the Gram matrices of the SOS side.
struct SdpSolution {
    SdpStatus status = SdpStatus::numerical_failure;
    Eigen::VectorXd y;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;
    std::vector<Eigen::MatrixXd> dual_matrices;
    double primal_eq_residual = 0.0;     // ||E y - d||_inf
    double block_min_eigenvalue = 0.0;   // min over blocks of lambda_min(F_b(y))
    double dual_residual = 0.0;          // relative residual of the SOS-side equalities
    int iterations = 0;
    std::string diagnostic;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {});

/// SDPA sparse format: min c^T x s.t. sum_i F_i x_i - F_0 >= 0. Linear
/// equalities become a pair of rows in a trailing diagonal (LP) block.
void write_sdpa(const SdpProblem& problem, std::ostream& out);

}  // namespace flatpop
