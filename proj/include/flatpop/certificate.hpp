#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flatpop/polynomial.hpp"
#include "flatpop/relaxation.hpp"
#include "flatpop/sdp.hpp"

namespace flatpop {

/// f - gamma = sum_b g_b [x]^T G_b [x] + sum_j p_j phi_j, up to `residual`.
struct DualCertificate {
    struct Gram {
        std::string label;
        Polynomial generator;
        int row_degree;
        Eigen::MatrixXd matrix;
    };
    struct Multiplier {
        std::string label;
        Polynomial generator;
        Polynomial multiplier;  // p_j, arbitrary sign
    };

    double gamma = 0.0;
    std::vector<Gram> grams;
    std::vector<Multiplier> multipliers;
    /// Max coefficient of the identity's residual, divided by max(1, ||f||_inf).
    double residual = 0.0;
    /// Smallest eigenvalue over all Gram matrices.
    double min_gram_eigenvalue = 0.0;

    /// sum_b g_b [x]^T G_b [x] + sum_j p_j phi_j.
    Polynomial reconstruct(int nvars) const;
};

/// Gram matrices are the dual multipliers of the PSD blocks; equality
/// multipliers are recovered by least squares. Throws std::invalid_argument
/// unless the solution is optimal.
DualCertificate extract_dual_certificate(const SdpSolution& sol, const MomentSdp& sdp);

/// [x]^T G [x] over the graded basis of degree row_degree.
Polynomial gram_polynomial(const Eigen::MatrixXd& gram, int nvars, int row_degree);

}  // namespace flatpop
