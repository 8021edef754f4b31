#include "flatpop/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flatpop/moment.hpp"

namespace flatpop {

Polynomial gram_polynomial(const Eigen::MatrixXd& gram, int nvars, int row_degree) {
    const auto rows = shared_basis(nvars, row_degree);
    if (gram.rows() != static_cast<Eigen::Index>(rows->size()) || gram.cols() != gram.rows()) {
        throw std::invalid_argument("gram matrix size does not match the degree-" + std::to_string(row_degree) +
                                    " basis");
    }
    Polynomial p(nvars);
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        for (Eigen::Index j = 0; j < gram.cols(); ++j) {
            const double c = gram(i, j);
            if (c != 0.0) {
                p += Polynomial::monomial((*rows)[static_cast<std::size_t>(i)] * (*rows)[static_cast<std::size_t>(j)], c);
            }
        }
    }
    return p;
}

Polynomial DualCertificate::reconstruct(int nvars) const {
    Polynomial p(nvars);
    for (const auto& g : grams) {
        p += g.generator * gram_polynomial(g.matrix, nvars, g.row_degree);
    }
    for (const auto& m : multipliers) {
        p += m.generator * m.multiplier;
    }
    return p;
}

DualCertificate extract_dual_certificate(const SdpSolution& sol, const MomentSdp& sdp) {
    if (sol.status != SdpStatus::optimal) {
        throw std::invalid_argument("dual certificate needs an optimal solution, got " + to_string(sol.status));
    }
    if (sol.dual_matrices.size() != sdp.psd_blocks.size()) {
        throw std::invalid_argument("solution and relaxation have different block counts");
    }
    const Eigen::Index nv = sdp.nvar();
    DualCertificate cert;
    cert.gamma = sol.dual_value;
    cert.min_gram_eigenvalue = std::numeric_limits<double>::infinity();

    // r = c - sum_b A_b^*(X_b) - gamma e_0, as a coefficient vector over the degree-2k basis.
    Eigen::VectorXd r = sdp.objective;
    r[0] -= cert.gamma;
    for (std::size_t b = 0; b < sdp.psd_blocks.size(); ++b) {
        const auto& blk = sdp.psd_blocks[b];
        const Eigen::MatrixXd& x = sol.dual_matrices[b];
        for (const auto& t : blk.pattern.terms) {
            const double w = t.row == t.col ? 1.0 : 2.0;
            r[t.moment] -= w * t.coeff * x(t.row, t.col);
        }
        cert.grams.push_back({blk.label, blk.generator, blk.pattern.row_degree, x});
        if (x.size() > 0) {
            cert.min_gram_eigenvalue = std::min(
                cert.min_gram_eigenvalue,
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(x, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
        }
    }

    // Equality rows after the first (y_0 = 1) are <phi_j x^gamma, y> = 0.
    const Eigen::Index neq = sdp.eq_matrix.rows() - 1;
    if (neq > 0) {
        const Eigen::MatrixXd e = sdp.eq_matrix.bottomRows(neq);
        const Eigen::VectorXd lambda = e.transpose().colPivHouseholderQr().solve(r);
        r -= e.transpose() * lambda;
        Eigen::Index row = 0;
        for (const auto& eq : sdp.equality_generators) {
            const int room = 2 * sdp.order - eq.generator.degree();
            const auto shifts = shared_basis(sdp.nvars, room);
            Polynomial mult(sdp.nvars);
            for (std::size_t i = 0; i < shifts->size(); ++i, ++row) {
                if (lambda[row] != 0.0) {
                    mult += Polynomial::monomial((*shifts)[i], lambda[row]);
                }
            }
            cert.multipliers.push_back({eq.label, eq.generator, std::move(mult)});
        }
    }
    const double scale = std::max(1.0, sdp.objective.cwiseAbs().maxCoeff());
    cert.residual = nv > 0 ? r.cwiseAbs().maxCoeff() / scale : 0.0;
    if (!std::isfinite(cert.min_gram_eigenvalue)) {
        cert.min_gram_eigenvalue = 0.0;
    }
    return cert;
}

}  // namespace flatpop
