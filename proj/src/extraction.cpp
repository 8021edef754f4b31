#include "flatpop/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace flatpop {

std::vector<WeightedPoint> AtomicMeasure::weighted_points() const {
    std::vector<WeightedPoint> out;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        out.push_back({weights[j], atoms[j]});
    }
    return out;
}

namespace {

struct Quotient {
    std::vector<std::size_t> pivots;  // indices into the degree-t basis
    Eigen::MatrixXd U;                // rows: basis monomials in the pivot basis
};

// Column echelon form of V^T: walk the degree layers from the bottom and take,
// within each layer, the row of V with the largest component outside the span
// of the rows already chosen.
Quotient select_pivots(const Eigen::MatrixXd& V, const MonomialBasis& basis, int max_degree, int rank,
                       double tol) {
    const Eigen::Index r = V.cols();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        scale = std::max(scale, V.row(i).norm());
    }
    Quotient q;
    Eigen::MatrixXd basis_rows(0, r);  // orthonormal rows spanning the chosen rows
    std::size_t start = 0;
    for (int d = 0; d <= max_degree && static_cast<int>(q.pivots.size()) < rank; ++d) {
        const std::size_t end = basis.count_up_to(d);
        std::vector<bool> taken(end - start, false);
        while (static_cast<int>(q.pivots.size()) < rank) {
            double best = tol * scale;
            std::size_t best_i = end;
            Eigen::RowVectorXd best_res;
            for (std::size_t i = start; i < end; ++i) {
                if (taken[i - start]) {
                    continue;
                }
                Eigen::RowVectorXd res = V.row(static_cast<Eigen::Index>(i));
                if (basis_rows.rows() > 0) {
                    res -= (res * basis_rows.transpose()) * basis_rows;
                }
                const double nrm = res.norm();
                if (nrm > best) {
                    best = nrm;
                    best_i = i;
                    best_res = res;
                }
            }
            if (best_i == end) {
                break;
            }
            taken[best_i - start] = true;
            q.pivots.push_back(best_i);
            basis_rows.conservativeResize(basis_rows.rows() + 1, Eigen::NoChange);
            basis_rows.row(basis_rows.rows() - 1) = best_res / best_res.norm();
        }
        start = end;
    }
    if (static_cast<int>(q.pivots.size()) < rank) {
        throw ExtractionError("found " + std::to_string(q.pivots.size()) + " pivot monomials of degree <= " +
                              std::to_string(max_degree) + ", need " + std::to_string(rank));
    }
    Eigen::MatrixXd vp(rank, r);
    for (int j = 0; j < rank; ++j) {
        vp.row(j) = V.row(static_cast<Eigen::Index>(q.pivots[static_cast<std::size_t>(j)]));
    }
    q.U = vp.transpose().colPivHouseholderQr().solve(V.transpose()).transpose();
    return q;
}

std::vector<Eigen::MatrixXd> multiplication_matrices(const Quotient& q, const MonomialBasis& basis, int nvars) {
    const auto r = static_cast<Eigen::Index>(q.pivots.size());
    std::vector<Eigen::MatrixXd> ns;
    for (int i = 0; i < nvars; ++i) {
        const Monomial xi = Monomial::variable(nvars, i);
        Eigen::MatrixXd n(r, r);
        for (Eigen::Index j = 0; j < r; ++j) {
            const Monomial shifted = basis[q.pivots[static_cast<std::size_t>(j)]] * xi;
            n.row(j) = q.U.row(static_cast<Eigen::Index>(basis.index(shifted)));
        }
        ns.push_back(std::move(n));
    }
    return ns;
}

// Atom coordinates from one random convex combination of the N_i. Returns
// false when the combination has clustered eigenvalues and a reseed may help.
bool atoms_from_combination(const std::vector<Eigen::MatrixXd>& ns, std::uint64_t seed, double complex_tol,
                            std::vector<std::vector<double>>& atoms) {
    const auto r = ns.front().rows();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::vector<double> c(ns.size());
    double total = 0.0;
    for (auto& ci : c) {
        ci = unif(rng);
        total += ci;
    }
    Eigen::MatrixXd n = Eigen::MatrixXd::Zero(r, r);
    double scale = 1e-300;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        n += (c[i] / total) * ns[i];
        scale = std::max(scale, ns[i].norm());
    }
    Eigen::RealSchur<Eigen::MatrixXd> schur(n);
    if (schur.info() != Eigen::Success) {
        return false;
    }
    const Eigen::MatrixXd& t = schur.matrixT();
    for (Eigen::Index j = 0; j + 1 < r; ++j) {
        if (std::abs(t(j + 1, j)) > complex_tol * scale) {
            throw ExtractionError("multiplication matrix has complex eigenvalues (subdiagonal " +
                                  std::to_string(t(j + 1, j)) + ")");
        }
    }
    Eigen::VectorXd ev = t.diagonal();
    std::sort(ev.data(), ev.data() + ev.size());
    for (Eigen::Index j = 0; j + 1 < r; ++j) {
        if (ev[j + 1] - ev[j] <= 1e-8 * scale) {
            return false;
        }
    }
    const Eigen::MatrixXd& qm = schur.matrixU();
    atoms.assign(static_cast<std::size_t>(r), std::vector<double>(ns.size()));
    for (Eigen::Index j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            atoms[static_cast<std::size_t>(j)][i] = qm.col(j).dot(ns[i] * qm.col(j));
        }
    }
    return true;
}

}  // namespace

AtomicMeasure extract_atoms(const Tms& z, int rank, const ExtractionOptions& opts) {
    const int t = z.half_degree();
    const int n = z.nvars();
    if (rank < 1) {
        throw std::invalid_argument("extract_atoms: rank must be positive");
    }
    if (t < 1) {
        throw std::invalid_argument("extract_atoms: flat order must be at least 1");
    }
    const Eigen::MatrixXd m = moment_matrix(z, t);
    if (rank > m.rows()) {
        throw std::invalid_argument("extract_atoms: rank exceeds the moment matrix size");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw ExtractionError("eigendecomposition of the moment matrix failed");
    }
    const Eigen::Index side = m.rows();
    Eigen::MatrixXd v(side, rank);
    for (int j = 0; j < rank; ++j) {
        const Eigen::Index col = side - 1 - j;
        const double lambda = es.eigenvalues()[col];
        if (!(lambda > 0.0)) {
            throw ExtractionError("moment matrix has fewer than " + std::to_string(rank) +
                                  " positive eigenvalues");
        }
        v.col(j) = std::sqrt(lambda) * es.eigenvectors().col(col);
    }

    const auto basis = shared_basis(n, t);
    const Quotient q = select_pivots(v, *basis, t - 1, rank, opts.pivot_tol);
    const auto ns = multiplication_matrices(q, *basis, n);

    AtomicMeasure out;
    out.order = t;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) {
        names.push_back("x" + std::to_string(i + 1));
    }
    for (auto p : q.pivots) {
        out.pivots.push_back(to_string(Polynomial::monomial((*basis)[p]), names));
    }

    bool ok = false;
    for (int attempt = 0; attempt <= opts.retries && !ok; ++attempt) {
        out.seed = opts.seed + static_cast<std::uint64_t>(attempt);
        ok = atoms_from_combination(ns, out.seed, opts.complex_tol, out.atoms);
    }
    if (!ok) {
        throw ExtractionError("eigenvalues of the random multiplication matrix stay clustered after " +
                              std::to_string(opts.retries + 1) + " seeds");
    }
    for (std::size_t a = 0; a < out.atoms.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            double d2 = 0.0;
            double s2 = 1.0;
            for (int i = 0; i < n; ++i) {
                const double d = out.atoms[a][static_cast<std::size_t>(i)] - out.atoms[b][static_cast<std::size_t>(i)];
                d2 += d * d;
                s2 = std::max(s2, out.atoms[a][static_cast<std::size_t>(i)] * out.atoms[a][static_cast<std::size_t>(i)]);
            }
            if (std::sqrt(d2) <= 1e-8 * std::sqrt(s2)) {
                throw ExtractionError("extracted atoms " + std::to_string(b + 1) + " and " + std::to_string(a + 1) +
                                      " coincide");
            }
        }
    }

    // Weights: least squares on the full tms, then clip and renormalize.
    const auto full = shared_basis(n, 2 * t);
    Eigen::MatrixXd a(z.values().size(), rank);
    for (int j = 0; j < rank; ++j) {
        const auto col = full->evaluate(out.atoms[static_cast<std::size_t>(j)]);
        a.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
    }
    Eigen::VectorXd w = a.colPivHouseholderQr().solve(z.values());
    if (w.minCoeff() < -opts.clip_tol) {
        std::ostringstream msg;
        msg << "weight fit produced a negative weight " << w.minCoeff();
        throw ExtractionError(msg.str());
    }
    w = w.cwiseMax(0.0);
    if (!(w.sum() > 0.0)) {
        throw ExtractionError("weight fit produced no positive weight");
    }
    w /= w.sum();
    if (w.minCoeff() <= 0.0) {
        throw ExtractionError("an extracted atom received zero weight");
    }
    const Eigen::VectorXd scaled = z.values() / z.values()[0];
    out.residual = (scaled - a * w).cwiseAbs().maxCoeff();
    const double zscale = std::max(1.0, scaled.cwiseAbs().maxCoeff());
    if (out.residual > opts.residual_tol * zscale) {
        std::ostringstream msg;
        msg << "atoms reproduce the moments only to " << out.residual;
        throw ExtractionError(msg.str());
    }
    out.weights.assign(w.data(), w.data() + w.size());
    return out;
}

AtomicMeasure extract_atoms(const Tms& z, int rank, double eps, std::uint64_t seed) {
    ExtractionOptions opts;
    opts.pivot_tol = eps;
    opts.seed = seed;
    return extract_atoms(z, rank, opts);
}

VerificationReport verify_atoms(const AtomicMeasure& measure, const Problem& prob, const Tms& z, double f_star,
                                double tol) {
    VerificationReport rep;
    rep.f_star = f_star;
    rep.tolerance = tol;
    const auto gs = prob.effective_inequalities();
    const double fscale = std::max(1.0, std::abs(f_star));
    for (std::size_t j = 0; j < measure.atoms.size(); ++j) {
        const auto& u = measure.atoms[j];
        AtomCheck c;
        c.point = u;
        if (static_cast<int>(u.size()) != prob.nvars()) {
            rep.failures.push_back("atom " + std::to_string(j + 1) + " has the wrong dimension");
            c.feasible = c.optimal = false;
            rep.atoms.push_back(std::move(c));
            continue;
        }
        c.objective = prob.objective.evaluate(u);
        c.objective_error = std::abs(c.objective - f_star);
        c.optimal = c.objective_error <= tol * fscale;
        if (!c.optimal) {
            std::ostringstream msg;
            msg << "atom " << j + 1 << ": f = " << c.objective << " differs from " << f_star;
            rep.failures.push_back(msg.str());
        }
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const double v = gs[i].evaluate(u);
            c.inequality_values.push_back(v);
            if (v < -tol) {
                c.feasible = false;
                std::ostringstream msg;
                msg << "atom " << j + 1 << ": inequality " << i + 1 << " = " << v;
                rep.failures.push_back(msg.str());
            }
        }
        for (std::size_t i = 0; i < prob.equalities.size(); ++i) {
            const double v = prob.equalities[i].evaluate(u);
            c.equality_values.push_back(v);
            if (std::abs(v) > tol) {
                c.feasible = false;
                std::ostringstream msg;
                msg << "atom " << j + 1 << ": equality " << i + 1 << " = " << v;
                rep.failures.push_back(msg.str());
            }
        }
        rep.atoms.push_back(std::move(c));
    }
    if (measure.atoms.empty()) {
        rep.failures.emplace_back("no atoms");
    } else if (rep.failures.empty()) {
        const auto points = measure.weighted_points();
        const Tms fit = atomic_tms(points, z.half_degree());
        const Eigen::VectorXd scaled = z.values() / z.values()[0];
        rep.moment_residual = (scaled - fit.values()).cwiseAbs().maxCoeff();
        const double zscale = std::max(1.0, scaled.cwiseAbs().maxCoeff());
        if (rep.moment_residual > std::max(tol, 1e-5) * zscale) {
            std::ostringstream msg;
            msg << "atoms reproduce the moments only to " << rep.moment_residual;
            rep.failures.push_back(msg.str());
        }
    }
    rep.passed = rep.failures.empty();
    return rep;
}

}  // namespace flatpop
