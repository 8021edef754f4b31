#include "flatpop/moment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace flatpop {

std::shared_ptr<const MonomialBasis> shared_basis(int nvars, int max_degree) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{nvars, max_degree}];
    if (!slot) {
        slot = std::make_shared<const MonomialBasis>(nvars, max_degree);
    }
    return slot;
}

Tms::Tms(int nvars, int half_degree, Eigen::VectorXd values)
    : half_degree_(half_degree), values_(std::move(values)) {
    if (half_degree < 0) {
        throw std::domain_error("tms half degree must be nonnegative");
    }
    basis_ = shared_basis(nvars, 2 * half_degree);
    if (static_cast<std::size_t>(values_.size()) != basis_->size()) {
        throw std::invalid_argument("tms of degree " + std::to_string(2 * half_degree) + " in " +
                                    std::to_string(nvars) + " variables needs " +
                                    std::to_string(basis_->size()) + " values, got " +
                                    std::to_string(values_.size()));
    }
}

bool Tms::is_unit(double tol) const { return std::abs(values_[0] - 1.0) <= tol; }

Tms Tms::truncate(int t) const {
    if (t < 0 || t > half_degree_) {
        throw std::domain_error("cannot truncate a degree-" + std::to_string(2 * half_degree_) +
                                " tms to degree " + std::to_string(2 * t));
    }
    const auto len = static_cast<Eigen::Index>(basis_size(nvars(), 2 * t));
    return Tms(nvars(), t, values_.head(len));
}

double riesz(const Tms& y, const Polynomial& p) {
    if (p.nvars() != y.nvars()) {
        throw std::invalid_argument("riesz: polynomial and tms variable counts differ");
    }
    double s = 0.0;
    for (const auto& [m, c] : p.terms()) {
        if (m.degree() > 2 * y.half_degree()) {
            throw std::domain_error("riesz: polynomial degree " + std::to_string(m.degree()) +
                                    " exceeds tms degree " + std::to_string(2 * y.half_degree()));
        }
        s += c * y[m];
    }
    return s;
}

Tms atomic_tms(std::span<const WeightedPoint> atoms, int half_degree) {
    if (atoms.empty()) {
        throw std::invalid_argument("atomic_tms needs at least one atom");
    }
    const auto n = atoms.front().point.size();
    if (n == 0) {
        throw std::invalid_argument("atomic_tms: zero-dimensional point");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i].weight > 0.0)) {
            throw std::invalid_argument("atomic_tms: weights must be positive");
        }
        if (atoms[i].point.size() != n) {
            throw std::invalid_argument("atomic_tms: inconsistent point dimensions");
        }
        for (std::size_t j = 0; j < i; ++j) {
            double d2 = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                const double d = atoms[i].point[q] - atoms[j].point[q];
                d2 += d * d;
            }
            if (std::sqrt(d2) <= 1e-10) {
                throw std::invalid_argument("atomic_tms: duplicate points");
            }
        }
    }
    const auto basis = shared_basis(static_cast<int>(n), 2 * half_degree);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
    for (const auto& a : atoms) {
        const auto v = basis->evaluate(a.point);
        for (std::size_t i = 0; i < v.size(); ++i) {
            y[static_cast<Eigen::Index>(i)] += a.weight * v[i];
        }
    }
    return Tms(static_cast<int>(n), half_degree, std::move(y));
}

LocalizingPattern localizing_pattern(const Polynomial& h, int order) {
    if (h.is_zero()) {
        throw std::domain_error("localizing matrix of the zero polynomial");
    }
    const int dh = degree_half(h);
    if (order < dh) {
        throw std::domain_error("localizing order " + std::to_string(order) +
                                " is below d_h = " + std::to_string(dh) + " (empty basis)");
    }
    LocalizingPattern pat;
    pat.nvars = h.nvars();
    pat.order = order;
    pat.row_degree = order - dh;
    const auto rows = shared_basis(h.nvars(), pat.row_degree);
    const auto moments = shared_basis(h.nvars(), 2 * order);
    pat.side = static_cast<Eigen::Index>(rows->size());
    for (Eigen::Index i = 0; i < pat.side; ++i) {
        for (Eigen::Index j = i; j < pat.side; ++j) {
            const Monomial ab = (*rows)[static_cast<std::size_t>(i)] * (*rows)[static_cast<std::size_t>(j)];
            for (const auto& [g, c] : h.terms()) {
                pat.terms.push_back({static_cast<int>(i), static_cast<int>(j),
                                     static_cast<Eigen::Index>(moments->index(ab * g)), c});
            }
        }
    }
    return pat;
}

Eigen::MatrixXd assemble_pattern(const LocalizingPattern& pattern, const Eigen::VectorXd& y) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(pattern.side, pattern.side);
    for (const auto& t : pattern.terms) {
        if (t.moment >= y.size()) {
            throw std::domain_error("tms too short for localizing matrix of order " +
                                    std::to_string(pattern.order));
        }
        m(t.row, t.col) += t.coeff * y[t.moment];
    }
    m.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
    return m;
}

LocalizingMatrix assemble_localizing(const Tms& y, const Polynomial& h, int order) {
    if (h.nvars() != y.nvars()) {
        throw std::invalid_argument("localizing generator and tms variable counts differ");
    }
    if (order > y.half_degree()) {
        throw std::domain_error("localizing order " + std::to_string(order) +
                                " exceeds tms half degree " + std::to_string(y.half_degree()));
    }
    const auto pat = localizing_pattern(h, order);
    return {h, order, pat.row_degree, assemble_pattern(pat, y.values())};
}

Eigen::MatrixXd moment_matrix(const Tms& y, int t) {
    return assemble_localizing(y, Polynomial::constant(y.nvars(), 1.0), t).entries;
}

int numerical_rank(const Eigen::MatrixXd& a, double eps) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("numerical_rank: matrix is not square");
    }
    if (!(eps > 0.0)) {
        throw std::invalid_argument("numerical_rank: tolerance must be positive");
    }
    if (a.size() == 0) {
        return 0;
    }
    const double norm = a.norm();
    if ((a - a.transpose()).norm() > 1e-10 * norm) {
        throw std::invalid_argument("numerical_rank: matrix is not symmetric");
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .cwiseMax(0.0);
    const double threshold = eps * std::max(ev.maxCoeff(), kRankFloor);
    return static_cast<int>((ev.array() >= threshold).count());
}

std::vector<int> FlatnessReport::flat_orders() const {
    std::vector<int> out;
    for (const auto& t : tested_orders) {
        if (t.flat()) {
            out.push_back(t.t);
        }
    }
    return out;
}

FlatnessReport check_flat_truncation(const Tms& y, int d_f, int d_g, double eps) {
    const int k = y.half_degree();
    const int lo = std::max(d_f, d_g);
    if (k < lo) {
        throw std::domain_error("flat truncation window [" + std::to_string(lo) + ", " +
                                std::to_string(k) + "] is empty");
    }
    FlatnessReport rep;
    rep.order_k = k;
    rep.d_f = d_f;
    rep.d_g = d_g;
    rep.rank_tolerance = eps;
    const Eigen::MatrixXd full = moment_matrix(y, k);
    for (int t = 0; t <= k; ++t) {
        const auto side = static_cast<Eigen::Index>(basis_size(y.nvars(), t));
        // M_t is the leading principal block of M_k under graded ordering
        rep.rank_profile.push_back(numerical_rank(full.topLeftCorner(side, side), eps));
    }
    for (int t = lo; t <= k; ++t) {
        FlatnessReport::Tested row{t, rep.rank_profile[static_cast<std::size_t>(t - d_g)],
                                   rep.rank_profile[static_cast<std::size_t>(t)]};
        rep.tested_orders.push_back(row);
        if (row.flat() && !rep.flat_order) {
            rep.flat_order = t;
        }
    }
    return rep;
}

double tms_norm(const Tms& y, int degree) {
    if (degree < 0 || degree > 2 * y.half_degree()) {
        throw std::domain_error("tms_norm: degree " + std::to_string(degree) +
                                " outside tms of degree " + std::to_string(2 * y.half_degree()));
    }
    const auto len = static_cast<Eigen::Index>(basis_size(y.nvars(), degree));
    return y.values().head(len).norm();
}

}  // namespace flatpop
