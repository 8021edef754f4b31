#include "flatpop/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace flatpop {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

void PencilBlock::add(Eigen::Index var, int row, int col, double value) {
    if (row > col) {
        std::swap(row, col);
    }
    entries.push_back({var, row, col, value});
}

Mat PencilBlock::evaluate(const Vec& y) const {
    Mat m = Mat::Zero(side, side);
    for (const auto& e : entries) {
        const double v = e.var == kConstant ? e.value : e.value * y[e.var];
        m(e.row, e.col) += v;
        if (e.row != e.col) {
            m(e.col, e.row) += v;
        }
    }
    return m;
}

void SdpProblem::validate() const {
    if (nvar < 1) {
        throw std::invalid_argument("sdp needs at least one variable");
    }
    if (objective.size() != nvar) {
        throw std::invalid_argument("sdp objective length does not match variable count");
    }
    if (eq_matrix.rows() > 0 && eq_matrix.cols() != nvar) {
        throw std::invalid_argument("sdp equality matrix has wrong column count");
    }
    if (eq_matrix.rows() != eq_rhs.size()) {
        throw std::invalid_argument("sdp equality rhs length does not match rows");
    }
    for (const auto& b : blocks) {
        if (b.side < 1) {
            throw std::invalid_argument("sdp block with empty side");
        }
        for (const auto& e : b.entries) {
            if (e.row < 0 || e.col >= b.side || e.row > e.col) {
                throw std::invalid_argument("sdp block entry outside upper triangle");
            }
            if (e.var != PencilBlock::kConstant && (e.var < 0 || e.var >= nvar)) {
                throw std::invalid_argument("sdp block entry references unknown variable");
            }
        }
    }
}

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::primal_infeasible: return "primal_infeasible";
        case SdpStatus::dual_infeasible_or_unbounded: return "dual_infeasible_or_unbounded";
        case SdpStatus::max_iterations: return "max_iterations";
        case SdpStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
T inner(const MatT<T>& a, const MatT<T>& b) { return (a.array() * b.array()).sum(); }

template <class T>
MatT<T> sym(const MatT<T>& a) { return T(0.5) * (a + a.transpose()); }

template <class T>
T min_eigenvalue(const MatT<T>& a) {
    if (a.size() == 0) {
        return T(0);
    }
    return Eigen::SelfAdjointEigenSolver<MatT<T>>(a, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

// Largest alpha with X + alpha dX >= 0, given the Cholesky factor of X.
template <class T>
T max_step(const Eigen::LLT<MatT<T>>& chol, const MatT<T>& dx) {
    const MatT<T> l = chol.matrixL();
    MatT<T> t = l.template triangularView<Eigen::Lower>().solve(dx);
    t = l.template triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
    const T lam = min_eigenvalue<T>(sym<T>(t));
    return lam < 0 ? T(-1) / lam : std::numeric_limits<T>::infinity();
}

// Equality-free reformulation: y = y_p + N z with N a nullspace basis of E.
//   minimize c_const + c^T z  s.t.  S_b = C_b + sum_j z_j G_bj >= 0.
// The SOS side is  maximize c_const - <C, X>  s.t.  <G_j, X> = c_j,  X >= 0.
struct Reduced {
    Vec y_p;
    Mat null_basis;  // nvar x m (columns restricted to `kept`)
    double c_const = 0.0;
    Vec c;
    std::vector<Mat> C;
    std::vector<std::vector<Mat>> G;  // [block][reduced var]
    std::vector<Eigen::Index> sides;
};

struct ReduceOutcome {
    Reduced red;
    bool inconsistent = false;
    bool unbounded = false;
    std::string diagnostic;
};

ReduceOutcome reduce(const SdpProblem& p) {
    ReduceOutcome out;
    Reduced& r = out.red;
    const Eigen::Index n = p.nvar;
    Mat basis;
    if (p.eq_matrix.rows() > 0) {
        Eigen::JacobiSVD<Mat> svd(p.eq_matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vec& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv[0] : 0.0;
        Eigen::Index rank = 0;
        while (rank < sv.size() && sv[rank] > 1e-10 * std::max(smax, 1e-300)) {
            ++rank;
        }
        const Mat& u = svd.matrixU();
        const Mat& v = svd.matrixV();
        r.y_p = v.leftCols(rank) *
                (sv.head(rank).cwiseInverse().asDiagonal() * (u.leftCols(rank).transpose() * p.eq_rhs));
        const double res = (p.eq_matrix * r.y_p - p.eq_rhs).lpNorm<Eigen::Infinity>();
        if (res > 1e-10 * std::max(1.0, p.eq_rhs.lpNorm<Eigen::Infinity>())) {
            out.inconsistent = true;
            std::ostringstream msg;
            msg << "linear equalities are inconsistent (least-squares residual " << res << ")";
            out.diagnostic = msg.str();
            return out;
        }
        basis = v.rightCols(n - rank);
    } else {
        r.y_p = Vec::Zero(n);
        basis = Mat::Identity(n, n);
    }
    r.c_const = p.objective.dot(r.y_p);
    const Vec c_full = basis.transpose() * p.objective;
    const Eigen::Index m = basis.cols();

    std::vector<std::vector<Mat>> g_all(p.blocks.size());
    Vec col_norm = Vec::Zero(m);
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const auto& blk = p.blocks[b];
        r.sides.push_back(blk.side);
        r.C.push_back(blk.evaluate(r.y_p));
        auto& gb = g_all[b];
        gb.assign(static_cast<std::size_t>(m), Mat::Zero(blk.side, blk.side));
        for (const auto& e : blk.entries) {
            if (e.var == PencilBlock::kConstant) {
                continue;
            }
            for (Eigen::Index j = 0; j < m; ++j) {
                const double v = e.value * basis(e.var, j);
                if (v == 0.0) {
                    continue;
                }
                gb[static_cast<std::size_t>(j)](e.row, e.col) += v;
                if (e.row != e.col) {
                    gb[static_cast<std::size_t>(j)](e.col, e.row) += v;
                }
            }
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            col_norm[j] += gb[static_cast<std::size_t>(j)].squaredNorm();
        }
    }
    // Directions that no block sees are either free (zero cost) or unbounded.
    std::vector<Eigen::Index> kept;
    const double cscale = std::max(1.0, c_full.lpNorm<Eigen::Infinity>());
    for (Eigen::Index j = 0; j < m; ++j) {
        if (col_norm[j] > 1e-24) {
            kept.push_back(j);
        } else if (std::abs(c_full[j]) > 1e-12 * cscale) {
            out.unbounded = true;
            out.diagnostic = "objective decreases along a direction no matrix block constrains";
            return out;
        }
    }
    r.null_basis.resize(n, static_cast<Eigen::Index>(kept.size()));
    r.c.resize(static_cast<Eigen::Index>(kept.size()));
    r.G.resize(p.blocks.size());
    for (std::size_t q = 0; q < kept.size(); ++q) {
        const auto j = kept[q];
        r.null_basis.col(static_cast<Eigen::Index>(q)) = basis.col(j);
        r.c[static_cast<Eigen::Index>(q)] = c_full[j];
        for (std::size_t b = 0; b < p.blocks.size(); ++b) {
            r.G[b].push_back(std::move(g_all[b][static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

template <class T>
struct Iterate {
    std::vector<MatT<T>> X;
    std::vector<MatT<T>> S;
    VecT<T> z;
};

// Infeasible-start primal-dual path following with the HKM direction and a
// Mehrotra predictor-corrector, carried out in scalar type T.
template <class T>
class InteriorPoint {
    using Mat = MatT<T>;
    using Vec = VecT<T>;

public:
    InteriorPoint(const Reduced& red, const SdpOptions& o) : red_(red), opt_(o) {
        c_const_ = static_cast<T>(red.c_const);
        c_ = red.c.cast<T>();
        for (std::size_t b = 0; b < red.C.size(); ++b) {
            C_.push_back(red.C[b].cast<T>());
            G_.emplace_back();
            for (const auto& g : red.G[b]) {
                G_[b].push_back(g.cast<T>());
            }
        }
        nblocks_ = C_.size();
        m_ = c_.size();
        for (auto s : red.sides) {
            ntotal_ += static_cast<T>(s);
        }
        cnorm_ = c_.norm();
        for (const auto& c : C_) {
            Cnorm_ += c.squaredNorm();
        }
        Cnorm_ = std::sqrt(Cnorm_);
        for (std::size_t b = 0; b < nblocks_; ++b) {
            for (const auto& g : G_[b]) {
                gmax_ = std::max(gmax_, g.norm());
            }
        }
    }

    SdpSolution run();

private:
    Eigen::Index side(std::size_t b) const { return red_.sides[b]; }
    const Mat& G(std::size_t b, Eigen::Index j) const { return G_[b][static_cast<std::size_t>(j)]; }

    void initial_point();
    Mat moment_residual(std::size_t b) const { return C_[b] + apply_G(b, it_.z) - it_.S[b]; }
    Vec sos_residual() const {
        Vec rp = c_;
        for (std::size_t b = 0; b < nblocks_; ++b) {
            for (Eigen::Index j = 0; j < m_; ++j) {
                rp[j] -= inner<T>(G(b, j), it_.X[b]);
            }
        }
        return rp;
    }
    T primal_objective() const { return c_const_ + c_.dot(it_.z); }
    T dual_objective() const {
        T s = c_const_;
        for (std::size_t b = 0; b < nblocks_; ++b) {
            s -= inner<T>(C_[b], it_.X[b]);
        }
        return s;
    }
    Mat apply_G(std::size_t b, const Vec& dz) const {
        Mat out = Mat::Zero(side(b), side(b));
        for (Eigen::Index j = 0; j < m_; ++j) {
            if (dz[j] != T(0)) {
                out += dz[j] * G(b, j);
            }
        }
        return out;
    }
    bool unbounded_certificate() const;
    bool infeasible_certificate(const Vec& rp) const;
    SdpSolution finish(SdpStatus status, int iters, std::string diag) const;

    const Reduced& red_;
    SdpOptions opt_;
    T c_const_ = 0;
    Vec c_;
    std::vector<Mat> C_;
    std::vector<std::vector<Mat>> G_;
    std::size_t nblocks_ = 0;
    Eigen::Index m_ = 0;
    T ntotal_ = 0;
    T cnorm_ = 0;
    T Cnorm_ = 0;
    T gmax_ = 0;
    Iterate<T> it_;
};

template <class T>
void InteriorPoint<T>::initial_point() {
    std::mt19937_64 rng(opt_.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    it_.X.clear();
    it_.S.clear();
    for (std::size_t b = 0; b < nblocks_; ++b) {
        const auto n = static_cast<T>(side(b));
        T xi = std::max(T(10), std::sqrt(n));
        T eta = std::max({T(10), std::sqrt(n), C_[b].norm()});
        for (Eigen::Index j = 0; j < m_; ++j) {
            const T gn = G(b, j).norm();
            xi = std::max(xi, n * (T(1) + std::abs(c_[j])) / (T(1) + gn));
            eta = std::max(eta, gn);
        }
        Vec dx = Vec::Constant(side(b), xi);
        Vec ds = Vec::Constant(side(b), eta);
        if (opt_.seed != 0) {
            for (Eigen::Index i = 0; i < dx.size(); ++i) {
                dx[i] *= T(1) + T(1e-3) * static_cast<T>(jitter(rng));
                ds[i] *= T(1) + T(1e-3) * static_cast<T>(jitter(rng));
            }
        }
        it_.X.push_back(dx.asDiagonal());
        it_.S.push_back(ds.asDiagonal());
    }
    it_.z = Vec::Zero(m_);
}

// Direction d = z / |c^T z| with c^T d = -1 and G(d) >= 0: the moment objective
// decreases without bound along a feasible ray.
template <class T>
bool InteriorPoint<T>::unbounded_certificate() const {
    const T cz = c_.dot(it_.z);
    if (!(cz < T(0))) {
        return false;
    }
    const Vec d = it_.z / (-cz);
    if (d.norm() * gmax_ <= T(1e-12)) {
        return false;
    }
    const T scale = std::max(T(1), gmax_ * d.norm());
    for (std::size_t b = 0; b < nblocks_; ++b) {
        if (min_eigenvalue<T>(apply_G(b, d)) < T(-1e-8) * scale) {
            return false;
        }
    }
    return true;
}

// W = X / (-<C, X>) with <G_j, W> ~ 0 and <C, W> = -1: no moment vector
// satisfies the blocks.
template <class T>
bool InteriorPoint<T>::infeasible_certificate(const Vec& rp) const {
    T cx = 0;
    for (std::size_t b = 0; b < nblocks_; ++b) {
        cx += inner<T>(C_[b], it_.X[b]);
    }
    if (!(cx < T(0))) {
        return false;
    }
    const Vec ag = c_ - rp;
    return ag.norm() / (-cx) <= T(1e-8) * std::max(T(1), gmax_);
}

template <class T>
SdpSolution InteriorPoint<T>::finish(SdpStatus status, int iters, std::string diag) const {
    SdpSolution sol;
    sol.status = status;
    sol.iterations = iters;
    sol.diagnostic = std::move(diag);
    const Vec y = red_.y_p.cast<T>() + red_.null_basis.cast<T>() * it_.z;
    sol.y = y.template cast<double>();
    sol.primal_value = static_cast<double>(primal_objective());
    sol.dual_value = static_cast<double>(dual_objective());
    sol.gap = static_cast<double>(primal_objective() - dual_objective());
    for (const auto& x : it_.X) {
        sol.dual_matrices.push_back(x.template cast<double>());
    }
    sol.dual_residual = static_cast<double>(sos_residual().norm() / (T(1) + cnorm_));
    return sol;
}

template <class T>
SdpSolution InteriorPoint<T>::run() {
    initial_point();
    const T tau = T(0.98);
    const T gap_tol = static_cast<T>(opt_.gap_tol);
    const T feas_tol = static_cast<T>(opt_.feas_tol);
    const T near_tol = T(1e3) * std::max(gap_tol, feas_tol);
    int stalled = 0;
    T best_merit = std::numeric_limits<T>::infinity();
    Iterate<T> best = it_;
    T best_gap = best_merit;
    T best_feas = best_merit;
    T prev_pobj = primal_objective();
    T prev_dobj = dual_objective();
    bool pobj_falling = false;
    bool dobj_rising = false;

    for (int iter = 0; iter < opt_.max_iter; ++iter) {
        std::vector<Mat> rd(nblocks_);
        T rd_norm = 0;
        T xs = 0;
        for (std::size_t b = 0; b < nblocks_; ++b) {
            rd[b] = moment_residual(b);
            rd_norm += rd[b].squaredNorm();
            xs += inner<T>(it_.X[b], it_.S[b]);
        }
        rd_norm = std::sqrt(rd_norm);
        const T mu = xs / ntotal_;
        const Vec rp = sos_residual();
        const T pobj = primal_objective();
        const T dobj = dual_objective();
        const T denom = T(1) + std::abs(pobj) + std::abs(dobj);
        const T relgap = std::max(std::abs(pobj - dobj), xs) / denom;
        const T pinf = rd_norm / (T(1) + Cnorm_);
        const T dinf = rp.norm() / (T(1) + cnorm_);
        if (opt_.verbose) {
            std::cerr << std::setw(3) << iter << std::scientific << std::setprecision(3) << "  pobj "
                      << static_cast<double>(pobj) << "  dobj " << static_cast<double>(dobj) << "  relgap "
                      << static_cast<double>(relgap) << "  pinf " << static_cast<double>(pinf) << "  dinf "
                      << static_cast<double>(dinf) << "  mu " << static_cast<double>(mu) << std::defaultfloat
                      << "\n";
        }

        if (relgap <= gap_tol && pinf <= feas_tol && dinf <= feas_tol) {
            return finish(SdpStatus::optimal, iter, "");
        }
        if (unbounded_certificate()) {
            return finish(SdpStatus::dual_infeasible_or_unbounded, iter,
                          "moment objective decreases along a feasible ray");
        }
        if (infeasible_certificate(rp)) {
            return finish(SdpStatus::primal_infeasible, iter,
                          "a positive semidefinite multiplier certifies infeasibility");
        }

        const T merit = std::max({relgap, pinf, dinf});
        if (merit < best_merit) {
            stalled = merit < T(0.9) * best_merit ? 0 : stalled + 1;
            best_merit = merit;
            best = it_;
            best_gap = relgap;
            best_feas = std::max(pinf, dinf);
        } else {
            ++stalled;
        }
        // When the iteration breaks down, the best iterate seen so far is
        // still returned as optimal if it meets the loosened tolerance.
        auto breakdown = [&](SdpStatus fallback, const std::string& why) {
            if (best_gap <= near_tol && best_feas <= near_tol) {
                it_ = best;
                std::ostringstream msg;
                msg << "reduced accuracy (" << why << "): relgap " << static_cast<double>(best_gap)
                    << ", residual " << static_cast<double>(best_feas);
                return finish(SdpStatus::optimal, iter, msg.str());
            }
            return finish(fallback, iter, why);
        };
        if (iter > 0) {
            pobj_falling = pobj < prev_pobj - T(1e-9) * denom;
            dobj_rising = dobj > prev_dobj + T(1e-9) * denom;
        }
        prev_pobj = pobj;
        prev_dobj = dobj;
        if (stalled >= 20) {
            std::ostringstream msg;
            msg << "stalled: relgap " << static_cast<double>(relgap) << ", moment residual "
                << static_cast<double>(pinf) << ", sos residual " << static_cast<double>(dinf);
            if (dinf > feas_tol && pinf <= std::sqrt(feas_tol) && pobj_falling) {
                return finish(SdpStatus::dual_infeasible_or_unbounded, iter, msg.str());
            }
            if (pinf > feas_tol && dinf <= std::sqrt(feas_tol) && dobj_rising) {
                return finish(SdpStatus::primal_infeasible, iter, msg.str());
            }
            return breakdown(SdpStatus::numerical_failure, msg.str());
        }

        std::vector<Eigen::LLT<Mat>> xchol;
        std::vector<Eigen::LLT<Mat>> schol;
        std::vector<Mat> sinv(nblocks_);
        for (std::size_t b = 0; b < nblocks_; ++b) {
            xchol.emplace_back(it_.X[b]);
            schol.emplace_back(it_.S[b]);
            if (xchol.back().info() != Eigen::Success || schol.back().info() != Eigen::Success) {
                return breakdown(SdpStatus::numerical_failure,
                                 "iterate lost positive definiteness in block " + std::to_string(b));
            }
            sinv[b] = sym<T>(schol.back().solve(Mat::Identity(side(b), side(b))));
        }

        // Schur complement M_jl = sum_b tr(G_j X G_l S^-1).
        Mat schur = Mat::Zero(m_, m_);
        for (std::size_t b = 0; b < nblocks_; ++b) {
            std::vector<Mat> xgs;
            xgs.reserve(static_cast<std::size_t>(m_));
            for (Eigen::Index l = 0; l < m_; ++l) {
                xgs.push_back((it_.X[b] * G(b, l) * sinv[b]).transpose());
            }
            for (Eigen::Index j = 0; j < m_; ++j) {
                for (Eigen::Index l = j; l < m_; ++l) {
                    schur(j, l) += inner<T>(G(b, j), xgs[static_cast<std::size_t>(l)]);
                }
            }
        }
        schur.template triangularView<Eigen::StrictlyLower>() =
            schur.transpose().template triangularView<Eigen::StrictlyLower>();
        Eigen::LLT<Mat> mchol(schur);
        if (mchol.info() != Eigen::Success) {
            const T reg = T(1e-13) * std::max(T(1), schur.diagonal().cwiseAbs().maxCoeff());
            mchol.compute(schur + reg * Mat::Identity(m_, m_));
            if (mchol.info() != Eigen::Success) {
                return breakdown(SdpStatus::numerical_failure, "Schur complement factorization failed");
            }
        }

        // (dX, dz, dS) for the complementarity target R, where dX = sym(R - X dS S^-1).
        T schur_error = 0;
        auto direction = [&](const std::vector<Mat>& target, std::vector<Mat>& dx, Vec& dz,
                             std::vector<Mat>& ds) {
            Vec rhs = -rp;
            for (std::size_t b = 0; b < nblocks_; ++b) {
                const Mat xr = target[b] - it_.X[b] * rd[b] * sinv[b];
                for (Eigen::Index j = 0; j < m_; ++j) {
                    rhs[j] += inner<T>(G(b, j), xr);
                }
            }
            dz = mchol.solve(rhs);
            for (int refine = 0; refine < 2; ++refine) {
                dz += mchol.solve(rhs - schur * dz);
            }
            schur_error = std::max(schur_error, (schur * dz - rhs).norm() / std::max(rhs.norm(), T(1e-300)));
            dx.resize(nblocks_);
            ds.resize(nblocks_);
            for (std::size_t b = 0; b < nblocks_; ++b) {
                ds[b] = apply_G(b, dz) + rd[b];
                dx[b] = sym<T>(target[b] - it_.X[b] * ds[b] * sinv[b]);
            }
        };
        auto steps = [&](const std::vector<Mat>& dx, const std::vector<Mat>& ds) {
            T ap = std::numeric_limits<T>::infinity();
            T ad = ap;
            for (std::size_t b = 0; b < nblocks_; ++b) {
                ap = std::min(ap, max_step<T>(xchol[b], dx[b]));
                ad = std::min(ad, max_step<T>(schol[b], ds[b]));
            }
            return std::pair{std::min(T(1), tau * ap), std::min(T(1), tau * ad)};
        };

        // Predictor.
        std::vector<Mat> target(nblocks_);
        for (std::size_t b = 0; b < nblocks_; ++b) {
            target[b] = -it_.X[b];
        }
        std::vector<Mat> dxa;
        std::vector<Mat> dsa;
        Vec dza;
        direction(target, dxa, dza, dsa);
        const auto [apa, ada] = steps(dxa, dsa);
        T mu_aff = 0;
        for (std::size_t b = 0; b < nblocks_; ++b) {
            mu_aff += inner<T>(it_.X[b] + apa * dxa[b], it_.S[b] + ada * dsa[b]);
        }
        mu_aff /= ntotal_;
        const T sigma = std::clamp(std::pow(std::max(mu_aff, T(0)) / mu, T(3)), T(0), T(1));

        // Corrector.
        for (std::size_t b = 0; b < nblocks_; ++b) {
            target[b] = sigma * mu * sinv[b] - it_.X[b] - dxa[b] * dsa[b] * sinv[b];
        }
        std::vector<Mat> dx;
        std::vector<Mat> ds;
        Vec dz;
        direction(target, dx, dz, ds);
        const auto [ap, ad] = steps(dx, ds);
        if (!std::isfinite(static_cast<double>(ap)) || !std::isfinite(static_cast<double>(ad)) ||
            !dz.allFinite()) {
            return breakdown(SdpStatus::numerical_failure, "non-finite search direction");
        }
        if (schur_error > T(1e-6)) {
            return breakdown(SdpStatus::numerical_failure, "ill-conditioned Schur complement");
        }
        for (std::size_t b = 0; b < nblocks_; ++b) {
            it_.X[b] = sym<T>(it_.X[b] + ap * dx[b]);
            it_.S[b] = sym<T>(it_.S[b] + ad * ds[b]);
        }
        it_.z += ad * dz;
    }
    return finish(SdpStatus::max_iterations, opt_.max_iter, "iteration limit reached");
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts) {
    problem.validate();
    ReduceOutcome red = reduce(problem);
    SdpSolution sol;
    if (red.inconsistent) {
        sol.status = SdpStatus::primal_infeasible;
        sol.diagnostic = red.diagnostic;
        sol.y = Vec::Zero(problem.nvar);
        return sol;
    }
    if (red.unbounded) {
        sol.status = SdpStatus::dual_infeasible_or_unbounded;
        sol.diagnostic = red.diagnostic;
        sol.y = red.red.y_p;
        return sol;
    }
    const Reduced& r = red.red;
    if (r.c.size() == 0 || r.C.empty()) {
        // The equalities pin y down (or nothing constrains it): only feasibility remains.
        sol.y = r.y_p;
        sol.primal_value = r.c_const;
        sol.dual_value = r.c_const;
        double lmin = 0.0;
        for (const auto& c : r.C) {
            lmin = std::min(lmin, min_eigenvalue<double>(c));
            sol.dual_matrices.push_back(Mat::Zero(c.rows(), c.cols()));
        }
        sol.status = lmin >= -opts.feas_tol ? SdpStatus::optimal : SdpStatus::primal_infeasible;
    } else {
        sol = opts.extended_precision ? InteriorPoint<long double>(r, opts).run()
                                      : InteriorPoint<double>(r, opts).run();
    }
    sol.primal_eq_residual = problem.eq_matrix.rows() > 0
                                 ? (problem.eq_matrix * sol.y - problem.eq_rhs).lpNorm<Eigen::Infinity>()
                                 : 0.0;
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& b : problem.blocks) {
        lmin = std::min(lmin, min_eigenvalue<double>(b.evaluate(sol.y)));
    }
    sol.block_min_eigenvalue = problem.blocks.empty() ? 0.0 : lmin;
    return sol;
}

void write_sdpa(const SdpProblem& problem, std::ostream& out) {
    problem.validate();
    const Eigen::Index rows = problem.eq_matrix.rows();
    out << "\"flatpop moment relaxation: min c'y s.t. sum_i F_i y_i - F_0 >= 0\n";
    out << problem.nvar << "\n";
    const std::size_t nblocks = problem.blocks.size() + (rows > 0 ? 1 : 0);
    out << nblocks << "\n";
    for (const auto& b : problem.blocks) {
        out << b.side << " ";
    }
    if (rows > 0) {
        out << -2 * rows;
    }
    out << "\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < problem.nvar; ++i) {
        out << problem.objective[i] << (i + 1 < problem.nvar ? " " : "\n");
    }
    for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
        for (const auto& e : problem.blocks[b].entries) {
            const bool constant = e.var == PencilBlock::kConstant;
            out << (constant ? 0 : e.var + 1) << " " << b + 1 << " " << e.row + 1 << " " << e.col + 1
                << " " << (constant ? -e.value : e.value) << "\n";
        }
    }
    if (rows > 0) {
        const std::size_t lp = problem.blocks.size() + 1;
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::Index up = r + 1;
            const Eigen::Index down = rows + r + 1;
            if (problem.eq_rhs[r] != 0.0) {
                out << 0 << " " << lp << " " << up << " " << up << " " << problem.eq_rhs[r] << "\n";
                out << 0 << " " << lp << " " << down << " " << down << " " << -problem.eq_rhs[r] << "\n";
            }
            for (Eigen::Index i = 0; i < problem.nvar; ++i) {
                const double v = problem.eq_matrix(r, i);
                if (v != 0.0) {
                    out << i + 1 << " " << lp << " " << up << " " << up << " " << v << "\n";
                    out << i + 1 << " " << lp << " " << down << " " << down << " " << -v << "\n";
                }
            }
        }
    }
}

}  // namespace flatpop
