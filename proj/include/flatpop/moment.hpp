#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flatpop/polynomial.hpp"

namespace flatpop {

/// Shared graded-lex basis of degree `max_degree`; cached per (nvars, degree).
std::shared_ptr<const MonomialBasis> shared_basis(int nvars, int max_degree);

/// Truncated moment sequence of degree 2k: one value per monomial |alpha| <= 2k.
class Tms {
public:
    Tms(int nvars, int half_degree, Eigen::VectorXd values);

    int nvars() const { return basis_->nvars(); }
    int half_degree() const { return half_degree_; }
    const Eigen::VectorXd& values() const { return values_; }
    const MonomialBasis& basis() const { return *basis_; }

    double operator[](const Monomial& m) const { return values_[static_cast<Eigen::Index>(basis_->index(m))]; }

    /// y_0 = 1 within `tol`.
    bool is_unit(double tol = 1e-12) const;

    /// y|_{2t}: entries with |alpha| <= 2t.
    Tms truncate(int t) const;

private:
    int half_degree_;
    std::shared_ptr<const MonomialBasis> basis_;
    Eigen::VectorXd values_;
};

struct WeightedPoint {
    double weight;
    std::vector<double> point;
};

/// <p, y> = sum_alpha p_alpha y_alpha.
double riesz(const Tms& y, const Polynomial& p);

/// y = sum_j lambda_j [u_j]_{2k}.
Tms atomic_tms(std::span<const WeightedPoint> atoms, int half_degree);

/// Index map of the k-th localizing matrix of h: each upper-triangular entry
/// (row, col) collects (moment index, coefficient) pairs. Shared by numeric
/// assembly and by the SDP pencil builder.
struct LocalizingPattern {
    struct Term {
        int row;
        int col;
        Eigen::Index moment;
        double coeff;
    };

    int nvars = 0;
    int order = 0;
    int row_degree = 0;  // k - d_h
    Eigen::Index side = 0;
    std::vector<Term> terms;
};

LocalizingPattern localizing_pattern(const Polynomial& h, int order);

struct LocalizingMatrix {
    Polynomial generator;
    int order;
    int row_degree;
    Eigen::MatrixXd entries;
};

/// L_h^{(k)}(y), indexed by {alpha : |alpha| <= k - d_h}. h == 1 gives M_k(y).
LocalizingMatrix assemble_localizing(const Tms& y, const Polynomial& h, int order);
Eigen::MatrixXd assemble_pattern(const LocalizingPattern& pattern, const Eigen::VectorXd& y);

/// M_t(y).
Eigen::MatrixXd moment_matrix(const Tms& y, int t);

inline constexpr double kDefaultRankTol = 1e-6;
inline constexpr double kRankFloor = 1e-12;

/// Number of eigenvalues >= eps * max(lambda_max, 1e-12), negatives clipped to zero.
int numerical_rank(const Eigen::MatrixXd& a, double eps = kDefaultRankTol);

struct FlatnessReport {
    struct Tested {
        int t;
        int rank_low;   // rank M_{t - d_g}
        int rank_high;  // rank M_t
        bool flat() const { return rank_low == rank_high; }
    };

    int order_k = 0;
    int d_f = 0;
    int d_g = 0;
    double rank_tolerance = kDefaultRankTol;
    std::vector<int> rank_profile;  // rank M_0 .. rank M_k
    std::vector<Tested> tested_orders;
    std::optional<int> flat_order;

    /// Every tested t where the ranks agree, ascending.
    std::vector<int> flat_orders() const;
};

FlatnessReport check_flat_truncation(const Tms& y, int d_f, int d_g, double eps = kDefaultRankTol);

/// Euclidean norm of (y_alpha)_{|alpha| <= degree}.
double tms_norm(const Tms& y, int degree);

}  // namespace flatpop
