#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "flatpop/moment.hpp"
#include "flatpop/polynomial.hpp"
#include "flatpop/sdp.hpp"

namespace flatpop {

/// min f(x) s.t. g_i(x) >= 0, h_j(x) = 0.
struct Problem {
    Polynomial objective;
    std::vector<Polynomial> inequalities;
    std::vector<Polynomial> equalities;
    /// Adds R^2 - ||x||^2 >= 0 as an extra inequality when set.
    std::optional<double> ball_radius;
    /// Display names; x1..xn when empty.
    std::vector<std::string> variable_names;

    explicit Problem(Polynomial f, std::vector<Polynomial> g = {}, std::vector<Polynomial> h = {})
        : objective(std::move(f)), inequalities(std::move(g)), equalities(std::move(h)) {}

    int nvars() const { return objective.nvars(); }
    void validate() const;

    /// Inequalities including the ball constraint, if any.
    std::vector<Polynomial> effective_inequalities() const;
    std::vector<std::string> names() const;
};

struct DegreeIntegers {
    int d_f;
    int d_g;
};

/// d_f and d_g = max(1, d_i, d_j) over the problem's inequalities and equalities.
DegreeIntegers degree_integers(const Problem& p);

enum class Flavor { putinar, schmudgen, sos_unconstrained, gradient, jacobian_single };

/// Degree integers of the problem the flavor actually relaxes: for the gradient
/// and Jacobian flavors d_g also covers the derived equalities phi = 0.
DegreeIntegers degree_integers(const Problem& p, Flavor flavor);

std::string to_string(Flavor f);
/// Accepts both the CLI short names (putinar, schmudgen, sos, gradient, jacobian)
/// and the long names returned by to_string.
Flavor parse_flavor(std::string_view name);

struct MomentSdp {
    struct Block {
        std::string label;
        Polynomial generator;
        LocalizingPattern pattern;
    };
    struct EqualityGenerator {
        std::string label;
        Polynomial generator;
        int order;  // localizing order used for its rows
    };

    Flavor flavor = Flavor::putinar;
    int order = 0;
    int nvars = 0;
    std::shared_ptr<const MonomialBasis> basis;  // degree 2k
    Eigen::VectorXd objective;
    std::vector<Block> psd_blocks;
    std::vector<EqualityGenerator> equality_generators;
    /// Row 0 is y_0 = 1; then <phi x^gamma, y> = 0 for |gamma| <= 2k - deg(phi), per equality.
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    std::vector<std::string> omitted_blocks;

    Eigen::Index nvar() const { return static_cast<Eigen::Index>(basis->size()); }
    SdpProblem to_sdp() const;
    /// Same constraints plus <f, y> <= objective_bound; minimizes trace M_k(y).
    /// Over the optimal face this favors low-rank (flat) optimizers.
    SdpProblem to_trace_sdp(double objective_bound) const;
    Tms moments(const Eigen::VectorXd& y) const { return Tms(nvars, order, y); }
};

MomentSdp build_putinar(const Problem& prob, int k);
MomentSdp build_schmudgen(const Problem& prob, int k);
MomentSdp build_sos_unconstrained(const Polynomial& f, int k);
MomentSdp build_gradient(const Polynomial& f, int k);
MomentSdp build_jacobian_single(const Polynomial& f, const Polynomial& g, int k);

/// Redundant equalities of the single-inequality Jacobian relaxation:
/// g * df/dx_i for each i, then for l = 3..2n-1 the sum over i < j, i + j = l
/// (1-based) of df/dx_i * dg/dx_j - df/dx_j * dg/dx_i.
std::vector<Polynomial> jacobian_equalities(const Polynomial& f, const Polynomial& g);

/// Dispatches on the flavor; checks that the problem shape fits it.
MomentSdp build_relaxation(const Problem& prob, Flavor flavor, int k);

/// Smallest order for which every block and equality of the flavor is representable.
int minimum_order(const Problem& prob, Flavor flavor);

inline constexpr int kMaxSchmudgenConstraints = 12;

}  // namespace flatpop
