#include "flatpop/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flatpop {

void Problem::validate() const {
    const int n = nvars();
    for (const auto& g : inequalities) {
        if (g.nvars() != n) {
            throw std::invalid_argument("inequality has a different number of variables than the objective");
        }
    }
    for (const auto& h : equalities) {
        if (h.nvars() != n) {
            throw std::invalid_argument("equality has a different number of variables than the objective");
        }
    }
    if (ball_radius && !(*ball_radius > 0.0)) {
        throw std::invalid_argument("ball radius must be positive");
    }
    if (!variable_names.empty() && static_cast<int>(variable_names.size()) != n) {
        throw std::invalid_argument("variable name count does not match the objective");
    }
}

std::vector<Polynomial> Problem::effective_inequalities() const {
    std::vector<Polynomial> out = inequalities;
    if (ball_radius) {
        const int n = nvars();
        Polynomial ball = Polynomial::constant(n, *ball_radius * *ball_radius);
        for (int i = 0; i < n; ++i) {
            const auto xi = Polynomial::variable(n, i);
            ball = ball - xi * xi;
        }
        out.push_back(std::move(ball));
    }
    return out;
}

std::vector<std::string> Problem::names() const {
    if (!variable_names.empty()) {
        return variable_names;
    }
    std::vector<std::string> out;
    for (int i = 0; i < nvars(); ++i) {
        out.push_back("x" + std::to_string(i + 1));
    }
    return out;
}

namespace {

int half_degree_or_zero(const Polynomial& p) { return p.is_zero() ? 0 : degree_half(p); }

}  // namespace

DegreeIntegers degree_integers(const Problem& p) {
    auto cons = p.effective_inequalities();
    cons.insert(cons.end(), p.equalities.begin(), p.equalities.end());
    return {half_degree_or_zero(p.objective), constraint_half_degree(cons)};
}

std::string to_string(Flavor f) {
    switch (f) {
        case Flavor::putinar: return "putinar";
        case Flavor::schmudgen: return "schmudgen";
        case Flavor::sos_unconstrained: return "sos_unconstrained";
        case Flavor::gradient: return "gradient";
        case Flavor::jacobian_single: return "jacobian_single";
    }
    return "unknown";
}

Flavor parse_flavor(std::string_view name) {
    if (name == "putinar") return Flavor::putinar;
    if (name == "schmudgen") return Flavor::schmudgen;
    if (name == "sos" || name == "sos_unconstrained") return Flavor::sos_unconstrained;
    if (name == "gradient") return Flavor::gradient;
    if (name == "jacobian" || name == "jacobian_single") return Flavor::jacobian_single;
    throw std::invalid_argument("unknown relaxation flavor '" + std::string(name) + "'");
}

SdpProblem MomentSdp::to_sdp() const {
    SdpProblem p;
    p.nvar = nvar();
    p.objective = objective;
    for (const auto& b : psd_blocks) {
        PencilBlock pb;
        pb.side = b.pattern.side;
        for (const auto& t : b.pattern.terms) {
            pb.add(t.moment, t.row, t.col, t.coeff);
        }
        p.blocks.push_back(std::move(pb));
    }
    p.eq_matrix = eq_matrix;
    p.eq_rhs = eq_rhs;
    return p;
}

SdpProblem MomentSdp::to_trace_sdp(double objective_bound) const {
    SdpProblem p = to_sdp();
    p.objective = Eigen::VectorXd::Zero(nvar());
    const auto rows = shared_basis(nvars, order);
    for (std::size_t i = 0; i < rows->size(); ++i) {
        const Monomial sq = (*rows)[i] * (*rows)[i];
        p.objective[static_cast<Eigen::Index>(basis->index(sq))] += 1.0;
    }
    PencilBlock bound;
    bound.side = 1;
    bound.add(PencilBlock::kConstant, 0, 0, objective_bound);
    for (Eigen::Index i = 0; i < objective.size(); ++i) {
        if (objective[i] != 0.0) {
            bound.add(i, 0, 0, -objective[i]);
        }
    }
    p.blocks.push_back(std::move(bound));
    return p;
}

namespace {

MomentSdp skeleton(Flavor flavor, const Polynomial& f, int k) {
    MomentSdp s;
    s.flavor = flavor;
    s.order = k;
    s.nvars = f.nvars();
    s.basis = shared_basis(f.nvars(), 2 * k);
    s.objective = Eigen::VectorXd::Zero(s.nvar());
    for (const auto& [m, c] : f.terms()) {
        if (m.degree() > 2 * k) {
            throw std::domain_error("objective degree exceeds 2k at order " + std::to_string(k));
        }
        s.objective[static_cast<Eigen::Index>(s.basis->index(m))] = c;
    }
    // y_0 = 1
    s.eq_matrix = Eigen::MatrixXd::Zero(1, s.nvar());
    s.eq_matrix(0, 0) = 1.0;
    s.eq_rhs = Eigen::VectorXd::Ones(1);
    return s;
}

void add_psd_block(MomentSdp& s, std::string label, const Polynomial& h) {
    s.psd_blocks.push_back({std::move(label), h, localizing_pattern(h, s.order)});
}

// Rows <phi * x^gamma, y> = 0 for every |gamma| <= 2k - deg(phi): the truncated
// ideal generated by phi. Its rows contain every entry of L_phi^{(k)}(y), and
// for odd deg(phi) also the top-degree multipliers.
void add_equality(MomentSdp& s, std::string label, const Polynomial& phi) {
    if (phi.is_zero()) {
        return;
    }
    const int room = 2 * s.order - phi.degree();
    if (room < 0) {
        throw std::domain_error("equality of degree " + std::to_string(phi.degree()) +
                                " does not fit order " + std::to_string(s.order));
    }
    const auto shifts = shared_basis(s.nvars, room);
    const Eigen::Index old = s.eq_matrix.rows();
    const auto count = static_cast<Eigen::Index>(shifts->size());
    s.eq_matrix.conservativeResize(old + count, Eigen::NoChange);
    s.eq_rhs.conservativeResize(s.eq_matrix.rows());
    for (Eigen::Index r = 0; r < count; ++r) {
        s.eq_matrix.row(old + r).setZero();
        const Monomial& gamma = (*shifts)[static_cast<std::size_t>(r)];
        for (const auto& [g, c] : phi.terms()) {
            s.eq_matrix(old + r, static_cast<Eigen::Index>(s.basis->index(gamma * g))) += c;
        }
        s.eq_rhs[old + r] = 0.0;
    }
    s.equality_generators.push_back({std::move(label), phi, s.order});
}

void require_order(int k, int kmin, std::string_view what) {
    if (k < kmin) {
        throw std::domain_error(std::string(what) + " relaxation needs order >= " + std::to_string(kmin) +
                                ", got " + std::to_string(k));
    }
}

int max_half_degree(const std::vector<Polynomial>& ps) {
    int d = 0;
    for (const auto& p : ps) {
        d = std::max(d, half_degree_or_zero(p));
    }
    return d;
}

std::vector<Polynomial> gradient_of(const Polynomial& f) {
    std::vector<Polynomial> out;
    for (int i = 0; i < f.nvars(); ++i) {
        out.push_back(partial_derivative(f, i));
    }
    return out;
}

void require_unconstrained(const Problem& prob, Flavor flavor) {
    if (!prob.effective_inequalities().empty() || !prob.equalities.empty()) {
        throw std::invalid_argument(to_string(flavor) + " flavor applies to unconstrained problems only");
    }
}

}  // namespace

MomentSdp build_putinar(const Problem& prob, int k) {
    prob.validate();
    require_order(k, minimum_order(prob, Flavor::putinar), "putinar");
    MomentSdp s = skeleton(Flavor::putinar, prob.objective, k);
    add_psd_block(s, "1", Polynomial::constant(prob.nvars(), 1.0));
    const auto gs = prob.effective_inequalities();
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const bool is_ball = prob.ball_radius && i + 1 == gs.size();
        add_psd_block(s, is_ball ? "ball" : "g" + std::to_string(i + 1), gs[i]);
    }
    for (std::size_t j = 0; j < prob.equalities.size(); ++j) {
        add_equality(s, "h" + std::to_string(j + 1), prob.equalities[j]);
    }
    return s;
}

MomentSdp build_schmudgen(const Problem& prob, int k) {
    prob.validate();
    const auto gs = prob.effective_inequalities();
    const auto m = gs.size();
    if (m > static_cast<std::size_t>(kMaxSchmudgenConstraints)) {
        throw std::invalid_argument("schmudgen relaxation with " + std::to_string(m) + " constraints needs " +
                                    std::to_string(1ULL << m) + " blocks; refusing above " +
                                    std::to_string(kMaxSchmudgenConstraints) + " constraints");
    }
    require_order(k, minimum_order(prob, Flavor::schmudgen), "schmudgen");
    MomentSdp s = skeleton(Flavor::schmudgen, prob.objective, k);
    for (std::size_t nu = 0; nu < (std::size_t{1} << m); ++nu) {
        Polynomial gnu = Polynomial::constant(prob.nvars(), 1.0);
        std::string label;
        for (std::size_t i = 0; i < m; ++i) {
            if (nu & (std::size_t{1} << i)) {
                gnu = gnu * gs[i];
                label += (label.empty() ? "" : "*") + std::string("g") + std::to_string(i + 1);
            }
        }
        if (label.empty()) {
            label = "1";
        }
        if (gnu.is_zero()) {
            s.omitted_blocks.push_back(label);
            continue;
        }
        if (degree_half(gnu) > k) {
            s.omitted_blocks.push_back(label);
            continue;
        }
        add_psd_block(s, label, gnu);
    }
    for (std::size_t j = 0; j < prob.equalities.size(); ++j) {
        add_equality(s, "h" + std::to_string(j + 1), prob.equalities[j]);
    }
    return s;
}

MomentSdp build_sos_unconstrained(const Polynomial& f, int k) {
    if (f.is_zero()) {
        throw std::domain_error("objective is the zero polynomial");
    }
    if (f.degree() % 2 != 0) {
        throw std::domain_error("unconstrained SOS relaxation needs an even-degree objective, got degree " +
                                std::to_string(f.degree()));
    }
    require_order(k, degree_half(f), "sos_unconstrained");
    MomentSdp s = skeleton(Flavor::sos_unconstrained, f, k);
    add_psd_block(s, "1", Polynomial::constant(f.nvars(), 1.0));
    return s;
}

MomentSdp build_gradient(const Polynomial& f, int k) {
    const auto grad = gradient_of(f);
    require_order(k, std::max(half_degree_or_zero(f), max_half_degree(grad)), "gradient");
    MomentSdp s = skeleton(Flavor::gradient, f, k);
    add_psd_block(s, "1", Polynomial::constant(f.nvars(), 1.0));
    for (std::size_t j = 0; j < grad.size(); ++j) {
        add_equality(s, "df/dx" + std::to_string(j + 1), grad[j]);
    }
    if (s.equality_generators.empty()) {
        throw std::domain_error("gradient relaxation of a constant objective has no gradient equalities");
    }
    return s;
}

std::vector<Polynomial> jacobian_equalities(const Polynomial& f, const Polynomial& g) {
    const int n = f.nvars();
    const auto df = gradient_of(f);
    const auto dg = gradient_of(g);
    std::vector<Polynomial> phi;
    for (int i = 0; i < n; ++i) {
        phi.push_back(g * df[static_cast<std::size_t>(i)]);
    }
    for (int l = 3; l <= 2 * n - 1; ++l) {
        Polynomial sum(n);
        for (int i = 1; i <= n; ++i) {
            const int j = l - i;
            if (j <= i || j > n) {
                continue;
            }
            const auto a = static_cast<std::size_t>(i - 1);
            const auto b = static_cast<std::size_t>(j - 1);
            sum += df[a] * dg[b] - df[b] * dg[a];
        }
        phi.push_back(std::move(sum));
    }
    return phi;
}

MomentSdp build_jacobian_single(const Polynomial& f, const Polynomial& g, int k) {
    const auto phi = jacobian_equalities(f, g);
    require_order(k, std::max({half_degree_or_zero(f), std::max(1, half_degree_or_zero(g)), max_half_degree(phi)}),
                  "jacobian_single");
    MomentSdp s = skeleton(Flavor::jacobian_single, f, k);
    add_psd_block(s, "1", Polynomial::constant(f.nvars(), 1.0));
    add_psd_block(s, "g1", g);
    const int n = f.nvars();
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const auto label = j < static_cast<std::size_t>(n)
                               ? "g*df/dx" + std::to_string(j + 1)
                               : "minor" + std::to_string(static_cast<int>(j) - n + 3);
        add_equality(s, label, phi[j]);
    }
    return s;
}

MomentSdp build_relaxation(const Problem& prob, Flavor flavor, int k) {
    prob.validate();
    switch (flavor) {
        case Flavor::putinar: return build_putinar(prob, k);
        case Flavor::schmudgen: return build_schmudgen(prob, k);
        case Flavor::sos_unconstrained:
            require_unconstrained(prob, flavor);
            return build_sos_unconstrained(prob.objective, k);
        case Flavor::gradient:
            require_unconstrained(prob, flavor);
            return build_gradient(prob.objective, k);
        case Flavor::jacobian_single: {
            const auto gs = prob.effective_inequalities();
            if (gs.size() != 1 || !prob.equalities.empty()) {
                throw std::invalid_argument(
                    "jacobian flavor supports exactly one inequality constraint and no equalities");
            }
            return build_jacobian_single(prob.objective, gs.front(), k);
        }
    }
    throw std::invalid_argument("unknown flavor");
}

DegreeIntegers degree_integers(const Problem& prob, Flavor flavor) {
    auto d = degree_integers(prob);
    if (flavor == Flavor::gradient) {
        d.d_g = std::max(d.d_g, max_half_degree(gradient_of(prob.objective)));
    } else if (flavor == Flavor::jacobian_single) {
        const auto gs = prob.effective_inequalities();
        if (gs.size() == 1) {
            d.d_g = std::max(d.d_g, max_half_degree(jacobian_equalities(prob.objective, gs.front())));
        }
    }
    return d;
}

int minimum_order(const Problem& prob, Flavor flavor) {
    const auto [df, dg] = degree_integers(prob, flavor);
    return std::max(df, dg);
}

}  // namespace flatpop
