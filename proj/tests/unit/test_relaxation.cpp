#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flatpop/relaxation.hpp"
#include "flatpop/sdp.hpp"
#include "test_support.hpp"

using namespace flatpop;
namespace ft = flatpop::testing;

namespace {

Polynomial poly(const char* text, int nvars) { return parse_polynomial(text, nvars); }

Polynomial motzkin() { return poly("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1", 2); }

Problem interval() { return Problem(poly("-x1^2", 1), {poly("1 - x1^2", 1)}); }

Problem disk() { return Problem(poly("-x1 - x2", 2), {poly("1 - x1^2 - x2^2", 2)}); }

double solve_value(const MomentSdp& ms) {
    const auto s = solve(ms.to_sdp());
    REQUIRE(s.status == SdpStatus::optimal);
    return s.primal_value;
}

// Ey = d and every block PSD at the moment vector of `atoms`.
void check_feasible(const MomentSdp& ms, const std::vector<WeightedPoint>& atoms, double f_min) {
    const Tms y = atomic_tms(atoms, ms.order);
    const auto sdp = ms.to_sdp();
    CHECK((sdp.eq_matrix * y.values() - sdp.eq_rhs).cwiseAbs().maxCoeff() <= 1e-9);
    for (const auto& b : sdp.blocks) {
        const auto m = b.evaluate(y.values());
        const double lmin = m.rows() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff() : 0;
        CHECK(lmin >= -1e-9 * std::max(1.0, m.norm()));
    }
    CHECK(ms.objective.dot(y.values()) == doctest::Approx(f_min).epsilon(1e-10));
}

}  // namespace

TEST_CASE("degree integers and minimum orders") {
    const Problem p(poly("x1^4 + x2", 2), {poly("1 - x1^2", 2)});
    CHECK(minimum_order(p, Flavor::putinar) == 2);
    CHECK(minimum_order(Problem(motzkin()), Flavor::gradient) == 3);
    CHECK(minimum_order(disk(), Flavor::jacobian_single) == 1);
    const auto d = degree_integers(disk(), Flavor::jacobian_single);
    CHECK(d.d_f == 1);
    CHECK(d.d_g == 1);
    const auto dm = degree_integers(Problem(motzkin()), Flavor::gradient);
    CHECK(dm.d_f == 3);
    CHECK(dm.d_g == 3);
    CHECK(degree_integers(Problem(motzkin())).d_g == 1);
}

TEST_CASE("putinar block structure") {
    const auto ms = build_putinar(interval(), 1);
    CHECK(ms.nvar() == 3);
    REQUIRE(ms.psd_blocks.size() == 2);
    CHECK(ms.psd_blocks[0].pattern.side == 2);
    CHECK(ms.psd_blocks[1].pattern.side == 1);
    CHECK(ms.eq_matrix.rows() == 1);
    CHECK(ms.eq_matrix(0, 0) == 1.0);
    CHECK(ms.eq_rhs[0] == 1.0);

    const Problem three(poly("x1*x2", 2), {poly("x1", 2), poly("x2", 2), poly("1 - x1 - x2", 2)});
    const auto m3 = build_putinar(three, 2);
    CHECK(m3.psd_blocks.size() == 4);
    for (const auto& b : m3.psd_blocks) {
        const int dh = degree_half(b.generator);
        CHECK(static_cast<std::size_t>(b.pattern.side) == basis_size(2, 2 - (b.generator.degree() == 0 ? 0 : dh)));
    }
    CHECK_THROWS_AS(build_putinar(Problem(poly("x1^4", 1)), 1), std::domain_error);
}

TEST_CASE("putinar without constraints is the unconstrained sos relaxation") {
    const auto f = poly("x1^4 - 2*x1^2*x2 + x2^2 + 1", 2);
    const auto a = build_putinar(Problem(f), 2).to_sdp();
    const auto b = build_sos_unconstrained(f, 2).to_sdp();
    CHECK(a.objective == b.objective);
    REQUIRE(a.blocks.size() == b.blocks.size());
    CHECK(a.blocks[0].evaluate(Eigen::VectorXd::LinSpaced(a.nvar, 0, 1)) ==
          b.blocks[0].evaluate(Eigen::VectorXd::LinSpaced(b.nvar, 0, 1)));
    CHECK(a.eq_matrix == b.eq_matrix);
}

TEST_CASE("min x on [1, inf)") {
    CHECK(solve_value(build_putinar(Problem(poly("x1", 1), {poly("x1 - 1", 1)}), 1)) ==
          doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("schmudgen block enumeration") {
    const auto single = build_schmudgen(interval(), 2);
    const auto put = build_putinar(interval(), 2);
    REQUIRE(single.psd_blocks.size() == 2);
    CHECK(single.psd_blocks[1].generator == put.psd_blocks[1].generator);

    const Problem box(poly("x1*x2", 2), {poly("x1", 2), poly("x2", 2)});
    const auto ms = build_schmudgen(box, 2);
    REQUIRE(ms.psd_blocks.size() == 4);
    CHECK(ms.psd_blocks[0].generator == Polynomial::constant(2, 1.0));
    CHECK(ms.psd_blocks[1].generator == poly("x1", 2));
    CHECK(ms.psd_blocks[2].generator == poly("x2", 2));
    CHECK(ms.psd_blocks[3].generator == poly("x1*x2", 2));

    std::vector<Polynomial> many;
    for (int i = 0; i < 13; ++i) {
        many.push_back(poly("1 - x1^2", 1));
    }
    CHECK_THROWS_AS(build_schmudgen(Problem(poly("x1", 1), many), 2), std::invalid_argument);
}

TEST_CASE("schmudgen omits blocks whose basis would be empty") {
    const Problem p(poly("x1 + x2", 2), {poly("1 - x1^2", 2), poly("1 - x2^2", 2)});
    const auto ms = build_schmudgen(p, 1);
    CHECK(ms.psd_blocks.size() == 3);
    REQUIRE(ms.omitted_blocks.size() == 1);
    CHECK(ms.omitted_blocks[0] == "g1*g2");
}

TEST_CASE("schmudgen blocks are PSD at atomic measures on K") {
    ft::Rng rng(61);
    const Problem box(poly("x1*x2", 2), {poly("1 - x1^2", 2), poly("1 - x2^2", 2), poly("x1 + x2 + 1", 2)});
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<WeightedPoint> atoms;
        while (atoms.size() < 3) {
            auto u = ft::random_point(rng, 2);
            if (u[0] + u[1] + 1 >= 0) {
                atoms.push_back({1.0 / 3, u});
            }
        }
        const auto ms = build_schmudgen(box, 3);
        const Tms y = atomic_tms(atoms, 3);
        for (const auto& b : ms.to_sdp().blocks) {
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.evaluate(y.values())).eigenvalues().minCoeff() >=
                  -1e-10);
        }
    }
}

TEST_CASE("unconstrained sos relaxation") {
    CHECK(std::abs(solve_value(build_sos_unconstrained(poly("x1^2", 1), 1))) <= 1e-7);
    CHECK(std::abs(solve_value(build_sos_unconstrained(poly("x1^4 - 2*x1^2 + 1", 1), 2))) <= 1e-7);
    CHECK_THROWS_AS(build_sos_unconstrained(poly("x1^3", 1), 2), std::domain_error);
    const auto s = solve(build_sos_unconstrained(motzkin(), 3).to_sdp());
    CHECK(s.status == SdpStatus::dual_infeasible_or_unbounded);
}

TEST_CASE("gradient relaxation") {
    SUBCASE("x^2") {
        const auto ms = build_gradient(poly("x1^2", 1), 2);
        // rows <2x * x^g, y> = 0 for |g| <= 3, plus y_0 = 1
        CHECK(ms.eq_matrix.rows() == 5);
        CHECK(std::abs(solve_value(ms)) <= 1e-7);
    }
    SUBCASE("(x^2 - 1)^2 at k = 3") {
        CHECK(std::abs(solve_value(build_gradient(poly("x1^4 - 2*x1^2 + 1", 1), 3))) <= 1e-7);
    }
    SUBCASE("motzkin at k = 4") {
        CHECK(std::abs(solve_value(build_gradient(motzkin(), 4))) <= 1e-6);
    }
    SUBCASE("constant objective") {
        CHECK_THROWS_AS(build_gradient(Polynomial::constant(1, 2.0), 1), std::domain_error);
    }
}

TEST_CASE("jacobian equalities") {
    const auto f = poly("-x1 - x2", 2);
    const auto g = poly("1 - x1^2 - x2^2", 2);
    const auto phi = jacobian_equalities(f, g);
    REQUIRE(phi.size() == 3);
    const auto fx1 = partial_derivative(f, 0);
    const auto fx2 = partial_derivative(f, 1);
    CHECK(phi[0] == g * fx1);
    CHECK(phi[1] == g * fx2);
    CHECK(phi[2] == fx1 * partial_derivative(g, 1) - fx2 * partial_derivative(g, 0));

    const auto one = jacobian_equalities(poly("-x1^2", 1), poly("1 - x1^2", 1));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == poly("1 - x1^2", 1) * poly("-2*x1", 1));

    CHECK(jacobian_equalities(poly("x1 + x2 + x3", 3), poly("1 - x1^2 - x2^2 - x3^2", 3)).size() == 3 + 3);
}

TEST_CASE("jacobian relaxation of the disk problem") {
    const auto ms = build_jacobian_single(poly("-x1 - x2", 2), poly("1 - x1^2 - x2^2", 2), 3);
    CHECK(solve_value(ms) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-7));
    CHECK_THROWS_AS(
        build_relaxation(Problem(poly("x1", 1), {poly("x1", 1), poly("1 - x1", 1)}), Flavor::jacobian_single, 2),
        std::invalid_argument);
}

TEST_CASE("flavor shape checks") {
    CHECK_THROWS_AS(build_relaxation(interval(), Flavor::gradient, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_relaxation(interval(), Flavor::sos_unconstrained, 2), std::invalid_argument);
    CHECK(parse_flavor("sos") == Flavor::sos_unconstrained);
    CHECK(parse_flavor("jacobian") == Flavor::jacobian_single);
    CHECK(parse_flavor(to_string(Flavor::schmudgen)) == Flavor::schmudgen);
    CHECK_THROWS_AS(parse_flavor("lasserre"), std::invalid_argument);
}

TEST_CASE("equalities are rows of the truncated ideal") {
    const Problem p(poly("x1 + x2", 2), {}, {poly("x1^2 + x2^2 - 1", 2)});
    const auto ms = build_putinar(p, 2);
    // y_0 = 1 plus one row per |gamma| <= 2
    CHECK(ms.eq_matrix.rows() == 1 + 6);
    CHECK(solve_value(ms) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-7));
    CHECK_THROWS_AS(build_putinar(Problem(poly("x1", 1), {}, {poly("x1^3 - 1", 1)}), 1), std::domain_error);
}

TEST_CASE("ball radius adds an inequality") {
    Problem p(poly("x1 + x2", 2));
    p.ball_radius = 2.0;
    const auto gs = p.effective_inequalities();
    REQUIRE(gs.size() == 1);
    CHECK(gs[0] == poly("4 - x1^2 - x2^2", 2));
    const auto ms = build_putinar(p, 1);
    CHECK(ms.psd_blocks.back().label == "ball");
    CHECK(solve_value(ms) == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-7));
}

TEST_CASE("atomic measures on global minimizers are feasible with value f_min") {
    const double s = std::sqrt(0.5);
    const std::vector<WeightedPoint> disk_min{{1.0, {s, s}}};
    for (int k = 1; k <= 3; ++k) {
        check_feasible(build_putinar(disk(), k), disk_min, -std::sqrt(2.0));
        check_feasible(build_schmudgen(disk(), k), disk_min, -std::sqrt(2.0));
        check_feasible(build_jacobian_single(disk().objective, disk().inequalities[0], k), disk_min, -std::sqrt(2.0));
    }
    const std::vector<WeightedPoint> motzkin_min{{0.25, {1, 1}}, {0.25, {1, -1}}, {0.25, {-1, 1}}, {0.25, {-1, -1}}};
    for (int k = 3; k <= 5; ++k) {
        check_feasible(build_gradient(motzkin(), k), motzkin_min, 0.0);
        check_feasible(build_sos_unconstrained(motzkin(), k), motzkin_min, 0.0);
    }
    const std::vector<WeightedPoint> interval_min{{0.5, {-1}}, {0.5, {1}}};
    check_feasible(build_putinar(interval(), 2), interval_min, -1.0);
}

TEST_CASE("relaxation values bound f_min from below") {
    for (int k = 1; k <= 3; ++k) {
        CHECK(solve_value(build_putinar(interval(), k)) <= -1.0 + 1e-7);
        CHECK(solve_value(build_putinar(disk(), k)) <= -std::sqrt(2.0) + 1e-7);
    }
}

TEST_CASE("property: feasible tms gives nonnegative riesz values on g * sos") {
    ft::Rng rng(67);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = ft::uniform_int(rng, 1, 3);
        const int k = 3;
        const auto atoms = ft::random_atoms(rng, n, ft::uniform_int(rng, 1, 4));
        auto g = ft::random_polynomial(rng, n, 2, 4);
        double lowest = 0.0;
        for (const auto& a : atoms) {
            lowest = std::min(lowest, evaluate(g, a.point));
        }
        g += Polynomial::constant(n, -lowest + 0.1);
        const Tms y = atomic_tms(atoms, k);
        REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble_localizing(y, g, k).entries)
                    .eigenvalues()
                    .minCoeff() >= -1e-9);
        Polynomial s(n);
        for (int j = 0; j < 3; ++j) {
            const auto p = ft::random_dense_polynomial(rng, n, k - degree_half(g));
            s += p * p;
        }
        const double scale = std::max(1.0, (g * s).coefficient_norm1());
        CHECK(riesz(y, g * s) >= -1e-8 * scale);
    }
}
