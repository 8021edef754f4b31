#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flatpop/polynomial.hpp"
#include "test_support.hpp"

using namespace flatpop;
using flatpop::testing::Rng;

namespace {

Polynomial poly(const char* text, int nvars) { return parse_polynomial(text, nvars); }

Polynomial motzkin() { return poly("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1", 2); }

std::size_t binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

TEST_CASE("degree_half examples") {
    CHECK(degree_half(poly("1 - x1^2", 1)) == 1);
    CHECK(degree_half(poly("x1", 1)) == 1);
    CHECK(degree_half(motzkin()) == 3);
    CHECK_THROWS_AS(degree_half(Polynomial(1)), std::domain_error);
}

TEST_CASE("constraint_half_degree examples") {
    CHECK(constraint_half_degree({}) == 1);
    const std::vector<Polynomial> one{poly("1 - x1^2", 1)};
    CHECK(constraint_half_degree(one) == 1);
    const std::vector<Polynomial> two{poly("x1^3 - 1", 1), poly("x1 - 2", 1)};
    CHECK(constraint_half_degree(two) == 2);
}

TEST_CASE("multiply examples") {
    CHECK(multiply(poly("x1 + 1", 1), poly("x1 - 1", 1)) == poly("x1^2 - 1", 1));
    CHECK(multiply(poly("x1 + 3", 1), Polynomial(1)).is_zero());
    const auto s = poly("x1 + x2", 2);
    CHECK(s * s == poly("x1^2 + 2*x1*x2 + x2^2", 2));
    CHECK_THROWS_AS(multiply(poly("x1", 1), poly("x1", 2)), std::invalid_argument);
}

TEST_CASE("partial_derivative examples") {
    CHECK(partial_derivative(poly("x1^3", 1), 0) == poly("3*x1^2", 1));
    CHECK(partial_derivative(poly("x1^2", 2), 1).is_zero());
    CHECK(partial_derivative(motzkin(), 0) == poly("4*x1^3*x2^2 + 2*x1*x2^4 - 6*x1*x2^2", 2));
    CHECK_THROWS_AS(partial_derivative(motzkin(), 2), std::out_of_range);
    CHECK_THROWS_AS(partial_derivative(motzkin(), -1), std::out_of_range);
}

TEST_CASE("evaluate examples") {
    const std::vector<double> three{3.0};
    CHECK(evaluate(poly("x1^2", 1), three) == 9.0);
    const std::vector<double> ones{1.0, 1.0};
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(evaluate(motzkin(), ones) == doctest::Approx(0.0));
    CHECK(evaluate(motzkin(), zeros) == 1.0);
    CHECK_THROWS_AS(evaluate(motzkin(), three), std::invalid_argument);
}

TEST_CASE("graded-lex listing starts 1, x1, x2, x1^2, x1*x2, x2^2") {
    const MonomialBasis b(2, 2);
    const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    REQUIRE(b.size() == expected.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b[i].exponents() == expected[i]);
    }
}

TEST_CASE("basis index round trip, density and size") {
    for (int n = 1; n <= 4; ++n) {
        for (int d = 0; d <= 6; ++d) {
            const MonomialBasis b(n, d);
            CHECK(b.size() == binomial(n + d, d));
            CHECK(basis_size(n, d) == b.size());
            CHECK(b.index(Monomial::constant(n)) == 0);
            for (std::size_t i = 0; i < b.size(); ++i) {
                CHECK(b.index(b[i]) == i);
                CHECK(b[i].degree() <= d);
                if (i > 0) {
                    CHECK(graded_lex_less(b[i - 1], b[i]));
                    CHECK_FALSE(graded_lex_less(b[i], b[i - 1]));
                }
            }
        }
    }
}

TEST_CASE("basis prefix is the smaller basis") {
    const MonomialBasis big(3, 6);
    for (int d = 0; d <= 6; ++d) {
        const MonomialBasis small(3, d);
        REQUIRE(big.count_up_to(d) == small.size());
        for (std::size_t i = 0; i < small.size(); ++i) {
            CHECK(big[i] == small[i]);
        }
    }
}

TEST_CASE("monomial degree is the exponent sum") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> e(3);
        int sum = 0;
        for (auto& v : e) {
            v = flatpop::testing::uniform_int(rng, 0, 5);
            sum += v;
        }
        CHECK(Monomial(e).degree() == sum);
    }
    CHECK_THROWS(Monomial(std::vector<int>{1, -1}));
}

TEST_CASE("property: evaluation of a product is the product of evaluations") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = flatpop::testing::uniform_int(rng, 1, 3);
        const auto p = flatpop::testing::random_polynomial(rng, n, 4, 5);
        const auto q = flatpop::testing::random_polynomial(rng, n, 4, 5);
        const auto x = flatpop::testing::random_point(rng, n, -2.0, 2.0);
        const double lhs = evaluate(p * q, x);
        const double rhs = flatpop::testing::naive_evaluate(p, x) * flatpop::testing::naive_evaluate(q, x);
        const double scale = std::max(1.0, (p.coefficient_norm1() * q.coefficient_norm1()) * std::pow(2.0, 8));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("property: derivative matches central finite differences") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = flatpop::testing::uniform_int(rng, 1, 3);
        const auto p = flatpop::testing::random_polynomial(rng, n, 5, 6);
        const auto x = flatpop::testing::random_point(rng, n);
        const int i = flatpop::testing::uniform_int(rng, 0, n - 1);
        const double h = 1e-5;
        auto xp = x;
        auto xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        const double fd =
            (flatpop::testing::naive_evaluate(p, xp) - flatpop::testing::naive_evaluate(p, xm)) / (2.0 * h);
        const double d = evaluate(partial_derivative(p, i), x);
        CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)) * std::max(1.0, p.coefficient_norm1()));
    }
}

TEST_CASE("zero coefficients are never stored") {
    const auto p = poly("x1^2 + x1", 1) - poly("x1^2", 1);
    CHECK(p.size() == 1);
    CHECK((p - p).is_zero());
    CHECK_THROWS_AS((p - p).degree(), std::domain_error);
}

TEST_CASE("text form") {
    SUBCASE("round trip of random polynomials") {
        Rng rng(99);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = flatpop::testing::uniform_int(rng, 1, 3);
            const auto p = flatpop::testing::random_dense_polynomial(rng, n, 3);
            CHECK(parse_polynomial(to_string(p), n) == p);
        }
    }
    SUBCASE("whitespace is insignificant") {
        CHECK(poly(" x1 ^ 2 *x2-  3 * x2 ", 2) == poly("x1^2*x2 - 3*x2", 2));
    }
    SUBCASE("decimal coefficients") {
        const std::vector<double> x{2.0};
        CHECK(evaluate(poly("0.5*x1^2 - 1.25", 1), x) == 0.75);
    }
    SUBCASE("errors carry a column") {
        try {
            parse_polynomial("x1 + * x2", 2);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
            CHECK(e.column() == 6);
        }
        CHECK_THROWS_AS(parse_polynomial("x3", 2), ParseError);
        CHECK_THROWS_AS(parse_polynomial("x1^", 1), ParseError);
    }
}
