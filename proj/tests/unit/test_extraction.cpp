#include <doctest.h>

#include <cmath>
#include <vector>

#include "flatpop/extraction.hpp"
#include "test_support.hpp"

using namespace flatpop;
namespace ft = flatpop::testing;

namespace {

Polynomial poly(const char* text, int nvars) { return parse_polynomial(text, nvars); }

Problem interval() { return Problem(poly("-x1^2", 1), {poly("1 - x1^2", 1)}); }

AtomicMeasure measure(std::vector<std::vector<double>> atoms, std::vector<double> weights) {
    AtomicMeasure m;
    m.atoms = std::move(atoms);
    m.weights = std::move(weights);
    return m;
}

}  // namespace

TEST_CASE("single atom") {
    const std::vector<WeightedPoint> a{{1.0, {0.4, -1.3}}};
    const auto m = extract_atoms(atomic_tms(a, 2), 1);
    REQUIRE(m.size() == 1);
    CHECK(std::abs(m.atoms[0][0] - 0.4) <= 1e-10);
    CHECK(std::abs(m.atoms[0][1] + 1.3) <= 1e-10);
    CHECK(m.weights[0] == doctest::Approx(1.0));
    CHECK(m.residual <= 1e-10);
}

TEST_CASE("two atoms on the line") {
    const std::vector<WeightedPoint> a{{0.5, {-1.0}}, {0.5, {1.0}}};
    const auto m = extract_atoms(atomic_tms(a, 2), 2);
    const auto match = ft::match_atoms(a, m.atoms, m.weights);
    CHECK(match.atom_error <= 1e-10);
    CHECK(match.weight_error <= 1e-10);
    CHECK(m.pivots == std::vector<std::string>{"1", "x1"});
}

TEST_CASE("three atoms in the plane") {
    const std::vector<WeightedPoint> a{{1.0 / 3, {0.0, 0.0}}, {1.0 / 3, {1.0, 0.0}}, {1.0 / 3, {0.0, 1.0}}};
    const auto m = extract_atoms(atomic_tms(a, 2), 3);
    const auto match = ft::match_atoms(a, m.atoms, m.weights);
    CHECK(match.atom_error <= 1e-8);
    CHECK(match.weight_error <= 1e-8);
    CHECK(m.residual <= 1e-8);
}

TEST_CASE("property: extraction round trip") {
    ft::Rng rng(71);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = ft::uniform_int(rng, 1, 3);
        const int r = ft::uniform_int(rng, 1, 4);
        const auto atoms = ft::random_atoms(rng, n, r);
        const Tms z = atomic_tms(atoms, std::max(1, r));
        const auto rep = check_flat_truncation(z, 1, 1);
        REQUIRE(rep.flat_order);
        const auto m = extract_atoms(z, r);
        const auto match = ft::match_atoms(atoms, m.atoms, m.weights);
        CHECK(match.atom_error <= 1e-6);
        CHECK(match.weight_error <= 1e-6);
        double total = 0.0;
        for (double w : m.weights) {
            CHECK(w > 0.0);
            total += w;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("property: extraction does not depend on the seed") {
    ft::Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = ft::uniform_int(rng, 1, 3);
        const int r = ft::uniform_int(rng, 2, 4);
        const auto atoms = ft::random_atoms(rng, n, r);
        const Tms z = atomic_tms(atoms, r);
        const auto ref = extract_atoms(z, r, kDefaultRankTol, 0);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto m = extract_atoms(z, r, kDefaultRankTol, seed);
            CHECK(ft::set_distance(ref.atoms, m.atoms) <= 1e-8);
        }
    }
}

TEST_CASE("wrong rank is reported as an extraction failure") {
    const std::vector<WeightedPoint> a{{0.5, {-1.0}}, {0.5, {1.0}}};
    CHECK_THROWS_AS(extract_atoms(atomic_tms(a, 2), 1), ExtractionError);
}

TEST_CASE("non-flat tms is reported as an extraction failure") {
    ft::Rng rng(79);
    const auto atoms = ft::random_atoms(rng, 1, 8, 0.1);
    CHECK_THROWS_AS(extract_atoms(atomic_tms(atoms, 2), 3), ExtractionError);
}

TEST_CASE("verify_atoms examples") {
    const std::vector<WeightedPoint> a{{0.5, {-1.0}}, {0.5, {1.0}}};
    const Tms z = atomic_tms(a, 2);

    const auto good = verify_atoms(measure({{-1.0}, {1.0}}, {0.5, 0.5}), interval(), z, -1.0, 1e-6);
    CHECK(good.passed);
    CHECK(good.failures.empty());
    REQUIRE(good.atoms.size() == 2);
    CHECK(good.atoms[0].inequality_values[0] == doctest::Approx(0.0));

    const std::vector<WeightedPoint> origin{{1.0, {0.0}}};
    const auto wrong = verify_atoms(measure({{0.0}}, {1.0}), interval(), atomic_tms(origin, 2), -1.0, 1e-6);
    CHECK_FALSE(wrong.passed);
    CHECK_FALSE(wrong.atoms[0].optimal);

    const std::vector<WeightedPoint> two{{1.0, {2.0}}};
    const auto outside = verify_atoms(measure({{2.0}}, {1.0}), interval(), atomic_tms(two, 2), -4.0, 1e-6);
    CHECK_FALSE(outside.passed);
    CHECK_FALSE(outside.atoms[0].feasible);
    CHECK(outside.atoms[0].inequality_values[0] == doctest::Approx(-3.0));
}

TEST_CASE("verify_atoms checks equalities and the moment residual") {
    const Problem circle(poly("x1 + x2", 2), {}, {poly("x1^2 + x2^2 - 1", 2)});
    const double s = std::sqrt(0.5);
    const std::vector<WeightedPoint> a{{1.0, {-s, -s}}};
    const Tms z = atomic_tms(a, 1);
    CHECK(verify_atoms(measure({{-s, -s}}, {1.0}), circle, z, -std::sqrt(2.0), 1e-6).passed);

    const auto off = verify_atoms(measure({{-1.0, 0.0}}, {1.0}), circle, z, -1.0, 1e-6);
    CHECK_FALSE(off.passed);
    CHECK(off.moment_residual > 1e-3);
}
