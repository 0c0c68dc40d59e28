#include "doctest.h"

#include "oracles.hpp"
#include "pbn/error.hpp"
#include "pbn/observables.hpp"

#include <cmath>
#include <random>

using namespace pbn;

namespace {

DiscreteSpace die() { return DiscreteSpace::uniform(oracle::die_labels()); }

Observable face(const DiscreteSpace &d) {
    return Observable(d, {{"1", 1}, {"2", 2}, {"3", 3}, {"4", 4}, {"5", 5}, {"6", 6}});
}

// Σ x m(x), written out without the engine.
double direct_mean(const std::vector<double> &x, const std::vector<double> &m) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * m[i];
    return s;
}

} // namespace

TEST_CASE("Observable must value every point") {
    const auto d = die();
    CHECK_THROWS_AS(Observable(d, {{"1", 1.0}}), IncompleteObservable);
    CHECK_THROWS_AS(Observable(d, {{"1", 1}, {"2", 2}, {"3", 3}, {"4", 4},
                                   {"5", 5}, {"6", 6}, {"7", 7}}),
                    UnknownLabel);
}

TEST_CASE("expectation") {
    const auto d = die();
    CHECK(expectation(d, face(d)) ==
          doctest::Approx(direct_mean({1, 2, 3, 4, 5, 6}, std::vector<double>(6, 1.0 / 6))));
    CHECK(expectation(d, face(d)) == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(expectation(d, Observable(std::vector<double>(6, 2.5))) ==
          doctest::Approx(2.5).epsilon(1e-15));

    const DiscreteSpace coin({"h", "t"}, {0.7, 0.3});
    CHECK(expectation(coin, Observable(coin, {{"h", 1}, {"t", 0}})) ==
          doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("expectation_fn") {
    const auto d = die();
    const auto x = face(d);
    CHECK(expectation_fn(d, [](double v) { return v * v; }, x) ==
          doctest::Approx(91.0 / 6.0).epsilon(1e-14));
    CHECK(expectation_fn(d, [](double v) { return v; }, x) == expectation(d, x));
    CHECK(expectation_fn(d, [](double) { return 1.0; }, x) ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conditional_expectation") {
    const auto d = die();
    const auto x = face(d);
    CHECK(conditional_expectation(d, x, {"1", "2", "3"}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(conditional_expectation(d, x, d.omega()) == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(conditional_expectation(d, x, {"5", "6"}) == doctest::Approx(5.5).epsilon(1e-14));
    CHECK_THROWS_AS(conditional_expectation(d, x, {}), ZeroConditioningEvent);
}

TEST_CASE("expectation_indicator") {
    const auto d = die();
    const auto x = face(d);
    CHECK(expectation_indicator(d, x, {"5", "6"}) == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
    CHECK(std::abs(expectation_indicator(d, x, {"5", "6"}) -
                   event_prob(d, {"5", "6"}) * conditional_expectation(d, x, {"5", "6"})) <=
          1e-12);
    CHECK(expectation_indicator(d, x, {}) == 0.0);
    CHECK(expectation_indicator(d, x, d.omega()) == doctest::Approx(expectation(d, x)));
}

TEST_CASE("system ket and bra") {
    const DiscreteSpace coin({"h", "t"}, {0.7, 0.3});
    const auto ket = system_ket(coin);
    const auto bra = system_bra(coin);
    CHECK(ket.coefficients == std::vector<double>{0.7, 0.3});
    CHECK(bra.weights == std::vector<double>{1.0, 1.0});
    CHECK(contract(bra, ket) == doctest::Approx(1.0).epsilon(1e-15));
    // The bra is not the adjoint of the ket for a nonuniform measure.
    CHECK(bra.weights != ket.coefficients);

    const auto u = DiscreteSpace::uniform(oracle::labels(4));
    for (double c : system_ket(u).coefficients)
        CHECK(c == doctest::Approx(0.25));

    CHECK_THROWS_AS(contract(bra, PKet{{1.0}}), DimensionMismatch);
}

TEST_CASE("observable properties on random spaces") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const DiscreteSpace s(oracle::labels(n), oracle::random_distribution(rng, n));
        std::vector<double> xs(n);
        double max_abs = 0.0;
        for (double &v : xs) {
            v = val(rng);
            max_abs = std::max(max_abs, std::abs(v));
        }
        const Observable x(xs);
        const double e = expectation(s, x);
        CHECK(expectation_fn(s, [](double v) { return v; }, x) == e);
        CHECK(std::abs(e) <= max_abs + 1e-12);
        CHECK(std::abs(contract(system_bra(s), system_ket(s)) - 1.0) <= 1e-12);

        for (unsigned long long mb = 1; mb < (1ull << n); ++mb) {
            const Event b = event_from_bits(s, mb);
            const double lhs = expectation_indicator(s, x, b);
            const double rhs = event_prob(s, b) * conditional_expectation(s, x, b);
            CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
    }
}

TEST_CASE("integrate: composite adaptive Simpson") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-11));
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-11));
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
}

TEST_CASE("density model") {
    const auto u = DensityModel::uniform(0.0, 1.0);
    CHECK(std::abs(u.mass() - 1.0) <= 1e-10);
    CHECK(density_expectation(u, [](double x) { return x; }) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(density_expectation(u, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(density_expectation(u, [](double x) { return x * x; }) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    CHECK(density_conditional_expectation(u, 0.5, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(density_conditional_expectation(u, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(density_conditional_expectation(u, 0.0, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(density_conditional_expectation(u, 2.0, 3.0), ZeroConditioningEvent);

    CHECK_THROWS_AS(DensityModel(0.0, 1.0, [](double) { return 2.0; }), NormalizationViolation);
    CHECK_THROWS_AS(DensityModel(1.0, 0.0, [](double) { return 1.0; }), NormalizationViolation);

    SUBCASE("smooth nonuniform density: triangular f(x) = 2x on [0,1]") {
        const DensityModel tri(0.0, 1.0, [](double x) { return 2.0 * x; });
        CHECK(density_expectation(tri, [](double x) { return x; }) ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        // E[X | X in [0.5,1]] = (2/3)(1 - 1/8) / (1 - 1/4) = 7/9
        CHECK(density_conditional_expectation(tri, 0.5, 1.0) ==
              doctest::Approx(7.0 / 9.0).epsilon(1e-11));
        const auto id = density_indicator_identity(tri, 0.2, 0.7);
        CHECK(id.residual <= 1e-8);
    }
}

TEST_CASE("continuous indicator identity on random sub-intervals") {
    const auto u = DensityModel::uniform(0.0, 1.0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double a = pos(rng), b = pos(rng);
        if (a > b)
            std::swap(a, b);
        const auto id = density_indicator_identity(u, a, b);
        // Analytic: ∫_a^b x dx = (b² − a²)/2.
        CHECK(std::abs(id.rhs - 0.5 * (b * b - a * a)) <= 1e-10);
        CHECK(id.residual <= 1e-8);
    }
}
