// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "oracles.hpp"
#include "pbn/cli.hpp"
#include "pbn/composite.hpp"
#include "pbn/error.hpp"
#include "pbn/lang.hpp"
#include "pbn/markov.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace pbn;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome within(double residual, double tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "max_residual=%.3e tol=%.0e", residual, tol);
    return {residual <= tol, buf};
}

Outcome both(const Outcome &a, const Outcome &b) {
    return {a.pass && b.pass, a.detail + "; " + b.detail};
}

DiscreteSpace six_point(std::mt19937_64 &rng) {
    return DiscreteSpace(oracle::labels(6), oracle::random_distribution(rng, 6));
}

Outcome ac1() {
    std::mt19937_64 rng(1);
    const auto s = six_point(rng);
    double worst = 0.0;
    int pairs = 0;
    for (unsigned long long mb = 0; mb < 64; ++mb) {
        const Event b = event_from_bits(s, mb);
        if (!(event_prob(s, b) > 0.0))
            continue;
        for (unsigned long long ma = 0; ma < 64; ++ma) {
            const Event a = event_from_bits(s, ma);
            ++pairs;
            // The Bayes form divides by P(A); for empty A both sides are 0.
            const double rhs = a.empty() ? 0.0 : bayes(s, a, b);
            worst = std::max(worst, std::abs(bracket(s, a, b) - rhs));
        }
    }
    auto o = within(worst, 1e-12);
    o.detail += " pairs=" + std::to_string(pairs);
    return o;
}

Outcome ac2() {
    std::mt19937_64 rng(2);
    const auto s = six_point(rng);
    double worst = 0.0;
    for (unsigned long long mb = 1; mb < 64; ++mb)
        worst = std::max(worst, std::abs(bracket(s, s.omega(), event_from_bits(s, mb)) - 1.0));
    worst = std::max(worst, std::abs(contract(system_bra(s), system_ket(s)) - 1.0));
    const auto brackets = within(worst, 1e-12);
    const auto u = DensityModel::uniform(0.0, 1.0);
    const double mass = integrate([&](double x) { return u(x); }, 0.0, 1.0);
    return both(brackets, within(std::abs(mass - 1.0), 1e-10));
}

Outcome ac3() {
    const auto die = DiscreteSpace::uniform(oracle::die_labels());
    const Observable x(std::vector<double>{1, 2, 3, 4, 5, 6});
    double worst = 0.0;
    for (unsigned long long mb = 1; mb < 64; ++mb) {
        const Event b = event_from_bits(die, mb);
        worst = std::max(worst, std::abs(expectation_indicator(die, x, b) -
                                         event_prob(die, b) * conditional_expectation(die, x, b)));
    }
    const auto discrete = within(worst, 1e-12);

    const auto u = DensityModel::uniform(0.0, 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    double worst_c = 0.0;
    for (int i = 0; i < 20; ++i) {
        double a = pos(rng), b = pos(rng);
        if (a > b)
            std::swap(a, b);
        worst_c = std::max(worst_c, density_indicator_identity(u, a, b).residual);
    }
    return both(discrete, within(worst_c, 1e-8));
}

Outcome ac4() {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int m = 0; m < 25; ++m) {
        const TransitionMatrix p(oracle::random_stochastic(rng, 5));
        const auto u0 = oracle::random_distribution(rng, 5);
        for (std::uint64_t t = 0; t <= 10; ++t) {
            const auto row = dtmc_evolve_row(u0, p, t);
            const auto col = dtmc_evolve_ket({PKet{u0}, 0.0}, p, t).ket.coefficients;
            for (std::size_t i = 0; i < 5; ++i)
                worst = std::max(worst, std::abs(row[i] - col[i]));
        }
    }
    return within(worst, 1e-12);
}

Outcome ac5() {
    Eigen::MatrixXd g(2, 2);
    g << -1, 1, 2, -2;
    const Generator two(g);
    double worst = 0.0;
    for (double t : {0.1, 1.0, 5.0})
        for (double p0 : {1.0, 0.0}) {
            const auto k = ctmc_evolve({PKet{{p0, 1.0 - p0}}, 0.0}, two, t);
            worst = std::max(worst, std::abs(k.ket.coefficients[0] - oracle::two_state_p0(1, 2, p0, t)));
        }
    const auto closed = within(worst, 1e-10);

    const auto birth = pure_birth_generator(1.0, 40);
    std::vector<double> start(41, 0.0);
    start[0] = 1.0;
    const auto k = ctmc_evolve({PKet{start}, 0.0}, birth, 1.0);
    double worst_p = 0.0;
    for (unsigned n = 0; n <= 10; ++n)
        worst_p = std::max(worst_p, std::abs(k.ket.coefficients[n] - oracle::poisson_pmf(1.0, n)));
    return both(closed, within(worst_p, 1e-10));
}

Outcome ac6() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> time(1e-6, 5.0);
    double semigroup = 0.0, columns = 0.0;
    for (int m = 0; m < 10; ++m) {
        const Generator g(oracle::random_generator(rng, 2 + m % 5));
        double t = time(rng), s = time(rng);
        if (m == 0)
            t = s = 5.0;
        const auto ut = ctmc_propagator(g, t).matrix;
        const auto us = ctmc_propagator(g, s).matrix;
        const auto uts = ctmc_propagator(g, t + s).matrix;
        semigroup = std::max(semigroup, (uts - ut * us).cwiseAbs().maxCoeff());
        for (const auto *u : {&ut, &us, &uts})
            columns = std::max(columns, (u->colwise().sum().array() - 1.0).abs().maxCoeff());
    }
    return both(within(semigroup, 1e-9), within(columns, 1e-10));
}

Outcome ac7() {
    std::vector<std::pair<Dynamics, PKet>> cases;
    Eigen::MatrixXd p(2, 2);
    p << 0.5, 0.5, 0.25, 0.75;
    cases.emplace_back(TransitionMatrix(p), PKet{{1.0, 0.0}});
    Eigen::MatrixXd g(2, 2);
    g << -1, 1, 2, -2;
    cases.emplace_back(Generator(g), PKet{{1.0, 0.0}});
    std::mt19937_64 rng(7);
    for (int m = 0; m < 5; ++m) {
        const int n = 3 + m % 3;
        if (m % 2 == 0)
            cases.emplace_back(TransitionMatrix(oracle::random_stochastic(rng, n, 2.0)),
                               PKet{oracle::random_distribution(rng, n)});
        else
            cases.emplace_back(Generator(oracle::random_generator(rng, n)),
                               PKet{oracle::random_distribution(rng, n)});
    }
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    double pictures = 0.0, unit = 0.0;
    for (const auto &[d, p0] : cases) {
        std::vector<double> xs(p0.coefficients.size());
        for (double &v : xs)
            v = val(rng);
        const Observable x(xs);
        for (double t : {0.0, 1.0, 2.0, 3.0}) {
            pictures = std::max(pictures, heisenberg_expectation(x, d, p0, t).residual());
            pictures = std::max(pictures, heisenberg_expectation(x, d, p0, t, [](double v) { return v * v; }).residual());
            unit = std::max(unit, time_dependent_unit_check(d, t));
        }
    }
    return both(within(pictures, 1e-10), within(unit, 1e-9));
}

Outcome ac8() {
    std::mt19937_64 rng(8);
    const std::vector<RealFn> fs{[](double) { return 1.0; }, [](double n) { return n; },
                                 [](double n) { return n * n; }};
    double worst = 0.0;
    for (int m = 0; m < 10; ++m) {
        const auto os = OccupationSpace::single_site(oracle::random_distribution(rng, 13));
        const auto n = os.number(0);
        for (const auto &f : fs)
            worst = std::max(worst, std::abs(peliti_expectation(os, f) - expectation_fn(os.space(), f, n)));
    }
    return within(worst, 1e-12);
}

Outcome ac9() {
    double worst = 0.0;
    for (double rate : {1.0, 2.0}) {
        const auto g = pure_birth_generator(rate, 40);
        for (auto [t, s] : {std::pair{1.0, 0.5}, std::pair{0.5, 1.0}})
            worst = std::max(worst, increment_stationarity_check(g, t, s));
    }
    return within(worst, 1e-8);
}

// Random well-formed query text.
std::string random_query(std::mt19937_64 &rng) {
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    const std::vector<std::string> idents{"A", "B", "X", "even", "f_2", "s.1", "Q9"};
    auto ident = [&] { return idents[pick(idents.size())]; };
    auto number = [&] {
        std::string s = std::to_string(pick(50));
        return pick(2) ? s + "." + std::to_string(pick(100)) : s;
    };
    auto term = [&]() -> std::string {
        switch (pick(3)) {
        case 0:
            return ident();
        case 1: {
            std::string s = "{" + ident();
            for (std::size_t k = pick(3); k > 0; --k)
                s += "," + (pick(2) ? ident() : number());
            return s + "}";
        }
        default:
            return pick(2) ? "Omega" : "Omega@" + number();
        }
    };
    auto event = [&] {
        std::string s = term();
        for (std::size_t k = pick(3); k > 0; --k)
            s += "&" + term();
        return s;
    };
    auto op = [&] { return pick(2) ? ident() : ident() + "(" + ident() + ")"; };
    switch (pick(3)) {
    case 0:
        return "P(" + event() + "|" + event() + ")";
    case 1:
        return "P(Omega|" + op() + "|" + event() + ")";
    default:
        return "E[" + op() + (pick(2) ? "|" + event() : "") + "]";
    }
}

Outcome ac10() {
    std::mt19937_64 rng(10);
    int roundtrip_failures = 0;
    for (int i = 0; i < 1000; ++i) {
        try {
            const auto q = lang::parse(random_query(rng));
            if (!(lang::parse(lang::print(q)) == q))
                ++roundtrip_failures;
        } catch (const Error &) {
            ++roundtrip_failures;
        }
    }

    int unpositioned = 0;
    for (int i = 0; i < 100000; ++i) {
        std::string s(rng() % 33, '\0');
        for (char &c : s)
            c = static_cast<char>(rng() & 0xff);
        if (i % 2)
            s = random_query(rng).substr(0, rng() % 24) + s.substr(0, rng() % 4);
        try {
            lang::parse(s);
        } catch (const LexError &e) {
            unpositioned += e.position() >= s.size();
        } catch (const ParseError &e) {
            unpositioned += e.position() > s.size();
        } catch (...) {
            ++unpositioned;
        }
    }

    int golden_mismatches = 0;
    const std::vector<std::vector<std::string>> runs{
        {"dtmc2", "10", "1", "X"}, {"ctmc2", "5", "0.25", "X"}, {"birth", "3", "0.5", "N"}};
    for (const auto &r : runs) {
        std::ifstream in(std::string(PBN_GOLDEN_DIR) + "/" + r[0] + ".csv", std::ios::binary);
        std::stringstream golden;
        golden << in.rdbuf();
        for (int rep = 0; rep < 2; ++rep) {
            const auto m = cli::load_model(std::string(PBN_FIXTURE_DIR) + "/" + r[0] + ".json");
            std::ostringstream out, err;
            cli::cmd_evolve(m, std::stod(r[1]), std::stod(r[2]), r[3], out, err);
            golden_mismatches += out.str() != golden.str();
        }
    }
    return {roundtrip_failures == 0 && unpositioned == 0 && golden_mismatches == 0,
            "roundtrip_failures=" + std::to_string(roundtrip_failures) +
                " unpositioned_errors=" + std::to_string(unpositioned) +
                " golden_mismatches=" + std::to_string(golden_mismatches)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 bracket/bayes equivalence", ac1},
        {"AC2 normalization suite", ac2},
        {"AC3 indicator identity", ac3},
        {"AC4 row/column duality", ac4},
        {"AC5 ctmc closed-form and poisson oracles", ac5},
        {"AC6 semigroup and conservation", ac6},
        {"AC7 picture equivalence and unit operator", ac7},
        {"AC8 doi/peliti agreement", ac8},
        {"AC9 increment stationarity", ac9},
        {"AC10 language robustness and golden csv", ac10},
    };
    int failures = 0;
    for (const auto &[name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s (%s, %.0f ms)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), ms);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
