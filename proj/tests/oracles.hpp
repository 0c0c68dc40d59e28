// Independent reference computations for the test suites. Nothing here calls
// into the engine's evolution or algebra code paths.
#ifndef PBN_TESTS_ORACLES_HPP
#define PBN_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// P(path distribution at step t) by summing over all state sequences of
/// length t: Σ_{i0..it} u0[i0] Π P[i_k][i_{k+1}].
inline std::vector<double> enumerate_paths(const std::vector<double> &u0,
                                           const std::vector<std::vector<double>> &p,
                                           int t) {
    const std::size_t n = u0.size();
    std::vector<double> out(n, 0.0);
    std::vector<std::size_t> path(t + 1, 0);
    std::function<void(int, double)> walk = [&](int depth, double prob) {
        if (depth == t) {
            out[path[depth]] += prob;
            return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            path[depth + 1] = j;
            walk(depth + 1, prob * p[path[depth]][j]);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        path[0] = i;
        walk(0, u0[i]);
    }
    return out;
}

/// Two-state chain with rate a (0→1) and b (1→0):
/// p0(t) = b/(a+b) + (p0(0) − b/(a+b)) e^{−(a+b)t}.
inline double two_state_p0(double a, double b, double p0_initial, double t) {
    const double eq = b / (a + b);
    return eq + (p0_initial - eq) * std::exp(-(a + b) * t);
}

/// Poisson pmf e^{−μ} μ^k / k!.
inline double poisson_pmf(double mu, unsigned k) {
    double term = std::exp(-mu);
    for (unsigned j = 1; j <= k; ++j)
        term *= mu / j;
    return term;
}

/// Dense matrix exponential by Taylor series with scaling and squaring. Only
/// used for cross-checking small generators.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd &a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Eigen::MatrixXd as = a * scale;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * as / k;
        sum += term;
    }
    for (int i = 0; i < squarings; ++i)
        sum = sum * sum;
    return sum;
}

/// Random row-stochastic matrix with a boosted diagonal (keeps det away from 0).
inline Eigen::MatrixXd random_stochastic(std::mt19937_64 &rng, int n,
                                         double diagonal_boost = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            p(i, j) = u(rng) + (i == j ? diagonal_boost : 0.0);
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

/// Random generator with rates in [0, max_rate); diagonal = −row sum.
inline Eigen::MatrixXd random_generator(std::mt19937_64 &rng, int n,
                                        double max_rate = 2.0) {
    std::uniform_real_distribution<double> u(0.0, max_rate);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            if (i != j) {
                g(i, j) = u(rng);
                s += g(i, j);
            }
        g(i, i) = -s;
    }
    return g;
}

inline std::vector<double> random_distribution(std::mt19937_64 &rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (double &x : w)
        s += (x = u(rng));
    for (double &x : w)
        x /= s;
    return w;
}

inline std::vector<std::string> labels(std::size_t n, const std::string &prefix = "s") {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(prefix + std::to_string(i));
    return out;
}

inline std::vector<std::string> die_labels() {
    return {"1", "2", "3", "4", "5", "6"};
}

} // namespace oracle

#endif
