#include "pbn/markov.hpp"

#include "pbn/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace pbn {

namespace {

std::string fmt_index(Eigen::Index i) { return std::to_string(i); }

void require_square(const Eigen::MatrixXd &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw DimensionMismatch(std::string(what) + " must be square and non-empty");
    if (m.rows() > kMaxStates)
        throw CapacityExceeded(std::string(what) + " exceeds " +
                               std::to_string(kMaxStates) + " states");
    if (!m.allFinite())
        throw DimensionMismatch(std::string(what) + " has non-finite entries");
}

Eigen::VectorXd as_vector(const std::vector<double> &v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(v.size()));
}

std::vector<double> as_std(const Eigen::VectorXd &v) {
    return {v.data(), v.data() + v.size()};
}

// Clamps roundoff negatives to zero; anything more negative is an error.
void clamp_nonnegative(Eigen::VectorXd &v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) < -kClampTolerance)
            throw NormalizationViolation("probability " + fmt_index(i) +
                                         " is negative: " + std::to_string(v(i)));
        if (v(i) < 0.0)
            v(i) = 0.0;
    }
}

void require_conserved(const Eigen::VectorXd &v) {
    const double s = v.sum();
    if (std::abs(s - 1.0) > kConservationTolerance)
        throw NormalizationViolation("evolved ket sums to " + std::to_string(s));
}

bool is_integral(double t) { return std::floor(t) == t; }

} // namespace

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd p) : m_p(std::move(p)) {
    require_square(m_p, "transition matrix");
    for (Eigen::Index i = 0; i < m_p.rows(); ++i) {
        for (Eigen::Index j = 0; j < m_p.cols(); ++j) {
            if (m_p(i, j) < -kClampTolerance)
                throw NonStochasticMatrix("entry (" + fmt_index(i) + "," +
                                          fmt_index(j) + ") is negative");
            m_p(i, j) = std::max(m_p(i, j), 0.0);
        }
        const double s = m_p.row(i).sum();
        if (std::abs(s - 1.0) > kAlgebraTolerance)
            throw NonStochasticMatrix("row " + fmt_index(i) + " sums to " +
                                      std::to_string(s));
    }
}

Generator::Generator(Eigen::MatrixXd g) : m_g(std::move(g)) {
    require_square(m_g, "generator");
    for (Eigen::Index i = 0; i < m_g.rows(); ++i) {
        for (Eigen::Index j = 0; j < m_g.cols(); ++j) {
            if (i == j)
                continue;
            if (m_g(i, j) < -kClampTolerance)
                throw InvalidGenerator("rate (" + fmt_index(i) + "," +
                                       fmt_index(j) + ") is negative");
            m_g(i, j) = std::max(m_g(i, j), 0.0);
        }
        const double s = m_g.row(i).sum();
        if (std::abs(s) > kAlgebraTolerance)
            throw InvalidGenerator("row " + fmt_index(i) + " sums to " +
                                   std::to_string(s) + ", expected 0");
    }
}

void require_distribution(const std::vector<double> &p) {
    double s = 0.0;
    for (double v : p) {
        if (!(v >= -kClampTolerance))
            throw NormalizationViolation("distribution has a negative entry");
        s += v;
    }
    if (std::abs(s - 1.0) > kConservationTolerance)
        throw NormalizationViolation("distribution sums to " + std::to_string(s));
}

std::vector<double> dtmc_evolve_row(const std::vector<double> &u0,
                                    const TransitionMatrix &p, std::uint64_t t) {
    if (static_cast<Eigen::Index>(u0.size()) != p.size())
        throw DimensionMismatch("row vector and transition matrix sizes differ");
    require_distribution(u0);
    Eigen::RowVectorXd u = as_vector(u0).transpose();
    for (std::uint64_t k = 0; k < t; ++k)
        u = u * p.matrix();
    return {u.data(), u.data() + u.size()};
}

SystemKetAtT dtmc_evolve_ket(const SystemKetAtT &k0, const TransitionMatrix &p,
                             std::uint64_t t) {
    if (static_cast<Eigen::Index>(k0.ket.coefficients.size()) != p.size())
        throw DimensionMismatch("ket and transition matrix sizes differ");
    require_distribution(k0.ket.coefficients);
    const Eigen::MatrixXd pt = p.matrix().transpose();
    Eigen::VectorXd v = as_vector(k0.ket.coefficients);
    for (std::uint64_t k = 0; k < t; ++k)
        v = pt * v;
    clamp_nonnegative(v);
    return {PKet{as_std(v)}, k0.time + static_cast<double>(t)};
}

double expectation_at_t(const DiscreteSpace &space, const RealFn &f,
                        const Observable &x, const SystemKetAtT &ket) {
    if (ket.ket.coefficients.size() != space.size() || x.size() != space.size())
        throw DimensionMismatch("ket, observable and space sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        s += (f ? f(x[i]) : x[i]) * ket.ket.coefficients[i];
    return s;
}

namespace {

template <class T> using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Rows rescaled to sum to 1 in the working precision; validation only
// guarantees 1e-12.
template <class T> Mat<T> stochastic_in(const Eigen::MatrixXd &m) {
    Mat<T> out = m.cast<T>();
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        out.row(i) /= out.row(i).sum();
    return out;
}

template <class T> Mat<T> transposed_power(const TransitionMatrix &p, std::uint64_t t) {
    const Mat<T> pt = stochastic_in<T>(p.matrix()).transpose();
    Mat<T> u = Mat<T>::Identity(p.size(), p.size());
    for (std::uint64_t k = 0; k < t; ++k)
        u = pt * u;
    return u;
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidTime("propagation time must be finite and non-negative");
}

// exp(Gᵀt) = Σ_k Poisson(k; λt) (Sᵀ)^k with S = I + G/λ.
template <class T>
Mat<T> uniformize(const Generator &g, double t, const UniformizationOptions &opts) {
    require_time(t);
    const Eigen::Index n = g.size();
    const Mat<T> id = Mat<T>::Identity(n, n);
    const double lambda = g.matrix().diagonal().cwiseAbs().maxCoeff();
    if (t == 0.0 || lambda == 0.0)
        return id;

    // S = I + G/λ with the diagonal taken as 1 − Σ off-diagonal, so rows sum
    // to 1 in the working precision.
    Mat<T> q = g.matrix().cast<T>() / static_cast<T>(lambda);
    for (Eigen::Index i = 0; i < n; ++i) {
        q(i, i) = 0;
        q(i, i) = std::max(T(0), T(1) - q.row(i).sum());
    }
    const Mat<T> qt = q.transpose();

    // Poisson(λt) weights in log space so e^{-λt} never underflows the
    // whole series; the tail after term k is bounded by
    // w_{k+1} / (1 - λt/(k+2)) once k+2 > λt.
    const T mu = static_cast<T>(lambda) * static_cast<T>(t);
    const T log_mu = std::log(mu);
    auto weight = [&](std::uint64_t k) {
        const T kd = static_cast<T>(k);
        return std::exp(-mu + kd * log_mu - std::lgamma(kd + T(1)));
    };

    Mat<T> power = id;
    Mat<T> u = Mat<T>::Zero(n, n);
    for (std::uint64_t k = 0;; ++k) {
        if (k >= opts.max_terms)
            throw TruncationFailure("uniformization needs more than " +
                                    std::to_string(opts.max_terms) +
                                    " terms (lambda*t = " +
                                    std::to_string(static_cast<double>(mu)) + ")");
        const T w = weight(k);
        if (w > T(0))
            u.noalias() += w * power;
        const T next = static_cast<T>(k + 2);
        if (next > mu) {
            const T tail = weight(k + 1) / (T(1) - mu / next);
            if (tail < static_cast<T>(opts.tolerance))
                break;
        }
        power = qt * power;
    }
    // Hand the truncated tail mass back, column by column, so conservation
    // holds to roundoff of the final sum rather than of the whole series.
    for (Eigen::Index j = 0; j < n; ++j)
        u.col(j) /= u.col(j).sum();
    return u;
}

} // namespace

Propagator dtmc_propagator(const TransitionMatrix &p, std::uint64_t t) {
    return {transposed_power<double>(p, t), Propagator::Origin::dtmc_power,
            static_cast<double>(t)};
}

Propagator ctmc_propagator(const Generator &g, double t,
                           const UniformizationOptions &opts) {
    return {uniformize<double>(g, t, opts), Propagator::Origin::ctmc_uniformization, t};
}

Propagator propagator(const Dynamics &d, double t,
                      const UniformizationOptions &opts) {
    if (const auto *p = std::get_if<TransitionMatrix>(&d)) {
        require_time(t);
        if (!is_integral(t))
            throw NonIntegerTimeForDTMC("discrete-time chain evaluated at t = " +
                                        std::to_string(t));
        return dtmc_propagator(*p, static_cast<std::uint64_t>(t));
    }
    return ctmc_propagator(std::get<Generator>(d), t, opts);
}

SystemKetAtT apply(const Propagator &u, const SystemKetAtT &k0) {
    if (static_cast<Eigen::Index>(k0.ket.coefficients.size()) != u.matrix.cols())
        throw DimensionMismatch("ket and propagator sizes differ");
    Eigen::VectorXd v = u.matrix * as_vector(k0.ket.coefficients);
    clamp_nonnegative(v);
    require_conserved(v);
    return {PKet{as_std(v)}, k0.time + u.time};
}

SystemKetAtT ctmc_evolve(const SystemKetAtT &k0, const Generator &g, double t,
                         const UniformizationOptions &opts) {
    require_distribution(k0.ket.coefficients);
    return apply(ctmc_propagator(g, t, opts), k0);
}

// --- stationary distribution -------------------------------------------------

bool is_irreducible(const Eigen::MatrixXd &pattern) {
    const Eigen::Index n = pattern.rows();
    auto reach_all = [&](bool forward) {
        std::vector<bool> seen(n, false);
        std::deque<Eigen::Index> todo{0};
        seen[0] = true;
        Eigen::Index count = 1;
        while (!todo.empty()) {
            const Eigen::Index i = todo.front();
            todo.pop_front();
            for (Eigen::Index j = 0; j < n; ++j) {
                const double w = forward ? pattern(i, j) : pattern(j, i);
                if (i != j && w > 0.0 && !seen[j]) {
                    seen[j] = true;
                    ++count;
                    todo.push_back(j);
                }
            }
        }
        return count == n;
    };
    return reach_all(true) && reach_all(false);
}

namespace {

// Power iteration on the lazy chain (I+S)/2, which shares the stationary
// vector of S and is aperiodic even when S is not.
PKet lazy_power_iteration(const Eigen::MatrixXd &s,
                          const StationaryOptions &opts) {
    const Eigen::Index n = s.rows();
    const Eigen::MatrixXd lazy =
        0.5 * (Eigen::MatrixXd::Identity(n, n) + s);
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / n);
    for (std::uint64_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const double residual = (pi * s - pi).lpNorm<1>();
        if (residual <= opts.residual) {
            // Converged; keep sweeping while the residual still shrinks so
            // the result is good to roundoff rather than to the threshold.
            double best = residual;
            for (; sweep < opts.max_sweeps && best > 0.0; ++sweep) {
                Eigen::RowVectorXd next = pi * lazy;
                next /= next.sum();
                const double r = (next * s - next).lpNorm<1>();
                if (!(r < best))
                    break;
                pi = std::move(next);
                best = r;
            }
            return PKet{std::vector<double>(pi.data(), pi.data() + n)};
        }
        pi = pi * lazy;
        pi /= pi.sum();
    }
    throw NoConvergence("power iteration did not reach residual " +
                        std::to_string(opts.residual) + " in " +
                        std::to_string(opts.max_sweeps) + " sweeps");
}

} // namespace

PKet stationary(const TransitionMatrix &p, const StationaryOptions &opts) {
    if (!is_irreducible(p.matrix()))
        throw Reducible("reducible chain");
    return lazy_power_iteration(p.matrix(), opts);
}

PKet stationary(const Generator &g, const StationaryOptions &opts) {
    if (!is_irreducible(g.matrix()))
        throw Reducible("reducible chain");
    const Eigen::Index n = g.size();
    const double lambda = g.matrix().diagonal().cwiseAbs().maxCoeff();
    if (lambda == 0.0)
        return PKet{std::vector<double>(n, 1.0 / n)};
    const Eigen::MatrixXd q =
        (Eigen::MatrixXd::Identity(n, n) + g.matrix() / lambda).cwiseMax(0.0);
    return lazy_power_iteration(q, opts);
}

// --- Heisenberg picture -------------------------------------------------------

namespace {

using MatrixXld = Mat<long double>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// The Heisenberg side runs in extended precision: U⁻¹XU is only as good as
// cond(U)·ε, and long-time CTMC propagators are badly conditioned.
struct WidePropagator {
    MatrixXld matrix;
    Propagator::Origin origin;
};

WidePropagator wide_propagator(const Dynamics &d, double t,
                               const UniformizationOptions &opts) {
    if (const auto *p = std::get_if<TransitionMatrix>(&d)) {
        require_time(t);
        if (!is_integral(t))
            throw NonIntegerTimeForDTMC("discrete-time chain evaluated at t = " +
                                        std::to_string(t));
        return {transposed_power<long double>(*p, static_cast<std::uint64_t>(t)),
                Propagator::Origin::dtmc_power};
    }
    return {uniformize<long double>(std::get<Generator>(d), t, opts),
            Propagator::Origin::ctmc_uniformization};
}

Eigen::PartialPivLU<MatrixXld> invertible(const MatrixXld &u, Propagator::Origin origin) {
    Eigen::PartialPivLU<MatrixXld> lu(u);
    const double det = static_cast<double>(lu.determinant());
    // A DTMC step matrix can be singular; exp(Lt) never is, so for CTMC only
    // exact breakdown of the factorization is rejected.
    const bool singular = origin == Propagator::Origin::dtmc_power
                              ? !(std::abs(det) > 1e-12)
                              : !(det != 0.0) || !std::isfinite(det);
    if (singular)
        throw SingularPropagator("propagator is not invertible (det = " +
                                 std::to_string(det) +
                                 "); the Heisenberg picture is unavailable");
    return lu;
}

VectorXld widen(const std::vector<double> &x) {
    VectorXld out(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = x[i];
    return out;
}

// P(Ω| U⁻¹ diag(x) U |p0).
double heisenberg_side(const WidePropagator &u, const std::vector<double> &x,
                       const Eigen::VectorXd &p0) {
    const auto lu = invertible(u.matrix, u.origin);
    const MatrixXld xt = lu.solve(widen(x).asDiagonal() * u.matrix);
    return static_cast<double>((xt * p0.cast<long double>()).sum());
}

Eigen::VectorXd initial_vector(const PKet &initial, Eigen::Index n) {
    if (static_cast<Eigen::Index>(initial.coefficients.size()) != n)
        throw DimensionMismatch("initial ket and dynamics sizes differ");
    require_distribution(initial.coefficients);
    return as_vector(initial.coefficients);
}

} // namespace

Eigen::MatrixXd heisenberg_observable(const Observable &x, const Propagator &u) {
    if (static_cast<Eigen::Index>(x.size()) != u.matrix.rows())
        throw DimensionMismatch("observable and propagator sizes differ");
    const MatrixXld um = u.matrix.cast<long double>();
    const auto lu = invertible(um, u.origin);
    return lu.solve(widen({x.values().begin(), x.values().end()}).asDiagonal() * um)
        .cast<double>();
}

double PictureComparison::residual() const {
    return std::abs(heisenberg - schrodinger);
}

PictureComparison heisenberg_expectation(const Observable &x, const Dynamics &d,
                                         const PKet &initial, double t,
                                         const RealFn &f,
                                         const UniformizationOptions &opts) {
    const Propagator u = propagator(d, t, opts);
    const Eigen::VectorXd p0 = initial_vector(initial, u.matrix.rows());
    std::vector<double> fx(x.values().begin(), x.values().end());
    if (f)
        for (double &v : fx)
            v = f(v);
    const double h = heisenberg_side(wide_propagator(d, t, opts), fx, p0);

    const Eigen::VectorXd pt = u.matrix * p0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < pt.size(); ++i)
        s += fx[i] * pt(i);
    return {h, s};
}

PictureComparison density_two_pictures(const Dynamics &d, const PKet &initial,
                                       std::size_t x_index, double t,
                                       const UniformizationOptions &opts) {
    const Propagator u = propagator(d, t, opts);
    const Eigen::Index n = u.matrix.rows();
    if (static_cast<Eigen::Index>(x_index) >= n)
        throw IndexOutOfRange("state index " + std::to_string(x_index) +
                              " out of range");
    const Eigen::VectorXd p0 = initial_vector(initial, n);
    const double schrodinger = (u.matrix * p0)(static_cast<Eigen::Index>(x_index));

    std::vector<double> indicator(static_cast<std::size_t>(n), 0.0);
    indicator[x_index] = 1.0;
    const double heisenberg = heisenberg_side(wide_propagator(d, t, opts), indicator, p0);
    return {heisenberg, schrodinger};
}

double time_dependent_unit_check(const Dynamics &d, double t,
                                 const UniformizationOptions &opts) {
    const WidePropagator u = wide_propagator(d, t, opts);
    const Eigen::Index n = u.matrix.rows();
    const auto lu = invertible(u.matrix, u.origin);
    const MatrixXld &um = u.matrix;
    MatrixXld sum = MatrixXld::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const VectorXld ket = lu.solve(VectorXld::Unit(n, i)); // |x_i,t)
        sum += ket * um.row(i);                                // P(x_i,t|
    }
    return static_cast<double>((sum - MatrixXld::Identity(n, n)).cwiseAbs().maxCoeff());
}

Generator pure_birth_generator(double rate, std::size_t cutoff) {
    const auto n = static_cast<Eigen::Index>(cutoff + 1);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        g(i, i + 1) = rate;
        g(i, i) = -rate;
    }
    return Generator(std::move(g));
}

double increment_stationarity_check(const Generator &g, double t, double s,
                                    const UniformizationOptions &opts) {
    const Eigen::MatrixXd &m = g.matrix();
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && j != i + 1 && m(i, j) != 0.0)
                throw InvalidGenerator("not a pure-birth counting chain: rate (" +
                                       fmt_index(i) + "," + fmt_index(j) + ")");

    const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(n, 0);
    const Eigen::VectorXd at_end = ctmc_propagator(g, t + s, opts).matrix * e0;
    if (at_end(n - 1) > kBoundaryMass)
        throw CutoffTooSmall("cutoff state holds mass " +
                             std::to_string(at_end(n - 1)) + " at t+s");

    const Eigen::VectorXd ps = ctmc_propagator(g, s, opts).matrix * e0;
    const Eigen::MatrixXd ut = ctmc_propagator(g, t, opts).matrix;
    double worst = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
        double increment = 0.0;
        for (Eigen::Index y = 0; y + x < n; ++y)
            increment += ps(y) * ut(y + x, y);
        worst = std::max(worst, std::abs(increment - ut(x, 0)));
    }
    return worst;
}

} // namespace pbn
