#ifndef PBN_MARKOV_HPP
#define PBN_MARKOV_HPP

#include "pbn/observables.hpp"
#include "pbn/space.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace pbn {

inline constexpr Eigen::Index kMaxStates = 4096;
/// Roundoff allowance: entries in [-kClampTolerance, 0) are read as 0.
inline constexpr double kClampTolerance = 1e-12;
inline constexpr double kConservationTolerance = 1e-10;

/// Row-stochastic one-step matrix; row i is the source state.
class TransitionMatrix {
  public:
    /// Throws NonStochasticMatrix, CapacityExceeded.
    explicit TransitionMatrix(Eigen::MatrixXd p);
    const Eigen::MatrixXd &matrix() const { return m_p; }
    Eigen::Index size() const { return m_p.rows(); }

  private:
    Eigen::MatrixXd m_p;
};

/// Q-matrix: G_ij is the rate i→j for i≠j, rows sum to zero.
class Generator {
  public:
    /// Throws InvalidGenerator, CapacityExceeded.
    explicit Generator(Eigen::MatrixXd g);
    const Eigen::MatrixXd &matrix() const { return m_g; }
    Eigen::Index size() const { return m_g.rows(); }

  private:
    Eigen::MatrixXd m_g;
};

using Dynamics = std::variant<TransitionMatrix, Generator>;

struct UniformizationOptions {
    double tolerance = 1e-12;       ///< Poisson tail mass allowed
    std::uint64_t max_terms = 1'000'000;
};

/// U(t) acting on column kets: (Pᵀ)^t or exp(Gᵀ t).
struct Propagator {
    enum class Origin { dtmc_power, ctmc_uniformization };
    Eigen::MatrixXd matrix;
    Origin origin;
    double time;
};

/// |Ω_t) together with its time.
struct SystemKetAtT {
    PKet ket;
    double time = 0.0;
};

/// Throws NormalizationViolation if `p` is not a distribution.
void require_distribution(const std::vector<double> &p);

/// u(t) = u(0) P^t by repeated right multiplication.
std::vector<double> dtmc_evolve_row(const std::vector<double> &u0,
                                    const TransitionMatrix &p, std::uint64_t t);
/// |Ω_t) = (Pᵀ)^t |Ω_0).
SystemKetAtT dtmc_evolve_ket(const SystemKetAtT &k0, const TransitionMatrix &p,
                             std::uint64_t t);

/// Σ_i F(x_i) m(ω_i, t). Throws DimensionMismatch.
double expectation_at_t(const DiscreteSpace &space, const RealFn &f,
                        const Observable &x, const SystemKetAtT &ket);

Propagator dtmc_propagator(const TransitionMatrix &p, std::uint64_t t);

/// exp(Gᵀ t) by uniformization. Throws TruncationFailure when the Poisson
/// series needs more than `max_terms` terms.
Propagator ctmc_propagator(const Generator &g, double t,
                           const UniformizationOptions &opts = {});

/// Builds U(t) for either kind of dynamics. DTMC times must be non-negative
/// integers (NonIntegerTimeForDTMC).
Propagator propagator(const Dynamics &d, double t,
                      const UniformizationOptions &opts = {});

/// Applies U to a ket, clamps roundoff negatives, checks conservation.
SystemKetAtT apply(const Propagator &u, const SystemKetAtT &k0);

SystemKetAtT ctmc_evolve(const SystemKetAtT &k0, const Generator &g, double t,
                         const UniformizationOptions &opts = {});

struct StationaryOptions {
    double residual = 1e-12;
    std::uint64_t max_sweeps = 1'000'000;
};

/// Stationary distribution by power iteration on the lazy chain (I+P)/2.
/// Throws Reducible, NoConvergence.
PKet stationary(const TransitionMatrix &p, const StationaryOptions &opts = {});
PKet stationary(const Generator &g, const StationaryOptions &opts = {});

/// True when every state reaches every other on the nonzero pattern.
bool is_irreducible(const Eigen::MatrixXd &pattern);

/// X(t) = U⁻¹ diag(x) U. Throws SingularPropagator when |det U| ≤ 1e-12.
Eigen::MatrixXd heisenberg_observable(const Observable &x, const Propagator &u);

struct PictureComparison {
    double heisenberg;
    double schrodinger;
    double residual() const;
};

/// P(Ω|F(X)(t)|Ω) in the Heisenberg picture against P(Ω|F(X)|Ω_t).
PictureComparison heisenberg_expectation(const Observable &x,
                                         const Dynamics &d,
                                         const PKet &initial, double t,
                                         const RealFn &f = {},
                                         const UniformizationOptions &opts = {});

/// f(x,t) via P(x|Ω_t) (Schrödinger) and via P(x,t|Ω), the Heisenberg
/// expectation of the indicator of x.
PictureComparison density_two_pictures(const Dynamics &d, const PKet &initial,
                                       std::size_t x_index, double t,
                                       const UniformizationOptions &opts = {});

/// max |Σ_i U⁻¹|i)(i|U − I|.
double time_dependent_unit_check(const Dynamics &d, double t,
                                 const UniformizationOptions &opts = {});

/// Boundary mass allowed at the cutoff state of a counting chain.
inline constexpr double kBoundaryMass = 1e-10;

/// max_x |P(X_{t+s} − X_s = x) − f(x,t)| for a pure-birth counting chain
/// started at state 0. Throws InvalidGenerator if `g` is not pure-birth,
/// CutoffTooSmall if the cutoff state carries mass above kBoundaryMass at
/// t+s.
double increment_stationarity_check(const Generator &g, double t, double s,
                                    const UniformizationOptions &opts = {});

/// Pure-birth generator with constant rate on states 0..cutoff; the cutoff
/// state is absorbing.
Generator pure_birth_generator(double rate, std::size_t cutoff);

} // namespace pbn

#endif
