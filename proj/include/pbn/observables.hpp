#ifndef PBN_OBSERVABLES_HPP
#define PBN_OBSERVABLES_HPP

#include "pbn/space.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pbn {

using RealFn = std::function<double(double)>;

/// Real-valued random variable, X|ω_i) = x_i|ω_i). Values are stored in the
/// point order of the space it was built for.
class Observable {
  public:
    /// Throws IncompleteObservable if a point has no value, UnknownLabel if
    /// `values` names a point outside the space.
    Observable(const DiscreteSpace &space,
               const std::map<std::string, double> &values);

    /// Values already in point order.
    explicit Observable(std::vector<double> values)
        : m_values(std::move(values)) {}

    std::size_t size() const { return m_values.size(); }
    std::span<const double> values() const { return m_values; }
    double operator[](std::size_t i) const { return m_values[i]; }

  private:
    std::vector<double> m_values;
};

/// Right expansion of a system p-ket over the point basis.
struct PKet {
    std::vector<double> coefficients;
};

/// Left expansion of a p-bra over the point basis.
struct PBra {
    std::vector<double> weights;
};

/// (bra| diag(f) |ket). Throws DimensionMismatch.
double contract(const PBra &bra, std::span<const double> diagonal,
                const PKet &ket);
/// (bra|ket). Throws DimensionMismatch.
double contract(const PBra &bra, const PKet &ket);

PKet system_ket(const DiscreteSpace &space);
/// All-ones bra. Not the adjoint of system_ket unless the measure is uniform.
PBra system_bra(const DiscreteSpace &space);

double expectation(const DiscreteSpace &space, const Observable &x);
double expectation_fn(const DiscreteSpace &space, const RealFn &f,
                      const Observable &x);
/// E[X|H] = Σ_i x_i P(ω_i|H). Throws ZeroConditioningEvent.
double conditional_expectation(const DiscreteSpace &space, const Observable &x,
                               const Event &h);
/// P(Ω|X·I_B|Ω). Zero for the empty event.
double expectation_indicator(const DiscreteSpace &space, const Observable &x,
                             const Event &b);

// ---------------------------------------------------------------------------
// Continuous representation: a density on a bounded interval. Brackets over a
// continuous basis all reduce to integrals against f(x) = P(x|Ω).

struct QuadratureOptions {
    double tolerance = 1e-10;
    int initial_panels = 64;
    int max_depth = 60;
};

/// Adaptive composite Simpson on [a, b]. The tolerance is split evenly over
/// the initial panels; each panel refines until the Richardson error
/// estimate is below its share.
double integrate(const RealFn &f, double a, double b,
                 const QuadratureOptions &opts = {});

class DensityModel {
  public:
    /// Throws NormalizationViolation when ∫f deviates from 1 by more than
    /// 100 × tolerance, or when the support is empty.
    DensityModel(double lower, double upper, RealFn density,
                 QuadratureOptions quadrature = {});

    static DensityModel uniform(double lower, double upper,
                                QuadratureOptions quadrature = {});

    double lower() const { return m_lower; }
    double upper() const { return m_upper; }
    double operator()(double x) const { return m_density(x); }
    const QuadratureOptions &quadrature() const { return m_quadrature; }
    /// ∫f over the support as computed at construction.
    double mass() const { return m_mass; }

  private:
    double m_lower;
    double m_upper;
    RealFn m_density;
    QuadratureOptions m_quadrature;
    double m_mass;
};

/// ∫ F(x) f(x) dx over the support.
double density_expectation(const DensityModel &dm, const RealFn &f);

/// P(H|Ω) for H = [lo, hi] clipped to the support.
double density_prob(const DensityModel &dm, double lo, double hi);

/// ∫_H x f dx / ∫_H f dx. Throws ZeroConditioningEvent.
double density_conditional_expectation(const DensityModel &dm, double lo,
                                       double hi);

struct IndicatorIdentity {
    double lhs;      ///< ∫ x I_H(x) f(x) dx over the full support
    double rhs;      ///< P(H) · E[X|H]
    double residual; ///< |lhs - rhs|
};

/// Evaluates both sides of E[X·I_H] = P(H)·E[X|H]. The left side integrates
/// the discontinuous product over the whole support; the right side uses
/// integrals restricted to H.
IndicatorIdentity density_indicator_identity(const DensityModel &dm, double lo,
                                             double hi);

} // namespace pbn

#endif
