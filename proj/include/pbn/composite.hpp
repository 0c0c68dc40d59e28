#ifndef PBN_COMPOSITE_HPP
#define PBN_COMPOSITE_HPP

#include "pbn/observables.hpp"
#include "pbn/space.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pbn {

/// Separator between factor labels in joint point labels ("h.3").
inline constexpr char kProductSeparator = '.';
inline constexpr std::size_t kDefaultProductCapacity = 1'000'000;

/// Cartesian product of factor spaces with the product measure, materialized
/// eagerly.
class ProductSpace {
  public:
    const std::vector<DiscreteSpace> &factors() const { return m_factors; }
    const DiscreteSpace &joint() const { return m_joint; }
    /// Factor label tuple of joint point i.
    const std::vector<std::string> &tuple(std::size_t i) const {
        return m_tuples.at(i);
    }
    /// Joint event {ω⃗ : ω_factor ∈ e}. Throws IndexOutOfRange, UnknownLabel.
    Event cylinder(std::size_t factor, const Event &e) const;
    /// Measure of the joint projected onto one factor.
    DiscreteSpace marginal(std::size_t factor) const;

  private:
    friend ProductSpace product(const std::vector<DiscreteSpace> &,
                                std::size_t);
    ProductSpace(std::vector<DiscreteSpace> factors, DiscreteSpace joint,
                 std::vector<std::vector<std::string>> tuples)
        : m_factors(std::move(factors)), m_joint(std::move(joint)),
          m_tuples(std::move(tuples)) {}

    std::vector<DiscreteSpace> m_factors;
    DiscreteSpace m_joint;
    std::vector<std::vector<std::string>> m_tuples;
};

/// Throws CapacityExceeded when the joint cardinality exceeds `capacity`.
ProductSpace product(const std::vector<DiscreteSpace> &spaces,
                     std::size_t capacity = kDefaultProductCapacity);

/// |P(A|B) − P(A)| ≤ kAlgebraTolerance. Throws ZeroConditioningEvent.
bool independence_check(const ProductSpace &ps, const Event &a, const Event &b);

using OccupationState = std::vector<unsigned>;

/// Sample space over occupation-number states |n⃗) with a per-site cutoff.
class OccupationSpace {
  public:
    /// Throws IndexOutOfRange (count above cutoff or wrong arity),
    /// DuplicateLabel, NormalizationViolation.
    OccupationSpace(std::size_t sites, unsigned cutoff,
                    std::vector<OccupationState> states,
                    std::vector<double> weights);

    /// Single-site space over n = 0..cutoff with the given weights.
    static OccupationSpace single_site(std::vector<double> weights);

    std::size_t sites() const { return m_sites; }
    unsigned cutoff() const { return m_cutoff; }
    const std::vector<OccupationState> &states() const { return m_states; }
    const DiscreteSpace &space() const { return m_space; }

    /// Number operator N_i as an observable on this space.
    Observable number(std::size_t site) const;
    /// P(n_i = k|Ω) for k = 0..cutoff.
    std::vector<double> site_marginal(std::size_t site) const;

    static std::string label_of(const OccupationState &n);

  private:
    std::size_t m_sites;
    unsigned m_cutoff;
    std::vector<OccupationState> m_states;
    DiscreteSpace m_space;
};

/// ⟨N_i⟩ = Σ n_i m(n⃗). Throws IndexOutOfRange.
double occupation_expectation(const OccupationSpace &os, std::size_t site);

/// Doi's state function ⟨s| = Σ ⟨n⃗|: numerically the system p-bra.
PBra doi_state_bra(const DiscreteSpace &space);

enum class BasisNormalization { plain, peliti };

/// Normalization of the single-site occupation basis. Plain: ⟨m|n⟩ = δ_mn
/// and unit resolution weights. Peliti: ⟨m|n⟩ = n! δ_mn with 1/n! weights.
class WeightedBasis {
  public:
    static constexpr unsigned kMaxCutoff = 20;

    /// Throws FactorialOverflow when cutoff exceeds kMaxCutoff.
    WeightedBasis(BasisNormalization mode, unsigned cutoff);

    BasisNormalization mode() const { return m_mode; }
    unsigned cutoff() const { return m_cutoff; }
    /// Resolution weight: 1 or 1/n!.
    double weight(unsigned n) const;
    /// Gram diagonal ⟨n|n⟩: 1 or n!.
    double norm(unsigned n) const;
    /// Matrix of Σ_n |n⟩ w_n ⟨n| acting on basis coordinates.
    Eigen::MatrixXd resolution() const;

  private:
    BasisNormalization m_mode;
    unsigned m_cutoff;
};

/// Exact n! for n ≤ 20. Throws FactorialOverflow.
std::uint64_t factorial(unsigned n);

/// Peliti's standard bra ⟨| = Σ (1/n!) ⟨n| over a single-site basis.
/// Throws UnsupportedBasis for multi-site spaces, FactorialOverflow above
/// cutoff 20.
PBra peliti_bra(const OccupationSpace &os);

/// Components ⟨n|Ψ⟩ = n! m_n of the state in Peliti normalization.
PKet peliti_ket(const OccupationSpace &os);

/// ⟨|F(n)|Ψ⟩ with the standard bra and Peliti-normalized ket.
double peliti_expectation(const OccupationSpace &os, const RealFn &f);

} // namespace pbn

#endif
