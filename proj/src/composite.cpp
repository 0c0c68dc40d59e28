#include "pbn/composite.hpp"

#include "pbn/error.hpp"

#include <cmath>
#include <set>

namespace pbn {

ProductSpace product(const std::vector<DiscreteSpace> &spaces,
                     std::size_t capacity) {
    if (spaces.empty())
        throw CapacityExceeded("product of zero factors");
    std::size_t total = 1;
    for (const auto &s : spaces) {
        if (s.size() > capacity / total)
            throw CapacityExceeded("product space exceeds " +
                                   std::to_string(capacity) + " points");
        total *= s.size();
    }

    std::vector<std::string> labels;
    std::vector<double> weights;
    std::vector<std::vector<std::string>> tuples;
    labels.reserve(total);
    weights.reserve(total);
    tuples.reserve(total);

    // Odometer over factor indices; the last factor varies fastest.
    std::vector<std::size_t> idx(spaces.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<std::string> tuple;
        std::string label;
        double w = 1.0;
        for (std::size_t f = 0; f < spaces.size(); ++f) {
            tuple.push_back(spaces[f].label(idx[f]));
            if (f)
                label += kProductSeparator;
            label += tuple.back();
            w *= spaces[f].weight(idx[f]);
        }
        labels.push_back(std::move(label));
        weights.push_back(w);
        tuples.push_back(std::move(tuple));
        for (std::size_t f = spaces.size(); f-- > 0;) {
            if (++idx[f] < spaces[f].size())
                break;
            idx[f] = 0;
        }
    }
    return ProductSpace(spaces, DiscreteSpace(std::move(labels), std::move(weights)),
                        std::move(tuples));
}

Event ProductSpace::cylinder(std::size_t factor, const Event &e) const {
    if (factor >= m_factors.size())
        throw IndexOutOfRange("factor " + std::to_string(factor) +
                              " out of range");
    m_factors[factor].check(e);
    std::set<std::string> out;
    for (std::size_t i = 0; i < m_joint.size(); ++i)
        if (e.contains(m_tuples[i][factor]))
            out.insert(m_joint.label(i));
    return Event(std::move(out));
}

DiscreteSpace ProductSpace::marginal(std::size_t factor) const {
    if (factor >= m_factors.size())
        throw IndexOutOfRange("factor " + std::to_string(factor) +
                              " out of range");
    const auto &f = m_factors[factor];
    std::vector<double> w(f.size(), 0.0);
    for (std::size_t i = 0; i < m_joint.size(); ++i)
        w[f.index_of(m_tuples[i][factor])] += m_joint.weight(i);
    return DiscreteSpace(f.labels(), std::move(w), true);
}

bool independence_check(const ProductSpace &ps, const Event &a, const Event &b) {
    const auto &j = ps.joint();
    return std::abs(bracket(j, a, b) - event_prob(j, a)) <= kAlgebraTolerance;
}

// --- occupation basis --------------------------------------------------------

std::string OccupationSpace::label_of(const OccupationState &n) {
    std::string s = "n";
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (i)
            s += '_';
        s += std::to_string(n[i]);
    }
    return s;
}

namespace {

DiscreteSpace occupation_points(std::size_t sites, unsigned cutoff,
                                const std::vector<OccupationState> &states,
                                std::vector<double> weights) {
    std::vector<std::string> labels;
    labels.reserve(states.size());
    for (const auto &n : states) {
        if (n.size() != sites)
            throw IndexOutOfRange("occupation state " +
                                  OccupationSpace::label_of(n) + " has " +
                                  std::to_string(n.size()) + " sites, expected " +
                                  std::to_string(sites));
        for (unsigned c : n)
            if (c > cutoff)
                throw IndexOutOfRange("occupation " + std::to_string(c) +
                                      " exceeds cutoff " + std::to_string(cutoff));
        labels.push_back(OccupationSpace::label_of(n));
    }
    return DiscreteSpace(std::move(labels), std::move(weights));
}

} // namespace

OccupationSpace::OccupationSpace(std::size_t sites, unsigned cutoff,
                                 std::vector<OccupationState> states,
                                 std::vector<double> weights)
    : m_sites(sites), m_cutoff(cutoff), m_states(std::move(states)),
      m_space(occupation_points(sites, cutoff, m_states, std::move(weights))) {}

OccupationSpace OccupationSpace::single_site(std::vector<double> weights) {
    if (weights.empty())
        throw NormalizationViolation("no occupation weights");
    std::vector<OccupationState> states;
    for (unsigned n = 0; n < weights.size(); ++n)
        states.push_back({n});
    const auto cutoff = static_cast<unsigned>(weights.size() - 1);
    return OccupationSpace(1, cutoff, std::move(states), std::move(weights));
}

Observable OccupationSpace::number(std::size_t site) const {
    if (site >= m_sites)
        throw IndexOutOfRange("site " + std::to_string(site) + " out of range");
    std::vector<double> v;
    v.reserve(m_states.size());
    for (const auto &n : m_states)
        v.push_back(static_cast<double>(n[site]));
    return Observable(std::move(v));
}

std::vector<double> OccupationSpace::site_marginal(std::size_t site) const {
    if (site >= m_sites)
        throw IndexOutOfRange("site " + std::to_string(site) + " out of range");
    std::vector<double> m(m_cutoff + 1, 0.0);
    for (std::size_t i = 0; i < m_states.size(); ++i)
        m[m_states[i][site]] += m_space.weight(i);
    return m;
}

double occupation_expectation(const OccupationSpace &os, std::size_t site) {
    return expectation(os.space(), os.number(site));
}

PBra doi_state_bra(const DiscreteSpace &space) { return system_bra(space); }

std::uint64_t factorial(unsigned n) {
    if (n > WeightedBasis::kMaxCutoff)
        throw FactorialOverflow(std::to_string(n) +
                                "! does not fit in 64-bit integer arithmetic");
    std::uint64_t f = 1;
    for (unsigned k = 2; k <= n; ++k)
        f *= k;
    return f;
}

WeightedBasis::WeightedBasis(BasisNormalization mode, unsigned cutoff)
    : m_mode(mode), m_cutoff(cutoff) {
    if (mode == BasisNormalization::peliti)
        factorial(cutoff);
}

double WeightedBasis::weight(unsigned n) const {
    if (n > m_cutoff)
        throw IndexOutOfRange("occupation above cutoff");
    return m_mode == BasisNormalization::plain
               ? 1.0
               : 1.0 / static_cast<double>(factorial(n));
}

double WeightedBasis::norm(unsigned n) const {
    if (n > m_cutoff)
        throw IndexOutOfRange("occupation above cutoff");
    return m_mode == BasisNormalization::plain
               ? 1.0
               : static_cast<double>(factorial(n));
}

Eigen::MatrixXd WeightedBasis::resolution() const {
    const Eigen::Index dim = m_cutoff + 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        // |n⟩ w_n ⟨n| applied to |m⟩ gives |n⟩ w_n ⟨n|m⟩ = |n⟩ w_n norm_n δ_nm.
        Eigen::VectorXd ket = Eigen::VectorXd::Unit(dim, n);
        Eigen::RowVectorXd bra = Eigen::RowVectorXd::Zero(dim);
        bra(n) = norm(static_cast<unsigned>(n));
        out += ket * weight(static_cast<unsigned>(n)) * bra;
    }
    return out;
}

namespace {

void require_single_site(const OccupationSpace &os) {
    if (os.sites() != 1)
        throw UnsupportedBasis("standard bra needs a single-site occupation "
                               "basis, got " +
                               std::to_string(os.sites()) + " sites");
}

} // namespace

PBra peliti_bra(const OccupationSpace &os) {
    require_single_site(os);
    const WeightedBasis basis(BasisNormalization::peliti, os.cutoff());
    PBra bra;
    for (const auto &n : os.states())
        bra.weights.push_back(basis.weight(n[0]));
    return bra;
}

PKet peliti_ket(const OccupationSpace &os) {
    require_single_site(os);
    const WeightedBasis basis(BasisNormalization::peliti, os.cutoff());
    PKet ket;
    for (std::size_t i = 0; i < os.states().size(); ++i)
        ket.coefficients.push_back(basis.norm(os.states()[i][0]) *
                                   os.space().weight(i));
    return ket;
}

double peliti_expectation(const OccupationSpace &os, const RealFn &f) {
    std::vector<double> diag;
    for (const auto &n : os.states())
        diag.push_back(f(static_cast<double>(n[0])));
    return contract(peliti_bra(os), diag, peliti_ket(os));
}

} // namespace pbn
