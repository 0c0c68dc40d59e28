#include "pbn/space.hpp"

#include "pbn/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace pbn {

Event Event::intersect(const Event &other) const {
    std::set<std::string> out;
    std::set_intersection(m_labels.begin(), m_labels.end(),
                          other.m_labels.begin(), other.m_labels.end(),
                          std::inserter(out, out.end()));
    return Event(std::move(out));
}

Event Event::unite(const Event &other) const {
    std::set<std::string> out = m_labels;
    out.insert(other.m_labels.begin(), other.m_labels.end());
    return Event(std::move(out));
}

DiscreteSpace::DiscreteSpace(std::vector<std::string> labels,
                             std::vector<double> weights, bool normalize)
    : m_labels(std::move(labels)), m_weights(std::move(weights)) {
    if (m_labels.empty())
        throw NormalizationViolation("sample space has no points");
    if (m_labels.size() != m_weights.size())
        throw NormalizationViolation("measure has " +
                                     std::to_string(m_weights.size()) +
                                     " weights for " +
                                     std::to_string(m_labels.size()) + " points");
    for (std::size_t i = 0; i < m_labels.size(); ++i) {
        if (m_labels[i].empty())
            throw UnknownLabel("sample point " + std::to_string(i) +
                               " has an empty label");
        if (!m_index.emplace(m_labels[i], i).second)
            throw DuplicateLabel("duplicate sample point '" + m_labels[i] + "'");
        const double w = m_weights[i];
        if (!std::isfinite(w) || w < 0.0)
            throw NormalizationViolation("weight of '" + m_labels[i] +
                                         "' is negative or not finite");
    }
    const double total = std::accumulate(m_weights.begin(), m_weights.end(), 0.0);
    if (normalize) {
        if (total <= 0.0)
            throw NormalizationViolation("cannot normalize a zero measure");
        for (double &w : m_weights)
            w /= total;
    } else if (std::abs(total - 1.0) > kAlgebraTolerance) {
        throw NormalizationViolation("measure sums to " + std::to_string(total));
    }
    for (std::size_t i = 0; i < m_weights.size(); ++i)
        if (m_weights[i] > 1.0 + kAlgebraTolerance)
            throw NormalizationViolation("weight of '" + m_labels[i] +
                                         "' exceeds 1");
}

DiscreteSpace DiscreteSpace::uniform(std::vector<std::string> labels) {
    const std::size_t n = labels.size();
    std::vector<double> w(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
    return DiscreteSpace(std::move(labels), std::move(w), true);
}

std::size_t DiscreteSpace::index_of(const std::string &label) const {
    auto it = m_index.find(label);
    if (it == m_index.end())
        throw UnknownLabel("unknown sample point '" + label + "'");
    return it->second;
}

void DiscreteSpace::check(const Event &e) const {
    for (const auto &l : e.labels())
        if (!has(l))
            throw UnknownLabel("unknown sample point '" + l + "'");
}

std::vector<bool> DiscreteSpace::mask(const Event &e) const {
    check(e);
    std::vector<bool> out(size(), false);
    for (const auto &l : e.labels())
        out[m_index.at(l)] = true;
    return out;
}

namespace {

// Sums in point order so that equal index sets give bit-identical results.
double masked_sum(const DiscreteSpace &space, const std::vector<bool> &m) {
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (m[i])
            s += space.weight(i);
    return s;
}

std::vector<bool> both(const std::vector<bool> &a, const std::vector<bool> &b) {
    std::vector<bool> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] && b[i];
    return out;
}

} // namespace

double event_prob(const DiscreteSpace &space, const Event &e) {
    return masked_sum(space, space.mask(e));
}

double bracket(const DiscreteSpace &space, const Event &a, const Event &b) {
    const auto ma = space.mask(a);
    const auto mb = space.mask(b);
    const double pb = masked_sum(space, mb);
    if (!(pb > 0.0))
        throw ZeroConditioningEvent("conditioning event has probability 0");
    return masked_sum(space, both(ma, mb)) / pb;
}

double bayes(const DiscreteSpace &space, const Event &a, const Event &b) {
    const double pa = event_prob(space, a);
    const double pb = event_prob(space, b);
    if (!(pa > 0.0) || !(pb > 0.0))
        throw ZeroConditioningEvent("Bayes inversion needs P(A) > 0 and P(B) > 0");
    return bracket(space, b, a) * pa / pb;
}

std::vector<Event> point_basis(const DiscreteSpace &space) {
    std::vector<Event> out;
    out.reserve(space.size());
    for (const auto &l : space.labels())
        out.push_back(Event{l});
    return out;
}

Event event_from_bits(const DiscreteSpace &space, unsigned long long mask) {
    std::set<std::string> labels;
    for (std::size_t i = 0; i < space.size() && i < 64; ++i)
        if (mask & (1ull << i))
            labels.insert(space.label(i));
    return Event(std::move(labels));
}

} // namespace pbn
