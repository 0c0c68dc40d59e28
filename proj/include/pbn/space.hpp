#ifndef PBN_SPACE_HPP
#define PBN_SPACE_HPP

#include <cstddef>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace pbn {

/// Tolerance shared by the bracket algebra: measure normalization,
/// bracket/Bayes agreement and the independence test.
inline constexpr double kAlgebraTolerance = 1e-12;

/// A set of sample-point labels. Value semantics, order-insensitive.
/// The ambient space is not stored; membership is resolved when the event is
/// used against a DiscreteSpace.
class Event {
  public:
    Event() = default;
    Event(std::initializer_list<std::string> labels) : m_labels(labels) {}
    explicit Event(std::set<std::string> labels) : m_labels(std::move(labels)) {}

    template <class It>
    Event(It first, It last) : m_labels(first, last) {}

    const std::set<std::string> &labels() const { return m_labels; }
    bool contains(const std::string &label) const {
        return m_labels.count(label) != 0;
    }
    bool empty() const { return m_labels.empty(); }
    std::size_t size() const { return m_labels.size(); }

    Event intersect(const Event &other) const;
    Event unite(const Event &other) const;

    friend bool operator==(const Event &, const Event &) = default;

  private:
    std::set<std::string> m_labels;
};

/// Finite sample space with a normalized measure. Immutable after
/// construction.
class DiscreteSpace {
  public:
    /// Throws DuplicateLabel, NormalizationViolation (negative weight, or sum
    /// off by more than kAlgebraTolerance unless `normalize` is set).
    DiscreteSpace(std::vector<std::string> labels, std::vector<double> weights,
                  bool normalize = false);

    static DiscreteSpace uniform(std::vector<std::string> labels);

    std::size_t size() const { return m_labels.size(); }
    const std::vector<std::string> &labels() const { return m_labels; }
    const std::string &label(std::size_t i) const { return m_labels.at(i); }
    std::span<const double> weights() const { return m_weights; }
    double weight(std::size_t i) const { return m_weights.at(i); }

    bool has(const std::string &label) const {
        return m_index.count(label) != 0;
    }
    /// Throws UnknownLabel.
    std::size_t index_of(const std::string &label) const;

    /// The universe as an ordinary event.
    Event omega() const { return Event(m_labels.begin(), m_labels.end()); }

    /// Throws UnknownLabel if `e` references a label outside the space.
    void check(const Event &e) const;

    /// Per-point membership mask of `e` in point order.
    std::vector<bool> mask(const Event &e) const;

  private:
    std::vector<std::string> m_labels;
    std::vector<double> m_weights;
    std::unordered_map<std::string, std::size_t> m_index;
};

/// P(E|Ω) = Σ_{ω∈E} m(ω).
double event_prob(const DiscreteSpace &space, const Event &e);

/// P(A|B) = P(A∩B)/P(B). Throws ZeroConditioningEvent when P(B) = 0.
double bracket(const DiscreteSpace &space, const Event &a, const Event &b);

/// (B|A)(A|Ω)/(B|Ω). Throws ZeroConditioningEvent when P(A) or P(B) is 0.
double bayes(const DiscreteSpace &space, const Event &a, const Event &b);

/// Elementary events {ω_i} in point order.
std::vector<Event> point_basis(const DiscreteSpace &space);

/// Event built from the points whose bit is set in `mask` (bit i = point i).
/// Used by exhaustive enumeration over the power set.
Event event_from_bits(const DiscreteSpace &space, unsigned long long mask);

} // namespace pbn

#endif
