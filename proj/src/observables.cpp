#include "pbn/observables.hpp"

#include "pbn/error.hpp"

#include <algorithm>
#include <cmath>

namespace pbn {

Observable::Observable(const DiscreteSpace &space,
                       const std::map<std::string, double> &values)
    : m_values(space.size(), 0.0) {
    for (const auto &[label, v] : values)
        m_values[space.index_of(label)] = v;
    for (const auto &label : space.labels())
        if (!values.count(label))
            throw IncompleteObservable("observable has no value at '" + label +
                                       "'");
}

double contract(const PBra &bra, std::span<const double> diagonal,
                const PKet &ket) {
    const auto n = bra.weights.size();
    if (ket.coefficients.size() != n || diagonal.size() != n)
        throw DimensionMismatch("bra, operator and ket sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += bra.weights[i] * diagonal[i] * ket.coefficients[i];
    return s;
}

double contract(const PBra &bra, const PKet &ket) {
    std::vector<double> ones(bra.weights.size(), 1.0);
    return contract(bra, ones, ket);
}

PKet system_ket(const DiscreteSpace &space) {
    return PKet{{space.weights().begin(), space.weights().end()}};
}

PBra system_bra(const DiscreteSpace &space) {
    return PBra{std::vector<double>(space.size(), 1.0)};
}

namespace {

void require_same_size(const DiscreteSpace &space, const Observable &x) {
    if (x.size() != space.size())
        throw DimensionMismatch("observable has " + std::to_string(x.size()) +
                                " values for " + std::to_string(space.size()) +
                                " points");
}

} // namespace

double expectation(const DiscreteSpace &space, const Observable &x) {
    require_same_size(space, x);
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        s += x[i] * space.weight(i);
    return s;
}

double expectation_fn(const DiscreteSpace &space, const RealFn &f,
                      const Observable &x) {
    require_same_size(space, x);
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        s += f(x[i]) * space.weight(i);
    return s;
}

double conditional_expectation(const DiscreteSpace &space, const Observable &x,
                               const Event &h) {
    require_same_size(space, x);
    const auto basis = point_basis(space);
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        s += x[i] * bracket(space, basis[i], h);
    return s;
}

double expectation_indicator(const DiscreteSpace &space, const Observable &x,
                             const Event &b) {
    require_same_size(space, x);
    const auto in_b = space.mask(b);
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        s += x[i] * (in_b[i] ? 1.0 : 0.0) * space.weight(i);
    return s;
}

// --- quadrature -------------------------------------------------------------

namespace {

struct Panel {
    double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const RealFn &f, const Panel &p, double tol, int depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
    const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol,
                  depth - 1) +
           refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol,
                  depth - 1);
}

} // namespace

double integrate(const RealFn &f, double a, double b,
                 const QuadratureOptions &opts) {
    if (!(b > a))
        return 0.0;
    const int panels = std::max(1, opts.initial_panels);
    const double h = (b - a) / panels;
    const double share = opts.tolerance / panels;
    double total = 0.0;
    double x0 = a;
    double f0 = f(a);
    for (int k = 0; k < panels; ++k) {
        const double x1 = (k + 1 == panels) ? b : a + (k + 1) * h;
        const double xm = 0.5 * (x0 + x1);
        const double fm = f(xm);
        const double f1 = f(x1);
        const Panel p{x0, f0, xm, fm, x1, f1, simpson(x0, f0, fm, x1, f1)};
        total += refine(f, p, share, opts.max_depth);
        x0 = x1;
        f0 = f1;
    }
    return total;
}

DensityModel::DensityModel(double lower, double upper, RealFn density,
                           QuadratureOptions quadrature)
    : m_lower(lower), m_upper(upper), m_density(std::move(density)),
      m_quadrature(quadrature), m_mass(0.0) {
    if (!(upper > lower))
        throw NormalizationViolation("density support is empty");
    m_mass = integrate(m_density, m_lower, m_upper, m_quadrature);
    if (std::abs(m_mass - 1.0) > 100.0 * m_quadrature.tolerance)
        throw NormalizationViolation("density integrates to " +
                                     std::to_string(m_mass));
}

DensityModel DensityModel::uniform(double lower, double upper,
                                   QuadratureOptions quadrature) {
    const double h = 1.0 / (upper - lower);
    return DensityModel(
        lower, upper, [h](double) { return h; }, quadrature);
}

double density_expectation(const DensityModel &dm, const RealFn &f) {
    return integrate([&](double x) { return f(x) * dm(x); }, dm.lower(),
                     dm.upper(), dm.quadrature());
}

double density_prob(const DensityModel &dm, double lo, double hi) {
    lo = std::max(lo, dm.lower());
    hi = std::min(hi, dm.upper());
    return integrate([&](double x) { return dm(x); }, lo, hi, dm.quadrature());
}

double density_conditional_expectation(const DensityModel &dm, double lo,
                                       double hi) {
    const double p = density_prob(dm, lo, hi);
    if (!(p > 0.0))
        throw ZeroConditioningEvent("conditioning interval has probability 0");
    lo = std::max(lo, dm.lower());
    hi = std::min(hi, dm.upper());
    const double num =
        integrate([&](double x) { return x * dm(x); }, lo, hi, dm.quadrature());
    return num / p;
}

IndicatorIdentity density_indicator_identity(const DensityModel &dm, double lo,
                                             double hi) {
    const double lhs = integrate(
        [&](double x) { return (x >= lo && x <= hi) ? x * dm(x) : 0.0; },
        dm.lower(), dm.upper(), dm.quadrature());
    const double rhs =
        density_prob(dm, lo, hi) * density_conditional_expectation(dm, lo, hi);
    return {lhs, rhs, std::abs(lhs - rhs)};
}

} // namespace pbn
