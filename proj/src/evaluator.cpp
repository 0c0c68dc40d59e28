#include "pbn/error.hpp"
#include "pbn/lang.hpp"

#include <cmath>

namespace pbn::lang {

std::string_view Model::kind() const {
    if (!dynamics)
        return "static";
    return std::holds_alternative<TransitionMatrix>(*dynamics) ? "dtmc" : "ctmc";
}

bool is_builtin_function(std::string_view name) {
    return name == "id" || name == "sq" || name == "abs" || name == "exp";
}

namespace {

struct ResolvedEvent {
    std::vector<bool> mask;
    std::optional<double> time;
    bool is_omega = false;
};

class Evaluator {
  public:
    explicit Evaluator(const EvalContext &ctx) : m_ctx(ctx), m_model(ctx.model) {}

    double operator()(const Bracket &b) const {
        const ResolvedEvent bra = resolve(b.bra);
        if (bra.time)
            throw TypeMismatch("time tags are only meaningful on the ket side");
        const ResolvedEvent ket = resolve(b.ket);
        const auto w = weights_at(ket.time);
        const double joint = masked_sum(w, both(bra.mask, ket.mask));
        // P(A|Omega) is the event probability itself, no renormalization.
        if (ket.is_omega)
            return joint;
        const double pk = masked_sum(w, ket.mask);
        if (!(pk > 0.0))
            throw ZeroConditioningEvent("conditioning event '" + print(b.ket) +
                                        "' has probability 0");
        return joint / pk;
    }

    double operator()(const Sandwich &s) const {
        return conditional(s.op, s.ket);
    }

    double operator()(const Expect &e) const {
        return conditional(e.op, e.given ? *e.given : EventExpr::omega());
    }

  private:
    // Σ F(x_i) P(ω_i|ket), at the ket's time.
    double conditional(const OpExpr &op, const EventExpr &given) const {
        const std::vector<double> fx = apply_op(op);
        const ResolvedEvent ket = resolve(given);
        const auto w = weights_at(ket.time);
        double num = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (ket.mask[i])
                num += fx[i] * w[i];
        if (ket.is_omega)
            return num;
        const double pk = masked_sum(w, ket.mask);
        if (!(pk > 0.0))
            throw ZeroConditioningEvent("conditioning event '" + print(given) +
                                        "' has probability 0");
        return num / pk;
    }

    static double masked_sum(const std::vector<double> &w,
                             const std::vector<bool> &m) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (m[i])
                s += w[i];
        return s;
    }

    static std::vector<bool> both(const std::vector<bool> &a,
                                  const std::vector<bool> &b) {
        std::vector<bool> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = a[i] && b[i];
        return out;
    }

    std::vector<double> weights_at(const std::optional<double> &t) const {
        const auto &space = m_model.space;
        std::vector<double> w(space.weights().begin(), space.weights().end());
        if (!t)
            return w;
        if (!m_model.dynamics)
            throw TimeTagWithoutDynamics("model '" + m_model.name +
                                         "' declares no dynamics; time tags "
                                         "need a dtmc or ctmc model");
        const Propagator u = propagator(*m_model.dynamics, *t, m_ctx.uniformization);
        return apply(u, SystemKetAtT{PKet{std::move(w)}, 0.0}).ket.coefficients;
    }

    [[noreturn]] void wrong_kind(const std::string &name,
                                 const char *expected) const {
        if (m_model.events.count(name) || m_model.observables.count(name) ||
            m_model.functions.count(name) || is_builtin_function(name))
            throw TypeMismatch("'" + name + "' is not " + expected);
        throw UnknownIdentifier("unknown identifier '" + name + "'");
    }

    ResolvedEvent resolve(const EventExpr &e) const {
        const auto &space = m_model.space;
        switch (e.kind) {
        case EventExpr::Kind::name: {
            auto it = m_model.events.find(e.name);
            if (it == m_model.events.end())
                wrong_kind(e.name, "an event");
            return {space.mask(it->second), std::nullopt, false};
        }
        case EventExpr::Kind::set: {
            const Event ev(e.members.begin(), e.members.end());
            return {space.mask(ev), std::nullopt, false};
        }
        case EventExpr::Kind::omega: {
            std::optional<double> t;
            if (e.time)
                t = e.time->value;
            return {std::vector<bool>(space.size(), true), t, true};
        }
        case EventExpr::Kind::intersect: {
            ResolvedEvent lhs = resolve(e.operands.at(0));
            const ResolvedEvent rhs = resolve(e.operands.at(1));
            if (lhs.time && rhs.time && *lhs.time != *rhs.time)
                throw TypeMismatch("intersection mixes times " +
                                   std::to_string(*lhs.time) + " and " +
                                   std::to_string(*rhs.time));
            return {both(lhs.mask, rhs.mask), lhs.time ? lhs.time : rhs.time,
                    lhs.is_omega && rhs.is_omega};
        }
        }
        throw TypeMismatch("malformed event expression");
    }

    std::vector<double> apply_op(const OpExpr &op) const {
        auto it = m_model.observables.find(op.observable);
        if (it == m_model.observables.end())
            wrong_kind(op.observable, "an observable");
        std::vector<double> v(it->second.values().begin(), it->second.values().end());
        if (!op.function || *op.function == "id")
            return v;
        const std::string &f = *op.function;
        if (f == "sq") {
            for (double &x : v)
                x = x * x;
        } else if (f == "abs") {
            for (double &x : v)
                x = std::abs(x);
        } else if (f == "exp") {
            for (double &x : v)
                x = std::exp(x);
        } else {
            auto ft = m_model.functions.find(f);
            if (ft == m_model.functions.end())
                wrong_kind(f, "a function");
            for (double &x : v) {
                auto entry = ft->second.find(x);
                if (entry == ft->second.end())
                    throw FunctionDomainError("function '" + f +
                                              "' has no entry for " +
                                              std::to_string(x));
                x = entry->second;
            }
        }
        return v;
    }

    const EvalContext &m_ctx;
    const Model &m_model;
};

} // namespace

double evaluate(const Query &q, const EvalContext &ctx) {
    return std::visit(Evaluator(ctx), q);
}

} // namespace pbn::lang
