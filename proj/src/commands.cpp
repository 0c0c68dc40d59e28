#include "pbn/cli.hpp"
#include "pbn/composite.hpp"
#include "pbn/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>

namespace pbn::cli {

std::string format_number(double v) {
    if (v == 0.0)
        v = 0.0; // no "-0"
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                   std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

namespace {

void diagnose(std::ostream &err, const std::string &msg) {
    err << "error: " << msg << '\n';
}

void caret(std::ostream &err, std::string_view query, std::size_t pos) {
    err << "  " << query << '\n' << "  " << std::string(pos, ' ') << "^\n";
}

UniformizationOptions uniformization(const CommandOptions &opts) {
    UniformizationOptions u;
    u.tolerance = opts.tol;
    return u;
}

} // namespace

int cmd_eval(const ModelFile &m, std::string_view query, std::ostream &out,
             std::ostream &err, const CommandOptions &opts) {
    try {
        const lang::Query q = lang::parse(query);
        const double v =
            lang::evaluate(q, lang::EvalContext{m.model, uniformization(opts)});
        out << format_number(v) << '\n';
        return kSuccess;
    } catch (const LexError &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
        if (!opts.quiet)
            caret(err, query, e.position());
    } catch (const ParseError &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
        if (!opts.quiet)
            caret(err, query, e.position());
    } catch (const Error &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
    }
    return kUsageError;
}

int cmd_evolve(const ModelFile &m, double t_max, double step,
               const std::optional<std::string> &observable, std::ostream &out,
               std::ostream &err, const CommandOptions &opts) {
    const auto &model = m.model;
    try {
        if (!model.dynamics)
            throw TimeTagWithoutDynamics("model '" + model.name +
                                         "' is static; evolve needs a dtmc or "
                                         "ctmc model");
        if (!(step > 0.0) || !std::isfinite(step))
            throw InvalidTime("--step must be positive");
        if (!(t_max >= 0.0) || !std::isfinite(t_max))
            throw InvalidTime("--t-max must be non-negative");
        const bool discrete = std::holds_alternative<TransitionMatrix>(*model.dynamics);
        if (discrete && (std::floor(step) != step || std::floor(t_max) != t_max))
            throw NonIntegerTimeForDTMC("a dtmc model needs integer --step and "
                                        "--t-max");
        const Observable *obs = nullptr;
        if (observable) {
            auto it = model.observables.find(*observable);
            if (it == model.observables.end())
                throw UnknownIdentifier("unknown observable '" + *observable + "'");
            obs = &it->second;
        }

        const auto steps = static_cast<std::uint64_t>(std::floor(t_max / step + 1e-9));
        const SystemKetAtT initial{system_ket(model.space), 0.0};
        const auto uopts = uniformization(opts);

        std::string csv = "t";
        for (const auto &l : model.space.labels())
            csv += ",p:" + l;
        if (obs)
            csv += ",E[" + *observable + "]";
        csv += '\n';

        SystemKetAtT ket = initial;
        for (std::uint64_t k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * step;
            if (discrete) {
                if (k > 0)
                    ket = dtmc_evolve_ket(ket, std::get<TransitionMatrix>(*model.dynamics),
                                          static_cast<std::uint64_t>(step));
            } else {
                ket = apply(propagator(*model.dynamics, t, uopts), initial);
            }
            csv += format_number(t);
            for (double p : ket.ket.coefficients)
                csv += "," + format_number(p);
            if (obs)
                csv += "," + format_number(expectation_at_t(model.space, {}, *obs, ket));
            csv += '\n';
        }
        out << csv;
        return kSuccess;
    } catch (const Error &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
        return kUsageError;
    }
}

int cmd_stationary(const ModelFile &m, std::ostream &out, std::ostream &err,
                   const CommandOptions &) {
    const auto &model = m.model;
    try {
        if (!model.dynamics)
            throw TimeTagWithoutDynamics("model '" + model.name +
                                         "' is static; stationary needs a dtmc "
                                         "or ctmc model");
        const PKet pi = std::visit([](const auto &d) { return stationary(d); },
                                   *model.dynamics);
        std::string csv = "state,p\n";
        for (std::size_t i = 0; i < pi.coefficients.size(); ++i)
            csv += model.space.label(i) + "," + format_number(pi.coefficients[i]) + "\n";
        out << csv;
        return kSuccess;
    } catch (const Reducible &) {
        diagnose(err, "reducible chain");
        return kUsageError;
    } catch (const Error &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
        return kUsageError;
    }
}

// --- identity suite -------------------------------------------------------------

namespace {

struct CheckResult {
    enum class Status { pass, fail, skip };
    std::string name;
    Status status;
    double residual = 0.0;
    double tol = 0.0;
    std::string note;
};

class CheckSuite {
  public:
    void run(const std::string &name, double tol,
             const std::function<double()> &residual) {
        try {
            const double r = residual();
            m_results.push_back({name,
                                 (r <= tol) ? CheckResult::Status::pass
                                            : CheckResult::Status::fail,
                                 r, tol, {}});
        } catch (const SingularPropagator &) {
            skip(name, "singular propagator");
        } catch (const Error &e) {
            m_results.push_back({name, CheckResult::Status::fail, NAN, tol,
                                 std::string(e.kind()) + ": " + e.what()});
        }
    }

    void skip(const std::string &name, const std::string &why) {
        m_results.push_back({name, CheckResult::Status::skip, 0.0, 0.0, why});
    }

    int report(std::ostream &out, bool quiet) const {
        bool ok = true;
        std::string text;
        for (const auto &r : m_results) {
            const bool failed = r.status == CheckResult::Status::fail;
            ok = ok && !failed;
            if (quiet && !failed)
                continue;
            if (r.status == CheckResult::Status::skip) {
                text += "SKIP " + r.name + " (" + r.note + ")\n";
                continue;
            }
            text += (failed ? "FAIL " : "PASS ") + r.name +
                    " max_residual=" + format_number(r.residual) +
                    " tol=" + format_number(r.tol);
            if (!r.note.empty())
                text += " (" + r.note + ")";
            text += '\n';
        }
        out << text;
        return ok ? kSuccess : kCheckFailed;
    }

  private:
    std::vector<CheckResult> m_results;
};

// All nonempty subsets when the space is small, otherwise singletons, named
// events and Omega.
std::vector<Event> probe_events(const lang::Model &model, std::size_t exhaustive_limit) {
    const auto &space = model.space;
    std::vector<Event> out;
    if (space.size() <= exhaustive_limit) {
        const unsigned long long count = 1ull << space.size();
        for (unsigned long long mask = 1; mask < count; ++mask)
            out.push_back(event_from_bits(space, mask));
        return out;
    }
    out = point_basis(space);
    for (const auto &[_, e] : model.events)
        out.push_back(e);
    out.push_back(space.omega());
    return out;
}

// Single-site occupation basis when the states are "0".."K".
std::optional<OccupationSpace> as_occupation(const DiscreteSpace &space) {
    if (space.size() > WeightedBasis::kMaxCutoff + 1)
        return std::nullopt;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (space.label(i) != std::to_string(i))
            return std::nullopt;
    return OccupationSpace::single_site({space.weights().begin(), space.weights().end()});
}

std::vector<double> check_times(const Dynamics &d) {
    if (std::holds_alternative<TransitionMatrix>(d))
        return {0, 1, 2, 3, 5};
    return {0, 0.5, 1, 2, 5};
}

void static_checks(const ModelFile &m, CheckSuite &suite) {
    const auto &model = m.model;
    const auto &space = model.space;
    suite.run("normalization", kAlgebraTolerance,
              [&] { return std::abs(m.raw_measure_sum - 1.0); });

    const auto events = probe_events(model, 12);
    suite.run("omega_bracket_is_one", kAlgebraTolerance, [&] {
        double worst = 0.0;
        for (const auto &b : events)
            if (event_prob(space, b) > 0.0)
                worst = std::max(worst, std::abs(bracket(space, space.omega(), b) - 1.0));
        return worst;
    });

    const auto pairs = probe_events(model, 6);
    suite.run("bracket_equals_bayes", kAlgebraTolerance, [&] {
        double worst = 0.0;
        for (const auto &a : pairs) {
            if (!(event_prob(space, a) > 0.0))
                continue;
            for (const auto &b : pairs)
                if (event_prob(space, b) > 0.0)
                    worst = std::max(worst, std::abs(bracket(space, a, b) -
                                                     bayes(space, a, b)));
        }
        return worst;
    });

    suite.run("system_bra_ket_contraction", kAlgebraTolerance, [&] {
        return std::abs(contract(system_bra(space), system_ket(space)) - 1.0);
    });

    if (model.observables.empty()) {
        suite.skip("indicator_identity", "no observables declared");
    } else {
        const auto subsets = probe_events(model, 10);
        suite.run("indicator_identity", kAlgebraTolerance, [&] {
            double worst = 0.0;
            for (const auto &[_, x] : model.observables)
                for (const auto &b : subsets) {
                    const double pb = event_prob(space, b);
                    if (!(pb > 0.0))
                        continue;
                    worst = std::max(
                        worst, std::abs(expectation_indicator(space, x, b) -
                                        pb * conditional_expectation(space, x, b)));
                }
            return worst;
        });
    }

    if (const auto occ = as_occupation(space)) {
        suite.run("peliti_agreement", kAlgebraTolerance, [&] {
            const Observable n = occ->number(0);
            double worst = 0.0;
            for (const RealFn &f : {RealFn([](double) { return 1.0; }),
                                    RealFn([](double k) { return k; }),
                                    RealFn([](double k) { return k * k; })})
                worst = std::max(worst, std::abs(peliti_expectation(*occ, f) -
                                                 expectation_fn(occ->space(), f, n)));
            return worst;
        });
    } else {
        suite.skip("peliti_agreement", "states are not an occupation basis 0..K");
    }
}

void dynamic_checks(const ModelFile &m, const CommandOptions &opts,
                    CheckSuite &suite) {
    const auto &model = m.model;
    const auto &d = *model.dynamics;
    const auto uopts = uniformization(opts);
    const auto n = static_cast<Eigen::Index>(model.space.size());
    const PKet initial = system_ket(model.space);
    const auto times = check_times(d);

    if (const auto *p = std::get_if<TransitionMatrix>(&d)) {
        suite.run("row_column_duality", kAlgebraTolerance, [&] {
            double worst = 0.0;
            for (std::uint64_t t = 0; t <= 10; ++t) {
                const auto row = dtmc_evolve_row(initial.coefficients, *p, t);
                const auto col = dtmc_evolve_ket({initial, 0.0}, *p, t);
                for (std::size_t i = 0; i < row.size(); ++i)
                    worst = std::max(worst, std::abs(row[i] - col.ket.coefficients[i]));
            }
            return worst;
        });
    } else {
        suite.skip("row_column_duality", "discrete-time chains only");
    }

    suite.run("conservation", kConservationTolerance, [&] {
        double worst = 0.0;
        for (double t : times) {
            const Propagator u = propagator(d, t, uopts);
            const Eigen::RowVectorXd sums = u.matrix.colwise().sum();
            worst = std::max(worst, (sums.array() - 1.0).abs().maxCoeff());
            const double lowest = u.matrix.minCoeff();
            if (lowest < -kClampTolerance)
                worst = std::max(worst, -lowest);
        }
        return worst;
    });

    suite.run("semigroup", 1e-9, [&] {
        double worst = 0.0;
        for (auto [t, s] : {std::pair{1.0, 2.0}, {2.0, 3.0}, {5.0, 5.0}}) {
            const Eigen::MatrixXd lhs = propagator(d, t + s, uopts).matrix;
            const Eigen::MatrixXd rhs =
                propagator(d, t, uopts).matrix * propagator(d, s, uopts).matrix;
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        return worst;
    });

    suite.run("picture_equivalence", kConservationTolerance, [&] {
        std::vector<Observable> xs;
        for (const auto &[_, x] : model.observables)
            xs.push_back(x);
        if (xs.empty()) {
            std::vector<double> idx;
            for (Eigen::Index i = 0; i < n; ++i)
                idx.push_back(static_cast<double>(i));
            xs.emplace_back(idx);
        }
        double worst = 0.0;
        for (const auto &x : xs)
            for (double t : times)
                worst = std::max(worst,
                                 heisenberg_expectation(x, d, initial, t, {}, uopts).residual());
        return worst;
    });

    suite.run("density_two_pictures", kConservationTolerance, [&] {
        double worst = 0.0;
        for (double t : times)
            for (Eigen::Index x = 0; x < n; ++x)
                worst = std::max(worst, density_two_pictures(d, initial,
                                                             static_cast<std::size_t>(x),
                                                             t, uopts)
                                            .residual());
        return worst;
    });

    suite.run("time_dependent_unit_operator", 1e-9, [&] {
        double worst = 0.0;
        for (double t : times)
            worst = std::max(worst, time_dependent_unit_check(d, t, uopts));
        return worst;
    });
}

} // namespace

int cmd_check(const ModelFile &m, std::ostream &out, std::ostream &err,
              const CommandOptions &opts) {
    try {
        CheckSuite suite;
        static_checks(m, suite);
        if (m.model.dynamics)
            dynamic_checks(m, opts, suite);
        return suite.report(out, opts.quiet);
    } catch (const Error &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
        return kUsageError;
    }
}

// --- command line ------------------------------------------------------------------

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
    CLI::App app{"Probability bracket engine: evaluate bracket queries and "
                 "evolve Markov models"};
    app.name(args.empty() ? "pbn" : args.front());
    app.require_subcommand(1);

    CommandOptions opts;
    app.add_option("--tol", opts.tol, "uniformization tail tolerance")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", opts.quiet, "only report failures: no PASS/SKIP lines, no caret context");

    std::string model_path;
    std::string query;
    double t_max = 0.0;
    double step = 1.0;
    std::string observable;

    auto *eval = app.add_subcommand("eval", "evaluate a bracket query");
    eval->add_option("model", model_path, "model file")->required();
    eval->add_option("query", query, "query in pbn-1 syntax")->required();

    auto *evolve = app.add_subcommand("evolve", "write the evolved distribution as CSV");
    evolve->add_option("model", model_path, "model file")->required();
    evolve->add_option("--t-max", t_max, "last time point")->required();
    evolve->add_option("--step", step, "time step")->required();
    evolve->add_option("--observable", observable, "append E[observable] column");

    auto *stat = app.add_subcommand("stationary", "write the stationary distribution as CSV");
    stat->add_option("model", model_path, "model file")->required();

    auto *check = app.add_subcommand("check", "run the identity suite");
    check->add_option("model", model_path, "model file")->required();

    for (auto *sub : {eval, evolve, stat, check})
        sub->fallthrough();

    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty())
        rest.pop_back(); // program name
    try {
        app.parse(rest);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    std::optional<ModelFile> loaded;
    try {
        LoadOptions lopts;
        lopts.lenient_measure = check->parsed();
        loaded = load_model(model_path, lopts);
    } catch (const Error &e) {
        diagnose(err, std::string(e.kind()) + ": " + e.what());
        return kUsageError;
    }
    const ModelFile &model = *loaded;

    if (eval->parsed())
        return cmd_eval(model, query, out, err, opts);
    if (evolve->parsed())
        return cmd_evolve(model, t_max, step,
                          observable.empty() ? std::nullopt
                                             : std::optional<std::string>(observable),
                          out, err, opts);
    if (stat->parsed())
        return cmd_stationary(model, out, err, opts);
    return cmd_check(model, out, err, opts);
}

} // namespace pbn::cli
