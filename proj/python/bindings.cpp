#include "pbn/cli.hpp"
#include "pbn/composite.hpp"
#include "pbn/error.hpp"
#include "pbn/lang.hpp"
#include "pbn/markov.hpp"
#include "pbn/observables.hpp"
#include "pbn/space.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;

namespace {

pbn::Event to_event(const std::vector<std::string> &labels) {
    return pbn::Event(labels.begin(), labels.end());
}

std::vector<std::string> from_event(const pbn::Event &e) {
    return {e.labels().begin(), e.labels().end()};
}

} // namespace

PYBIND11_MODULE(_pbn, m) {
    m.doc() = "Probability bracket engine";

    static py::exception<pbn::Error> pbn_error(m, "PbnError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const pbn::Error &e) {
            PyErr_SetString(pbn_error.ptr(),
                            (std::string(e.kind()) + ": " + e.what()).c_str());
        }
    });

    m.attr("GRAMMAR_VERSION") = std::string(pbn::lang::kGrammarVersion);
    m.attr("SCHEMA_VERSION") = std::string(pbn::cli::kSchemaVersion);

    // prob-core
    py::class_<pbn::DiscreteSpace>(m, "DiscreteSpace")
        .def(py::init<std::vector<std::string>, std::vector<double>, bool>(),
             py::arg("labels"), py::arg("weights"), py::arg("normalize") = false)
        .def_static("uniform", &pbn::DiscreteSpace::uniform)
        .def_property_readonly("labels", &pbn::DiscreteSpace::labels)
        .def_property_readonly("weights",
                               [](const pbn::DiscreteSpace &s) {
                                   return std::vector<double>(s.weights().begin(),
                                                              s.weights().end());
                               })
        .def("__len__", &pbn::DiscreteSpace::size);

    m.def("event_prob", [](const pbn::DiscreteSpace &s,
                           const std::vector<std::string> &e) {
        return pbn::event_prob(s, to_event(e));
    });
    m.def("bracket", [](const pbn::DiscreteSpace &s, const std::vector<std::string> &a,
                        const std::vector<std::string> &b) {
        return pbn::bracket(s, to_event(a), to_event(b));
    });
    m.def("bayes", [](const pbn::DiscreteSpace &s, const std::vector<std::string> &a,
                      const std::vector<std::string> &b) {
        return pbn::bayes(s, to_event(a), to_event(b));
    });
    m.def("point_basis", [](const pbn::DiscreteSpace &s) {
        std::vector<std::vector<std::string>> out;
        for (const auto &e : pbn::point_basis(s))
            out.push_back(from_event(e));
        return out;
    });

    // observables
    py::class_<pbn::Observable>(m, "Observable")
        .def(py::init<const pbn::DiscreteSpace &, const std::map<std::string, double> &>())
        .def(py::init<std::vector<double>>())
        .def_property_readonly("values", [](const pbn::Observable &x) {
            return std::vector<double>(x.values().begin(), x.values().end());
        });
    m.def("expectation", &pbn::expectation);
    m.def("expectation_fn", &pbn::expectation_fn);
    m.def("conditional_expectation",
          [](const pbn::DiscreteSpace &s, const pbn::Observable &x,
             const std::vector<std::string> &h) {
              return pbn::conditional_expectation(s, x, to_event(h));
          });
    m.def("expectation_indicator",
          [](const pbn::DiscreteSpace &s, const pbn::Observable &x,
             const std::vector<std::string> &b) {
              return pbn::expectation_indicator(s, x, to_event(b));
          });
    m.def("system_ket", [](const pbn::DiscreteSpace &s) {
        return pbn::system_ket(s).coefficients;
    });
    m.def("system_bra", [](const pbn::DiscreteSpace &s) {
        return pbn::system_bra(s).weights;
    });

    py::class_<pbn::DensityModel>(m, "DensityModel")
        .def(py::init([](double a, double b, pbn::RealFn f, double tol) {
                 pbn::QuadratureOptions q;
                 q.tolerance = tol;
                 return pbn::DensityModel(a, b, std::move(f), q);
             }),
             py::arg("lower"), py::arg("upper"), py::arg("density"),
             py::arg("tolerance") = 1e-10)
        .def_static("uniform", [](double a, double b) {
            return pbn::DensityModel::uniform(a, b);
        })
        .def_property_readonly("mass", &pbn::DensityModel::mass);
    m.def("density_expectation", &pbn::density_expectation);
    m.def("density_conditional_expectation", &pbn::density_conditional_expectation);

    // composite
    m.def("peliti_expectation", [](const std::vector<double> &weights, pbn::RealFn f) {
        return pbn::peliti_expectation(pbn::OccupationSpace::single_site(weights), f);
    });
    m.def("occupation_expectation",
          [](std::size_t sites, unsigned cutoff,
             const std::vector<pbn::OccupationState> &states,
             const std::vector<double> &weights, std::size_t site) {
              return pbn::occupation_expectation(
                  pbn::OccupationSpace(sites, cutoff, states, weights), site);
          });

    // markov
    py::class_<pbn::TransitionMatrix>(m, "TransitionMatrix")
        .def(py::init<Eigen::MatrixXd>())
        .def_property_readonly("matrix", &pbn::TransitionMatrix::matrix);
    py::class_<pbn::Generator>(m, "Generator")
        .def(py::init<Eigen::MatrixXd>())
        .def_property_readonly("matrix", &pbn::Generator::matrix);

    m.def("dtmc_evolve_row", &pbn::dtmc_evolve_row);
    m.def("dtmc_evolve_ket", [](const std::vector<double> &k0,
                                const pbn::TransitionMatrix &p, std::uint64_t t) {
        return pbn::dtmc_evolve_ket({pbn::PKet{k0}, 0.0}, p, t).ket.coefficients;
    });
    m.def("ctmc_propagator",
          [](const pbn::Generator &g, double t, double tol) {
              pbn::UniformizationOptions o;
              o.tolerance = tol;
              return pbn::ctmc_propagator(g, t, o).matrix;
          },
          py::arg("generator"), py::arg("t"), py::arg("tol") = 1e-12);
    m.def("ctmc_evolve", [](const std::vector<double> &k0, const pbn::Generator &g,
                            double t) {
        return pbn::ctmc_evolve({pbn::PKet{k0}, 0.0}, g, t).ket.coefficients;
    });
    m.def("stationary", [](const pbn::TransitionMatrix &p) {
        return pbn::stationary(p).coefficients;
    });
    m.def("stationary", [](const pbn::Generator &g) {
        return pbn::stationary(g).coefficients;
    });
    m.def("heisenberg_expectation",
          [](const pbn::Observable &x, const pbn::Generator &g,
             const std::vector<double> &p0, double t) {
              const auto r = pbn::heisenberg_expectation(x, g, pbn::PKet{p0}, t);
              return std::pair{r.heisenberg, r.schrodinger};
          });
    m.def("heisenberg_expectation",
          [](const pbn::Observable &x, const pbn::TransitionMatrix &p,
             const std::vector<double> &p0, double t) {
              const auto r = pbn::heisenberg_expectation(x, p, pbn::PKet{p0}, t);
              return std::pair{r.heisenberg, r.schrodinger};
          });
    m.def("time_dependent_unit_check",
          [](const pbn::Generator &g, double t) {
              return pbn::time_dependent_unit_check(g, t);
          });
    m.def("pure_birth_generator", &pbn::pure_birth_generator);
    m.def("increment_stationarity_check",
          [](const pbn::Generator &g, double t, double s) {
              return pbn::increment_stationarity_check(g, t, s);
          });

    // pbn-lang
    m.def("tokenize", [](const std::string &q) {
        std::vector<py::tuple> out;
        for (const auto &t : pbn::lang::tokenize(q))
            out.push_back(py::make_tuple(std::string(pbn::lang::to_string(t.kind)),
                                         t.text, t.span.begin, t.span.end));
        return out;
    });
    m.def("canonical", [](const std::string &q) {
        return pbn::lang::print(pbn::lang::parse(q));
    }, "Parse a query and print it in canonical form.");

    // cli
    py::class_<pbn::cli::ModelFile>(m, "Model")
        .def_property_readonly("name", [](const pbn::cli::ModelFile &f) {
            return f.model.name;
        })
        .def_property_readonly("kind", [](const pbn::cli::ModelFile &f) {
            return std::string(f.model.kind());
        })
        .def_property_readonly("states", [](const pbn::cli::ModelFile &f) {
            return f.model.space.labels();
        })
        .def("eval", [](const pbn::cli::ModelFile &f, const std::string &q) {
            return pbn::lang::evaluate(pbn::lang::parse(q),
                                       pbn::lang::EvalContext{f.model});
        });
    m.def("load_model", [](const std::string &path) {
        return pbn::cli::load_model(path);
    });
    m.def("parse_model", [](const std::string &text) {
        return pbn::cli::parse_model(text);
    });
    m.def("run_cli", [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        std::vector<std::string> full{"pbn"};
        full.insert(full.end(), args.begin(), args.end());
        const int code = pbn::cli::run_cli(full, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, "Run a pbn command line in-process; returns (exit_code, stdout, stderr).");
}
