#include "pbn/cli.hpp"
#include "pbn/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pbn::cli {

using nlohmann::json;

namespace {

std::string escape_pointer(const std::string &token) {
    std::string out;
    for (char c : token) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

std::string at(const std::string &base, const std::string &token) {
    return base + "/" + escape_pointer(token);
}

std::string at(const std::string &base, std::size_t index) {
    return base + "/" + std::to_string(index);
}

const json &field(const json &obj, const std::string &base, const char *key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(at(base, key), "required field is missing");
    return *it;
}

double number(const json &v, const std::string &ptr) {
    if (!v.is_number())
        throw SchemaError(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw SchemaError(ptr, "number is not finite");
    return d;
}

std::string text(const json &v, const std::string &ptr) {
    if (!v.is_string())
        throw SchemaError(ptr, "expected a string");
    return v.get<std::string>();
}

void require_object(const json &v, const std::string &ptr) {
    if (!v.is_object())
        throw SchemaError(ptr, "expected an object");
}

void require_array(const json &v, const std::string &ptr) {
    if (!v.is_array())
        throw SchemaError(ptr, "expected an array");
}

[[noreturn]] void invalid(const std::string &ptr, const std::string &what) {
    throw ValidationError(ptr + ": " + what);
}

bool valid_identifier(const std::string &s) {
    if (s.empty() || s == "Omega" || s == "P" || s == "E")
        return false;
    auto alpha = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    if (!alpha(s[0]))
        return false;
    for (char c : s)
        if (!alpha(c) && !(c >= '0' && c <= '9') && c != '.')
            return false;
    return true;
}

Eigen::MatrixXd read_matrix(const json &rows, std::size_t n) {
    const std::string base = "/dynamics";
    require_array(rows, base);
    if (rows.size() != n)
        invalid(base, "expected " + std::to_string(n) + " rows, found " +
                          std::to_string(rows.size()));
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string rp = at(base, i);
        require_array(rows[i], rp);
        if (rows[i].size() != n)
            invalid(rp, "expected " + std::to_string(n) + " entries, found " +
                            std::to_string(rows[i].size()));
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = number(rows[i][j], at(rp, j));
    }
    return m;
}

void validate_transition(const Eigen::MatrixXd &p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const std::string rp = at("/dynamics", i);
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (p(i, j) < -kClampTolerance)
                invalid(at(rp, j), "negative transition probability " +
                                       format_number(p(i, j)));
        const double s = p.row(i).sum();
        if (std::abs(s - 1.0) > kAlgebraTolerance)
            invalid(rp, "row " + std::to_string(i) + " sums to " +
                            format_number(s));
    }
}

void validate_generator(const Eigen::MatrixXd &g) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const std::string rp = at("/dynamics", i);
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            if (i != j && g(i, j) < -kClampTolerance)
                invalid(at(rp, j), "negative off-diagonal rate " +
                                       format_number(g(i, j)));
        const double s = g.row(i).sum();
        if (std::abs(s) > kAlgebraTolerance)
            invalid(rp, "row " + std::to_string(i) + " sums to " +
                            format_number(s) + ", expected 0");
    }
}

} // namespace

ModelFile parse_model(std::string_view json_text, const LoadOptions &opts) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
    require_object(doc, "");

    if (auto it = doc.find("schema"); it != doc.end()) {
        if (text(*it, "/schema") != kSchemaVersion)
            throw SchemaError("/schema", "unsupported schema '" +
                                             it->get<std::string>() +
                                             "', expected " +
                                             std::string(kSchemaVersion));
    }
    const std::string name = text(field(doc, "", "name"), "/name");
    const std::string kind = text(field(doc, "", "kind"), "/kind");
    if (kind != "static" && kind != "dtmc" && kind != "ctmc")
        throw SchemaError("/kind", "expected one of static, dtmc, ctmc");

    // states
    const json &states = field(doc, "", "states");
    require_array(states, "/states");
    if (states.empty())
        invalid("/states", "at least one state is required");
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < states.size(); ++i) {
        labels.push_back(text(states[i], at("/states", i)));
        if (labels.back().empty())
            invalid(at("/states", i), "empty state label");
        if (!seen.insert(labels.back()).second)
            invalid(at("/states", i), "duplicate state '" + labels.back() + "'");
    }

    // measure
    const json &measure = field(doc, "", "measure");
    require_object(measure, "/measure");
    std::vector<double> weights(labels.size(), 0.0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i)
        index[labels[i]] = i;
    for (const auto &[label, v] : measure.items()) {
        const std::string ptr = at("/measure", label);
        auto it = index.find(label);
        if (it == index.end())
            invalid(ptr, "unknown state '" + label + "'");
        const double w = number(v, ptr);
        if (w < 0.0)
            invalid(ptr, "negative weight " + format_number(w));
        weights[it->second] = w;
    }
    for (const auto &l : labels)
        if (!measure.contains(l))
            invalid("/measure", "no weight for state '" + l + "'");
    double total = 0.0;
    for (double w : weights)
        total += w;
    bool normalize = false;
    if (auto it = doc.find("normalize"); it != doc.end()) {
        if (!it->is_boolean())
            throw SchemaError("/normalize", "expected a boolean");
        normalize = it->get<bool>();
    }
    if (!(total > 0.0))
        invalid("/measure", "measure sums to " + format_number(total));
    if (std::abs(total - 1.0) > kAlgebraTolerance && !normalize &&
        !opts.lenient_measure)
        invalid("/measure", "measure sums to " + format_number(total));

    ModelFile out{lang::Model{name,
                              DiscreteSpace(labels, weights,
                                            std::abs(total - 1.0) >
                                                kAlgebraTolerance),
                              {},
                              {},
                              {},
                              std::nullopt},
                  total};
    auto &model = out.model;
    const DiscreteSpace &space = model.space;

    std::set<std::string> names;
    auto claim = [&](const std::string &n, const std::string &ptr) {
        if (!valid_identifier(n))
            invalid(ptr, "'" + n + "' is not a valid identifier");
        if (!names.insert(n).second)
            invalid(ptr, "name '" + n + "' is declared twice");
    };

    if (auto it = doc.find("events"); it != doc.end()) {
        require_object(*it, "/events");
        for (const auto &[ename, members] : it->items()) {
            const std::string ptr = at("/events", ename);
            claim(ename, ptr);
            require_array(members, ptr);
            std::set<std::string> ls;
            for (std::size_t i = 0; i < members.size(); ++i) {
                const std::string l = text(members[i], at(ptr, i));
                if (!space.has(l))
                    invalid(at(ptr, i), "unknown state '" + l + "'");
                ls.insert(l);
            }
            model.events.emplace(ename, Event(std::move(ls)));
        }
    }

    if (auto it = doc.find("observables"); it != doc.end()) {
        require_object(*it, "/observables");
        for (const auto &[oname, values] : it->items()) {
            const std::string ptr = at("/observables", oname);
            claim(oname, ptr);
            require_object(values, ptr);
            std::map<std::string, double> vm;
            for (const auto &[l, v] : values.items()) {
                if (!space.has(l))
                    invalid(at(ptr, l), "unknown state '" + l + "'");
                vm[l] = number(v, at(ptr, l));
            }
            for (const auto &l : labels)
                if (!vm.count(l))
                    invalid(ptr, "no value for state '" + l + "'");
            model.observables.emplace(oname, Observable(space, vm));
        }
    }

    if (auto it = doc.find("functions"); it != doc.end()) {
        require_object(*it, "/functions");
        for (const auto &[fname, table] : it->items()) {
            const std::string ptr = at("/functions", fname);
            claim(fname, ptr);
            if (lang::is_builtin_function(fname))
                invalid(ptr, "'" + fname + "' shadows a built-in function");
            require_array(table, ptr);
            lang::TabulatedFunction f;
            for (std::size_t i = 0; i < table.size(); ++i) {
                const std::string ep = at(ptr, i);
                require_array(table[i], ep);
                if (table[i].size() != 2)
                    throw SchemaError(ep, "expected an [x, y] pair");
                const double x = number(table[i][0], at(ep, 0));
                if (!f.emplace(x, number(table[i][1], at(ep, 1))).second)
                    invalid(ep, "duplicate entry for x = " + format_number(x));
            }
            model.functions.emplace(fname, std::move(f));
        }
    }

    const auto dyn = doc.find("dynamics");
    if (kind == "static") {
        if (dyn != doc.end())
            invalid("/dynamics", "a static model declares no dynamics");
    } else {
        if (dyn == doc.end())
            throw SchemaError("/dynamics", "required field is missing");
        Eigen::MatrixXd m = read_matrix(*dyn, labels.size());
        if (kind == "dtmc") {
            validate_transition(m);
            model.dynamics = TransitionMatrix(std::move(m));
        } else {
            validate_generator(m);
            model.dynamics = Generator(std::move(m));
        }
    }
    return out;
}

ModelFile load_model(const std::string &path, const LoadOptions &opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("cannot read model file '" + path + "'");
    return parse_model(buf.str(), opts);
}

} // namespace pbn::cli
