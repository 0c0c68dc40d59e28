#ifndef PBN_LANG_HPP
#define PBN_LANG_HPP

#include "pbn/markov.hpp"
#include "pbn/observables.hpp"
#include "pbn/space.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pbn::lang {

inline constexpr std::string_view kGrammarVersion = "pbn-1";

enum class TokenKind {
    p_open,  // P(
    e_open,  // E[
    pipe,
    amp,
    at,
    lbrace,
    rbrace,
    lparen,
    rparen,
    rbrack,
    comma,
    ident,
    number,
    omega,
    end,
};

std::string_view to_string(TokenKind k);

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Token {
    TokenKind kind;
    std::string text;
    Span span;
};

/// Maximal-munch tokenizer; the result always ends with an `end` token.
/// Throws LexError on the first unrecognized byte.
std::vector<Token> tokenize(std::string_view input);

// --- AST ----------------------------------------------------------------------

struct TimeTag {
    std::string text; ///< as written, so printing round-trips
    double value = 0.0;
    friend bool operator==(const TimeTag &, const TimeTag &) = default;
};

struct EventExpr {
    enum class Kind { name, set, omega, intersect };
    Kind kind = Kind::name;
    std::string name;                 ///< Kind::name
    std::vector<std::string> members; ///< Kind::set, as written
    std::optional<TimeTag> time;      ///< Kind::omega only
    std::vector<EventExpr> operands;  ///< Kind::intersect: lhs, rhs

    static EventExpr named(std::string n);
    static EventExpr set(std::vector<std::string> m);
    static EventExpr omega(std::optional<TimeTag> t = std::nullopt);
    static EventExpr intersect(EventExpr lhs, EventExpr rhs);

    friend bool operator==(const EventExpr &, const EventExpr &) = default;
};

struct OpExpr {
    std::string observable;
    std::optional<std::string> function;
    friend bool operator==(const OpExpr &, const OpExpr &) = default;
};

struct Bracket {
    EventExpr bra, ket;
    friend bool operator==(const Bracket &, const Bracket &) = default;
};

/// P(Omega|F(X)|ket). The bra is always the system p-bra.
struct Sandwich {
    EventExpr bra, ket;
    OpExpr op;
    friend bool operator==(const Sandwich &, const Sandwich &) = default;
};

struct Expect {
    OpExpr op;
    std::optional<EventExpr> given;
    friend bool operator==(const Expect &, const Expect &) = default;
};

using Query = std::variant<Bracket, Sandwich, Expect>;

/// Throws ParseError with the byte offset and the expected token set.
Query parse(const std::vector<Token> &tokens);
Query parse(std::string_view input);

/// Canonical text; parse(print(q)) == q.
std::string print(const Query &q);
std::string print(const EventExpr &e);

// --- evaluation ----------------------------------------------------------------

/// Function given as a table over the observable range.
using TabulatedFunction = std::map<double, double>;

/// A declared model: space, named events/observables/functions and optional
/// dynamics. The space's measure is the initial distribution of a dynamic
/// model.
struct Model {
    std::string name;
    DiscreteSpace space;
    std::map<std::string, Event> events;
    std::map<std::string, Observable> observables;
    std::map<std::string, TabulatedFunction> functions;
    std::optional<Dynamics> dynamics;

    std::string_view kind() const;
};

struct EvalContext {
    const Model &model;
    UniformizationOptions uniformization{};
};

/// Throws UnknownIdentifier, TypeMismatch, TimeTagWithoutDynamics,
/// NonIntegerTimeForDTMC, ZeroConditioningEvent, UnknownLabel,
/// FunctionDomainError.
double evaluate(const Query &q, const EvalContext &ctx);

/// True for id, sq, abs, exp.
bool is_builtin_function(std::string_view name);

} // namespace pbn::lang

#endif
