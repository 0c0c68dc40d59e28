#include "pbn/error.hpp"
#include "pbn/lang.hpp"

#include <charconv>
#include <initializer_list>

namespace pbn::lang {

EventExpr EventExpr::named(std::string n) {
    EventExpr e;
    e.kind = Kind::name;
    e.name = std::move(n);
    return e;
}

EventExpr EventExpr::set(std::vector<std::string> m) {
    EventExpr e;
    e.kind = Kind::set;
    e.members = std::move(m);
    return e;
}

EventExpr EventExpr::omega(std::optional<TimeTag> t) {
    EventExpr e;
    e.kind = Kind::omega;
    e.time = std::move(t);
    return e;
}

EventExpr EventExpr::intersect(EventExpr lhs, EventExpr rhs) {
    EventExpr e;
    e.kind = Kind::intersect;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

namespace {

// Recursive descent over the token list:
//   query   := bracket | expect
//   bracket := "P(" event "|" tail ")"     tail := event | opexpr "|" event
//   expect  := "E[" opexpr ["|" event] "]"
//   event   := term {"&" term}
//   term    := IDENT | set | "Omega" ["@" NUMBER]
//   set     := "{" IDENT {"," IDENT} "}"
//   opexpr  := IDENT ["(" IDENT ")"]
class Parser {
  public:
    explicit Parser(const std::vector<Token> &tokens) : m_tokens(tokens) {
        if (m_tokens.empty() || m_tokens.back().kind != TokenKind::end)
            throw ParseError(0, "end of input", "token stream is not terminated");
    }

    Query query() {
        Query q = [&]() -> Query {
            if (peek().kind == TokenKind::p_open)
                return bracket();
            if (peek().kind == TokenKind::e_open)
                return expect();
            fail({TokenKind::p_open, TokenKind::e_open});
        }();
        expect_kind(TokenKind::end);
        return q;
    }

  private:
    const Token &peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(m_pos + ahead, m_tokens.size() - 1);
        return m_tokens[i];
    }

    const Token &advance() {
        const Token &t = peek();
        if (m_pos + 1 < m_tokens.size())
            ++m_pos;
        return t;
    }

    [[noreturn]] void fail(std::initializer_list<TokenKind> expected) const {
        std::string set;
        for (auto k : expected) {
            if (!set.empty())
                set += ", ";
            set += to_string(k);
        }
        const Token &t = peek();
        const std::string found =
            t.kind == TokenKind::end ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.span.begin, set,
                         "expected " + set + " but found " + found +
                             " at offset " + std::to_string(t.span.begin));
    }

    const Token &expect_kind(TokenKind k) {
        if (peek().kind != k)
            fail({k});
        return advance();
    }

    Query bracket() {
        expect_kind(TokenKind::p_open);
        const std::size_t bra_at = peek().span.begin;
        EventExpr bra = event();
        expect_kind(TokenKind::pipe);

        const bool is_op =
            peek().kind == TokenKind::ident &&
            (peek(1).kind == TokenKind::lparen || peek(1).kind == TokenKind::pipe);
        if (!is_op) {
            EventExpr ket = event();
            expect_kind(TokenKind::rparen);
            return Bracket{std::move(bra), std::move(ket)};
        }

        if (bra.kind != EventExpr::Kind::omega || bra.time)
            throw ParseError(bra_at, to_string(TokenKind::omega).data(),
                             "the bra of P(bra|op|ket) must be an untagged "
                             "Omega (offset " +
                                 std::to_string(bra_at) + ")");
        OpExpr op = opexpr();
        expect_kind(TokenKind::pipe);
        EventExpr ket = event();
        expect_kind(TokenKind::rparen);
        return Sandwich{std::move(bra), std::move(ket), std::move(op)};
    }

    Query expect() {
        expect_kind(TokenKind::e_open);
        Expect e{opexpr(), std::nullopt};
        if (peek().kind == TokenKind::pipe) {
            advance();
            e.given = event();
        } else if (peek().kind != TokenKind::rbrack) {
            fail({TokenKind::pipe, TokenKind::rbrack});
        }
        expect_kind(TokenKind::rbrack);
        return e;
    }

    OpExpr opexpr() {
        OpExpr op;
        op.observable = expect_kind(TokenKind::ident).text;
        if (peek().kind == TokenKind::lparen) {
            advance();
            op.function = std::move(op.observable);
            op.observable = expect_kind(TokenKind::ident).text;
            expect_kind(TokenKind::rparen);
        }
        return op;
    }

    EventExpr event() {
        EventExpr lhs = term();
        while (peek().kind == TokenKind::amp) {
            advance();
            lhs = EventExpr::intersect(std::move(lhs), term());
        }
        return lhs;
    }

    EventExpr term() {
        switch (peek().kind) {
        case TokenKind::ident:
            return EventExpr::named(advance().text);
        case TokenKind::lbrace:
            return set();
        case TokenKind::omega: {
            advance();
            if (peek().kind != TokenKind::at)
                return EventExpr::omega();
            advance();
            const Token &num = expect_kind(TokenKind::number);
            TimeTag tag{num.text, 0.0};
            std::from_chars(num.text.data(), num.text.data() + num.text.size(),
                            tag.value);
            return EventExpr::omega(std::move(tag));
        }
        default:
            fail({TokenKind::ident, TokenKind::lbrace, TokenKind::omega});
        }
    }

    // Set members are sample-point labels; numeric labels ("1".."6") are
    // accepted as written.
    EventExpr set() {
        expect_kind(TokenKind::lbrace);
        std::vector<std::string> members;
        for (;;) {
            if (peek().kind != TokenKind::ident && peek().kind != TokenKind::number)
                fail({TokenKind::ident, TokenKind::number});
            members.push_back(advance().text);
            if (peek().kind == TokenKind::comma) {
                advance();
                continue;
            }
            if (peek().kind != TokenKind::rbrace)
                fail({TokenKind::comma, TokenKind::rbrace});
            advance();
            return EventExpr::set(std::move(members));
        }
    }

    const std::vector<Token> &m_tokens;
    std::size_t m_pos = 0;
};

std::string print(const OpExpr &op) {
    return op.function ? *op.function + "(" + op.observable + ")" : op.observable;
}

} // namespace

Query parse(const std::vector<Token> &tokens) { return Parser(tokens).query(); }

Query parse(std::string_view input) { return parse(tokenize(input)); }

std::string print(const EventExpr &e) {
    switch (e.kind) {
    case EventExpr::Kind::name:
        return e.name;
    case EventExpr::Kind::set: {
        std::string s = "{";
        for (std::size_t i = 0; i < e.members.size(); ++i) {
            if (i)
                s += ',';
            s += e.members[i];
        }
        return s + "}";
    }
    case EventExpr::Kind::omega:
        return e.time ? "Omega@" + e.time->text : "Omega";
    case EventExpr::Kind::intersect:
        return print(e.operands.at(0)) + "&" + print(e.operands.at(1));
    }
    return {};
}

std::string print(const Query &q) {
    struct Printer {
        std::string operator()(const Bracket &b) const {
            return "P(" + print(b.bra) + "|" + print(b.ket) + ")";
        }
        std::string operator()(const Sandwich &s) const {
            return "P(" + print(s.bra) + "|" + print(s.op) + "|" + print(s.ket) +
                   ")";
        }
        std::string operator()(const Expect &e) const {
            return "E[" + print(e.op) + (e.given ? "|" + print(*e.given) : "") +
                   "]";
        }
    };
    return std::visit(Printer{}, q);
}

} // namespace pbn::lang
