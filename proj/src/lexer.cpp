#include "pbn/error.hpp"
#include "pbn/lang.hpp"

namespace pbn::lang {

std::string_view to_string(TokenKind k) {
    switch (k) {
    case TokenKind::p_open: return "'P('";
    case TokenKind::e_open: return "'E['";
    case TokenKind::pipe: return "'|'";
    case TokenKind::amp: return "'&'";
    case TokenKind::at: return "'@'";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::rbrack: return "']'";
    case TokenKind::comma: return "','";
    case TokenKind::ident: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::omega: return "'Omega'";
    case TokenKind::end: return "end of input";
    }
    return "?";
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_alpha(c) || is_digit(c) || c == '.'; }

std::string describe(char c) {
    const auto b = static_cast<unsigned char>(c);
    if (b >= 0x21 && b < 0x7f)
        return std::string("'") + c + "'";
    const char *hex = "0123456789abcdef";
    return std::string("byte 0x") + hex[b >> 4] + hex[b & 15];
}

} // namespace

std::vector<Token> tokenize(std::string_view in) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = in.size();
    auto push = [&](TokenKind k, std::size_t b, std::size_t e) {
        out.push_back({k, std::string(in.substr(b, e - b)), {b, e}});
    };

    while (i < n) {
        const char c = in[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_alpha(c)) {
            while (i < n && is_ident_char(in[i]))
                ++i;
            const std::string_view word = in.substr(start, i - start);
            if (word == "P" && i < n && in[i] == '(') {
                push(TokenKind::p_open, start, ++i);
            } else if (word == "E" && i < n && in[i] == '[') {
                push(TokenKind::e_open, start, ++i);
            } else {
                push(word == "Omega" ? TokenKind::omega : TokenKind::ident, start, i);
            }
            continue;
        }
        if (is_digit(c)) {
            while (i < n && is_digit(in[i]))
                ++i;
            if (i + 1 < n && in[i] == '.' && is_digit(in[i + 1])) {
                ++i;
                while (i < n && is_digit(in[i]))
                    ++i;
            }
            push(TokenKind::number, start, i);
            continue;
        }
        TokenKind k;
        switch (c) {
        case '|': k = TokenKind::pipe; break;
        case '&': k = TokenKind::amp; break;
        case '@': k = TokenKind::at; break;
        case '{': k = TokenKind::lbrace; break;
        case '}': k = TokenKind::rbrace; break;
        case '(': k = TokenKind::lparen; break;
        case ')': k = TokenKind::rparen; break;
        case ']': k = TokenKind::rbrack; break;
        case ',': k = TokenKind::comma; break;
        default:
            throw LexError(start, "unexpected " + describe(c) + " at offset " +
                                      std::to_string(start));
        }
        push(k, start, ++i);
    }
    out.push_back({TokenKind::end, "", {n, n}});
    return out;
}

} // namespace pbn::lang
