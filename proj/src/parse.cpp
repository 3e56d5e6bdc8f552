#include "prover/parse.hpp"

#include <sstream>

namespace prover {

namespace {

std::string format_error(const std::string& msg, std::size_t offset,
                         const std::vector<std::string>& expected) {
    std::ostringstream os;
    os << msg << " at offset " << offset;
    if (!expected.empty()) {
        os << " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) os << ", ";
            os << expected[i];
        }
        os << ")";
    }
    return os.str();
}

}  // namespace

ParseError::ParseError(std::string msg, std::size_t off, std::vector<std::string> exp)
    : std::runtime_error(format_error(msg, off, exp)),
      offset(off),
      expected(std::move(exp)) {}

namespace {

enum class Tok { Ident, True, False, Not, And, Or, Imp, Iff, LParen, RParen, End };

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;

    Tok kind = Tok::End;
    std::string text;       // for Ident
    std::size_t tok_start = 0;

    explicit Lexer(const std::string& s) : src(s) { advance(); }

    void advance() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                    src[pos] == '\n' || src[pos] == '\r'))
            ++pos;
        tok_start = pos;
        if (pos >= src.size()) {
            kind = Tok::End;
            return;
        }
        char c = src[pos];
        auto match = [&](const char* s, Tok k) {
            std::size_t n = std::char_traits<char>::length(s);
            if (src.compare(pos, n, s) == 0) {
                kind = k;
                pos += n;
                return true;
            }
            return false;
        };
        if (c == '~') { kind = Tok::Not; ++pos; return; }
        if (c == '(') { kind = Tok::LParen; ++pos; return; }
        if (c == ')') { kind = Tok::RParen; ++pos; return; }
        if (match("/\\", Tok::And)) return;
        if (match("\\/", Tok::Or)) return;
        if (match("==>", Tok::Imp)) return;
        if (match("<=>", Tok::Iff)) return;
        if (c == 'T') { kind = Tok::True; ++pos; return; }
        if (c == 'F') { kind = Tok::False; ++pos; return; }
        if (c >= 'a' && c <= 'z') {
            std::size_t start = pos;
            while (pos < src.size() &&
                   ((src[pos] >= 'a' && src[pos] <= 'z') ||
                    (src[pos] >= '0' && src[pos] <= '9') || src[pos] == '_'))
                ++pos;
            kind = Tok::Ident;
            text = src.substr(start, pos - start);
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos, {});
    }
};

struct Parser {
    Lexer lex;

    explicit Parser(const std::string& s) : lex(s) {}

    [[noreturn]] void fail(std::vector<std::string> expected) {
        throw ParseError("unexpected token", lex.tok_start, std::move(expected));
    }

    Term atom() {
        switch (lex.kind) {
            case Tok::True: lex.advance(); return Term::truth();
            case Tok::False: lex.advance(); return Term::falsity();
            case Tok::Ident: {
                Term t = Term::var(lex.text);
                lex.advance();
                return t;
            }
            case Tok::LParen: {
                lex.advance();
                Term t = iff();
                if (lex.kind != Tok::RParen) fail({")"});
                lex.advance();
                return t;
            }
            default:
                fail({"T", "F", "identifier", "(", "~"});
        }
    }

    Term neg() {
        if (lex.kind == Tok::Not) {
            lex.advance();
            return Term::negation(neg());
        }
        return atom();
    }

    Term conj() {
        Term t = neg();
        while (lex.kind == Tok::And) {
            lex.advance();
            t = Term::conj(t, neg());
        }
        return t;
    }

    Term disj() {
        Term t = conj();
        while (lex.kind == Tok::Or) {
            lex.advance();
            t = Term::disj(t, conj());
        }
        return t;
    }

    Term imp() {
        Term t = disj();
        if (lex.kind == Tok::Imp) {
            lex.advance();
            return Term::implies(t, imp());
        }
        return t;
    }

    Term iff() {
        Term t = imp();
        if (lex.kind == Tok::Iff) {
            lex.advance();
            return Term::iff(t, iff());
        }
        return t;
    }
};

}  // namespace

Term parse_term(const std::string& input) {
    Parser p(input);
    Term t = p.iff();
    if (p.lex.kind != Tok::End)
        throw ParseError("trailing input", p.lex.tok_start,
                         {"end of input", "/\\", "\\/", "==>", "<=>"});
    return t;
}

}  // namespace prover
