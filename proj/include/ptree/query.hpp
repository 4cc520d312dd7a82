#pragma once

/// \file query.hpp
/// \brief Text syntax for events and queries.
///
/// Events:
///
///     event := or
///     or    := and ( "|" and )*
///     and   := prec ( "&" prec )*
///     prec  := unary ( "~>" unary )*          (left-associative)
///     unary := "!" unary | atom
///     atom  := IDENT "=" VALUE | "(" event ")"
///
/// `not`, `and`, `or` and `prec` are accepted as keyword spellings. Values
/// are integers or double-quoted strings.
///
/// Queries:
///
///     query := "P(" and [ "|" step ( ";" step )* ] ")"
///     step  := "do(" event ")" | "cf(" event ")" | "see(" event ")" | event
///
/// The first top-level `|` inside P(...) separates the target from the
/// steps, so a disjunctive target must be parenthesized: P((X=0 | X=1) | Y=1).

#include "ptree/event.hpp"
#include "ptree/transforms.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptree {

struct QueryAst {
    Event target;
    std::vector<PipelineStep> steps;

    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

namespace detail {

enum class Tok { Ident, Int, String, Eq, LParen, RParen, Bang, Amp, Bar, Arrow, Semi, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", src_.size()});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    Token next() {
        const std::size_t start = pos_;
        const char c = src_[pos_];
        const auto single = [&](Tok k) {
            ++pos_;
            return Token{k, std::string(1, c), start};
        };
        switch (c) {
            case '=': return single(Tok::Eq);
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case '!': return single(Tok::Bang);
            case '&': return single(Tok::Amp);
            case '|': return single(Tok::Bar);
            case ';': return single(Tok::Semi);
            default: break;
        }
        if (c == '~') {
            if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                pos_ += 2;
                return {Tok::Arrow, "~>", start};
            }
            throw ParseError("expected '~>'", start);
        }
        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
            while (pos_ < src_.size() && src_[pos_] == '*') ++pos_;
            return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), start};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ - start == 1 && c == '-') throw ParseError("expected digits after '-'", start);
            return {Tok::Int, std::string(src_.substr(start, pos_ - start)), start};
        }
        if (c == '"') {
            std::string text;
            ++pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
                text += src_[pos_++];
            }
            if (pos_ >= src_.size()) throw ParseError("unterminated string", start);
            ++pos_;
            return {Tok::String, std::move(text), start};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

    Event event() { return parse_or(); }

    QueryAst query() {
        const Token& p = peek();
        if (p.kind != Tok::Ident || p.text != "P") throw ParseError("expected 'P('", p.pos);
        ++i_;
        expect(Tok::LParen, "'(' after P");
        Event target = parse_and();
        std::vector<PipelineStep> steps;
        if (accept(Tok::Bar)) {
            steps.push_back(step());
            while (accept(Tok::Semi)) steps.push_back(step());
        }
        expect(Tok::RParen, "')' closing P(");
        return {std::move(target), std::move(steps)};
    }

    PipelineStep step() {
        const Token& t = peek();
        if (t.kind == Tok::Ident && peek(1).kind == Tok::LParen &&
            (t.text == "do" || t.text == "cf" || t.text == "see")) {
            const std::string kind = t.text;
            i_ += 2;
            Event e = parse_or();
            expect(Tok::RParen, "')' closing " + kind + "(");
            if (kind == "do") return PipelineStep::intervene(std::move(e));
            if (kind == "cf") return PipelineStep::cf(std::move(e));
            return PipelineStep::see(std::move(e));
        }
        return PipelineStep::see(parse_or());
    }

    void finish() {
        if (peek().kind != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().pos);
    }

    bool at_end() const { return peek().kind == Tok::End; }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }

    bool keyword(std::string_view kw) const {
        return peek().kind == Tok::Ident && peek().text == kw && peek(1).kind != Tok::Eq;
    }

    bool accept_keyword(std::string_view kw) {
        if (!keyword(kw)) return false;
        ++i_;
        return true;
    }

    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++i_;
        return true;
    }

    void expect(Tok k, const std::string& what) {
        if (!accept(k)) {
            const Token& t = peek();
            throw ParseError("expected " + what + (t.kind == Tok::End ? ", got end of input" : ", got '" + t.text + "'"),
                             t.pos);
        }
    }

    Event parse_or() {
        Event lhs = parse_and();
        while (accept(Tok::Bar) || accept_keyword("or")) lhs = Event::disj(std::move(lhs), parse_and());
        return lhs;
    }

    Event parse_and() {
        Event lhs = parse_prec();
        while (accept(Tok::Amp) || accept_keyword("and")) lhs = Event::conj(std::move(lhs), parse_prec());
        return lhs;
    }

    Event parse_prec() {
        Event lhs = parse_unary();
        while (accept(Tok::Arrow) || accept_keyword("prec")) lhs = Event::prec(std::move(lhs), parse_unary());
        return lhs;
    }

    struct DepthGuard {
        std::size_t& depth;
        DepthGuard(std::size_t& d, std::size_t pos) : depth(d) {
            if (++depth > kMaxNesting) throw ParseError("expression nested too deeply", pos);
        }
        ~DepthGuard() { --depth; }
    };

    Event parse_unary() {
        const DepthGuard guard(depth_, peek().pos);
        if (accept(Tok::Bang) || accept_keyword("not")) return Event::negate(parse_unary());
        return parse_atom();
    }

    Event parse_atom() {
        if (accept(Tok::LParen)) {
            const DepthGuard guard(depth_, peek().pos);
            Event e = parse_or();
            expect(Tok::RParen, "')'");
            return e;
        }
        const Token& t = peek();
        if (t.kind != Tok::Ident) {
            throw ParseError(t.kind == Tok::End ? "expected statement, got end of input"
                                                : "expected statement, got '" + t.text + "'",
                             t.pos);
        }
        std::string var = t.text;
        ++i_;
        expect(Tok::Eq, "'=' after " + var);
        const Token& v = peek();
        if (v.kind == Tok::String) {
            ++i_;
            return Event::atom(std::move(var), v.text);
        }
        if (v.kind == Tok::Int) {
            std::int64_t value = 0;
            const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), value);
            if (ec != std::errc{} || ptr != v.text.data() + v.text.size())
                throw ParseError("integer out of range", v.pos);
            ++i_;
            return Event::atom(std::move(var), value);
        }
        throw ParseError("expected value after '" + var + "='", v.pos);
    }

    static constexpr std::size_t kMaxNesting = 512;

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::size_t depth_ = 0;
};

}  // namespace detail

/// \throws ParseError with a position inside `text`.
inline Event parse_event(std::string_view text) {
    detail::Parser p(text);
    if (p.at_end()) throw ParseError("empty event", 0);
    Event e = p.event();
    p.finish();
    return e;
}

inline QueryAst parse_query(std::string_view text) {
    detail::Parser p(text);
    if (p.at_end()) throw ParseError("empty query", 0);
    QueryAst q = p.query();
    p.finish();
    return q;
}

/// A single pipeline step in query-step syntax, e.g. "do(Y=1)" or "Z=0".
inline PipelineStep parse_step(std::string_view text) {
    detail::Parser p(text);
    if (p.at_end()) throw ParseError("empty step", 0);
    PipelineStep s = p.step();
    p.finish();
    return s;
}

namespace detail {

// Binding strength; higher binds tighter.
inline int level(const Event& e) {
    switch (e.variant().index()) {
        case 0: return 5;  // atom
        case 1: return 4;  // not
        case 2: return 2;  // and
        case 3: return 1;  // or
        default: return 3; // prec
    }
}

inline void format_into(const Event& e, std::string& out);

inline void format_operand(const Event& e, bool parens, std::string& out) {
    if (parens) out += '(';
    format_into(e, out);
    if (parens) out += ')';
}

inline void format_into(const Event& e, std::string& out) {
    const int me = level(e);
    const auto binary = [&](const Event& l, const Event& r, std::string_view op) {
        format_operand(l, level(l) < me, out);
        out += op;
        format_operand(r, level(r) <= me, out);
    };
    if (const auto* a = e.as<event::Atom>()) out += a->statement.str();
    else if (const auto* n = e.as<event::Not>()) {
        out += '!';
        format_operand(*n->operand, level(*n->operand) < me, out);
    } else if (const auto* x = e.as<event::And>()) binary(*x->lhs, *x->rhs, " & ");
    else if (const auto* x = e.as<event::Or>()) binary(*x->lhs, *x->rhs, " | ");
    else if (const auto* x = e.as<event::Prec>()) binary(*x->cause, *x->effect, " ~> ");
}

}  // namespace detail

/// Prints with the fewest parentheses that parse back to the same tree.
inline std::string format_event(const Event& e) {
    std::string out;
    detail::format_into(e, out);
    return out;
}

inline std::string format_step(const PipelineStep& s) {
    switch (s.kind) {
        case PipelineStep::Kind::Do: return "do(" + format_event(s.event) + ")";
        case PipelineStep::Kind::Cf: return "cf(" + format_event(s.event) + ")";
        case PipelineStep::Kind::See: break;
    }
    return "see(" + format_event(s.event) + ")";
}

inline std::string format_query(const QueryAst& q) {
    std::string out = "P(";
    detail::format_operand(q.target, detail::level(q.target) < 2, out);
    for (std::size_t i = 0; i < q.steps.size(); ++i) {
        out += i == 0 ? " | " : "; ";
        out += format_step(q.steps[i]);
    }
    return out + ")";
}

}  // namespace ptree
