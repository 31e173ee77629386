#pragma once

#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "strm/diag.hpp"
#include "strm/spec.hpp"

namespace strm {
namespace lex {

enum class Tok {
    Ident, Int, Float, String,
    KwInput, KwOutput, KwTrigger, KwIf, KwThen, KwElse, KwTrue, KwFalse, KwFilter,
    At, LBrace, RBrace, LParen, RParen, Comma, Colon, Assign, Dot,
    Plus, Minus, Star, Slash, Percent,
    Lt, Le, Gt, Ge, EqEq, Ne, AndAnd, OrOr, Bang,
    End,
};

struct Token {
    Tok kind;
    std::string text;        // identifier / raw number text
    std::uint64_t int_val = 0;
    double float_val = 0.0;
    SourcePos pos;
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string text, SourcePos p) {
        Token t;
        t.kind = k;
        t.text = std::move(text);
        t.pos = p;
        out.push_back(std::move(t));
    };
    while (i < src.size()) {
        char c = src[i];
        SourcePos pos{line, col};
        if (c == '\n') { ++i; ++line; col = 1; continue; }
        if (c == ' ' || c == '\t' || c == '\r') { ++i; ++col; continue; }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') { ++i; ++col; }
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            std::string word = src.substr(i, j - i);
            col += int(j - i);
            i = j;
            Tok k = Tok::Ident;
            if (word == "input") k = Tok::KwInput;
            else if (word == "output") k = Tok::KwOutput;
            else if (word == "trigger") k = Tok::KwTrigger;
            else if (word == "if") k = Tok::KwIf;
            else if (word == "then") k = Tok::KwThen;
            else if (word == "else") k = Tok::KwElse;
            else if (word == "true") k = Tok::KwTrue;
            else if (word == "false") k = Tok::KwFalse;
            else if (word == "filter") k = Tok::KwFilter;
            push(k, word, pos);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            bool is_float = false;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                is_float = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    is_float = true;
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            std::string text = src.substr(i, j - i);
            col += int(j - i);
            i = j;
            Token t;
            t.pos = pos;
            t.text = text;
            if (is_float) {
                t.kind = Tok::Float;
                t.float_val = std::strtod(text.c_str(), nullptr);
            } else {
                t.kind = Tok::Int;
                errno = 0;
                t.int_val = std::strtoull(text.c_str(), nullptr, 10);
                if (errno == ERANGE || (text.size() > 20))
                    throw ParseError(pos, "integer literal out of range: " + text);
            }
            out.push_back(std::move(t));
            continue;
        }
        if (c == '"') {
            std::string s;
            std::size_t j = i + 1;
            int c2 = col + 1;
            while (j < src.size() && src[j] != '"') {
                if (src[j] == '\n') throw ParseError(pos, "unterminated string");
                if (src[j] == '\\' && j + 1 < src.size()) {
                    char e = src[j + 1];
                    if (e == 'n') s += '\n';
                    else if (e == 't') s += '\t';
                    else if (e == '\\') s += '\\';
                    else if (e == '"') s += '"';
                    else throw ParseError({line, c2}, std::string("unknown escape \\") + e);
                    j += 2;
                    c2 += 2;
                    continue;
                }
                s += src[j];
                ++j;
                ++c2;
            }
            if (j >= src.size()) throw ParseError(pos, "unterminated string");
            col = c2 + 1;
            i = j + 1;
            Token t;
            t.kind = Tok::String;
            t.text = std::move(s);
            t.pos = pos;
            out.push_back(std::move(t));
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two(':', '=')) { push(Tok::Assign, ":=", pos); i += 2; col += 2; continue; }
        if (two('<', '=')) { push(Tok::Le, "<=", pos); i += 2; col += 2; continue; }
        if (two('>', '=')) { push(Tok::Ge, ">=", pos); i += 2; col += 2; continue; }
        if (two('=', '=')) { push(Tok::EqEq, "==", pos); i += 2; col += 2; continue; }
        if (two('!', '=')) { push(Tok::Ne, "!=", pos); i += 2; col += 2; continue; }
        if (two('&', '&')) { push(Tok::AndAnd, "&&", pos); i += 2; col += 2; continue; }
        if (two('|', '|')) { push(Tok::OrOr, "||", pos); i += 2; col += 2; continue; }
        Tok k;
        switch (c) {
            case '@': k = Tok::At; break;
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            case ':': k = Tok::Colon; break;
            case '.': k = Tok::Dot; break;
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '%': k = Tok::Percent; break;
            case '<': k = Tok::Lt; break;
            case '>': k = Tok::Gt; break;
            case '!': k = Tok::Bang; break;
            default:
                throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
        push(k, std::string(1, c), pos);
        ++i;
        ++col;
    }
    Token end;
    end.kind = Tok::End;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

}  // namespace lex

namespace detail {

// Magnitude of INT64_MIN; an integer literal of this size is only legal
// directly under unary minus.
constexpr std::uint64_t kInt64MinMagnitude = 9223372036854775808ULL;

class Parser {
  public:
    explicit Parser(const std::string& src) : toks_(lex::tokenize(src)) {}

    Spec parse() {
        Spec spec;
        while (!at(lex::Tok::End)) {
            if (at(lex::Tok::KwInput)) parse_input(spec);
            else if (at(lex::Tok::KwOutput)) parse_output(spec);
            else if (at(lex::Tok::KwTrigger)) parse_trigger(spec);
            else
                throw ParseError(peek().pos, "expected input, output or trigger declaration, got '" +
                                                 peek().text + "'");
        }
        validate(spec);
        return spec;
    }

  private:
    std::vector<lex::Token> toks_;
    std::size_t idx_ = 0;
    std::vector<std::pair<std::string, SourcePos>> access_sites_;
    std::vector<std::pair<std::string, SourcePos>> ac_leaves_;

    const lex::Token& peek(std::size_t ahead = 0) const {
        std::size_t i = idx_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(lex::Tok k) const { return peek().kind == k; }
    const lex::Token& advance() { return toks_[idx_++]; }
    const lex::Token& expect(lex::Tok k, const char* what) {
        if (!at(k)) throw ParseError(peek().pos, std::string("expected ") + what + ", got '" + peek().text + "'");
        return advance();
    }
    bool accept(lex::Tok k) {
        if (!at(k)) return false;
        ++idx_;
        return true;
    }
    // Contextual keyword: an identifier with specific text.
    void expect_word(const char* w) {
        if (!(at(lex::Tok::Ident) && peek().text == w))
            throw ParseError(peek().pos, std::string("expected '") + w + "', got '" + peek().text + "'");
        advance();
    }

    void parse_input(Spec& spec) {
        SourcePos pos = advance().pos;  // input
        std::vector<std::pair<std::string, SourcePos>> names;
        do {
            const auto& t = expect(lex::Tok::Ident, "input name");
            names.emplace_back(t.text, t.pos);
        } while (accept(lex::Tok::Comma));
        expect(lex::Tok::Colon, "':' and a value type");
        ValueType ty = parse_type();
        (void)pos;
        for (auto& [n, p] : names) spec.inputs.push_back({n, ty, p});
    }

    ValueType parse_type() {
        if (accept(lex::Tok::LParen)) {
            std::vector<ValueType> elems;
            elems.push_back(parse_type());
            expect(lex::Tok::Comma, "',' in tuple type (arity >= 2)");
            elems.push_back(parse_type());
            while (accept(lex::Tok::Comma)) elems.push_back(parse_type());
            expect(lex::Tok::RParen, "')'");
            return ValueType::tuple(std::move(elems));
        }
        const auto& t = expect(lex::Tok::Ident, "value type");
        if (t.text == "Bool") return ValueType::boolean();
        if (t.text == "Int64") return ValueType::int64();
        if (t.text == "Float64") return ValueType::float64();
        throw ParseError(t.pos, "unknown value type '" + t.text + "'");
    }

    void parse_output(Spec& spec) {
        advance();  // output
        OutputDecl d;
        const auto& name = expect(lex::Tok::Ident, "output name");
        d.pos = name.pos;
        d.name = name.text;
        if (accept(lex::Tok::Colon)) d.type = parse_type();
        if (at(lex::Tok::At)) d.pacing = parse_pacing();
        if (at(lex::Tok::LBrace)) d.filter = parse_filter_clause();
        expect(lex::Tok::Assign, "':='");
        d.expr = parse_expr();
        spec.outputs.push_back(std::move(d));
    }

    void parse_trigger(Spec& spec) {
        SourcePos pos = advance().pos;  // trigger
        TriggerDecl d;
        d.pos = pos;
        if (at(lex::Tok::At)) d.pacing = parse_pacing();
        if (at(lex::Tok::LBrace)) d.filter = parse_filter_clause();
        d.condition = parse_expr();
        d.message = expect(lex::Tok::String, "trigger message string").text;
        spec.triggers.push_back(std::move(d));
    }

    ExprPtr parse_filter_clause() {
        expect(lex::Tok::LBrace, "'{'");
        expect(lex::Tok::KwFilter, "'filter'");
        ExprPtr e = parse_expr();
        expect(lex::Tok::RBrace, "'}' after filter expression");
        return e;
    }

    PacingType parse_pacing() {
        expect(lex::Tok::At, "'@'");
        if (accept(lex::Tok::LBrace)) {
            ActivationCondition ac = parse_ac();
            expect(lex::Tok::RBrace, "'}'");
            return PacingType(ac);
        }
        SourcePos pos = peek().pos;
        Rational f = parse_decimal_number("frequency");
        expect_word("Hz");
        if (!f.is_positive()) throw ParseError(pos, "frequency must be positive");
        return PacingType(f);
    }

    Rational parse_decimal_number(const char* what) {
        if (at(lex::Tok::Int) || at(lex::Tok::Float)) {
            const auto& t = advance();
            Rational r;
            if (!Rational::parse_decimal(t.text, r))
                throw ParseError(t.pos, std::string("malformed ") + what + " '" + t.text + "'");
            return r;
        }
        throw ParseError(peek().pos, std::string("expected ") + what);
    }

    ActivationCondition parse_ac() {
        ActivationCondition lhs = parse_ac_and();
        if (!at(lex::Tok::OrOr)) return lhs;
        std::vector<ActivationCondition> ds{lhs};
        while (accept(lex::Tok::OrOr)) ds.push_back(parse_ac_and());
        return ActivationCondition::make_or(std::move(ds));
    }
    ActivationCondition parse_ac_and() {
        ActivationCondition lhs = parse_ac_atom();
        if (!at(lex::Tok::AndAnd)) return lhs;
        std::vector<ActivationCondition> cs{lhs};
        while (accept(lex::Tok::AndAnd)) cs.push_back(parse_ac_atom());
        return ActivationCondition::make_and(std::move(cs));
    }
    ActivationCondition parse_ac_atom() {
        if (accept(lex::Tok::LParen)) {
            ActivationCondition ac = parse_ac();
            expect(lex::Tok::RParen, "')'");
            return ac;
        }
        const auto& t = expect(lex::Tok::Ident, "input name in activation condition");
        ac_leaves_.emplace_back(t.text, t.pos);
        return ActivationCondition::make_leaf(t.text);
    }

    // ---- expressions ----

    ExprPtr parse_expr() {
        if (accept(lex::Tok::KwIf)) {
            ExprPtr c = parse_expr();
            expect(lex::Tok::KwThen, "'then'");
            ExprPtr t = parse_expr();
            expect(lex::Tok::KwElse, "'else'");
            ExprPtr e = parse_expr();
            return make_ite(c, t, e);
        }
        return parse_or();
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (accept(lex::Tok::OrOr)) e = make_binary(BinOp::Or, e, parse_and());
        return e;
    }
    ExprPtr parse_and() {
        ExprPtr e = parse_cmp();
        while (accept(lex::Tok::AndAnd)) e = make_binary(BinOp::And, e, parse_cmp());
        return e;
    }
    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        BinOp op;
        if (at(lex::Tok::Lt)) op = BinOp::Lt;
        else if (at(lex::Tok::Le)) op = BinOp::Le;
        else if (at(lex::Tok::Gt)) op = BinOp::Gt;
        else if (at(lex::Tok::Ge)) op = BinOp::Ge;
        else if (at(lex::Tok::EqEq)) op = BinOp::Eq;
        else if (at(lex::Tok::Ne)) op = BinOp::Ne;
        else return e;
        advance();
        return make_binary(op, e, parse_add());  // comparisons do not chain
    }
    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        for (;;) {
            if (accept(lex::Tok::Plus)) e = make_binary(BinOp::Add, e, parse_mul());
            else if (accept(lex::Tok::Minus)) e = make_binary(BinOp::Sub, e, parse_mul());
            else return e;
        }
    }
    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (accept(lex::Tok::Star)) e = make_binary(BinOp::Mul, e, parse_unary());
            else if (accept(lex::Tok::Slash)) e = make_binary(BinOp::Div, e, parse_unary());
            else if (accept(lex::Tok::Percent)) e = make_binary(BinOp::Mod, e, parse_unary());
            else return e;
        }
    }
    ExprPtr parse_unary() {
        if (at(lex::Tok::Minus)) {
            SourcePos pos = advance().pos;
            // "-9223372036854775808" is INT64_MIN as one literal; the bare
            // magnitude on its own does not fit Int64.
            if (at(lex::Tok::Int) && peek().int_val == kInt64MinMagnitude) {
                advance();
                return make_literal(Value(INT64_MIN));
            }
            (void)pos;
            return make_unary(UnOp::Neg, parse_unary());
        }
        if (accept(lex::Tok::Bang)) return make_unary(UnOp::Not, parse_unary());
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (at(lex::Tok::Dot)) {
            advance();
            if (at(lex::Tok::Int)) {
                const auto& t = advance();
                e = make_proj(e, static_cast<std::size_t>(t.int_val));
                continue;
            }
            if (at(lex::Tok::Float)) {
                // "x.0.1" lexes the float "0.1": split into two projections.
                const auto& t = advance();
                std::size_t dot = t.text.find('.');
                bool digits_only = dot != std::string::npos;
                for (std::size_t k = 0; digits_only && k < t.text.size(); ++k)
                    if (k != dot && !std::isdigit(static_cast<unsigned char>(t.text[k])))
                        digits_only = false;
                if (!digits_only)
                    throw ParseError(t.pos, "expected tuple index, got '" + t.text + "'");
                e = make_proj(e, std::strtoull(t.text.substr(0, dot).c_str(), nullptr, 10));
                e = make_proj(e, std::strtoull(t.text.substr(dot + 1).c_str(), nullptr, 10));
                continue;
            }
            const auto& name = expect(lex::Tok::Ident, "access method or tuple index");
            if (name.text == "offset") e = parse_offset_suffix(e, name.pos);
            else if (name.text == "hold") e = parse_hold_suffix(e, name.pos);
            else if (name.text == "aggregate") e = parse_window_suffix(e, name.pos);
            else if (name.text == "defaults") e = parse_defaults_suffix(e, name.pos);
            else
                throw ParseError(name.pos, "unknown access '" + name.text +
                                               "' (expected offset, hold, aggregate, defaults or a tuple index)");
        }
        finish_access(e);
        return e;
    }

    const Expr::Sync* plain_sync(const ExprPtr& e) const {
        auto* s = e->as<Expr::Sync>();
        return (s && s->offset == 0 && !s->fallback) ? s : nullptr;
    }

    ExprPtr parse_offset_suffix(const ExprPtr& e, SourcePos pos) {
        auto* s = plain_sync(e);
        if (!s) throw ParseError(pos, ".offset applies to a plain stream name");
        expect(lex::Tok::LParen, "'('");
        expect_word("by");
        expect(lex::Tok::Colon, "':'");
        bool neg = accept(lex::Tok::Minus);
        const auto& n = expect(lex::Tok::Int, "offset integer");
        if (n.int_val > kInt64MinMagnitude - 1)
            throw ParseError(n.pos, "offset out of range");
        expect(lex::Tok::RParen, "')'");
        std::int64_t off = static_cast<std::int64_t>(n.int_val);
        if (!neg && off != 0) throw ParseError(n.pos, "positive offsets are not supported");
        return make_sync(s->target, neg ? -off : 0, std::nullopt);
    }

    ExprPtr parse_hold_suffix(const ExprPtr& e, SourcePos pos) {
        auto* s = plain_sync(e);
        if (!s) throw ParseError(pos, ".hold applies to a plain stream name");
        expect(lex::Tok::LParen, "'('");
        expect_word("or");
        expect(lex::Tok::Colon, "':'");
        Value v = parse_literal_value();
        expect(lex::Tok::RParen, "')'");
        return make_hold(s->target, std::move(v));
    }

    ExprPtr parse_window_suffix(const ExprPtr& e, SourcePos pos) {
        auto* s = plain_sync(e);
        if (!s) throw ParseError(pos, ".aggregate applies to a plain stream name");
        expect(lex::Tok::LParen, "'('");
        expect_word("over");
        expect(lex::Tok::Colon, "':'");
        Rational dur = parse_duration();
        expect(lex::Tok::Comma, "','");
        expect_word("using");
        expect(lex::Tok::Colon, "':'");
        const auto& agg = expect(lex::Tok::Ident, "aggregation name");
        WinAgg a;
        if (agg.text == "count") a = WinAgg::Count;
        else if (agg.text == "sum") a = WinAgg::Sum;
        else if (agg.text == "avg") a = WinAgg::Avg;
        else if (agg.text == "min") a = WinAgg::Min;
        else if (agg.text == "max") a = WinAgg::Max;
        else if (agg.text == "exists") a = WinAgg::Exists;
        else throw ParseError(agg.pos, "unknown aggregation '" + agg.text + "'");
        expect(lex::Tok::RParen, "')'");
        if (!dur.is_positive()) throw ParseError(pos, "window duration must be positive");
        return make_window(s->target, dur, a, std::nullopt);
    }

    ExprPtr parse_defaults_suffix(const ExprPtr& e, SourcePos pos) {
        expect(lex::Tok::LParen, "'('");
        expect_word("to");
        expect(lex::Tok::Colon, "':'");
        Value v = parse_literal_value();
        expect(lex::Tok::RParen, "')'");
        if (auto* s = e->as<Expr::Sync>(); s && s->offset < 0 && !s->fallback)
            return make_sync(s->target, s->offset, std::move(v));
        if (auto* w = e->as<Expr::Window>(); w && !w->fallback) {
            if (!agg_needs_fallback_kind(w->agg))
                throw ParseError(pos, ".defaults is not allowed on count/sum/exists windows");
            return make_window(w->target, w->duration, w->agg, std::move(v));
        }
        throw ParseError(pos, ".defaults applies to a negative offset or an avg/min/max window");
    }

    static bool agg_needs_fallback_kind(WinAgg a) {
        return a == WinAgg::Avg || a == WinAgg::Min || a == WinAgg::Max;
    }

    // Checks a finished access chain: things that must end with .defaults.
    void finish_access(const ExprPtr& e) {
        if (auto* s = e->as<Expr::Sync>(); s && s->offset < 0 && !s->fallback)
            throw ParseError(peek().pos,
                             "negative offset access to '" + s->target + "' requires .defaults(to: ...)");
        if (auto* w = e->as<Expr::Window>(); w && agg_needs_fallback_kind(w->agg) && !w->fallback)
            throw ParseError(peek().pos, std::string(agg_str(w->agg)) + " window over '" + w->target +
                                             "' requires .defaults(to: ...)");
    }

    Rational parse_duration() {
        Rational n = parse_decimal_number("duration");
        const auto& unit = expect(lex::Tok::Ident, "duration unit (s or ms)");
        if (unit.text == "s") return n;
        if (unit.text == "ms") return n / Rational(1000);
        throw ParseError(unit.pos, "unknown duration unit '" + unit.text + "'");
    }

    Value parse_literal_value() {
        SourcePos pos = peek().pos;
        if (accept(lex::Tok::KwTrue)) return Value(true);
        if (accept(lex::Tok::KwFalse)) return Value(false);
        if (accept(lex::Tok::LParen)) {
            std::vector<Value> elems;
            elems.push_back(parse_literal_value());
            expect(lex::Tok::Comma, "',' in tuple literal (arity >= 2)");
            elems.push_back(parse_literal_value());
            while (accept(lex::Tok::Comma)) elems.push_back(parse_literal_value());
            expect(lex::Tok::RParen, "')'");
            return Value(std::move(elems));
        }
        bool neg = accept(lex::Tok::Minus);
        if (at(lex::Tok::Int)) {
            const auto& t = advance();
            if (neg && t.int_val == kInt64MinMagnitude) return Value(INT64_MIN);
            if (t.int_val > kInt64MinMagnitude - 1)
                throw ParseError(t.pos, "integer literal out of range: " + t.text);
            std::int64_t v = static_cast<std::int64_t>(t.int_val);
            return Value(neg ? -v : v);
        }
        if (at(lex::Tok::Float)) {
            const auto& t = advance();
            return Value(neg ? -t.float_val : t.float_val);
        }
        throw ParseError(pos, "expected literal value");
    }

    // A tuple element must denote a literal; "-2" parses as negation of a
    // literal in expression position, so fold that form back here.
    static std::optional<Value> tuple_element_literal(const ExprPtr& e) {
        if (auto* lit = e->as<Expr::Literal>()) return lit->value;
        if (auto* u = e->as<Expr::Unary>(); u && u->op == UnOp::Neg) {
            if (auto* lit = u->operand->as<Expr::Literal>()) {
                if (lit->value.is_int() && lit->value.as_int() != INT64_MIN)
                    return Value(-lit->value.as_int());
                if (lit->value.is_float()) return Value(-lit->value.as_float());
            }
        }
        return std::nullopt;
    }

    ExprPtr parse_primary() {
        const auto& t = peek();
        switch (t.kind) {
            case lex::Tok::KwTrue: advance(); return make_literal(Value(true));
            case lex::Tok::KwFalse: advance(); return make_literal(Value(false));
            case lex::Tok::Int: {
                advance();
                if (t.int_val > detail::kInt64MinMagnitude - 1)
                    throw ParseError(t.pos, "integer literal out of range: " + t.text);
                return make_literal(Value(static_cast<std::int64_t>(t.int_val)));
            }
            case lex::Tok::Float: advance(); return make_literal(Value(t.float_val));
            case lex::Tok::Ident: {
                advance();
                access_sites_.emplace_back(t.text, t.pos);
                return make_sync(t.text, 0, std::nullopt);
            }
            case lex::Tok::LParen: {
                advance();
                ExprPtr e = parse_expr();
                if (accept(lex::Tok::Comma)) {
                    // Tuple literal: every element must itself be a literal,
                    // since the expression language has no tuple constructor.
                    std::vector<ExprPtr> elems{e};
                    elems.push_back(parse_expr());
                    while (accept(lex::Tok::Comma)) elems.push_back(parse_expr());
                    expect(lex::Tok::RParen, "')'");
                    std::vector<Value> vals;
                    for (const auto& el : elems) {
                        auto lit = tuple_element_literal(el);
                        if (!lit)
                            throw ParseError(t.pos,
                                             "tuple expressions must be literal (no tuple constructor)");
                        vals.push_back(std::move(*lit));
                    }
                    return make_literal(Value(std::move(vals)));
                }
                expect(lex::Tok::RParen, "')'");
                return e;
            }
            default:
                throw ParseError(t.pos, "expected expression, got '" + t.text + "'");
        }
    }

    // ---- post-parse validation ----

    void validate(const Spec& spec) {
        std::vector<std::pair<std::string, SourcePos>> names;
        for (const auto& i : spec.inputs) names.emplace_back(i.name, i.pos);
        for (const auto& o : spec.outputs) names.emplace_back(o.name, o.pos);
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j)
                if (names[i].first == names[j].first)
                    throw ParseError(names[j].second, "duplicate stream name '" + names[j].first + "'");
        auto declared = [&](const std::string& n) {
            for (const auto& [name, pos] : names)
                if (name == n) return true;
            return false;
        };
        for (const auto& [target, pos] : access_sites_)
            if (!declared(target))
                throw ParseError(pos, "access to undeclared stream '" + target + "'");
        for (const auto& [leaf, pos] : ac_leaves_) {
            bool is_input = false;
            for (const auto& i : spec.inputs)
                if (i.name == leaf) { is_input = true; break; }
            if (!is_input)
                throw ParseError(pos, "activation condition names '" + leaf + "', which is not an input stream");
        }
    }
};

}  // namespace detail

// Parses a complete spec text. Throws ParseError (with line/column) on syntax
// errors, duplicate names, accesses to undeclared streams, and activation
// conditions naming non-inputs.
inline Spec parse_spec(const std::string& src) { return detail::Parser(src).parse(); }

}  // namespace strm
