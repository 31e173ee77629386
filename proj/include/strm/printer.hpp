#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "strm/diag.hpp"
#include "strm/spec.hpp"

namespace strm {

// Shortest round-trip representation, with a ".0" suffix so it re-lexes as a
// float token. Nonfinite values have no literal syntax; expression positions
// fall back to an arithmetic form, literal positions throw.
inline std::string float_str(double d) {
    if (!std::isfinite(d)) return d != d ? "nan" : (d > 0 ? "inf" : "-inf");
    std::array<char, 40> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    std::string s(buf.data(), p);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

inline std::string print_value(const Value& v) {
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_float()) {
        double d = v.as_float();
        if (!std::isfinite(d)) throw SpecError({}, "nonfinite float has no literal form");
        return float_str(d);
    }
    std::string s = "(";
    const auto& elems = v.as_tuple();
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) s += ", ";
        s += print_value(elems[i]);
    }
    return s + ")";
}

namespace detail {

// Binding strength; parents pass the minimum level a child may have before
// needing parentheses.
inline int binop_prec(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
        case BinOp::Eq:
        case BinOp::Ne: return 3;
        case BinOp::Add:
        case BinOp::Sub: return 4;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 5;
    }
    return 0;
}

inline void print_expr_rec(const Expr& e, int min_level, std::string& out);

inline void print_child(const ExprPtr& e, int min_level, std::string& out) {
    print_expr_rec(*e, min_level, out);
}

inline void print_expr_rec(const Expr& e, int min_level, std::string& out) {
    if (auto* x = e.as<Expr::Literal>()) {
        if (x->value.is_float() && !std::isfinite(x->value.as_float())) {
            // Fold-over of float overflow; keep the text parseable.
            double d = x->value.as_float();
            if (d != d) out += "(0.0 / 0.0)";
            else if (d > 0) out += "(1.0 / 0.0)";
            else out += "(-1.0 / 0.0)";
            return;
        }
        out += print_value(x->value);
        return;
    }
    if (auto* x = e.as<Expr::Sync>()) {
        out += x->target;
        if (x->offset < 0) {
            out += ".offset(by: " + std::to_string(x->offset) + ")";
            out += ".defaults(to: " + print_value(*x->fallback) + ")";
        }
        return;
    }
    if (auto* x = e.as<Expr::Hold>()) {
        out += x->target + ".hold(or: " + print_value(x->fallback) + ")";
        return;
    }
    if (auto* x = e.as<Expr::Window>()) {
        out += x->target + ".aggregate(over: " + x->duration.str() + "s, using: " + agg_str(x->agg) + ")";
        if (x->fallback) out += ".defaults(to: " + print_value(*x->fallback) + ")";
        return;
    }
    if (auto* x = e.as<Expr::Unary>()) {
        bool parens = min_level > 6;
        if (parens) out += "(";
        out += x->op == UnOp::Neg ? "-" : "!";
        print_child(x->operand, 6, out);
        if (parens) out += ")";
        return;
    }
    if (auto* x = e.as<Expr::Binary>()) {
        int prec = binop_prec(x->op);
        bool parens = prec < min_level;
        if (parens) out += "(";
        // Left-associative chains keep the left child at the same level;
        // comparisons do not chain, so both sides step up.
        int lhs_level = prec == 3 ? prec + 1 : prec;
        print_child(x->lhs, lhs_level, out);
        out += std::string(" ") + binop_str(x->op) + " ";
        print_child(x->rhs, prec + 1, out);
        if (parens) out += ")";
        return;
    }
    if (auto* x = e.as<Expr::Ite>()) {
        bool parens = min_level > 0;
        if (parens) out += "(";
        out += "if ";
        print_child(x->cond, 0, out);
        out += " then ";
        print_child(x->then_branch, 0, out);
        out += " else ";
        print_child(x->else_branch, 0, out);
        if (parens) out += ")";
        return;
    }
    auto* x = e.as<Expr::Proj>();
    auto* lit = x->tuple->as<Expr::Literal>();
    if (lit && !lit->value.is_tuple()) {
        // "lit.idx" would lex as one float token; force parentheses.
        // Tuple literals already print their own.
        out += "(";
        print_child(x->tuple, 0, out);
        out += ")";
    } else {
        print_child(x->tuple, 7, out);
    }
    out += "." + std::to_string(x->index);
}

}  // namespace detail

inline std::string print_expr(const ExprPtr& e) {
    std::string out;
    detail::print_expr_rec(*e, 0, out);
    return out;
}

inline std::string print_pacing(const PacingType& p) { return p.str(); }

inline std::string escape_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else out += c;
    }
    return out + "\"";
}

// Canonical text form. Reparsing yields a structurally equal Spec (inputs are
// printed one per line, matching the desugared form the parser produces).
inline std::string print_spec(const Spec& spec) {
    std::string out;
    for (const auto& i : spec.inputs)
        out += "input " + i.name + ": " + i.type.str() + "\n";
    if (!spec.inputs.empty() && !(spec.outputs.empty() && spec.triggers.empty())) out += "\n";
    for (const auto& o : spec.outputs) {
        out += "output " + o.name;
        if (o.type) out += ": " + o.type->str();
        if (o.pacing) out += " " + print_pacing(*o.pacing);
        if (o.filter) out += " { filter " + print_expr(o.filter) + " }";
        out += " := " + print_expr(o.expr) + "\n";
    }
    if (!spec.outputs.empty() && !spec.triggers.empty()) out += "\n";
    for (const auto& t : spec.triggers) {
        out += "trigger ";
        if (t.pacing) out += print_pacing(*t.pacing) + " ";
        if (t.filter) out += "{ filter " + print_expr(t.filter) + " } ";
        out += print_expr(t.condition) + " " + escape_string(t.message) + "\n";
    }
    return out;
}

inline std::string print_spec(const TypedSpec& ts) { return print_spec(to_spec(ts)); }

}  // namespace strm
