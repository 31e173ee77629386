#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "strm/rational.hpp"
#include "strm/value.hpp"

namespace strm {

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class WinAgg { Count, Sum, Avg, Min, Max, Exists };

inline const char* binop_str(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

inline const char* agg_str(WinAgg a) {
    switch (a) {
        case WinAgg::Count: return "count";
        case WinAgg::Sum: return "sum";
        case WinAgg::Avg: return "avg";
        case WinAgg::Min: return "min";
        case WinAgg::Max: return "max";
        case WinAgg::Exists: return "exists";
    }
    return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree. Stream accesses come in three kinds:
//   Sync   - same-cycle or n-cycles-back value of the target (offset <= 0);
//            a negative offset carries a fallback for missing history.
//   Hold   - most recent value of the target, whatever its pacing.
//   Window - aggregate over the target's values in a trailing duration.
struct Expr {
    struct Literal { Value value; };
    struct Sync {
        std::string target;
        std::int64_t offset = 0;                // always <= 0
        std::optional<Value> fallback;          // present iff offset < 0
    };
    struct Hold {
        std::string target;
        Value fallback;
    };
    struct Window {
        std::string target;
        Rational duration;                      // seconds, > 0
        WinAgg agg = WinAgg::Count;
        std::optional<Value> fallback;          // required for avg/min/max
    };
    struct Unary { UnOp op; ExprPtr operand; };
    struct Binary { BinOp op; ExprPtr lhs, rhs; };
    struct Ite { ExprPtr cond, then_branch, else_branch; };
    struct Proj { ExprPtr tuple; std::size_t index; };

    std::variant<Literal, Sync, Hold, Window, Unary, Binary, Ite, Proj> node;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }
};

inline ExprPtr make_literal(Value v) { return std::make_shared<Expr>(Expr{Expr::Literal{std::move(v)}}); }
inline ExprPtr make_sync(std::string t, std::int64_t off = 0, std::optional<Value> fb = std::nullopt) {
    return std::make_shared<Expr>(Expr{Expr::Sync{std::move(t), off, std::move(fb)}});
}
inline ExprPtr make_hold(std::string t, Value fb) {
    return std::make_shared<Expr>(Expr{Expr::Hold{std::move(t), std::move(fb)}});
}
inline ExprPtr make_window(std::string t, Rational dur, WinAgg agg,
                           std::optional<Value> fb = std::nullopt) {
    return std::make_shared<Expr>(Expr{Expr::Window{std::move(t), dur, agg, std::move(fb)}});
}
inline ExprPtr make_unary(UnOp op, ExprPtr e) { return std::make_shared<Expr>(Expr{Expr::Unary{op, std::move(e)}}); }
inline ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Expr{Expr::Binary{op, std::move(l), std::move(r)}});
}
inline ExprPtr make_ite(ExprPtr c, ExprPtr t, ExprPtr e) {
    return std::make_shared<Expr>(Expr{Expr::Ite{std::move(c), std::move(t), std::move(e)}});
}
inline ExprPtr make_proj(ExprPtr t, std::size_t i) {
    return std::make_shared<Expr>(Expr{Expr::Proj{std::move(t), i}});
}

inline bool opt_value_bits_eq(const std::optional<Value>& a, const std::optional<Value>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || value_bits_eq(*a, *b);
}

// Structural equality. Float literals compare by bit pattern.
inline bool expr_eq(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto* x = a.as<Expr::Literal>()) return value_bits_eq(x->value, b.as<Expr::Literal>()->value);
    if (auto* x = a.as<Expr::Sync>()) {
        auto* y = b.as<Expr::Sync>();
        return x->target == y->target && x->offset == y->offset && opt_value_bits_eq(x->fallback, y->fallback);
    }
    if (auto* x = a.as<Expr::Hold>()) {
        auto* y = b.as<Expr::Hold>();
        return x->target == y->target && value_bits_eq(x->fallback, y->fallback);
    }
    if (auto* x = a.as<Expr::Window>()) {
        auto* y = b.as<Expr::Window>();
        return x->target == y->target && x->duration == y->duration && x->agg == y->agg &&
               opt_value_bits_eq(x->fallback, y->fallback);
    }
    if (auto* x = a.as<Expr::Unary>()) {
        auto* y = b.as<Expr::Unary>();
        return x->op == y->op && expr_eq(*x->operand, *y->operand);
    }
    if (auto* x = a.as<Expr::Binary>()) {
        auto* y = b.as<Expr::Binary>();
        return x->op == y->op && expr_eq(*x->lhs, *y->lhs) && expr_eq(*x->rhs, *y->rhs);
    }
    if (auto* x = a.as<Expr::Ite>()) {
        auto* y = b.as<Expr::Ite>();
        return expr_eq(*x->cond, *y->cond) && expr_eq(*x->then_branch, *y->then_branch) &&
               expr_eq(*x->else_branch, *y->else_branch);
    }
    auto* x = a.as<Expr::Proj>();
    auto* y = b.as<Expr::Proj>();
    return x->index == y->index && expr_eq(*x->tuple, *y->tuple);
}

inline bool expr_eq(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return expr_eq(*a, *b);
}

namespace detail {

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t x) {
    // splitmix64-style combine
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    return h;
}

inline std::uint64_t hash_str(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) h = hash_mix(h, c);
    return hash_mix(h, 0x5f);
}

inline std::uint64_t hash_value(std::uint64_t h, const Value& v) {
    h = hash_mix(h, v.v.index());
    if (v.is_bool()) return hash_mix(h, v.as_bool() ? 1 : 0);
    if (v.is_int()) return hash_mix(h, static_cast<std::uint64_t>(v.as_int()));
    if (v.is_float()) return hash_mix(h, std::bit_cast<std::uint64_t>(v.as_float()));
    for (const auto& e : v.as_tuple()) h = hash_value(h, e);
    return hash_mix(h, v.as_tuple().size());
}

}  // namespace detail

// Structural 64-bit hash; expr_eq-equal expressions hash equal.
inline std::uint64_t expr_hash(const Expr& e, std::uint64_t h = 0x243f6a8885a308d3ULL) {
    using namespace detail;
    h = hash_mix(h, e.node.index());
    if (auto* x = e.as<Expr::Literal>()) return hash_value(h, x->value);
    if (auto* x = e.as<Expr::Sync>()) {
        h = hash_str(h, x->target);
        h = hash_mix(h, static_cast<std::uint64_t>(x->offset));
        if (x->fallback) h = hash_value(h, *x->fallback);
        return h;
    }
    if (auto* x = e.as<Expr::Hold>()) {
        h = hash_str(h, x->target);
        return hash_value(h, x->fallback);
    }
    if (auto* x = e.as<Expr::Window>()) {
        h = hash_str(h, x->target);
        h = hash_mix(h, static_cast<std::uint64_t>(x->duration.num));
        h = hash_mix(h, static_cast<std::uint64_t>(x->duration.den));
        h = hash_mix(h, static_cast<std::uint64_t>(x->agg));
        if (x->fallback) h = hash_value(h, *x->fallback);
        return h;
    }
    if (auto* x = e.as<Expr::Unary>()) {
        h = hash_mix(h, static_cast<std::uint64_t>(x->op));
        return expr_hash(*x->operand, h);
    }
    if (auto* x = e.as<Expr::Binary>()) {
        h = hash_mix(h, static_cast<std::uint64_t>(x->op));
        h = expr_hash(*x->lhs, h);
        return expr_hash(*x->rhs, h);
    }
    if (auto* x = e.as<Expr::Ite>()) {
        h = expr_hash(*x->cond, h);
        h = expr_hash(*x->then_branch, h);
        return expr_hash(*x->else_branch, h);
    }
    auto* x = e.as<Expr::Proj>();
    h = hash_mix(h, x->index);
    return expr_hash(*x->tuple, h);
}

// Preorder walk over every node.
inline void expr_walk(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn) {
    if (!e) return;
    fn(e);
    if (auto* x = e->as<Expr::Unary>()) expr_walk(x->operand, fn);
    else if (auto* x = e->as<Expr::Binary>()) { expr_walk(x->lhs, fn); expr_walk(x->rhs, fn); }
    else if (auto* x = e->as<Expr::Ite>()) {
        expr_walk(x->cond, fn);
        expr_walk(x->then_branch, fn);
        expr_walk(x->else_branch, fn);
    } else if (auto* x = e->as<Expr::Proj>()) expr_walk(x->tuple, fn);
}

// Rebuilds an expression bottom-up; `fn` maps each node (with already-rewritten
// children) to its replacement. Shares untouched subtrees.
inline ExprPtr expr_rewrite(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn) {
    if (!e) return e;
    ExprPtr rebuilt = e;
    if (auto* x = e->as<Expr::Unary>()) {
        ExprPtr c = expr_rewrite(x->operand, fn);
        if (c != x->operand) rebuilt = make_unary(x->op, c);
    } else if (auto* x = e->as<Expr::Binary>()) {
        ExprPtr l = expr_rewrite(x->lhs, fn);
        ExprPtr r = expr_rewrite(x->rhs, fn);
        if (l != x->lhs || r != x->rhs) rebuilt = make_binary(x->op, l, r);
    } else if (auto* x = e->as<Expr::Ite>()) {
        ExprPtr c = expr_rewrite(x->cond, fn);
        ExprPtr t = expr_rewrite(x->then_branch, fn);
        ExprPtr f = expr_rewrite(x->else_branch, fn);
        if (c != x->cond || t != x->then_branch || f != x->else_branch) rebuilt = make_ite(c, t, f);
    } else if (auto* x = e->as<Expr::Proj>()) {
        ExprPtr t = expr_rewrite(x->tuple, fn);
        if (t != x->tuple) rebuilt = make_proj(t, x->index);
    }
    return fn(rebuilt);
}

inline std::size_t expr_size(const Expr& e) {
    std::size_t n = 1;
    if (auto* x = e.as<Expr::Unary>()) n += expr_size(*x->operand);
    else if (auto* x = e.as<Expr::Binary>()) n += expr_size(*x->lhs) + expr_size(*x->rhs);
    else if (auto* x = e.as<Expr::Ite>())
        n += expr_size(*x->cond) + expr_size(*x->then_branch) + expr_size(*x->else_branch);
    else if (auto* x = e.as<Expr::Proj>()) n += expr_size(*x->tuple);
    return n;
}

}  // namespace strm
