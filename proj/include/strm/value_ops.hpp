#pragma once

#include <cmath>
#include <cstdint>

#include "strm/diag.hpp"
#include "strm/expr.hpp"
#include "strm/value.hpp"

namespace strm {

// Arithmetic and aggregation semantics shared by the interpreter and the
// constant folder. Int64 arithmetic is checked: overflow and division by zero
// raise EvalFault. Float64 follows IEEE-754 (no faults; inf/NaN propagate).

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw EvalFault("Int64 overflow in +");
    return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw EvalFault("Int64 overflow in -");
    return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw EvalFault("Int64 overflow in *");
    return r;
}
inline std::int64_t checked_div(std::int64_t a, std::int64_t b) {
    if (b == 0) throw EvalFault("Int64 division by zero");
    if (a == INT64_MIN && b == -1) throw EvalFault("Int64 overflow in /");
    return a / b;
}
inline std::int64_t checked_mod(std::int64_t a, std::int64_t b) {
    if (b == 0) throw EvalFault("Int64 modulo by zero");
    if (a == INT64_MIN && b == -1) return 0;  // mathematically exact, avoids UB
    return a % b;
}
inline std::int64_t checked_neg(std::int64_t a) {
    if (a == INT64_MIN) throw EvalFault("Int64 overflow in unary -");
    return -a;
}

// Runtime value equality: the language's `==`. Floats compare IEEE-style
// (NaN != NaN), unlike the structural value_bits_eq.
inline bool value_runtime_eq(const Value& a, const Value& b) {
    if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
    if (a.is_float() && b.is_float()) return a.as_float() == b.as_float();
    if (a.is_tuple() && b.is_tuple()) {
        const auto& x = a.as_tuple();
        const auto& y = b.as_tuple();
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!value_runtime_eq(x[i], y[i])) return false;
        return true;
    }
    throw EvalFault("type mismatch in equality");
}

// Applies a binary operator to already-evaluated operands. `And`/`Or` are not
// handled here: they short-circuit and belong to the expression evaluator.
inline Value apply_binop(BinOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinOp::Add:
            if (a.is_int()) return Value(checked_add(a.as_int(), b.as_int()));
            return Value(a.as_float() + b.as_float());
        case BinOp::Sub:
            if (a.is_int()) return Value(checked_sub(a.as_int(), b.as_int()));
            return Value(a.as_float() - b.as_float());
        case BinOp::Mul:
            if (a.is_int()) return Value(checked_mul(a.as_int(), b.as_int()));
            return Value(a.as_float() * b.as_float());
        case BinOp::Div:
            if (a.is_int()) return Value(checked_div(a.as_int(), b.as_int()));
            return Value(a.as_float() / b.as_float());
        case BinOp::Mod:
            return Value(checked_mod(a.as_int(), b.as_int()));
        case BinOp::Lt:
            if (a.is_int()) return Value(a.as_int() < b.as_int());
            return Value(a.as_float() < b.as_float());
        case BinOp::Le:
            if (a.is_int()) return Value(a.as_int() <= b.as_int());
            return Value(a.as_float() <= b.as_float());
        case BinOp::Gt:
            if (a.is_int()) return Value(a.as_int() > b.as_int());
            return Value(a.as_float() > b.as_float());
        case BinOp::Ge:
            if (a.is_int()) return Value(a.as_int() >= b.as_int());
            return Value(a.as_float() >= b.as_float());
        case BinOp::Eq:
            return Value(value_runtime_eq(a, b));
        case BinOp::Ne:
            return Value(!value_runtime_eq(a, b));
        case BinOp::And:
        case BinOp::Or:
            throw EvalFault("short-circuit operator reached apply_binop");
    }
    throw EvalFault("unknown binary operator");
}

inline Value apply_unop(UnOp op, const Value& a) {
    if (op == UnOp::Not) return Value(!a.as_bool());
    if (a.is_int()) return Value(checked_neg(a.as_int()));
    return Value(-a.as_float());
}

// Sliding-window aggregation over the values inside the window, oldest first.
// Empty windows: count = 0, exists = false, sum = zero of the element type;
// avg/min/max fall back to the access's declared default (checked upstream).
struct WindowAccumulator {
    WinAgg agg;
    ValueType elem_type;

    Value run(const std::vector<Value>& vals) const {
        switch (agg) {
            case WinAgg::Count:
                return Value(static_cast<std::int64_t>(vals.size()));
            case WinAgg::Exists: {
                for (const auto& v : vals)
                    if (v.as_bool()) return Value(true);
                return Value(false);
            }
            case WinAgg::Sum: {
                if (elem_type.kind == ValueType::Kind::Float64) {
                    double s = 0.0;
                    for (const auto& v : vals) s += v.as_float();
                    return Value(s);
                }
                std::int64_t s = 0;
                for (const auto& v : vals) s = checked_add(s, v.as_int());
                return Value(s);
            }
            case WinAgg::Avg: {
                if (vals.empty()) throw EvalFault("avg over empty window reached accumulator");
                double s = 0.0;
                for (const auto& v : vals)
                    s += v.is_float() ? v.as_float() : static_cast<double>(v.as_int());
                return Value(s / static_cast<double>(vals.size()));
            }
            case WinAgg::Min:
            case WinAgg::Max: {
                if (vals.empty()) throw EvalFault("min/max over empty window reached accumulator");
                Value best = vals[0];
                for (std::size_t i = 1; i < vals.size(); ++i) {
                    bool replace;
                    if (best.is_float())
                        replace = agg == WinAgg::Min ? vals[i].as_float() < best.as_float()
                                                     : vals[i].as_float() > best.as_float();
                    else
                        replace = agg == WinAgg::Min ? vals[i].as_int() < best.as_int()
                                                     : vals[i].as_int() > best.as_int();
                    if (replace) best = vals[i];
                }
                return best;
            }
        }
        throw EvalFault("unknown aggregation");
    }
};

// Result type of an aggregation over elements of type `elem`; nullopt when the
// combination is ill-typed.
inline std::optional<ValueType> window_result_type(WinAgg agg, const ValueType& elem) {
    switch (agg) {
        case WinAgg::Count: return ValueType::int64();
        case WinAgg::Exists:
            if (elem.kind == ValueType::Kind::Bool) return ValueType::boolean();
            return std::nullopt;
        case WinAgg::Sum:
        case WinAgg::Min:
        case WinAgg::Max:
            if (elem.is_numeric()) return elem;
            return std::nullopt;
        case WinAgg::Avg:
            if (elem.is_numeric()) return ValueType::float64();
            return std::nullopt;
    }
    return std::nullopt;
}

inline bool agg_needs_fallback(WinAgg agg) {
    return agg == WinAgg::Avg || agg == WinAgg::Min || agg == WinAgg::Max;
}

}  // namespace strm
