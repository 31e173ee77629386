#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace strm {

// Value types of the language: Bool, Int64, Float64 and tuples of arity >= 2.
struct ValueType {
    enum class Kind { Bool, Int64, Float64, Tuple };
    Kind kind = Kind::Bool;
    std::vector<ValueType> elems;  // Tuple only

    static ValueType boolean() { return {Kind::Bool, {}}; }
    static ValueType int64() { return {Kind::Int64, {}}; }
    static ValueType float64() { return {Kind::Float64, {}}; }
    static ValueType tuple(std::vector<ValueType> es) { return {Kind::Tuple, std::move(es)}; }

    bool is_numeric() const { return kind == Kind::Int64 || kind == Kind::Float64; }

    friend bool operator==(const ValueType& a, const ValueType& b) {
        if (a.kind != b.kind) return false;
        if (a.kind != Kind::Tuple) return true;
        if (a.elems.size() != b.elems.size()) return false;
        for (std::size_t i = 0; i < a.elems.size(); ++i)
            if (!(a.elems[i] == b.elems[i])) return false;
        return true;
    }
    friend bool operator!=(const ValueType& a, const ValueType& b) { return !(a == b); }

    std::string str() const {
        switch (kind) {
            case Kind::Bool: return "Bool";
            case Kind::Int64: return "Int64";
            case Kind::Float64: return "Float64";
            case Kind::Tuple: {
                std::string s = "(";
                for (std::size_t i = 0; i < elems.size(); ++i) {
                    if (i) s += ", ";
                    s += elems[i].str();
                }
                return s + ")";
            }
        }
        return "?";
    }
};

// Runtime value. Tuple elements are Values themselves; arity >= 2 is enforced
// at construction sites (parser, trace reader), not here.
struct Value {
    std::variant<bool, std::int64_t, double, std::vector<Value>> v;

    Value() : v(false) {}
    Value(bool b) : v(b) {}
    Value(std::int64_t i) : v(i) {}
    Value(double d) : v(d) {}
    Value(std::vector<Value> t) : v(std::move(t)) {}

    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_float() const { return std::holds_alternative<double>(v); }
    bool is_tuple() const { return std::holds_alternative<std::vector<Value>>(v); }

    bool as_bool() const { return std::get<bool>(v); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v); }
    double as_float() const { return std::get<double>(v); }
    const std::vector<Value>& as_tuple() const { return std::get<std::vector<Value>>(v); }

    ValueType type() const {
        if (is_bool()) return ValueType::boolean();
        if (is_int()) return ValueType::int64();
        if (is_float()) return ValueType::float64();
        std::vector<ValueType> es;
        for (const auto& e : as_tuple()) es.push_back(e.type());
        return ValueType::tuple(std::move(es));
    }
};

// Structural equality; Float64 compares bit patterns so that -0.0 != 0.0 and
// NaN == NaN. This is the notion used by expression equality and the passes,
// not the language's runtime `=` operator.
inline bool value_bits_eq(const Value& a, const Value& b) {
    if (a.v.index() != b.v.index()) return false;
    if (a.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_int()) return a.as_int() == b.as_int();
    if (a.is_float())
        return std::bit_cast<std::uint64_t>(a.as_float()) == std::bit_cast<std::uint64_t>(b.as_float());
    const auto& x = a.as_tuple();
    const auto& y = b.as_tuple();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!value_bits_eq(x[i], y[i])) return false;
    return true;
}

// Zero/false/elementwise default for a value type. Used for hold rewrites and
// for reads that find no history at all.
inline Value default_value(const ValueType& t) {
    switch (t.kind) {
        case ValueType::Kind::Bool: return Value(false);
        case ValueType::Kind::Int64: return Value(std::int64_t{0});
        case ValueType::Kind::Float64: return Value(0.0);
        case ValueType::Kind::Tuple: {
            std::vector<Value> es;
            for (const auto& e : t.elems) es.push_back(default_value(e));
            return Value(std::move(es));
        }
    }
    return Value(false);
}

}  // namespace strm
