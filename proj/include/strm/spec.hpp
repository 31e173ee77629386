#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strm/diag.hpp"
#include "strm/expr.hpp"
#include "strm/pacing.hpp"
#include "strm/value.hpp"

namespace strm {

// Untyped AST, straight out of the parser. Output pacing/type annotations are
// optional; inputs always carry a value type.
struct InputDecl {
    std::string name;
    ValueType type;
    SourcePos pos;
};

struct OutputDecl {
    std::string name;
    std::optional<ValueType> type;
    std::optional<PacingType> pacing;
    ExprPtr filter;  // null when absent
    ExprPtr expr;
    SourcePos pos;
};

struct TriggerDecl {
    std::optional<PacingType> pacing;
    ExprPtr filter;  // null when absent
    ExprPtr condition;
    std::string message;
    SourcePos pos;
};

struct Spec {
    std::vector<InputDecl> inputs;
    std::vector<OutputDecl> outputs;
    std::vector<TriggerDecl> triggers;
};

// Typed spec: every output and trigger has a resolved value type and pacing.
// `annotated` records whether the pacing was written in the source (and is
// therefore printed back) or inferred.
struct TypedOutput {
    std::string name;
    std::optional<ValueType> declared_type;
    ValueType type;
    PacingType pacing;
    bool pacing_annotated = false;
    ExprPtr filter;
    ExprPtr expr;
    SourcePos pos;
};

struct TypedTrigger {
    PacingType pacing;
    bool pacing_annotated = false;
    ExprPtr filter;
    ExprPtr condition;
    std::string message;
    SourcePos pos;
};

struct TypedSpec {
    std::vector<InputDecl> inputs;
    std::vector<TypedOutput> outputs;
    std::vector<TypedTrigger> triggers;

    const TypedOutput* find_output(const std::string& name) const {
        for (const auto& o : outputs)
            if (o.name == name) return &o;
        return nullptr;
    }
    const InputDecl* find_input(const std::string& name) const {
        for (const auto& i : inputs)
            if (i.name == name) return &i;
        return nullptr;
    }
};

// Forgets typing; annotations survive exactly where they were declared (or
// where a pass materialized them).
inline Spec to_spec(const TypedSpec& ts) {
    Spec s;
    s.inputs = ts.inputs;
    for (const auto& o : ts.outputs) {
        OutputDecl d;
        d.name = o.name;
        d.type = o.declared_type;
        if (o.pacing_annotated) d.pacing = o.pacing;
        d.filter = o.filter;
        d.expr = o.expr;
        d.pos = o.pos;
        s.outputs.push_back(std::move(d));
    }
    for (const auto& t : ts.triggers) {
        TriggerDecl d;
        if (t.pacing_annotated) d.pacing = t.pacing;
        d.filter = t.filter;
        d.condition = t.condition;
        d.message = t.message;
        d.pos = t.pos;
        s.triggers.push_back(std::move(d));
    }
    return s;
}

inline bool opt_pacing_eq(const std::optional<PacingType>& a, const std::optional<PacingType>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || pacing_struct_eq(*a, *b);
}

inline bool opt_type_eq(const std::optional<ValueType>& a, const std::optional<ValueType>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

// Structural spec equality: same declarations in the same order, structurally
// equal annotations and expressions. Whitespace and comments are invisible
// here by construction.
inline bool spec_eq(const Spec& a, const Spec& b) {
    if (a.inputs.size() != b.inputs.size() || a.outputs.size() != b.outputs.size() ||
        a.triggers.size() != b.triggers.size())
        return false;
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
        if (a.inputs[i].name != b.inputs[i].name) return false;
        if (!(a.inputs[i].type == b.inputs[i].type)) return false;
    }
    for (std::size_t i = 0; i < a.outputs.size(); ++i) {
        const auto& x = a.outputs[i];
        const auto& y = b.outputs[i];
        if (x.name != y.name || !opt_type_eq(x.type, y.type) || !opt_pacing_eq(x.pacing, y.pacing))
            return false;
        if ((x.filter != nullptr) != (y.filter != nullptr)) return false;
        if (x.filter && !expr_eq(x.filter, y.filter)) return false;
        if (!expr_eq(x.expr, y.expr)) return false;
    }
    for (std::size_t i = 0; i < a.triggers.size(); ++i) {
        const auto& x = a.triggers[i];
        const auto& y = b.triggers[i];
        if (!opt_pacing_eq(x.pacing, y.pacing) || x.message != y.message) return false;
        if ((x.filter != nullptr) != (y.filter != nullptr)) return false;
        if (x.filter && !expr_eq(x.filter, y.filter)) return false;
        if (!expr_eq(x.condition, y.condition)) return false;
    }
    return true;
}

}  // namespace strm
