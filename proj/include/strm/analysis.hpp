#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "strm/diag.hpp"
#include "strm/expr.hpp"
#include "strm/pacing.hpp"
#include "strm/rational.hpp"
#include "strm/spec.hpp"
#include "strm/value.hpp"
#include "strm/value_ops.hpp"

namespace strm {

namespace detail {

// Distinct stream names accessed synchronously (any offset) in an expression.
inline std::vector<std::string> sync_targets(const ExprPtr& e) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    expr_walk(e, [&](const ExprPtr& n) {
        if (auto* s = n->as<Expr::Sync>()) {
            if (seen.insert(s->target).second) out.push_back(s->target);
        }
    });
    return out;
}

// Literal-only Int64 -> Float64 promotion, elementwise through tuples.
inline std::optional<Value> promote_value(const Value& v, const ValueType& want) {
    if (v.type() == want) return v;
    if (v.is_int() && want.kind == ValueType::Kind::Float64)
        return Value(static_cast<double>(v.as_int()));
    if (v.is_tuple() && want.kind == ValueType::Kind::Tuple) {
        const auto& elems = v.as_tuple();
        if (elems.size() != want.elems.size()) return std::nullopt;
        std::vector<Value> out;
        out.reserve(elems.size());
        for (std::size_t i = 0; i < elems.size(); ++i) {
            auto p = promote_value(elems[i], want.elems[i]);
            if (!p) return std::nullopt;
            out.push_back(std::move(*p));
        }
        return Value(std::move(out));
    }
    return std::nullopt;
}

// Value typing of one expression against an environment of stream types.
// Returns the (possibly rebuilt) expression with integer literals promoted to
// Float64 wherever the context demands it, so later phases can compare and
// evaluate without re-deriving coercions.
struct ValueTyper {
    const std::unordered_map<std::string, ValueType>& env;
    std::string ctx;
    SourcePos pos;

    struct Typed {
        ValueType type;
        ExprPtr expr;
    };

    [[noreturn]] void fail(const std::string& msg) const {
        throw SpecError(pos, msg + " (in " + ctx + ")");
    }

    const ValueType& lookup(const std::string& name) const {
        auto it = env.find(name);
        if (it == env.end()) fail("stream '" + name + "' has no resolved type yet");
        return it->second;
    }

    Typed coerce(Typed got, const ValueType& want, const std::string& what) const {
        if (got.type == want) return got;
        if (auto* lit = got.expr->as<Expr::Literal>()) {
            if (auto pv = promote_value(lit->value, want))
                return {want, make_literal(std::move(*pv))};
        }
        fail(what + ": expected " + want.str() + ", got " + got.type.str());
    }

    // Make both sides the same type, promoting an integer literal side to
    // Float64 when the other side is Float64.
    void unify(Typed& a, Typed& b, const std::string& what) const {
        if (a.type == b.type) return;
        if (a.type.kind == ValueType::Kind::Int64 && b.type.kind == ValueType::Kind::Float64 &&
            a.expr->as<Expr::Literal>()) {
            a = coerce(std::move(a), b.type, what);
            return;
        }
        if (b.type.kind == ValueType::Kind::Int64 && a.type.kind == ValueType::Kind::Float64 &&
            b.expr->as<Expr::Literal>()) {
            b = coerce(std::move(b), a.type, what);
            return;
        }
        fail(what + ": mismatched types " + a.type.str() + " and " + b.type.str());
    }

    Value coerce_fallback(const Value& v, const ValueType& want, const std::string& what) const {
        auto p = promote_value(v, want);
        if (!p) fail(what + ": expected " + want.str() + ", got " + v.type().str());
        return *p;
    }

    Typed type(const ExprPtr& e) const {
        if (auto* lit = e->as<Expr::Literal>()) return {lit->value.type(), e};
        if (auto* s = e->as<Expr::Sync>()) {
            const ValueType& t = lookup(s->target);
            if (s->fallback) {
                Value fb = coerce_fallback(*s->fallback, t,
                                           "default for '" + s->target + "' offset access");
                if (!value_bits_eq(fb, *s->fallback))
                    return {t, make_sync(s->target, s->offset, std::move(fb))};
            }
            return {t, e};
        }
        if (auto* h = e->as<Expr::Hold>()) {
            const ValueType& t = lookup(h->target);
            Value fb = coerce_fallback(h->fallback, t, "default for '" + h->target + "' hold access");
            if (!value_bits_eq(fb, h->fallback)) return {t, make_hold(h->target, std::move(fb))};
            return {t, e};
        }
        if (auto* w = e->as<Expr::Window>()) {
            const ValueType& elem = lookup(w->target);
            auto res = window_result_type(w->agg, elem);
            if (!res)
                fail("aggregate '" + std::string(agg_str(w->agg)) + "' cannot be applied to " +
                     elem.str() + " stream '" + w->target + "'");
            if (w->fallback) {
                Value fb = coerce_fallback(*w->fallback, *res,
                                           "default for '" + w->target + "' aggregate");
                if (!value_bits_eq(fb, *w->fallback))
                    return {*res, make_window(w->target, w->duration, w->agg, std::move(fb))};
            }
            return {*res, e};
        }
        if (auto* u = e->as<Expr::Unary>()) {
            Typed op = type(u->operand);
            if (u->op == UnOp::Neg) {
                if (!op.type.is_numeric()) fail("unary '-' needs a numeric operand, got " + op.type.str());
            } else {
                if (op.type.kind != ValueType::Kind::Bool)
                    fail("'!' needs a Bool operand, got " + op.type.str());
            }
            if (op.expr != u->operand) return {op.type, make_unary(u->op, op.expr)};
            return {op.type, e};
        }
        if (auto* b = e->as<Expr::Binary>()) {
            Typed lhs = type(b->lhs);
            Typed rhs = type(b->rhs);
            ValueType result = ValueType{ValueType::Kind::Bool, {}};
            switch (b->op) {
                case BinOp::Add:
                case BinOp::Sub:
                case BinOp::Mul:
                case BinOp::Div:
                    unify(lhs, rhs, std::string("operands of '") + binop_str(b->op) + "'");
                    if (!lhs.type.is_numeric())
                        fail(std::string("'") + binop_str(b->op) + "' needs numeric operands, got " +
                             lhs.type.str());
                    result = lhs.type;
                    break;
                case BinOp::Mod:
                    if (lhs.type.kind != ValueType::Kind::Int64 || rhs.type.kind != ValueType::Kind::Int64)
                        fail("'%' needs Int64 operands, got " + lhs.type.str() + " and " +
                             rhs.type.str());
                    result = lhs.type;
                    break;
                case BinOp::Lt:
                case BinOp::Le:
                case BinOp::Gt:
                case BinOp::Ge:
                    unify(lhs, rhs, std::string("operands of '") + binop_str(b->op) + "'");
                    if (!lhs.type.is_numeric())
                        fail(std::string("'") + binop_str(b->op) + "' needs numeric operands, got " +
                             lhs.type.str());
                    break;
                case BinOp::Eq:
                case BinOp::Ne:
                    unify(lhs, rhs, std::string("operands of '") + binop_str(b->op) + "'");
                    break;
                case BinOp::And:
                case BinOp::Or:
                    if (lhs.type.kind != ValueType::Kind::Bool || rhs.type.kind != ValueType::Kind::Bool)
                        fail(std::string("'") + binop_str(b->op) + "' needs Bool operands, got " +
                             lhs.type.str() + " and " + rhs.type.str());
                    break;
            }
            if (lhs.expr != b->lhs || rhs.expr != b->rhs)
                return {result, make_binary(b->op, lhs.expr, rhs.expr)};
            return {result, e};
        }
        if (auto* ite = e->as<Expr::Ite>()) {
            Typed c = type(ite->cond);
            if (c.type.kind != ValueType::Kind::Bool)
                fail("'if' condition must be Bool, got " + c.type.str());
            Typed t = type(ite->then_branch);
            Typed f = type(ite->else_branch);
            unify(t, f, "'if' branches");
            if (c.expr != ite->cond || t.expr != ite->then_branch || f.expr != ite->else_branch)
                return {t.type, make_ite(c.expr, t.expr, f.expr)};
            return {t.type, e};
        }
        auto* p = e->as<Expr::Proj>();
        Typed tup = type(p->tuple);
        if (tup.type.kind != ValueType::Kind::Tuple)
            fail("projection needs a tuple operand, got " + tup.type.str());
        if (p->index >= tup.type.elems.size())
            fail("tuple index " + std::to_string(p->index) + " out of range for " + tup.type.str());
        ValueType elem = tup.type.elems[p->index];
        if (tup.expr != p->tuple) return {elem, make_proj(tup.expr, p->index)};
        return {elem, e};
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Type inference: pacing dimension first, then value dimension.

inline TypedSpec infer_types(const Spec& spec) {
    TypedSpec ts;

    // Pacing environment. Inputs are event-based with their own name as the
    // activation condition.
    std::unordered_map<std::string, PacingType> pacing;
    std::unordered_set<std::string> input_names;
    for (const auto& in : spec.inputs) {
        pacing.emplace(in.name, PacingType(ActivationCondition::make_leaf(in.name)));
        input_names.insert(in.name);
    }
    for (const auto& out : spec.outputs)
        if (out.pacing) pacing.emplace(out.name, *out.pacing);

    // Sync targets per declaration, for both the expression and the filter.
    auto decl_targets = [](const ExprPtr& expr, const ExprPtr& filter) {
        std::vector<std::string> t = detail::sync_targets(expr);
        if (filter)
            for (auto& name : detail::sync_targets(filter))
                if (std::find(t.begin(), t.end(), name) == t.end()) t.push_back(std::move(name));
        return t;
    };

    // Infer one unannotated pacing from resolved sync targets, or report why
    // it cannot be done. Periodic pacing is never inferred.
    auto infer_one = [&](const std::string& who, const std::vector<std::string>& targets,
                         SourcePos pos) -> PacingType {
        if (targets.empty())
            throw SpecError(pos, "cannot infer pacing of " + who +
                                     ": no synchronous accesses; add a pacing annotation");
        std::vector<ActivationCondition> acs;
        for (const auto& t : targets) {
            const PacingType& pt = pacing.at(t);
            if (pt.is_periodic())
                throw SpecError(pos, "cannot infer pacing of " + who +
                                         ": synchronous access to periodic stream '" + t +
                                         "'; add a pacing annotation");
            acs.push_back(pt.ac());
        }
        return PacingType(ac_and_all(acs));
    };

    // Worklist over unannotated outputs; self-accesses do not constrain the
    // stream's own pacing, so they are dropped from the target set.
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < spec.outputs.size(); ++i)
        if (!spec.outputs[i].pacing) pending.push_back(i);
    while (!pending.empty()) {
        bool progress = false;
        std::vector<std::size_t> next;
        for (std::size_t i : pending) {
            const auto& out = spec.outputs[i];
            auto targets = decl_targets(out.expr, out.filter);
            targets.erase(std::remove(targets.begin(), targets.end(), out.name), targets.end());
            bool ready = true;
            for (const auto& t : targets)
                if (!pacing.count(t)) {
                    ready = false;
                    break;
                }
            if (!ready) {
                next.push_back(i);
                continue;
            }
            pacing.emplace(out.name, infer_one("stream '" + out.name + "'", targets, out.pos));
            progress = true;
        }
        if (!progress) {
            const auto& out = spec.outputs[next.front()];
            throw SpecError(out.pos, "cannot infer pacing of stream '" + out.name +
                                         "': cyclic dependency; add a pacing annotation");
        }
        pending = std::move(next);
    }

    // Triggers resolve after all streams; nothing can access a trigger.
    std::vector<PacingType> trigger_pacing;
    for (std::size_t j = 0; j < spec.triggers.size(); ++j) {
        const auto& tr = spec.triggers[j];
        if (tr.pacing) {
            trigger_pacing.push_back(*tr.pacing);
            continue;
        }
        auto targets = decl_targets(tr.condition, tr.filter);
        trigger_pacing.push_back(infer_one("trigger " + std::to_string(j), targets, tr.pos));
    }

    // Every synchronous access must be covered by the accessor's pacing:
    // event-based needs an implied activation condition, periodic needs a
    // frequency the target's divides. Holds and windows are unconstrained.
    auto validate_edges = [&](const std::string& who, const PacingType& pt, const ExprPtr& e,
                              SourcePos pos) {
        expr_walk(e, [&](const ExprPtr& n) {
            auto* s = n->as<Expr::Sync>();
            if (!s) return;
            const PacingType& target = pacing.at(s->target);
            if (!pacing_covers_access(pt, target))
                throw SpecError(pos, who + " (" + pt.str() + ") cannot synchronously access stream '" +
                                         s->target + "' (" + target.str() + ")");
        });
    };
    for (const auto& out : spec.outputs) {
        const PacingType& pt = pacing.at(out.name);
        validate_edges("stream '" + out.name + "'", pt, out.expr, out.pos);
        if (out.filter) validate_edges("filter of stream '" + out.name + "'", pt, out.filter, out.pos);
    }
    for (std::size_t j = 0; j < spec.triggers.size(); ++j) {
        const auto& tr = spec.triggers[j];
        validate_edges("trigger " + std::to_string(j), trigger_pacing[j], tr.condition, tr.pos);
        if (tr.filter)
            validate_edges("filter of trigger " + std::to_string(j), trigger_pacing[j], tr.filter,
                           tr.pos);
    }

    // Value dimension. Inputs and annotated outputs seed the environment;
    // unannotated outputs resolve once every accessed stream has a type.
    std::unordered_map<std::string, ValueType> types;
    for (const auto& in : spec.inputs) types.emplace(in.name, in.type);
    for (const auto& out : spec.outputs)
        if (out.type) types.emplace(out.name, *out.type);

    auto access_targets = [](const ExprPtr& e) {
        std::vector<std::string> out;
        std::unordered_set<std::string> seen;
        expr_walk(e, [&](const ExprPtr& n) {
            const std::string* t = nullptr;
            if (auto* s = n->as<Expr::Sync>()) t = &s->target;
            else if (auto* h = n->as<Expr::Hold>()) t = &h->target;
            else if (auto* w = n->as<Expr::Window>()) t = &w->target;
            if (t && seen.insert(*t).second) out.push_back(*t);
        });
        return out;
    };

    std::vector<ExprPtr> typed_exprs(spec.outputs.size());
    std::vector<std::size_t> tpending;
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) tpending.push_back(i);
    while (!tpending.empty()) {
        bool progress = false;
        std::vector<std::size_t> next;
        for (std::size_t i : tpending) {
            const auto& out = spec.outputs[i];
            bool ready = true;
            for (const auto& t : access_targets(out.expr))
                if (!types.count(t)) {
                    ready = false;
                    break;
                }
            if (!ready) {
                next.push_back(i);
                continue;
            }
            detail::ValueTyper typer{types, "stream '" + out.name + "'", out.pos};
            auto typed = typer.type(out.expr);
            if (out.type) typed = typer.coerce(std::move(typed), *out.type, "declared type");
            typed_exprs[i] = typed.expr;
            types.emplace(out.name, typed.type);
            progress = true;
        }
        if (!progress) {
            const auto& out = spec.outputs[next.front()];
            throw SpecError(out.pos, "cannot resolve value type of stream '" + out.name +
                                         "': cyclic dependency; add a type annotation");
        }
        tpending = std::move(next);
    }

    // Filters and trigger conditions type once every stream is resolved.
    auto type_bool = [&](const ExprPtr& e, const std::string& who, const std::string& what,
                         SourcePos pos) {
        detail::ValueTyper typer{types, who, pos};
        auto typed = typer.type(e);
        if (typed.type.kind != ValueType::Kind::Bool)
            throw SpecError(pos,
                            what + " must be Bool, got " + typed.type.str() + " (in " + who + ")");
        return typed.expr;
    };

    ts.inputs = spec.inputs;
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        const auto& out = spec.outputs[i];
        TypedOutput to;
        to.name = out.name;
        to.declared_type = out.type;
        to.type = types.at(out.name);
        to.pacing = pacing.at(out.name);
        to.pacing_annotated = out.pacing.has_value();
        to.filter = out.filter ? type_bool(out.filter, "stream '" + out.name + "'", "filter", out.pos)
                               : nullptr;
        to.expr = typed_exprs[i];
        to.pos = out.pos;
        ts.outputs.push_back(std::move(to));
    }
    for (std::size_t j = 0; j < spec.triggers.size(); ++j) {
        const auto& tr = spec.triggers[j];
        std::string who = "trigger " + std::to_string(j);
        TypedTrigger tt;
        tt.pacing = trigger_pacing[j];
        tt.pacing_annotated = tr.pacing.has_value();
        tt.filter = tr.filter ? type_bool(tr.filter, who, "filter", tr.pos) : nullptr;
        tt.condition = type_bool(tr.condition, who, "trigger condition", tr.pos);
        tt.message = tr.message;
        tt.pos = tr.pos;
        ts.triggers.push_back(std::move(tt));
    }
    return ts;
}

// Turn every resolved pacing into an explicit annotation. Re-running
// inference on the result is a no-op, which several passes rely on when they
// reshape expressions underneath a stream.
inline TypedSpec materialize_pacings(TypedSpec ts) {
    for (auto& out : ts.outputs) out.pacing_annotated = true;
    for (auto& tr : ts.triggers) tr.pacing_annotated = true;
    return ts;
}

// ---------------------------------------------------------------------------
// Dependency graph: one node per input, output, trigger, and filter; one edge
// per access expression, so repeated accesses yield parallel edges.

struct DepNode {
    enum class Kind { Input, Output, Trigger, Filter };
    Kind kind;
    std::string name;
    int owner = -1;           // Filter: node id of the guarded stream/trigger
    std::size_t decl_index = 0;  // index into the TypedSpec section for kind
    PacingType pacing;
    SourcePos pos;

    bool is_stream() const { return kind == Kind::Input || kind == Kind::Output; }
};

struct DepEdge {
    enum class Kind { Sync, Hold, Window };
    int from = -1;  // accessor node
    int to = -1;    // accessed stream node
    Kind kind = Kind::Sync;
    std::int64_t offset = 0;   // Sync only, <= 0
    Rational duration;         // Window only
};

struct DependencyGraph {
    std::vector<DepNode> nodes;
    std::vector<DepEdge> edges;
    std::unordered_map<std::string, int> stream_ids;

    int stream_node(const std::string& name) const {
        auto it = stream_ids.find(name);
        if (it == stream_ids.end()) throw SpecError("unknown stream '" + name + "'");
        return it->second;
    }
};

inline DependencyGraph build_dependency_graph(const TypedSpec& ts) {
    DependencyGraph g;
    auto add_node = [&](DepNode n) {
        g.nodes.push_back(std::move(n));
        return static_cast<int>(g.nodes.size()) - 1;
    };
    for (std::size_t i = 0; i < ts.inputs.size(); ++i) {
        const auto& in = ts.inputs[i];
        int id = add_node({DepNode::Kind::Input, in.name, -1, i,
                           PacingType(ActivationCondition::make_leaf(in.name)), in.pos});
        g.stream_ids.emplace(in.name, id);
    }
    struct PendingExpr {
        int node;
        const ExprPtr* expr;
    };
    std::vector<PendingExpr> exprs;
    for (std::size_t i = 0; i < ts.outputs.size(); ++i) {
        const auto& out = ts.outputs[i];
        int id = add_node({DepNode::Kind::Output, out.name, -1, i, out.pacing, out.pos});
        g.stream_ids.emplace(out.name, id);
        exprs.push_back({id, &out.expr});
        if (out.filter) {
            int fid = add_node({DepNode::Kind::Filter, out.name + ":filter", id, i, out.pacing, out.pos});
            exprs.push_back({fid, &out.filter});
        }
    }
    for (std::size_t j = 0; j < ts.triggers.size(); ++j) {
        const auto& tr = ts.triggers[j];
        int id = add_node({DepNode::Kind::Trigger, "trigger:" + std::to_string(j), -1, j, tr.pacing,
                           tr.pos});
        exprs.push_back({id, &tr.condition});
        if (tr.filter) {
            int fid = add_node({DepNode::Kind::Filter, "trigger:" + std::to_string(j) + ":filter", id,
                                j, tr.pacing, tr.pos});
            exprs.push_back({fid, &tr.filter});
        }
    }
    for (const auto& pe : exprs) {
        expr_walk(*pe.expr, [&](const ExprPtr& n) {
            if (auto* s = n->as<Expr::Sync>())
                g.edges.push_back({pe.node, g.stream_node(s->target), DepEdge::Kind::Sync, s->offset,
                                   Rational(0)});
            else if (auto* h = n->as<Expr::Hold>())
                g.edges.push_back({pe.node, g.stream_node(h->target), DepEdge::Kind::Hold, 0,
                                   Rational(0)});
            else if (auto* w = n->as<Expr::Window>())
                g.edges.push_back({pe.node, g.stream_node(w->target), DepEdge::Kind::Window, 0,
                                   w->duration});
        });
    }
    return g;
}

// ---------------------------------------------------------------------------
// Evaluation order: longest-path layering over same-cycle dependencies, which
// are synchronous offset-0 edges plus the implicit filter-before-host edge.
// Inputs sit at layer 0; every other node lands at layer >= 1. Only negative
// offsets may close a dependency cycle.

struct EvaluationOrder {
    std::vector<std::vector<int>> layers;
    std::vector<int> layer_of;   // node id -> layer
    std::vector<int> order;      // slot -> node id, sorted by (layer, id)
    std::vector<int> position;   // node id -> slot
};

inline EvaluationOrder evaluation_order(const DependencyGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<std::vector<int>> deps(n);  // deps[a] = nodes a needs this cycle
    for (const auto& e : g.edges)
        if (e.kind == DepEdge::Kind::Sync && e.offset == 0) deps[e.from].push_back(e.to);
    for (int id = 0; id < n; ++id)
        if (g.nodes[id].kind == DepNode::Kind::Filter) deps[g.nodes[id].owner].push_back(id);

    std::vector<std::vector<int>> rdeps(n);
    std::vector<int> indeg(n, 0);
    for (int a = 0; a < n; ++a)
        for (int b : deps[a]) {
            rdeps[b].push_back(a);
            ++indeg[a];
        }

    EvaluationOrder eo;
    eo.layer_of.assign(n, -1);
    std::vector<int> queue;
    for (int id = 0; id < n; ++id)
        if (indeg[id] == 0) queue.push_back(id);
    std::size_t head = 0;
    int done = 0;
    while (head < queue.size()) {
        int id = queue[head++];
        ++done;
        int layer = 0;
        if (g.nodes[id].kind != DepNode::Kind::Input) {
            layer = 1;
            for (int b : deps[id]) layer = std::max(layer, eo.layer_of[b] + 1);
        }
        eo.layer_of[id] = layer;
        for (int a : rdeps[id])
            if (--indeg[a] == 0) queue.push_back(a);
    }
    if (done != n) {
        // Walk dependencies inside the unresolved set until a node repeats,
        // then report the loop.
        int start = 0;
        while (eo.layer_of[start] != -1) ++start;
        std::vector<int> path;
        std::unordered_map<int, std::size_t> at;
        int cur = start;
        while (!at.count(cur)) {
            at.emplace(cur, path.size());
            path.push_back(cur);
            for (int b : deps[cur])
                if (eo.layer_of[b] == -1) {
                    cur = b;
                    break;
                }
        }
        std::string msg = "cyclic same-cycle dependency: ";
        for (std::size_t i = at.at(cur); i < path.size(); ++i)
            msg += g.nodes[path[i]].name + " -> ";
        msg += g.nodes[cur].name;
        throw SpecError(g.nodes[cur].pos, msg);
    }

    // Triggers only report; nothing reads them. Evaluating them after every
    // stream and filter node lets their hold accesses observe values extended
    // in the same cycle, which the filter-refinement rewrite relies on.
    int stream_top = 0;
    for (int id = 0; id < n; ++id)
        if (g.nodes[id].kind != DepNode::Kind::Trigger)
            stream_top = std::max(stream_top, eo.layer_of[id]);
    for (int id = 0; id < n; ++id)
        if (g.nodes[id].kind == DepNode::Kind::Trigger) eo.layer_of[id] = stream_top + 1;

    int max_layer = 0;
    for (int id = 0; id < n; ++id) max_layer = std::max(max_layer, eo.layer_of[id]);
    eo.layers.assign(static_cast<std::size_t>(max_layer) + 1, {});
    for (int id = 0; id < n; ++id) eo.layers[eo.layer_of[id]].push_back(id);
    if (g.nodes.empty()) eo.layers.clear();

    eo.order.resize(n);
    for (int id = 0; id < n; ++id) eo.order[id] = id;
    std::sort(eo.order.begin(), eo.order.end(), [&](int a, int b) {
        if (eo.layer_of[a] != eo.layer_of[b]) return eo.layer_of[a] < eo.layer_of[b];
        return a < b;
    });
    eo.position.assign(n, -1);
    for (int slot = 0; slot < n; ++slot) eo.position[eo.order[slot]] = slot;
    return eo;
}

// Per-stream buffer sizes: the current value plus the deepest synchronous
// offset any accessor reaches back.
inline std::unordered_map<std::string, std::int64_t> memory_bounds(const DependencyGraph& g) {
    std::unordered_map<std::string, std::int64_t> bounds;
    for (const auto& node : g.nodes)
        if (node.is_stream()) bounds.emplace(node.name, 1);
    for (const auto& e : g.edges) {
        if (e.kind != DepEdge::Kind::Sync) continue;
        auto& b = bounds.at(g.nodes[e.to].name);
        b = std::max(b, 1 - e.offset);
    }
    return bounds;
}

// ---------------------------------------------------------------------------
// Deadline schedule for the periodic fragment. The hyperperiod is the least
// common multiple of the periods; each periodic node is due at every integer
// multiple of its period in (0, hyperperiod]. Nothing is due at time 0.

struct Deadline {
    Rational time;           // offset within the hyperperiod, in seconds
    std::vector<int> nodes;  // due node ids, ascending
};

struct Schedule {
    Rational hyperperiod;  // zero when the spec has no periodic node
    std::vector<Deadline> deadlines;
};

inline Schedule compute_schedule(const DependencyGraph& g) {
    std::vector<std::pair<int, Rational>> periodic;  // node id, period
    for (int id = 0; id < static_cast<int>(g.nodes.size()); ++id) {
        const auto& node = g.nodes[id];
        if (node.kind == DepNode::Kind::Filter || node.kind == DepNode::Kind::Input) continue;
        if (node.pacing.is_periodic()) periodic.push_back({id, Rational(1) / node.pacing.freq()});
    }
    Schedule s;
    s.hyperperiod = Rational(0);
    if (periodic.empty()) return s;
    Rational hyper = periodic.front().second;
    for (const auto& [id, period] : periodic) hyper = rational_lcm(hyper, period);
    s.hyperperiod = hyper;
    std::map<Rational, std::vector<int>> at;
    for (const auto& [id, period] : periodic) {
        for (Rational t = period; t <= hyper; t = t + period) at[t].push_back(id);
    }
    for (auto& [time, nodes] : at) {
        std::sort(nodes.begin(), nodes.end());
        s.deadlines.push_back({time, std::move(nodes)});
    }
    return s;
}

}  // namespace strm
