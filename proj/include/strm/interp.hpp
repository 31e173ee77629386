#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "strm/analysis.hpp"
#include "strm/diag.hpp"
#include "strm/expr.hpp"
#include "strm/rational.hpp"
#include "strm/spec.hpp"
#include "strm/value.hpp"
#include "strm/value_ops.hpp"

namespace strm {

// One trace record: an instant and the inputs it covers (at least one).
struct Event {
    Rational time;
    std::vector<std::pair<std::string, Value>> values;
};

// One fired trigger. The full observable behavior of a run is the sequence of
// these; every transformation must preserve it exactly.
struct Observation {
    Rational time;
    std::size_t trigger_index = 0;
    std::string message;

    friend bool operator==(const Observation& a, const Observation& b) {
        return a.time == b.time && a.trigger_index == b.trigger_index && a.message == b.message;
    }
    friend bool operator!=(const Observation& a, const Observation& b) { return !(a == b); }
};

struct NodeStats {
    std::uint64_t eval_count = 0;
    std::uint64_t filter_checks = 0;
    std::uint64_t filter_suppressed = 0;
};

// Per-node counters in declaration order (inputs, outputs, triggers; filters
// are folded into their host's filter_checks/filter_suppressed).
struct EvalStats {
    std::vector<std::pair<std::string, NodeStats>> nodes;
    std::uint64_t cycle_count = 0;
    std::uint64_t wall_time_nanoseconds = 0;

    const NodeStats* find(const std::string& name) const {
        for (const auto& [n, s] : nodes)
            if (n == name) return &s;
        return nullptr;
    }
    const NodeStats& at(const std::string& name) const {
        const NodeStats* s = find(name);
        if (!s) throw SpecError("no stats for node '" + name + "'");
        return *s;
    }
    // Work proxy: every expression evaluation, filters included.
    std::uint64_t total_expression_evaluations() const {
        std::uint64_t total = 0;
        for (const auto& [n, s] : nodes) total += s.eval_count + s.filter_checks;
        return total;
    }
};

struct RunResult {
    std::vector<Observation> observations;
    EvalStats stats;
};

// Reference evaluation engine. Single-threaded over one trace; distinct
// instances are independent, so runs may be parallelized across engines.
class Engine {
  public:
    explicit Engine(TypedSpec ts)
        : ts_(std::move(ts)),
          graph_(build_dependency_graph(ts_)),
          order_(evaluation_order(graph_)),
          schedule_(compute_schedule(graph_)) {
        compile();
    }

    RunResult run(const std::vector<Event>& trace) {
        reset();
        auto started = std::chrono::steady_clock::now();
        if (!trace.empty()) {
            const Rational horizon = trace.back().time;
            DeadlineCursor dc(schedule_, horizon);
            std::size_t ei = 0;
            Rational prev = trace.front().time;
            while (ei < trace.size() || dc.valid()) {
                bool take_event = false;
                bool take_deadline = false;
                if (ei < trace.size() && dc.valid()) {
                    if (dc.time() < trace[ei].time) take_deadline = true;
                    else if (trace[ei].time < dc.time()) take_event = true;
                    else take_event = take_deadline = true;
                } else if (ei < trace.size()) {
                    take_event = true;
                } else {
                    take_deadline = true;
                }
                const Event* ev = take_event ? &trace[ei] : nullptr;
                if (ev) {
                    if (ev->time < prev)
                        throw SpecError("trace timestamps decrease at t=" + ev->time.str());
                    prev = ev->time;
                }
                Rational now = take_event ? trace[ei].time : dc.time();
                const std::vector<int>* due = take_deadline ? &dc.nodes() : nullptr;
                run_cycle(now, ev, due);
                if (take_event) ++ei;
                if (take_deadline) dc.advance();
            }
        }
        auto stopped = std::chrono::steady_clock::now();
        stats_.wall_time_nanoseconds = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(stopped - started).count());
        RunResult result{std::move(observations_), std::move(stats_)};
        observations_.clear();
        return result;
    }

    // White-box probes for retention tests: high-water marks measured at
    // cycle boundaries, after trimming.
    std::size_t max_sync_retained(const std::string& stream) const {
        return streams_.at(stream_slot(stream)).max_sync;
    }
    std::size_t max_window_retained(const std::string& stream) const {
        return streams_.at(stream_slot(stream)).max_window;
    }

    const DependencyGraph& graph() const { return graph_; }
    const EvaluationOrder& order() const { return order_; }
    const Schedule& schedule() const { return schedule_; }

    // Instrumentation: observe every stream extension (tests and debugging).
    using ExtensionHook = std::function<void(const std::string&, const Rational&, const Value&)>;
    void set_extension_hook(ExtensionHook hook) { hook_ = std::move(hook); }

  private:
    struct StreamState {
        ValueType type;
        std::int64_t bound = 1;            // sync retention target
        bool keep_window = false;          // any window access targets this
        Rational window_keep;              // widest window duration
        std::deque<std::pair<Rational, Value>> sync_hist;
        std::deque<std::pair<Rational, Value>> window_hist;
        std::uint64_t total_ext = 0;
        bool in_cycle = false;
        std::size_t max_sync = 0;
        std::size_t max_window = 0;
    };

    struct NodeInfo {
        ExprPtr expr;        // output expr / trigger condition / filter expr
        int stream = -1;     // index into streams_ for Input/Output nodes
        int stats_row = -1;  // index into stats_.nodes (filters: host's row)
        int filter_node = -1;  // host nodes: id of their filter node, if any
        std::size_t trigger_index = 0;
        const std::string* message = nullptr;
    };

    // Unrolls the periodic schedule over (0, horizon], one hyperperiod at a
    // time.
    class DeadlineCursor {
      public:
        DeadlineCursor(const Schedule& s, Rational horizon) : s_(s), horizon_(horizon) {
            valid_ = !s_.deadlines.empty() && current() <= horizon_;
        }
        bool valid() const { return valid_; }
        Rational time() const { return current(); }
        const std::vector<int>& nodes() const { return s_.deadlines[index_].nodes; }
        void advance() {
            ++index_;
            if (index_ == s_.deadlines.size()) {
                index_ = 0;
                base_ = base_ + s_.hyperperiod;
            }
            valid_ = current() <= horizon_;
        }

      private:
        Rational current() const { return base_ + s_.deadlines[index_].time; }
        const Schedule& s_;
        Rational horizon_;
        Rational base_ = Rational(0);
        std::size_t index_ = 0;
        bool valid_ = false;
    };

    void compile() {
        info_.resize(graph_.nodes.size());
        auto bounds = memory_bounds(graph_);
        for (int id = 0; id < static_cast<int>(graph_.nodes.size()); ++id) {
            const DepNode& node = graph_.nodes[id];
            NodeInfo& ni = info_[id];
            switch (node.kind) {
                case DepNode::Kind::Input: {
                    const auto& in = ts_.inputs[node.decl_index];
                    ni.stream = new_stream(in.type, bounds.at(node.name));
                    break;
                }
                case DepNode::Kind::Output: {
                    const auto& out = ts_.outputs[node.decl_index];
                    ni.expr = out.expr;
                    ni.stream = new_stream(out.type, bounds.at(node.name));
                    break;
                }
                case DepNode::Kind::Trigger: {
                    const auto& tr = ts_.triggers[node.decl_index];
                    ni.expr = tr.condition;
                    ni.trigger_index = node.decl_index;
                    ni.message = &tr.message;
                    break;
                }
                case DepNode::Kind::Filter: {
                    const DepNode& host = graph_.nodes[node.owner];
                    ni.expr = host.kind == DepNode::Kind::Output
                                  ? ts_.outputs[host.decl_index].filter
                                  : ts_.triggers[host.decl_index].filter;
                    info_[node.owner].filter_node = id;
                    break;
                }
            }
            if (node.kind != DepNode::Kind::Filter) {
                ni.stats_row = static_cast<int>(stats_template_.size());
                stats_template_.push_back({node.name, NodeStats{}});
            }
        }
        // Filters report on their host's row.
        for (int id = 0; id < static_cast<int>(graph_.nodes.size()); ++id)
            if (graph_.nodes[id].kind == DepNode::Kind::Filter)
                info_[id].stats_row = info_[graph_.nodes[id].owner].stats_row;
        // Window retention per target stream: the widest duration wins.
        for (const auto& e : graph_.edges) {
            if (e.kind != DepEdge::Kind::Window) continue;
            StreamState& st = stream_template_[info_[e.to].stream];
            if (!st.keep_window || st.window_keep < e.duration) st.window_keep = e.duration;
            st.keep_window = true;
        }
        filter_ok_.resize(graph_.nodes.size(), false);
    }

    int new_stream(ValueType type, std::int64_t bound) {
        StreamState st;
        st.type = std::move(type);
        st.bound = bound;
        stream_template_.push_back(std::move(st));
        return static_cast<int>(stream_template_.size()) - 1;
    }

    int stream_slot(const std::string& name) const {
        return info_[graph_.stream_node(name)].stream;
    }

    void reset() {
        streams_ = stream_template_;
        stats_.nodes = stats_template_;
        stats_.cycle_count = 0;
        stats_.wall_time_nanoseconds = 0;
        observations_.clear();
        std::fill(filter_ok_.begin(), filter_ok_.end(), false);
    }

    void extend(StreamState& st, const Rational& time, Value v) {
        if (st.keep_window) st.window_hist.emplace_back(time, v);
        st.sync_hist.emplace_back(time, std::move(v));
        st.in_cycle = true;
        ++st.total_ext;
    }

    bool is_due(int id, const Event* ev, const std::vector<int>* due) const {
        const DepNode& node = graph_.nodes[id];
        if (node.kind == DepNode::Kind::Filter) return is_due(node.owner, ev, due);
        if (node.pacing.is_event()) {
            if (!ev) return false;
            return node.pacing.ac().eval(
                [&](const std::string& leaf) { return covered_.count(leaf) != 0; });
        }
        return due && std::find(due->begin(), due->end(), id) != due->end();
    }

    void run_cycle(const Rational& now, const Event* ev, const std::vector<int>* due) {
        ++stats_.cycle_count;
        covered_.clear();
        touched_.clear();
        cycle_obs_.clear();

        // Age out window buffer entries that fell behind every window.
        for (auto& st : streams_) {
            if (!st.keep_window) continue;
            const Rational cutoff = now - st.window_keep;
            while (!st.window_hist.empty() && st.window_hist.front().first < cutoff)
                st.window_hist.pop_front();
        }

        // Inputs extend first, so same-instant values are visible to periodic
        // windows and holds.
        if (ev) {
            for (const auto& [name, value] : ev->values) covered_.insert(name);
            for (const auto& [name, value] : ev->values) {
                int id = graph_.stream_node(name);
                if (!graph_.nodes[id].is_stream() || graph_.nodes[id].kind != DepNode::Kind::Input)
                    throw SpecError("trace covers non-input '" + name + "'");
                const ValueType& want = streams_[info_[id].stream].type;
                if (value.type() != want)
                    throw SpecError("trace value for input '" + name + "' at t=" + now.str() +
                                    " has type " + value.type().str() + ", expected " + want.str());
                if (hook_) hook_(name, now, value);
                extend(streams_[info_[id].stream], now, value);
                touched_.push_back(info_[id].stream);
                ++stats_.nodes[info_[id].stats_row].second.eval_count;
            }
        }

        for (int id : order_.order) {
            const DepNode& node = graph_.nodes[id];
            if (node.kind == DepNode::Kind::Input) continue;
            if (!is_due(id, ev, due)) continue;
            NodeInfo& ni = info_[id];
            NodeStats& row = stats_.nodes[ni.stats_row].second;
            switch (node.kind) {
                case DepNode::Kind::Filter:
                    ++row.filter_checks;
                    filter_ok_[node.owner] = eval_bool(ni.expr, node.name, now);
                    break;
                case DepNode::Kind::Output: {
                    if (ni.filter_node >= 0 && !filter_ok_[id]) {
                        ++row.filter_suppressed;
                        break;
                    }
                    ++row.eval_count;
                    Value v = eval_guarded(ni.expr, node.name, now);
                    if (hook_) hook_(node.name, now, v);
                    extend(streams_[ni.stream], now, std::move(v));
                    touched_.push_back(ni.stream);
                    break;
                }
                case DepNode::Kind::Trigger: {
                    if (ni.filter_node >= 0 && !filter_ok_[id]) {
                        ++row.filter_suppressed;
                        break;
                    }
                    ++row.eval_count;
                    if (eval_bool(ni.expr, node.name, now))
                        cycle_obs_.push_back({ni.trigger_index, ni.message});
                    break;
                }
                default: break;
            }
        }

        // Canonical within-cycle observation order: trigger declaration order.
        std::sort(cycle_obs_.begin(), cycle_obs_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [index, message] : cycle_obs_)
            observations_.push_back({now, index, *message});

        // Cycle boundary: trim sync retention and record high-water marks.
        for (int slot : touched_) {
            StreamState& st = streams_[slot];
            st.in_cycle = false;
            while (st.sync_hist.size() > static_cast<std::size_t>(st.bound))
                st.sync_hist.pop_front();
            st.max_sync = std::max(st.max_sync, st.sync_hist.size());
            st.max_window = std::max(st.max_window, st.window_hist.size());
        }
    }

    bool eval_bool(const ExprPtr& e, const std::string& who, const Rational& now) {
        return eval_guarded(e, who, now).as_bool();
    }

    Value eval_guarded(const ExprPtr& e, const std::string& who, const Rational& now) {
        try {
            return eval(e, now);
        } catch (const EvalFault& f) {
            if (f.has_time) throw;
            throw EvalFault(f.what(), who, now);
        }
    }

    // Same-cycle synchronous read. A stream that was filter-suppressed this
    // cycle (or is simply evaluated later than none of its accessors, which
    // the evaluation order rules out) yields its most recent earlier value;
    // a stream that has never extended yields its value type's default. This
    // makes an unrewritten sync read of a filtered stream coincide with hold
    // semantics, which is what keeps filter-related rewrites observation-
    // preserving. Swap this function to change that policy.
    Value sync_now(const StreamState& st) const {
        if (!st.sync_hist.empty()) return st.sync_hist.back().second;
        return default_value(st.type);
    }

    // Offset read: the n-th most recent extension from strictly earlier
    // cycles, independent of intra-cycle evaluation order.
    Value sync_offset(const StreamState& st, std::int64_t n, const Value& fallback) const {
        const std::uint64_t in_cycle = st.in_cycle ? 1 : 0;
        const std::uint64_t before = st.total_ext - in_cycle;
        if (before < static_cast<std::uint64_t>(n)) return fallback;
        const std::size_t index = st.sync_hist.size() - in_cycle - static_cast<std::size_t>(n);
        return st.sync_hist[index].second;
    }

    Value window_read(const Expr::Window& w, const StreamState& st, const Rational& now) const {
        const Rational lo = now - w.duration;
        std::size_t first = st.window_hist.size();
        while (first > 0 && !(st.window_hist[first - 1].first < lo)) --first;
        std::vector<Value> vals;
        vals.reserve(st.window_hist.size() - first);
        for (std::size_t i = first; i < st.window_hist.size(); ++i)
            vals.push_back(st.window_hist[i].second);
        if (vals.empty()) {
            switch (w.agg) {
                case WinAgg::Count: return Value(static_cast<std::int64_t>(0));
                case WinAgg::Exists: return Value(false);
                case WinAgg::Sum:
                    return st.type.kind == ValueType::Kind::Float64
                               ? Value(0.0)
                               : Value(static_cast<std::int64_t>(0));
                case WinAgg::Avg:
                case WinAgg::Min:
                case WinAgg::Max: return *w.fallback;
            }
        }
        return WindowAccumulator{w.agg, st.type}.run(vals);
    }

    Value eval(const ExprPtr& e, const Rational& now) {
        if (auto* lit = e->as<Expr::Literal>()) return lit->value;
        if (auto* s = e->as<Expr::Sync>()) {
            const StreamState& st = streams_[stream_slot(s->target)];
            if (s->offset == 0) return sync_now(st);
            return sync_offset(st, -s->offset, *s->fallback);
        }
        if (auto* h = e->as<Expr::Hold>()) {
            const StreamState& st = streams_[stream_slot(h->target)];
            if (st.sync_hist.empty() && st.total_ext == 0) return h->fallback;
            if (!st.sync_hist.empty()) return st.sync_hist.back().second;
            return h->fallback;  // unreachable: retention keeps at least one
        }
        if (auto* w = e->as<Expr::Window>())
            return window_read(*w, streams_[stream_slot(w->target)], now);
        if (auto* u = e->as<Expr::Unary>()) return apply_unop(u->op, eval(u->operand, now));
        if (auto* b = e->as<Expr::Binary>()) {
            if (b->op == BinOp::And) {
                Value lhs = eval(b->lhs, now);
                if (!lhs.as_bool()) return Value(false);
                return eval(b->rhs, now);
            }
            if (b->op == BinOp::Or) {
                Value lhs = eval(b->lhs, now);
                if (lhs.as_bool()) return Value(true);
                return eval(b->rhs, now);
            }
            Value lhs = eval(b->lhs, now);
            Value rhs = eval(b->rhs, now);
            return apply_binop(b->op, lhs, rhs);
        }
        if (auto* ite = e->as<Expr::Ite>()) {
            return eval(ite->cond, now).as_bool() ? eval(ite->then_branch, now)
                                                  : eval(ite->else_branch, now);
        }
        auto* p = e->as<Expr::Proj>();
        Value tup = eval(p->tuple, now);
        return tup.as_tuple()[p->index];
    }

    TypedSpec ts_;
    DependencyGraph graph_;
    EvaluationOrder order_;
    Schedule schedule_;

    std::vector<NodeInfo> info_;
    std::vector<StreamState> stream_template_;
    std::vector<std::pair<std::string, NodeStats>> stats_template_;

    std::vector<StreamState> streams_;
    EvalStats stats_;
    std::vector<Observation> observations_;
    std::unordered_set<std::string> covered_;
    std::vector<int> touched_;
    std::vector<std::pair<std::size_t, const std::string*>> cycle_obs_;
    std::vector<char> filter_ok_;
    ExtensionHook hook_;
};

// Convenience wrapper used all over the tests and the harness.
inline RunResult run_monitor(const TypedSpec& ts, const std::vector<Event>& trace) {
    Engine engine(ts);
    return engine.run(trace);
}

}  // namespace strm
