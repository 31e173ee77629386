#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "strm/rational.hpp"

namespace strm {

// Thrown when an activation-condition query would need a truth table over more
// than 20 distinct inputs.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Positive boolean formula over input-stream names. No negation by design:
// an event can only be observed, not observed-to-be-absent.
struct ActivationCondition {
    enum class Kind { Leaf, And, Or };
    Kind kind = Kind::Leaf;
    std::string leaf;
    std::vector<ActivationCondition> children;

    static ActivationCondition make_leaf(std::string name) {
        ActivationCondition ac;
        ac.kind = Kind::Leaf;
        ac.leaf = std::move(name);
        return ac;
    }
    static ActivationCondition make_and(std::vector<ActivationCondition> cs) {
        ActivationCondition ac;
        ac.kind = Kind::And;
        ac.children = std::move(cs);
        return ac;
    }
    static ActivationCondition make_or(std::vector<ActivationCondition> cs) {
        ActivationCondition ac;
        ac.kind = Kind::Or;
        ac.children = std::move(cs);
        return ac;
    }

    void collect_leaves(std::vector<std::string>& out) const {
        if (kind == Kind::Leaf) {
            if (std::find(out.begin(), out.end(), leaf) == out.end()) out.push_back(leaf);
            return;
        }
        for (const auto& c : children) c.collect_leaves(out);
    }

    // Evaluates the formula with exactly the named inputs present.
    template <typename Covered>
    bool eval(const Covered& covered) const {
        switch (kind) {
            case Kind::Leaf: return covered(leaf);
            case Kind::And:
                for (const auto& c : children)
                    if (!c.eval(covered)) return false;
                return true;
            case Kind::Or:
                for (const auto& c : children)
                    if (c.eval(covered)) return true;
                return false;
        }
        return false;
    }
};

inline bool ac_struct_eq(const ActivationCondition& a, const ActivationCondition& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == ActivationCondition::Kind::Leaf) return a.leaf == b.leaf;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!ac_struct_eq(a.children[i], b.children[i])) return false;
    return true;
}

namespace detail {

inline std::vector<std::string> ac_vars(const ActivationCondition& a, const ActivationCondition& b) {
    std::vector<std::string> vars;
    a.collect_leaves(vars);
    b.collect_leaves(vars);
    if (vars.size() > 20)
        throw CapacityError("activation-condition query over " + std::to_string(vars.size()) +
                            " inputs exceeds the 20-input truth-table capacity");
    return vars;
}

inline bool ac_eval_mask(const ActivationCondition& ac, const std::vector<std::string>& vars,
                         std::uint32_t mask) {
    return ac.eval([&](const std::string& name) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return (mask >> i & 1u) != 0;
        return false;
    });
}

}  // namespace detail

// Exhaustive truth-table check of "a entails b". Throws CapacityError beyond
// 20 distinct inputs.
inline bool ac_implies(const ActivationCondition& a, const ActivationCondition& b) {
    auto vars = detail::ac_vars(a, b);
    std::uint32_t n = 1u << vars.size();
    for (std::uint32_t mask = 0; mask < n; ++mask)
        if (detail::ac_eval_mask(a, vars, mask) && !detail::ac_eval_mask(b, vars, mask))
            return false;
    return true;
}

inline bool ac_equiv(const ActivationCondition& a, const ActivationCondition& b) {
    return ac_implies(a, b) && ac_implies(b, a);
}

namespace detail {

// Flattens same-kind children, drops structural duplicates, then applies
// absorption: in an Or, a disjunct implying another is redundant; in an And,
// a conjunct implied by another is redundant.
inline ActivationCondition ac_combine(ActivationCondition::Kind kind,
                                      const std::vector<ActivationCondition>& operands) {
    std::vector<ActivationCondition> flat;
    for (const auto& op : operands) {
        if (op.kind == kind)
            for (const auto& c : op.children) flat.push_back(c);
        else
            flat.push_back(op);
    }
    std::vector<ActivationCondition> uniq;
    for (const auto& c : flat) {
        bool dup = false;
        for (const auto& u : uniq)
            if (ac_struct_eq(u, c)) { dup = true; break; }
        if (!dup) uniq.push_back(c);
    }
    std::vector<bool> drop(uniq.size(), false);
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        if (drop[i]) continue;
        for (std::size_t j = 0; j < uniq.size(); ++j) {
            if (i == j || drop[j]) continue;
            bool redundant = kind == ActivationCondition::Kind::Or
                                 ? ac_implies(uniq[i], uniq[j])   // i is the stronger disjunct
                                 : ac_implies(uniq[j], uniq[i]);  // i is the weaker conjunct
            if (redundant) { drop[i] = true; break; }
        }
    }
    std::vector<ActivationCondition> kept;
    for (std::size_t i = 0; i < uniq.size(); ++i)
        if (!drop[i]) kept.push_back(uniq[i]);
    if (kept.size() == 1) return kept[0];
    ActivationCondition out;
    out.kind = kind;
    out.children = std::move(kept);
    return out;
}

}  // namespace detail

inline ActivationCondition ac_or(const ActivationCondition& a, const ActivationCondition& b) {
    return detail::ac_combine(ActivationCondition::Kind::Or, {a, b});
}

inline ActivationCondition ac_and(const ActivationCondition& a, const ActivationCondition& b) {
    return detail::ac_combine(ActivationCondition::Kind::And, {a, b});
}

inline ActivationCondition ac_or_all(const std::vector<ActivationCondition>& cs) {
    if (cs.empty()) throw std::invalid_argument("ac_or_all over empty set");
    return detail::ac_combine(ActivationCondition::Kind::Or, cs);
}

inline ActivationCondition ac_and_all(const std::vector<ActivationCondition>& cs) {
    if (cs.empty()) throw std::invalid_argument("ac_and_all over empty set");
    return detail::ac_combine(ActivationCondition::Kind::And, cs);
}

// Composite children always print parenthesized so that the tree shape (not
// just the boolean function) survives a parse of the printed text.
inline std::string ac_str(const ActivationCondition& ac, bool nested = false) {
    if (ac.kind == ActivationCondition::Kind::Leaf) return ac.leaf;
    const char* sep = ac.kind == ActivationCondition::Kind::And ? " && " : " || ";
    std::string s;
    for (std::size_t i = 0; i < ac.children.size(); ++i) {
        if (i) s += sep;
        s += ac_str(ac.children[i], true);
    }
    return nested ? "(" + s + ")" : s;
}

// A frequency in Hz; positive exact rational.
using Frequency = Rational;

inline Frequency freq_lcm(const Frequency& a, const Frequency& b) { return rational_lcm(a, b); }

// True when every evaluation instant of `slow` is also an instant of `fast`,
// i.e. fast/slow is a positive integer.
inline bool freq_divides(const Frequency& slow, const Frequency& fast) {
    return rational_divides(slow, fast);
}

// Pacing: either event-based (an activation condition over inputs) or
// periodic (a fixed frequency). The two kinds never unify.
struct PacingType {
    std::variant<ActivationCondition, Frequency> v;

    PacingType() : v(ActivationCondition{}) {}
    explicit PacingType(ActivationCondition ac) : v(std::move(ac)) {}
    explicit PacingType(Frequency f) : v(f) {}

    bool is_event() const { return std::holds_alternative<ActivationCondition>(v); }
    bool is_periodic() const { return std::holds_alternative<Frequency>(v); }
    const ActivationCondition& ac() const { return std::get<ActivationCondition>(v); }
    const Frequency& freq() const { return std::get<Frequency>(v); }

    std::string str() const {
        if (is_periodic()) return "@" + freq().str() + "Hz";
        return "@{" + ac_str(ac()) + "}";
    }
};

inline bool pacing_struct_eq(const PacingType& a, const PacingType& b) {
    if (a.is_event() != b.is_event()) return false;
    if (a.is_periodic()) return a.freq() == b.freq();
    return ac_struct_eq(a.ac(), b.ac());
}

// Semantic equality: same kind and same evaluation instants.
inline bool pacing_equiv(const PacingType& a, const PacingType& b) {
    if (a.is_event() != b.is_event()) return false;
    if (a.is_periodic()) return a.freq() == b.freq();
    return ac_equiv(a.ac(), b.ac());
}

// True when every instant of `from` is an instant of `to` (mixed kinds never
// relate). This is the side condition on synchronous accesses.
inline bool pacing_covers_access(const PacingType& from, const PacingType& to) {
    if (from.is_event() && to.is_event()) return ac_implies(from.ac(), to.ac());
    if (from.is_periodic() && to.is_periodic()) return freq_divides(from.freq(), to.freq());
    return false;
}

}  // namespace strm
