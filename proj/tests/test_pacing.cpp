#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <string>

#include "strm/pacing.hpp"

using strm::ActivationCondition;
using strm::PacingType;
using strm::Rational;
using AC = ActivationCondition;

namespace {

// Independent reference semantics: evaluate the formula under an explicit
// assignment map, enumerating assignments over a std::set of leaves.
bool oracle_eval(const AC& ac, const std::map<std::string, bool>& env) {
    switch (ac.kind) {
        case AC::Kind::Leaf: {
            auto it = env.find(ac.leaf);
            return it != env.end() && it->second;
        }
        case AC::Kind::And: {
            bool all = true;
            for (const auto& c : ac.children) all = all && oracle_eval(c, env);
            return all;
        }
        case AC::Kind::Or: {
            bool any = false;
            for (const auto& c : ac.children) any = any || oracle_eval(c, env);
            return any;
        }
    }
    return false;
}

void oracle_leaves(const AC& ac, std::set<std::string>& out) {
    if (ac.kind == AC::Kind::Leaf) {
        out.insert(ac.leaf);
        return;
    }
    for (const auto& c : ac.children) oracle_leaves(c, out);
}

bool oracle_implies(const AC& a, const AC& b) {
    std::set<std::string> leaves;
    oracle_leaves(a, leaves);
    oracle_leaves(b, leaves);
    std::vector<std::string> vars(leaves.begin(), leaves.end());
    for (std::uint64_t mask = 0; mask < (1ULL << vars.size()); ++mask) {
        std::map<std::string, bool> env;
        for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = (mask >> i & 1) != 0;
        if (oracle_eval(a, env) && !oracle_eval(b, env)) return false;
    }
    return true;
}

bool oracle_equiv(const AC& a, const AC& b) { return oracle_implies(a, b) && oracle_implies(b, a); }

AC random_ac(std::mt19937& rng, int depth) {
    static const char* names[] = {"a", "b", "c", "d", "e", "f"};
    std::uniform_int_distribution<int> name(0, 5);
    std::uniform_int_distribution<int> shape(0, depth <= 0 ? 0 : 4);
    int s = shape(rng);
    if (s <= 2) return AC::make_leaf(names[name(rng)]);
    std::uniform_int_distribution<int> arity(2, 3);
    std::vector<AC> cs;
    for (int i = arity(rng); i > 0; --i) cs.push_back(random_ac(rng, depth - 1));
    return s == 3 ? AC::make_and(std::move(cs)) : AC::make_or(std::move(cs));
}

AC leaf(const char* n) { return AC::make_leaf(n); }

}  // namespace

TEST_CASE("activation condition eval") {
    AC ac = AC::make_and({leaf("a"), AC::make_or({leaf("b"), leaf("c")})});
    auto with = [&](std::initializer_list<const char*> present) {
        std::set<std::string> p(present.begin(), present.end());
        return ac.eval([&](const std::string& n) { return p.count(n) > 0; });
    };
    CHECK(with({"a", "b"}));
    CHECK(with({"a", "c"}));
    CHECK_FALSE(with({"a"}));
    CHECK_FALSE(with({"b", "c"}));
}

TEST_CASE("implication basics") {
    CHECK(strm::ac_implies(AC::make_and({leaf("a"), leaf("b")}), leaf("a")));
    CHECK_FALSE(strm::ac_implies(leaf("a"), AC::make_and({leaf("a"), leaf("b")})));
    CHECK(strm::ac_implies(leaf("a"), AC::make_or({leaf("a"), leaf("b")})));
    CHECK_FALSE(strm::ac_implies(AC::make_or({leaf("a"), leaf("b")}), leaf("a")));
    CHECK(strm::ac_equiv(AC::make_and({leaf("a"), leaf("b")}), AC::make_and({leaf("b"), leaf("a")})));
    // Distribution: a && (b || c) == (a && b) || (a && c)
    AC lhs = AC::make_and({leaf("a"), AC::make_or({leaf("b"), leaf("c")})});
    AC rhs = AC::make_or({AC::make_and({leaf("a"), leaf("b")}), AC::make_and({leaf("a"), leaf("c")})});
    CHECK(strm::ac_equiv(lhs, rhs));
}

TEST_CASE("implication matches truth-table oracle on random formulas") {
    std::mt19937 rng(7);
    for (int i = 0; i < 10000; ++i) {
        AC a = random_ac(rng, 3);
        AC b = random_ac(rng, 3);
        CHECK(strm::ac_implies(a, b) == oracle_implies(a, b));
    }
}

TEST_CASE("combined conditions are sound and simplified") {
    std::mt19937 rng(8);
    for (int i = 0; i < 3000; ++i) {
        AC a = random_ac(rng, 2);
        AC b = random_ac(rng, 2);
        AC o = strm::ac_or(a, b);
        AC n = strm::ac_and(a, b);
        CHECK(oracle_equiv(o, AC::make_or({a, b})));
        CHECK(oracle_equiv(n, AC::make_and({a, b})));
    }
}

TEST_CASE("absorption") {
    AC a = leaf("a");
    AC ab = AC::make_and({leaf("a"), leaf("b")});
    // a || (a && b) collapses to a
    CHECK(strm::ac_struct_eq(strm::ac_or(a, ab), a));
    // a && (a || b) collapses to a
    AC aob = AC::make_or({leaf("a"), leaf("b")});
    CHECK(strm::ac_struct_eq(strm::ac_and(a, aob), a));
    // idempotence
    CHECK(strm::ac_struct_eq(strm::ac_or(a, a), a));
    CHECK(strm::ac_struct_eq(strm::ac_and(a, a), a));
    // flattening keeps n-ary shape
    AC three = strm::ac_and(strm::ac_and(leaf("a"), leaf("b")), leaf("c"));
    REQUIRE(three.kind == AC::Kind::And);
    CHECK(three.children.size() == 3);
}

TEST_CASE("capacity limit") {
    std::vector<AC> many;
    for (int i = 0; i < 21; ++i) many.push_back(leaf(("in" + std::to_string(i)).c_str()));
    AC big = AC::make_and(many);
    CHECK_THROWS_AS(strm::ac_implies(big, big), strm::CapacityError);
    std::vector<AC> ok(many.begin(), many.begin() + 20);
    AC fits = AC::make_and(ok);
    CHECK(strm::ac_implies(fits, fits));
}

TEST_CASE("activation condition text") {
    AC ac = AC::make_and({leaf("a"), AC::make_or({leaf("b"), leaf("c")})});
    CHECK(strm::ac_str(ac) == "a && (b || c)");
    AC ac2 = AC::make_or({leaf("a"), AC::make_and({leaf("b"), leaf("c")})});
    CHECK(strm::ac_str(ac2) == "a || (b && c)");
}

TEST_CASE("frequency divisibility and lcm") {
    // 2Hz instants contain the 0.5Hz instants (every 4th one).
    CHECK(strm::freq_divides(Rational(1, 2), Rational(2)));
    CHECK_FALSE(strm::freq_divides(Rational(2), Rational(3)));
    CHECK(strm::freq_lcm(Rational(1, 2), Rational(2)) == Rational(2));
    CHECK(strm::freq_lcm(Rational(2), Rational(3)) == Rational(6));
    CHECK(strm::freq_lcm(Rational(3, 10), Rational(1, 5)) == Rational(3, 5));
}

TEST_CASE("pacing relations") {
    PacingType ev_a{leaf("a")};
    PacingType ev_ab{AC::make_and({leaf("a"), leaf("b")})};
    PacingType hz1{Rational(1)};
    PacingType hz2{Rational(2)};

    CHECK(strm::pacing_covers_access(ev_ab, ev_a));
    CHECK_FALSE(strm::pacing_covers_access(ev_a, ev_ab));
    CHECK(strm::pacing_covers_access(hz1, hz2));
    CHECK_FALSE(strm::pacing_covers_access(hz2, hz1));
    CHECK(strm::pacing_covers_access(hz1, hz1));
    // Mixed kinds never relate.
    CHECK_FALSE(strm::pacing_covers_access(ev_a, hz1));
    CHECK_FALSE(strm::pacing_covers_access(hz1, ev_a));
    CHECK_FALSE(strm::pacing_equiv(ev_a, hz1));

    CHECK(strm::pacing_equiv(ev_ab, PacingType{AC::make_and({leaf("b"), leaf("a")})}));
    CHECK_FALSE(strm::pacing_struct_eq(ev_ab, PacingType{AC::make_and({leaf("b"), leaf("a")})}));
    CHECK(strm::pacing_struct_eq(hz2, PacingType{Rational(2)}));
    CHECK(PacingType{Rational(1, 2)}.str() == "@0.5Hz");
    CHECK(ev_ab.str() == "@{a && b}");
}
