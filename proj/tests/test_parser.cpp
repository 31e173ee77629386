#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "strm/parser.hpp"
#include "strm/printer.hpp"

using namespace strm;

TEST_CASE("full-feature golden parse") {
    const std::string text = R"(
# positions and speeds
input gps: (Float64, Float64)
input speed, accel: Float64
input armed: Bool

output lat: Float64 := gps.0
output prev: Float64 @{gps} := lat.offset(by: -1).defaults(to: 0.0)
output rate @0.5Hz := speed.aggregate(over: 2s, using: avg).defaults(to: 0.0)
output cnt @2Hz := gps.aggregate(over: 500ms, using: count)
output gated: Bool @{speed && armed} { filter armed.hold(or: false) } := speed > 10.0

trigger @{gps} prev > 47.5 "too far north"
trigger { filter gated } if armed.hold(or: false) then speed.hold(or: 0.0) > 1.0 else false "moving \"fast\"\n"
)";
    Spec s = parse_spec(text);
    REQUIRE(s.inputs.size() == 4);
    CHECK(s.inputs[0].name == "gps");
    CHECK(s.inputs[0].type == ValueType::tuple({ValueType::float64(), ValueType::float64()}));
    CHECK(s.inputs[1].name == "speed");
    CHECK(s.inputs[2].name == "accel");  // multi-name declaration desugars in order
    CHECK(s.inputs[2].type == ValueType::float64());
    CHECK(s.inputs[3].type == ValueType::boolean());

    REQUIRE(s.outputs.size() == 5);
    const auto& lat = s.outputs[0];
    CHECK(lat.type == ValueType::float64());
    CHECK_FALSE(lat.pacing);
    REQUIRE(lat.expr->as<Expr::Proj>());
    CHECK(lat.expr->as<Expr::Proj>()->index == 0);

    const auto& prev = s.outputs[1];
    REQUIRE(prev.pacing);
    CHECK(prev.pacing->is_event());
    auto* sync = prev.expr->as<Expr::Sync>();
    REQUIRE(sync);
    CHECK(sync->offset == -1);
    REQUIRE(sync->fallback);
    CHECK(value_bits_eq(*sync->fallback, Value(0.0)));

    const auto& rate = s.outputs[2];
    REQUIRE(rate.pacing);
    CHECK(rate.pacing->is_periodic());
    CHECK(rate.pacing->freq() == Rational(1, 2));
    auto* win = rate.expr->as<Expr::Window>();
    REQUIRE(win);
    CHECK(win->agg == WinAgg::Avg);
    CHECK(win->duration == Rational(2));
    REQUIRE(win->fallback);

    auto* cwin = s.outputs[3].expr->as<Expr::Window>();
    REQUIRE(cwin);
    CHECK(cwin->duration == Rational(1, 2));  // 500ms
    CHECK_FALSE(cwin->fallback);

    const auto& gated = s.outputs[4];
    REQUIRE(gated.filter);
    CHECK(gated.filter->as<Expr::Hold>());

    REQUIRE(s.triggers.size() == 2);
    CHECK(s.triggers[0].message == "too far north");
    REQUIRE(s.triggers[0].pacing);
    CHECK(s.triggers[1].message == "moving \"fast\"\n");
    REQUIRE(s.triggers[1].filter);
    CHECK(s.triggers[1].condition->as<Expr::Ite>());
}

TEST_CASE("offset zero normalizes to plain access") {
    Spec s = parse_spec("input x: Int64\noutput y := x.offset(by: 0)\n");
    auto* sync = s.outputs[0].expr->as<Expr::Sync>();
    REQUIRE(sync);
    CHECK(sync->offset == 0);
    CHECK_FALSE(sync->fallback);
    // And a zero-offset access cannot take a default.
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.offset(by: 0).defaults(to: 1)\n"),
                    ParseError);
}

TEST_CASE("integer literal edge cases") {
    Spec s = parse_spec("input x: Int64\noutput y := -9223372036854775808\n");
    auto* lit = s.outputs[0].expr->as<Expr::Literal>();
    REQUIRE(lit);
    CHECK(lit->value.as_int() == INT64_MIN);

    s = parse_spec("input x: Int64\noutput y := 9223372036854775807\n");
    CHECK(s.outputs[0].expr->as<Expr::Literal>()->value.as_int() == INT64_MAX);

    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := 9223372036854775808\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := 99999999999999999999999\n"), ParseError);

    // -min parses as negation applied to the min literal
    s = parse_spec("input x: Int64\noutput y := --9223372036854775808\n");
    auto* u = s.outputs[0].expr->as<Expr::Unary>();
    REQUIRE(u);
    CHECK(u->op == UnOp::Neg);
    CHECK(u->operand->as<Expr::Literal>()->value.as_int() == INT64_MIN);
}

TEST_CASE("projection chains") {
    Spec s = parse_spec("input g: ((Int64, Int64), Bool)\noutput y := g.0.1\n");
    auto* outer = s.outputs[0].expr->as<Expr::Proj>();
    REQUIRE(outer);
    CHECK(outer->index == 1);
    auto* inner = outer->tuple->as<Expr::Proj>();
    REQUIRE(inner);
    CHECK(inner->index == 0);
    CHECK(inner->tuple->as<Expr::Sync>()->target == "g");
}

TEST_CASE("tuple literal expressions") {
    Spec s = parse_spec("input x: Int64\noutput y := (1, -2, 0.5)\n");
    auto* lit = s.outputs[0].expr->as<Expr::Literal>();
    REQUIRE(lit);
    const auto& t = lit->value.as_tuple();
    REQUIRE(t.size() == 3);
    CHECK(t[0].as_int() == 1);
    CHECK(t[1].as_int() == -2);
    CHECK(value_bits_eq(t[2], Value(0.5)));
    // Non-literal elements are rejected: there is no tuple constructor.
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := (x, 1)\n"), ParseError);
}

TEST_CASE("operator precedence and associativity") {
    Spec s = parse_spec("input a, b, c: Int64\noutput y := a + b * c < a - b && true || false\n");
    // ((a + (b*c)) < (a-b)) && true) || false
    auto* orb = s.outputs[0].expr->as<Expr::Binary>();
    REQUIRE(orb);
    CHECK(orb->op == BinOp::Or);
    auto* andb = orb->lhs->as<Expr::Binary>();
    REQUIRE(andb);
    CHECK(andb->op == BinOp::And);
    auto* cmp = andb->lhs->as<Expr::Binary>();
    REQUIRE(cmp);
    CHECK(cmp->op == BinOp::Lt);
    CHECK(cmp->lhs->as<Expr::Binary>()->op == BinOp::Add);
    CHECK(cmp->lhs->as<Expr::Binary>()->rhs->as<Expr::Binary>()->op == BinOp::Mul);

    // Left associativity: a - b - c is (a - b) - c.
    s = parse_spec("input a, b, c: Int64\noutput y := a - b - c\n");
    auto* sub = s.outputs[0].expr->as<Expr::Binary>();
    CHECK(sub->lhs->as<Expr::Binary>()->op == BinOp::Sub);
    CHECK(sub->rhs->as<Expr::Sync>());

    // Comparisons do not chain.
    CHECK_THROWS_AS(parse_spec("input a, b, c: Int64\noutput y := a < b < c\n"), ParseError);
}

static SourcePos error_pos(const std::string& text) {
    try {
        parse_spec(text);
    } catch (const ParseError& e) {
        return e.pos;
    }
    FAIL("expected a parse error");
    return {};
}

TEST_CASE("errors carry positions") {
    SourcePos p = error_pos("input x: Int64\noutput y := x +\n");
    CHECK(p.line == 3);  // expression runs off the end of line 2

    p = error_pos("input x: Int64\noutput x := 1\n");
    CHECK(p.line == 2);
    CHECK(p.col == 8);  // duplicate name reported at the redeclaration

    p = error_pos("input x: Int64\noutput y := z + 1\n");
    CHECK(p.line == 2);
    CHECK(p.col == 13);  // unknown stream z

    p = error_pos("input x: Int64\noutput y @{x && y} := 1\n");
    CHECK(p.line == 2);
    CHECK(p.col == 17);  // activation condition over a non-input
}

TEST_CASE("malformed declarations are rejected") {
    CHECK_THROWS_AS(parse_spec("input x: Int32\noutput y := 1\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: (Int64)\noutput y := 1\n"), ParseError);  // arity >= 2
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.offset(by: 1)\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.offset(by: -1)\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.aggregate(over: 2s, using: avg)\n"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_spec("input x: Int64\noutput y := x.aggregate(over: 2s, using: count).defaults(to: 0)\n"),
        ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.aggregate(over: 0s, using: count)\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.aggregate(over: 2s, using: median)\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y @0Hz := 1\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.hold(or: z)\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := (x + 1).hold(or: 0)\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\ntrigger x > 0\n"), ParseError);  // missing message
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := \"text\"\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x ^ 2\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("input x: Int64\noutput y := x.1e3\n"), ParseError);
}

// ---- printing ----

TEST_CASE("printer goldens") {
    CHECK(float_str(1.0) == "1.0");
    CHECK(float_str(0.5) == "0.5");
    CHECK(float_str(-0.0) == "-0.0");
    CHECK(float_str(1e300) == "1e+300");

    Spec s = parse_spec("input a, b: Int64\noutput y @{a || b} := if a > 0 then a * (a + b) else -b\n");
    CHECK(print_spec(s) ==
          "input a: Int64\n"
          "input b: Int64\n"
          "\n"
          "output y @{a || b} := if a > 0 then a * (a + b) else -b\n");

    // Parentheses survive only where structure demands them.
    Spec t = parse_spec("input a, b: Int64\noutput y := ((a + b)) * ((a) - (b))\n");
    CHECK(print_expr(t.outputs[0].expr) == "(a + b) * (a - b)");

    Spec u = parse_spec("input a: Bool\noutput y := (if a then 1 else 2) + 1\n");
    CHECK(print_expr(u.outputs[0].expr) == "(if a then 1 else 2) + 1");

    Spec v = parse_spec("input a: (Int64, Bool)\noutput y := (1, 2).0 + a.0\n");
    CHECK(print_expr(v.outputs[0].expr) == "(1, 2).0 + a.0");
}

// ---- random round trip ----

namespace {

struct Gen {
    std::mt19937 rng;
    std::vector<std::string> stream_names;  // all declared names, for access targets
    std::vector<std::string> input_names;

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin() { return pick(0, 1) == 1; }

    Value literal_value(int depth, bool allow_negative) {
        switch (pick(0, depth > 0 ? 3 : 2)) {
            case 0: return Value(coin());
            case 1: {
                std::int64_t v = pick(0, 1000000);
                if (allow_negative && coin()) v = -v;
                if (allow_negative && pick(0, 99) == 0) return Value(INT64_MIN);
                return Value(v);
            }
            case 2: {
                double d = std::uniform_real_distribution<double>(0.0, 1000.0)(rng);
                if (pick(0, 9) == 0) d *= 1e280;  // exponent form
                if (allow_negative && coin()) d = -d;
                return Value(d);
            }
            default: {
                std::vector<Value> elems;
                for (int i = pick(2, 3); i > 0; --i)
                    elems.push_back(literal_value(depth - 1, true));
                return Value(std::move(elems));
            }
        }
    }

    ValueType random_type(int depth) {
        switch (pick(0, depth > 0 ? 3 : 2)) {
            case 0: return ValueType::boolean();
            case 1: return ValueType::int64();
            case 2: return ValueType::float64();
            default: {
                std::vector<ValueType> elems;
                for (int i = pick(2, 3); i > 0; --i) elems.push_back(random_type(depth - 1));
                return ValueType::tuple(std::move(elems));
            }
        }
    }

    Rational nice_rational() {
        std::int64_t d = 1;
        for (int k = pick(0, 3); k > 0; --k) d *= 2;
        for (int k = pick(0, 2); k > 0; --k) d *= 5;
        return Rational(pick(1, 50), d);
    }

    const std::string& any_stream() { return stream_names[pick(0, int(stream_names.size()) - 1)]; }

    ExprPtr expr(int depth) {
        switch (pick(0, depth > 0 ? 9 : 4)) {
            case 0: {
                // Top-level literals print without a sign; negatives live in
                // tuple elements or under explicit negation.
                Value v = literal_value(1, false);
                return make_literal(std::move(v));
            }
            case 1: return make_sync(any_stream());
            case 2: return make_sync(any_stream(), -pick(1, 3), literal_value(1, true));
            case 3: return make_hold(any_stream(), literal_value(1, true));
            case 4: {
                static const WinAgg aggs[] = {WinAgg::Count, WinAgg::Sum, WinAgg::Avg,
                                              WinAgg::Min,   WinAgg::Max, WinAgg::Exists};
                WinAgg a = aggs[pick(0, 5)];
                bool fb = a == WinAgg::Avg || a == WinAgg::Min || a == WinAgg::Max;
                return make_window(any_stream(), nice_rational(), a,
                                   fb ? std::optional<Value>(literal_value(1, true)) : std::nullopt);
            }
            case 5:
                return make_unary(coin() ? UnOp::Neg : UnOp::Not, expr(depth - 1));
            case 6: {
                static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                            BinOp::Mod, BinOp::Lt,  BinOp::Le,  BinOp::Gt,
                                            BinOp::Ge,  BinOp::Eq,  BinOp::Ne,  BinOp::And,
                                            BinOp::Or};
                return make_binary(ops[pick(0, 12)], expr(depth - 1), expr(depth - 1));
            }
            case 7: return make_ite(expr(depth - 1), expr(depth - 1), expr(depth - 1));
            case 8: {
                ExprPtr base = coin() ? make_sync(any_stream())
                                      : make_literal(literal_value(1, false));
                return make_proj(base, pick(0, 2));
            }
            default: return make_proj(expr(depth - 1), pick(0, 2));
        }
    }

    PacingType random_pacing() {
        if (coin()) return PacingType(nice_rational());
        std::vector<ActivationCondition> leaves;
        for (const auto& n : input_names) leaves.push_back(ActivationCondition::make_leaf(n));
        ActivationCondition ac = leaves[pick(0, int(leaves.size()) - 1)];
        for (int i = pick(0, 2); i > 0; --i) {
            const auto& other = leaves[pick(0, int(leaves.size()) - 1)];
            ac = coin() ? ActivationCondition::make_and({ac, other})
                        : ActivationCondition::make_or({ac, other});
        }
        return PacingType(ac);
    }

    Spec spec() {
        Spec s;
        stream_names.clear();
        input_names.clear();
        int n_inputs = pick(1, 3);
        for (int i = 0; i < n_inputs; ++i) {
            std::string name = "in" + std::to_string(i);
            s.inputs.push_back({name, random_type(1), {}});
            stream_names.push_back(name);
            input_names.push_back(name);
        }
        int n_outputs = pick(0, 4);
        for (int i = 0; i < n_outputs; ++i) {
            std::string name = "out" + std::to_string(i);
            stream_names.push_back(name);
        }
        for (int i = 0; i < n_outputs; ++i) {
            OutputDecl d;
            d.name = "out" + std::to_string(i);
            if (coin()) d.type = random_type(1);
            if (coin()) d.pacing = random_pacing();
            if (pick(0, 3) == 0) d.filter = expr(1);
            d.expr = expr(3);
            s.outputs.push_back(std::move(d));
        }
        for (int i = pick(0, 2); i > 0; --i) {
            TriggerDecl t;
            if (coin()) t.pacing = random_pacing();
            if (pick(0, 3) == 0) t.filter = expr(1);
            t.condition = expr(2);
            t.message = "alert \"x\"\n\tdone\\";
            s.triggers.push_back(std::move(t));
        }
        return s;
    }
};

}  // namespace

TEST_CASE("random specs survive print/parse round trips") {
    Gen gen;
    gen.rng.seed(1234);
    for (int i = 0; i < 1000; ++i) {
        Spec original = gen.spec();
        std::string text = print_spec(original);
        Spec reparsed;
        try {
            reparsed = parse_spec(text);
        } catch (const ParseError& e) {
            INFO(text);
            FAIL(std::string("reparse failed: ") + e.what());
        }
        INFO(text);
        CHECK(spec_eq(original, reparsed));
        // Printing is a fixpoint after one round.
        CHECK(print_spec(reparsed) == text);
    }
}
