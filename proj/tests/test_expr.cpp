#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <thread>
#include <vector>

#include "escna/expr.hpp"

using namespace escna;
using namespace escna::expr;

namespace {

double eval1(const std::string& src, double x1, double t = 0.0) {
    auto vars = VariableSet::state_time(1);
    auto e = parse_expr(src, vars);
    std::vector<double> vals = {t, x1};
    return eval_expr(*e, vals);
}

double evalu(const std::string& src, double u) {
    auto vars = VariableSet::control_input();
    auto e = parse_expr(src, vars);
    std::vector<double> vals = {u};
    return eval_expr(*e, vals);
}

} // namespace

TEST_CASE("variable sets") {
    auto vars = VariableSet::state_time(3);
    CHECK(vars.size() == 4);
    CHECK(vars.name(0) == "t");
    CHECK(vars.name(1) == "x1");
    CHECK(vars.name(3) == "x3");
    CHECK(vars.find("x2") == 2);
    CHECK(!vars.find("x4").has_value());
    CHECK(!vars.find("u").has_value());

    auto ctrl = VariableSet::control_input();
    CHECK(ctrl.size() == 1);
    CHECK(ctrl.find("u") == 0);
}

TEST_CASE("arithmetic and precedence") {
    CHECK(eval1("1 + 2 * 3", 0.0) == doctest::Approx(7.0));
    CHECK(eval1("(1 + 2) * 3", 0.0) == doctest::Approx(9.0));
    CHECK(eval1("2 - 3 - 4", 0.0) == doctest::Approx(-5.0)); // left assoc
    CHECK(eval1("12 / 3 / 2", 0.0) == doctest::Approx(2.0));
    CHECK(eval1("x1^2", 3.0) == doctest::Approx(9.0));

    // ^ is right associative and binds tighter than unary minus.
    CHECK(eval1("2^3^2", 0.0) == doctest::Approx(512.0));
    CHECK(eval1("-2^2", 0.0) == doctest::Approx(-4.0));
    CHECK(eval1("(-2)^2", 0.0) == doctest::Approx(4.0));

    // Unary minus below */: -2*3 parses as -(2*3) either way, but -x1^2*2
    // must be -((x1^2)*2).
    CHECK(eval1("-x1^2*2", 3.0) == doctest::Approx(-18.0));
}

TEST_CASE("functions") {
    CHECK(eval1("cos(0)", 0.0) == doctest::Approx(1.0));
    CHECK(eval1("sin(t)", 0.0, 1.0) == doctest::Approx(std::sin(1.0)));
    CHECK(eval1("exp(1)", 0.0) == doctest::Approx(std::exp(1.0)));
    CHECK(eval1("abs(-3.5)", 0.0) == doctest::Approx(3.5));
    CHECK(eval1("sqrt(2)", 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(eval1("min(2, x1)", 5.0) == doctest::Approx(2.0));
    CHECK(eval1("max(2, x1)", 5.0) == doctest::Approx(5.0));

    // sgn is the total version: sgn(0) = 0.
    CHECK(evalu("sgn(u)", 2.5) == doctest::Approx(1.0));
    CHECK(evalu("sgn(u)", -2.5) == doctest::Approx(-1.0));
    CHECK(evalu("sgn(u)", 0.0) == doctest::Approx(0.0));
}

TEST_CASE("identity evaluation") {
    CHECK(eval1("x1", 3.5) == doctest::Approx(3.5));
}

TEST_CASE("parse errors") {
    auto vars = VariableSet::state_time(2);
    CHECK_THROWS_AS(parse_expr("x3", vars), ParseError);        // unknown variable
    CHECK_THROWS_AS(parse_expr("y", vars), ParseError);         // unknown identifier
    CHECK_THROWS_AS(parse_expr("foo(x1)", vars), ParseError);   // unknown function
    CHECK_THROWS_AS(parse_expr("min(x1)", vars), ParseError);   // arity
    CHECK_THROWS_AS(parse_expr("cos(x1, x2)", vars), ParseError);
    CHECK_THROWS_AS(parse_expr("1 +", vars), ParseError);
    CHECK_THROWS_AS(parse_expr("(x1", vars), ParseError);
    CHECK_THROWS_AS(parse_expr("", vars), ParseError);
    CHECK_THROWS_AS(parse_expr("x1 x2", vars), ParseError);     // trailing garbage
    CHECK_THROWS_AS(parse_expr("2x1", vars), ParseError);       // no implicit multiplication
    CHECK_THROWS_AS(parse_expr("1..5", vars), ParseError);
}

TEST_CASE("eval domain errors") {
    CHECK_THROWS_AS(eval1("1/ (x1 - 3)", 3.0), EvalError);
    CHECK_THROWS_AS(eval1("sqrt(x1)", -1.0), EvalError);
    CHECK(eval1("sqrt(x1)", 0.0) == doctest::Approx(0.0));
}

TEST_CASE("map-based evaluation") {
    auto vars = VariableSet::state_time(2);
    auto e = parse_expr("t + x1 * x2", vars);
    std::map<std::string, double> bind = {{"t", 1.0}, {"x1", 2.0}, {"x2", 3.0}};
    CHECK(eval_expr(*e, vars, bind) == doctest::Approx(7.0));

    // A missing binding for a referenced variable is an error.
    std::map<std::string, double> partial = {{"t", 1.0}, {"x1", 2.0}};
    CHECK_THROWS_AS(eval_expr(*e, vars, partial), EvalError);
}

TEST_CASE("free slots") {
    auto vars = VariableSet::state_time(3);
    auto e = parse_expr("x3 + cos(x1) + x3", vars);
    auto slots = free_slots(*e);
    CHECK(slots == std::vector<int>{1, 3}); // ascending, deduplicated

    auto c = parse_expr("1 + 2", vars);
    CHECK(free_slots(*c).empty());
}

TEST_CASE("high precision constants survive parsing") {
    // 17 significant digits round-trip through the lexer.
    double v = eval1("0.59874141715197818", 0.0);
    CHECK(v == 0.59874141715197818);
}

namespace {

// Random smooth expression trees for the differentiation check. Stick to
// everywhere-differentiable pieces so the finite-difference comparison is
// clean: +, -, *, neg, cos, sin, and squares/cubes via ^.
ExprPtr random_smooth(std::mt19937& rng, const VariableSet& vars, int depth) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    if (depth == 0) {
        if (rng() % 2 == 0) return constant(coef(rng));
        int slot = static_cast<int>(rng() % static_cast<unsigned>(vars.size()));
        return variable(slot, vars.name(slot));
    }
    switch (rng() % 6) {
    case 0: return add(random_smooth(rng, vars, depth - 1), random_smooth(rng, vars, depth - 1));
    case 1: return sub(random_smooth(rng, vars, depth - 1), random_smooth(rng, vars, depth - 1));
    case 2: return mul(random_smooth(rng, vars, depth - 1), random_smooth(rng, vars, depth - 1));
    case 3: return neg(random_smooth(rng, vars, depth - 1));
    case 4: return call(rng() % 2 ? Func::Cos : Func::Sin,
                        {random_smooth(rng, vars, depth - 1)});
    default: {
        int exponent = 2 + static_cast<int>(rng() % 2);
        return pow(random_smooth(rng, vars, depth - 1), constant(exponent));
    }
    }
}

} // namespace

TEST_CASE("derivatives match finite differences on random smooth trees") {
    auto vars = VariableSet::state_time(2);
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> point(-1.5, 1.5);

    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto e = random_smooth(rng, vars, 3);
        for (int slot = 0; slot < vars.size(); ++slot) {
            auto d = diff_expr(*e, slot);
            std::vector<double> at = {point(rng), point(rng), point(rng)};

            double analytic = eval_expr(*d, at);
            const double h = 1e-6;
            auto lo = at, hi = at;
            lo[static_cast<std::size_t>(slot)] -= h;
            hi[static_cast<std::size_t>(slot)] += h;
            double fd = (eval_expr(*e, hi) - eval_expr(*e, lo)) / (2 * h);

            // Skip points where the value itself is astronomically large
            // (x^3 towers); FD cancellation noise swamps everything there.
            if (std::abs(eval_expr(*e, at)) > 1e6) continue;
            CHECK(analytic == doctest::Approx(fd).epsilon(1e-4).scale(1.0 + std::abs(fd)));
            ++checked;
        }
    }
    CHECK(checked > 1500); // the skip above must stay rare
}

TEST_CASE("derivative rules at kinks") {
    // abs differentiates to sgn, so the derivative at 0 is 0, and min/max
    // split the difference on ties.
    auto vars = VariableSet::control_input();
    auto e = parse_expr("abs(u)", vars);
    auto d = diff_expr(*e, 0);
    std::vector<double> at = {0.0};
    CHECK(eval_expr(*d, at) == doctest::Approx(0.0));
    at[0] = 2.0;
    CHECK(eval_expr(*d, at) == doctest::Approx(1.0));
    at[0] = -2.0;
    CHECK(eval_expr(*d, at) == doctest::Approx(-1.0));

    auto m = parse_expr("min(u, 2*u)", vars);
    auto dm = diff_expr(*m, 0);
    at[0] = 1.0;
    CHECK(eval_expr(*dm, at) == doctest::Approx(1.0)); // min is u for u > 0
    at[0] = -1.0;
    CHECK(eval_expr(*dm, at) == doctest::Approx(2.0)); // min is 2u for u < 0
    at[0] = 0.0;
    CHECK(eval_expr(*dm, at) == doctest::Approx(1.5)); // tie: two-sided average

    // Power rule requires a constant exponent.
    auto p = parse_expr("2^u", vars);
    CHECK_THROWS_AS(diff_expr(*p, 0), EvalError);
}

TEST_CASE("print then parse is structurally identity") {
    auto vars = VariableSet::state_time(2);
    std::mt19937 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        auto e = random_smooth(rng, vars, 4);
        auto printed = print_expr(*e);
        auto back = parse_expr(printed, vars);
        CHECK(structurally_equal(e, back));
    }

    // Spot-check that printing respects precedence with minimal parens.
    auto e = parse_expr("(x1 + 1) * x2", vars);
    auto back = parse_expr(print_expr(*e), vars);
    CHECK(structurally_equal(e, back));
    std::vector<double> at = {0.0, 3.0, 5.0};
    CHECK(eval_expr(*back, at) == doctest::Approx(20.0));
}

TEST_CASE("constant folding") {
    auto vars = VariableSet::state_time(1);

    // The parser keeps raw nodes; fold_constants collapses them.
    auto e = parse_expr("1 + 2 * 3", vars);
    auto folded = fold_constants(e);
    CHECK(structurally_equal(folded, constant(7.0)));

    // Identity folds: x*1, x+0, x^1.
    auto idy = fold_constants(parse_expr("x1 * 1 + 0", vars));
    CHECK(structurally_equal(idy, variable(1, "x1")));
    auto pw = fold_constants(parse_expr("x1 ^ 1", vars));
    CHECK(structurally_equal(pw, variable(1, "x1")));

    // Builders fold on construction.
    CHECK(structurally_equal(mul(constant(2.0), constant(3.0)), constant(6.0)));
    CHECK(structurally_equal(add(variable(1, "x1"), constant(0.0)), variable(1, "x1")));
    CHECK(structurally_equal(mul(variable(1, "x1"), constant(0.0)), constant(0.0)));

    // Unary minus on a literal is a negative constant straight from parse.
    auto n = parse_expr("-3", vars);
    CHECK(structurally_equal(n, constant(-3.0)));
}

TEST_CASE("structural equality distinguishes shape") {
    auto vars = VariableSet::state_time(2);
    CHECK(!structurally_equal(parse_expr("x1 + x2", vars), parse_expr("x2 + x1", vars)));
    CHECK(!structurally_equal(parse_expr("x1", vars), parse_expr("x2", vars)));
    CHECK(!structurally_equal(parse_expr("cos(x1)", vars), parse_expr("sin(x1)", vars)));
    CHECK(structurally_equal(parse_expr("x1 + x2", vars), parse_expr("x1 + x2", vars)));
}

TEST_CASE("expressions evaluate concurrently") {
    // Trees are immutable and shared; hammer one from several threads.
    auto vars = VariableSet::state_time(1);
    auto e = parse_expr("cos(t) * x1^2 + sin(t * x1)", vars);

    std::vector<std::thread> pool;
    std::vector<int> failures(4, 0);
    for (int w = 0; w < 4; ++w) {
        pool.emplace_back([&, w] {
            for (int i = 0; i < 20000; ++i) {
                double t = 0.001 * i;
                std::vector<double> at = {t, 1.5};
                double got = eval_expr(*e, at);
                double want = std::cos(t) * 2.25 + std::sin(t * 1.5);
                if (std::abs(got - want) > 1e-12) ++failures[static_cast<std::size_t>(w)];
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int w = 0; w < 4; ++w) CHECK(failures[static_cast<std::size_t>(w)] == 0);
}
