#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "ensctrl/expr.hpp"

using namespace ensctrl::expr;

namespace {

// Independent reference evaluation so the differential test below does not
// trust the library's evaluator.
double reference_eval(const NodePtr& e, double beta) {
    switch (e->kind) {
        case NodeKind::Constant: return e->value;
        case NodeKind::Parameter: return beta;
        case NodeKind::Unary: return -reference_eval(e->lhs, beta);
        case NodeKind::Binary: {
            const double l = reference_eval(e->lhs, beta);
            const double r = reference_eval(e->rhs, beta);
            switch (e->op) {
                case BinaryOp::Add: return l + r;
                case BinaryOp::Sub: return l - r;
                case BinaryOp::Mul: return l * r;
                case BinaryOp::Div: return l / r;
                case BinaryOp::Pow: return std::pow(l, r);
            }
            return 0.0;
        }
        case NodeKind::Call: {
            const double x = reference_eval(e->lhs, beta);
            switch (e->func) {
                case Func::Sin: return std::sin(x);
                case Func::Cos: return std::cos(x);
                case Func::Tan: return std::tan(x);
                case Func::Exp: return std::exp(x);
                case Func::Log: return std::log(x);
                case Func::Sqrt: return std::sqrt(x);
                case Func::Abs: return std::abs(x);
            }
            return 0.0;
        }
    }
    return 0.0;
}

NodePtr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    auto node = std::make_shared<Node>();
    switch (pick(rng)) {
        case 0: {
            std::uniform_real_distribution<double> c(-3.0, 3.0);
            node->kind = NodeKind::Constant;
            node->value = c(rng);
            break;
        }
        case 1:
            node->kind = NodeKind::Parameter;
            node->param_name = "beta";
            break;
        case 2:
            node->kind = NodeKind::Unary;
            node->lhs = random_tree(rng, depth - 1);
            break;
        case 3: {
            node->kind = NodeKind::Binary;
            // Stick to total operations so random evaluation stays finite.
            const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul};
            node->op = ops[std::uniform_int_distribution<int>(0, 2)(rng)];
            node->lhs = random_tree(rng, depth - 1);
            node->rhs = random_tree(rng, depth - 1);
            break;
        }
        default: {
            node->kind = NodeKind::Call;
            const Func fns[] = {Func::Sin, Func::Cos, Func::Exp, Func::Abs};
            node->func = fns[std::uniform_int_distribution<int>(0, 3)(rng)];
            node->lhs = random_tree(rng, depth - 1);
            break;
        }
    }
    return node;
}

}  // namespace

TEST_CASE("expression parsing and evaluation basics") {
    CHECK(evaluate(parse("1 + 2 * 3"), 0.0) == doctest::Approx(7.0));
    CHECK(evaluate(parse("(1 + 2) * 3"), 0.0) == doctest::Approx(9.0));
    CHECK(evaluate(parse("beta^2"), -3.0) == doctest::Approx(9.0));
    CHECK(evaluate(parse("2^3^2"), 0.0) == doctest::Approx(512.0));  // right assoc
    CHECK(evaluate(parse("-beta^2"), 2.0) == doctest::Approx(-4.0));
    CHECK(evaluate(parse("cos(beta)"), 0.0) == doctest::Approx(1.0));
    CHECK(evaluate(parse("pi"), 0.0) == doctest::Approx(std::acos(-1.0)));
    CHECK(evaluate(parse("x^2 - 1", "x"), 3.0) == doctest::Approx(8.0));
    CHECK(evaluate(parse("1 - 2 - 3"), 0.0) == doctest::Approx(-4.0));
    CHECK(evaluate(parse("12 / 4 / 3"), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("parse errors carry an offset") {
    CHECK_THROWS_AS(parse("1 +"), ParseError);
    CHECK_THROWS_AS(parse("gamma + 1"), ParseError);
    CHECK_THROWS_AS(parse("sin(1"), ParseError);
    CHECK_THROWS_AS(parse("floor(1)"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
    try {
        parse("1 + @");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset >= 3);
        CHECK(e.offset <= 5);
    }
}

TEST_CASE("evaluation domain errors") {
    CHECK_THROWS_AS(evaluate(parse("1 / beta"), 0.0), EvalError);
    CHECK_THROWS_AS(evaluate(parse("log(beta)"), -1.0), EvalError);
    CHECK_THROWS_AS(evaluate(parse("sqrt(beta)"), -1.0), EvalError);
    try {
        evaluate(parse("1 + log(beta - 2)"), 1.0);
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.subexpr.find("log") != std::string::npos);
    }
}

TEST_CASE("printer round trip on random trees") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        const NodePtr tree = random_tree(rng, 4);
        const std::string text = to_string(tree);
        const NodePtr back = parse(text);
        CHECK(structurally_equal(tree, back));
        for (double beta : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
            const double want = reference_eval(tree, beta);
            CHECK(evaluate(back, beta) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("printed form uses minimal parentheses") {
    CHECK(to_string(parse("beta + 2 * beta")) == "beta + 2 * beta");
    CHECK(to_string(parse("(beta + 2) * beta")) == "(beta + 2) * beta");
    CHECK(to_string(parse("beta^2")) == "beta^2");
}
