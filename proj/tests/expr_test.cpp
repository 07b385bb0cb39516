#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "xsr/expr/derive.hpp"
#include "xsr/expr/eval.hpp"
#include "xsr/expr/it_expression.hpp"
#include "xsr/expr/parse.hpp"
#include "xsr/expr/simplify.hpp"

using namespace xsr;
using namespace xsr::expr;
using xsr::testing::as_span;

namespace {

const std::vector<std::string> kXy = {"x", "y"};
const std::vector<std::string> kX = {"x"};

double eval_at(const ExprTree& tree, std::initializer_list<double> values) {
    const std::vector<double> x(values);
    return evaluate(tree, x);
}

}  // namespace

TEST_CASE("evaluate basics") {
    // Korns-11 shape at x = 0: 6.87 + 11 cos(0) = 17.87.
    const std::vector<std::string> names = {"x", "y", "z", "v", "w"};
    const ExprTree korns = parse("6.87 + 11*cos(7.23*x^3)", names);
    CHECK(eval_at(korns, {0.0, 1.0, 2.0, 3.0, 4.0}) == doctest::Approx(17.87).epsilon(1e-12));

    CHECK(eval_at(parse("x", kX), {3.5}) == 3.5);
    CHECK(!std::isfinite(eval_at(parse("log(x)", kX), {-1.0})));
    CHECK(std::isnan(eval_at(parse("asin(x)", kX), {2.0})));
    CHECK(std::isinf(eval_at(parse("1/x", kX), {0.0})));
}

TEST_CASE("evaluate index contract") {
    const ExprTree tree(x(3));
    const std::vector<double> point = {1.0, 2.0};
    CHECK_THROWS_AS(evaluate(tree, point), ContractError);

    const ExprTree with_param(add(x(0), p(1)));
    const std::vector<double> params = {1.0};
    CHECK_THROWS_AS(evaluate(with_param, point, params), ContractError);
}

TEST_CASE("evaluate_batch matches scalar evaluation bit for bit") {
    Rng rng(11);
    const ExprTree pagie = parse("1/(1 + x^(-4)) + 1/(1 + y^(-4))", kXy);
    Eigen::MatrixXd single(1, 2);
    single << 1.0, 1.0;
    CHECK(evaluate_batch(pagie, single)[0] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(evaluate_batch(pagie, Eigen::MatrixXd(0, 2)).size() == 0);

    for (int trial = 0; trial < 10; ++trial) {
        const ExprTree tree = testing::random_tree(rng, 3);
        Eigen::MatrixXd X(100, 3);
        for (int i = 0; i < 100; ++i) X.row(i) = testing::random_point(rng, 3).transpose();
        const Eigen::VectorXd batch = evaluate_batch(tree, X);
        for (int i = 0; i < 100; ++i) {
            const Eigen::VectorXd row = X.row(i);
            const double scalar = evaluate(tree, as_span(row));
            if (std::isnan(scalar)) {
                CHECK(std::isnan(batch[i]));
            } else {
                CHECK(batch[i] == scalar);  // bit-identical
            }
        }
    }
}

TEST_CASE("differentiate hand cases") {
    const ExprTree square = parse("x^2", kX);
    const ExprTree d_square = differentiate(square, 0);
    CHECK(eval_at(d_square, {3.0}) == doctest::Approx(6.0));

    // d/dx (3x + 2y) is the constant 3.
    const ExprTree affine = parse("3*x + 2*y", kXy);
    const ExprTree d_affine = differentiate(affine, 0);
    CHECK(d_affine.root()->kind() == Node::Kind::Constant);
    CHECK(d_affine.root()->value() == 3.0);

    const ExprTree wave = parse("cos(7.23*x^3)", kX);
    const ExprTree d_wave = differentiate(wave, 0);
    const double h = 1e-6;
    const double fd = (eval_at(wave, {0.5 + h}) - eval_at(wave, {0.5 - h})) / (2 * h);
    CHECK(eval_at(d_wave, {0.5}) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("differentiate matches central finite differences on random trees") {
    Rng rng(1234);
    int verified = 0;
    while (verified < 200) {
        const ExprTree tree = testing::random_tree(rng, 2);
        ExprTree derivative(c(0.0));
        bool has_rule = true;
        try {
            derivative = differentiate(tree, 0);
        } catch (const Error&) {
            has_rule = false;
        }
        if (!has_rule) continue;

        // Search for a point where the tree and the difference quotient are
        // both finite and well conditioned.
        for (int attempt = 0; attempt < 25; ++attempt) {
            const Eigen::VectorXd point = testing::random_point(rng, 2);
            const double h = 1e-6 * std::max(1.0, std::abs(point[0]));
            Eigen::VectorXd hi = point, lo = point;
            hi[0] += h;
            lo[0] -= h;
            const double f_hi = evaluate(tree, as_span(hi));
            const double f_lo = evaluate(tree, as_span(lo));
            const double value = evaluate(derivative, as_span(point));
            if (!std::isfinite(f_hi) || !std::isfinite(f_lo) || !std::isfinite(value)) continue;
            if (std::abs(f_hi) > 1e5 || std::abs(f_lo) > 1e5 || std::abs(value) > 1e5) continue;

            const double fd = (f_hi - f_lo) / (2 * h);
            // Half-step agreement guards against points where the quotient
            // itself is unstable.
            Eigen::VectorXd hi2 = point, lo2 = point;
            hi2[0] += h / 2;
            lo2[0] -= h / 2;
            const double fd2 =
                (evaluate(tree, as_span(hi2)) - evaluate(tree, as_span(lo2))) / h;
            const double tolerance = std::max(1e-5, 1e-4 * std::abs(value));
            if (!std::isfinite(fd2) || std::abs(fd - fd2) > 0.25 * tolerance) continue;

            CHECK(std::abs(value - fd) <= tolerance);
            ++verified;
            break;
        }
    }
    CHECK(verified == 200);
}

TEST_CASE("differentiate parameters") {
    // d/dtheta0 of theta0 * sin(x) evaluated at x: sin(x).
    const ExprTree tree(mul(p(0), unary(UnaryOp::Sin, x(0))));
    const ExprTree derivative = differentiate(tree, wrt_parameter(0));
    const std::vector<double> point = {0.7};
    const std::vector<double> params = {2.5};
    CHECK(evaluate(derivative, point, params) == doctest::Approx(std::sin(0.7)).epsilon(1e-12));
}

TEST_CASE("simplify rewrites") {
    const ExprTree f = parse("cos(x) + x*y", kXy);
    const ExprTree difference(sub(f.root(), parse("y*x + cos(x)", kXy).root()));
    const ExprTree zero = simplify(difference);
    REQUIRE(zero.root()->kind() == Node::Kind::Constant);
    CHECK(zero.root()->value() == 0.0);

    const ExprTree identity = simplify(parse("1*x + 0", kX));
    CHECK(identity.root()->kind() == Node::Kind::Variable);

    const ExprTree folded = simplify(parse("2*3", kX));
    REQUIRE(folded.root()->kind() == Node::Kind::Constant);
    CHECK(folded.root()->value() == 6.0);

    const ExprTree power_zero = simplify(ExprTree(Node::binary(BinaryOp::Pow, x(0), c(0.0))));
    REQUIRE(power_zero.root()->kind() == Node::Kind::Constant);
    CHECK(power_zero.root()->value() == 1.0);
}

TEST_CASE("simplify preserves evaluation") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const ExprTree tree = testing::random_tree(rng, 2);
        const ExprTree simplified = simplify(tree);
        for (int i = 0; i < 20; ++i) {
            const Eigen::VectorXd point = testing::random_point(rng, 2);
            const double a = evaluate(tree, as_span(point));
            if (!std::isfinite(a)) continue;
            const double b = evaluate(simplified, as_span(point));
            CHECK(b == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("hit detection") {
    const Eigen::VectorXd lower = Eigen::VectorXd::Constant(1, -2.0);
    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(1, 2.0);

    const ExprTree truth = parse("2*x", kX);
    CHECK(check_hit(truth, truth, lower, upper).symbolic);

    const ExprTree shifted = parse("2*x + 0.001", kX);
    CHECK_FALSE(is_hit(shifted, truth, lower, upper));

    // x + x vs 2x: caught by the numeric fallback, not the simplifier.
    const ExprTree doubled = parse("x + x", kX);
    const HitCheck check = check_hit(doubled, truth, lower, upper);
    CHECK(check.numeric);
    CHECK(check.hit());
}

TEST_CASE("size") {
    CHECK(ExprTree(c(1.0)).size() == 1);
    CHECK(parse("x + y", kXy).size() == 3);
    // Frozen node count for the Pagie-1 formula as built by the parser:
    // each x^(-4) expands to div(1, ((x*x)*x)*x).
    CHECK(parse("1/(1 + x^(-4)) + 1/(1 + y^(-4))", kXy).size() == 27);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse("1 + (2", kX), ParseError);
    CHECK_THROWS_AS(parse("unknown_var + 1", kX), ParseError);
    CHECK_THROWS_AS(parse("foo(x)", kX), ParseError);
    try {
        parse("x + bad", kX);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("parse round-trips through infix rendering") {
    Rng rng(99);
    const std::vector<std::string> names = {"a", "b", "c"};
    for (int trial = 0; trial < 50; ++trial) {
        const ExprTree tree = testing::random_tree(rng, 3);
        const ExprTree reparsed = parse(format_infix(tree, names), names);
        for (int i = 0; i < 20; ++i) {
            const Eigen::VectorXd point = testing::random_point(rng, 3);
            const double a = evaluate(tree, as_span(point));
            const double b = evaluate(reparsed, as_span(point));
            if (std::isfinite(a)) {
                CHECK(b == doctest::Approx(a).epsilon(1e-12));
            } else {
                CHECK_FALSE(std::isfinite(b));
            }
        }
    }
}

TEST_CASE("prefix serialization round-trips structurally") {
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const ExprTree tree = testing::random_tree(rng, 3);
        const ExprTree reparsed = parse_prefix(format_prefix(tree));
        CHECK(structurally_equal(tree.root(), reparsed.root()));
    }
    // Parameters survive serialization too.
    const ExprTree with_param(add(mul(p(0), x(1)), p(1)));
    CHECK(structurally_equal(with_param.root(), parse_prefix(format_prefix(with_param)).root()));
}

TEST_CASE("it expression lowering") {
    ITExpression it;
    it.intercept = 1.0;
    it.terms.push_back({UnaryOp::Id, {1, 1}, 2.0});
    const ExprTree tree = it_to_tree(it);
    CHECK(eval_at(tree, {2.0, 3.0}) == doctest::Approx(13.0).epsilon(1e-12));

    ITExpression empty;
    empty.intercept = -2.5;
    const ExprTree constant = it_to_tree(empty);
    REQUIRE(constant.root()->kind() == Node::Kind::Constant);
    CHECK(constant.root()->value() == -2.5);

    // cos transform with a scaled variable reproduces the Korns-11 shape up
    // to the inner constant.
    ITExpression korns;
    korns.intercept = 6.87;
    korns.terms.push_back({UnaryOp::Cos, {3}, 11.0});
    const ExprTree korns_tree = it_to_tree(korns);
    const ExprTree reference = parse("6.87 + 11*cos(7.23*x^3)", kX);
    const double scale = std::cbrt(7.23);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const double u = rng.uniform(-2.0, 2.0);
        CHECK(eval_at(korns_tree, {scale * u}) ==
              doctest::Approx(eval_at(reference, {u})).epsilon(1e-9));
    }

    ITExpression bad;
    bad.terms.push_back({UnaryOp::Id, {0, 0}, 1.0});
    CHECK_THROWS_AS(it_to_tree(bad), ContractError);

    ITExpression duplicate;
    duplicate.terms.push_back({UnaryOp::Sin, {1, 0}, 1.0});
    duplicate.terms.push_back({UnaryOp::Sin, {1, 0}, 2.0});
    CHECK_THROWS_AS(it_to_tree(duplicate), ContractError);

    // Negative strengths lower to divisions and keep IEEE semantics.
    ITExpression inverse;
    inverse.terms.push_back({UnaryOp::Id, {-1}, 1.0});
    CHECK(std::isinf(eval_at(it_to_tree(inverse), {0.0})));
}

TEST_CASE("substitute parameters") {
    const ExprTree tree(add(mul(p(0), x(0)), p(1)));
    const std::vector<double> theta = {2.0, -1.0};
    const ExprTree baked = substitute_parameters(tree, theta);
    CHECK(baked.parameter_count() == 0);
    CHECK(eval_at(baked, {3.0}) == 5.0);
}
