#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "test_support.hpp"
#include "xsr/data/dataset.hpp"
#include "xsr/expr/eval.hpp"
#include "xsr/expr/parse.hpp"

using namespace xsr;
using namespace xsr::data;

namespace {

FeatureSpace unit_space(int d) {
    FeatureSpace space;
    for (int j = 0; j < d; ++j) space.names.push_back("f" + std::to_string(j));
    space.lower = Eigen::VectorXd::Constant(d, -1.0);
    space.upper = Eigen::VectorXd::Constant(d, 3.0);
    return space;
}

}  // namespace

TEST_CASE("registry carries the benchmark equations") {
    const auto& list = registry();
    CHECK(list.size() >= 14);  // 4 GP benchmarks + bundled physics subset

    const GroundTruth& korns = find_ground_truth(list, "korns-11");
    CHECK(korns.space.names == std::vector<std::string>{"x", "y", "z", "v", "w"});
    CHECK(korns.space.lower[0] == -50.0);
    CHECK(korns.space.upper[0] == 10.0);
    CHECK(korns.train_sampler.kind == SamplerSpec::Kind::Uniform);
    CHECK(korns.train_sampler.count == 1000);
    CHECK(korns.test_sampler.count == 100);

    const GroundTruth& pagie = find_ground_truth(list, "pagie-1");
    CHECK(pagie.train_sampler.kind == SamplerSpec::Kind::Grid);
    CHECK(pagie.train_sampler.step == 0.01);
    CHECK(pagie.test_sampler.step == 0.1);

    // Vladislavleva-4 at x_i = 3 for all i evaluates to 10/5 = 2.
    const GroundTruth& vlad = find_ground_truth(list, "vladislavleva-4");
    const Eigen::VectorXd threes = Eigen::VectorXd::Constant(5, 3.0);
    CHECK(expr::evaluate(vlad.tree, testing::as_span(threes)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(vlad.test_sampler.bounds.has_value());
    CHECK(vlad.test_sampler.bounds->first == -0.5);

    // Every registered equation evaluates finitely across its domain.
    for (const auto& gt : list) {
        const Eigen::MatrixXd X = sample_uniform(gt.space, 200, 11);
        const Eigen::VectorXd y = expr::evaluate_batch(gt.tree, X);
        int finite = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (std::isfinite(y[i])) ++finite;
        }
        CHECK(finite >= 198);  // >= 99%
    }
}

TEST_CASE("uniform sampling") {
    const FeatureSpace space = unit_space(3);
    CHECK(sample_uniform(space, 0, 1).rows() == 0);

    const Eigen::MatrixXd X = sample_uniform(space, 500, 42);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            CHECK(X(i, j) >= -1.0);
            CHECK(X(i, j) <= 3.0);
        }
    }

    // Law of large numbers: column means approach the midpoint within 1%.
    const Eigen::MatrixXd big = sample_uniform(space, 100000, 7);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(big.col(j).mean() == doctest::Approx(1.0).epsilon(0.01));
    }

    // Determinism.
    CHECK(sample_uniform(space, 50, 9) == sample_uniform(space, 50, 9));
}

TEST_CASE("grid sampling") {
    const Eigen::MatrixXd one_d = sample_grid(-5.0, 5.0, 0.1, 1);
    CHECK(one_d.rows() == 101);

    const Eigen::MatrixXd endpoints = sample_grid(0.0, 1.0, 1.0, 1);
    REQUIRE(endpoints.rows() == 2);
    CHECK(endpoints(0, 0) == 0.0);
    CHECK(endpoints(1, 0) == 1.0);

    // Pagie-1's training grid exceeds the default cap: 1001^2 points.
    CHECK_THROWS_AS(sample_grid(-5.0, 5.0, 0.01, 2), Error);
    CHECK(sample_grid(-5.0, 5.0, 0.01, 2, 1'100'000).rows() == 1001 * 1001);
}

TEST_CASE("latin hypercube stratification") {
    const FeatureSpace space = unit_space(2);
    const int n = 30;
    const Eigen::MatrixXd X = latin_hypercube(space, n, 3);
    for (Eigen::Index j = 0; j < 2; ++j) {
        std::set<int> strata;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double width = (space.upper[j] - space.lower[j]) / n;
            strata.insert(static_cast<int>(std::floor((X(i, j) - space.lower[j]) / width)));
        }
        CHECK(strata.size() == n);  // every stratum covered exactly once
    }

    const Eigen::MatrixXd single = latin_hypercube(space, 1, 5);
    CHECK(single(0, 0) >= space.lower[0]);
    CHECK(single(0, 0) <= space.upper[0]);

    // Different seeds pair strata differently but keep full coverage.
    const Eigen::MatrixXd other = latin_hypercube(space, n, 4);
    CHECK(X != other);
}

TEST_CASE("generate produces clean, deterministic datasets") {
    const auto& list = registry();
    const GroundTruth& korns = find_ground_truth(list, "korns-11");
    const auto [train, test] = generate(korns, 1);
    CHECK(train.rows() == 1000);
    CHECK(test.rows() == 100);
    CHECK(train.y.allFinite());
    CHECK(test.y.allFinite());

    const auto [train2, test2] = generate(korns, 1);
    CHECK(train.X == train2.X);
    CHECK(train.y == train2.y);
    CHECK(test.X == test2.X);

    // Pagie-1: the full grid is subsampled down to the training target.
    const GroundTruth& pagie = find_ground_truth(list, "pagie-1");
    const auto [ptrain, ptest] = generate(pagie, 2);
    CHECK(ptrain.rows() == 1000);
    CHECK(ptest.rows() == 101 * 101);
    CHECK(ptrain.y.allFinite());

    // LHS test sets stratify over the observed training range.
    const GroundTruth& osc = find_ground_truth(list, "oscillator-displacement");
    const auto [otrain, otest] = generate(osc, 3);
    CHECK(otest.rows() == 30);
    CHECK(otest.X.col(0).minCoeff() >= otrain.X.col(0).minCoeff());
    CHECK(otest.X.col(0).maxCoeff() <= otrain.X.col(0).maxCoeff());
}

TEST_CASE("generation starvation is reported") {
    // log(x) on [-2, -1] never evaluates finite.
    FeatureSpace space;
    space.names = {"x"};
    space.lower = Eigen::VectorXd::Constant(1, -2.0);
    space.upper = Eigen::VectorXd::Constant(1, -1.0);
    GroundTruth bad{"starved", expr::parse("log(x)", space.names), space,
                    SamplerSpec::uniform(100), SamplerSpec::uniform(10)};
    CHECK_THROWS_AS(generate(bad, 1), Error);
}

TEST_CASE("manifest parsing") {
    const auto list = parse_manifest(
        "# comment\n"
        "demo | 2*a + b | a:0:1,b:-1:1 | uniform(50) | lhs(10)\n",
        "inline");
    REQUIRE(list.size() == 1);
    CHECK(list[0].name == "demo");
    CHECK(list[0].space.names == std::vector<std::string>{"a", "b"});
    CHECK(list[0].test_sampler.kind == SamplerSpec::Kind::LatinHypercube);

    CHECK_THROWS_AS(parse_manifest("bad record\n", "inline"), ParseError);
    CHECK_THROWS_AS(parse_manifest("d | a+ | a:0:1 | uniform(5) | lhs(5)\n", "inline"), ParseError);
    CHECK_THROWS_AS(parse_manifest("d | a | a:0:1 | lhs(5) | lhs(5)\n", "inline"), ParseError);
}

TEST_CASE("csv round trip") {
    const auto& list = registry();
    const GroundTruth& osc = find_ground_truth(list, "oscillator-displacement");
    const auto [train, test] = generate(osc, 9);

    const auto path = std::filesystem::temp_directory_path() / "xsr_csv_test.csv";
    write_csv(path, test);
    const Dataset loaded = read_csv(path);
    CHECK(loaded.space.names == test.space.names);
    CHECK(loaded.X == test.X);
    CHECK(loaded.y == test.y);
    std::filesystem::remove(path);
}
