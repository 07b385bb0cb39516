#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "xsr/harness/aggregate.hpp"
#include "xsr/harness/pipeline.hpp"

using namespace xsr;
using namespace xsr::harness;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Record stream with wall-clock timing fields zeroed; every other byte of
// the serialized stream must reproduce exactly.
std::string canonical_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json doc = nlohmann::json::parse(line);
        doc["fit_seconds"] = 0.0;
        if (doc.contains("explainers")) {
            for (auto& cell : doc["explainers"]) {
                if (cell["global"].contains("seconds")) cell["global"]["seconds"] = 0.0;
                if (cell["local"].contains("seconds")) cell["local"]["seconds"] = 0.0;
            }
        }
        out << doc.dump() << '\n';
    }
    return out.str();
}

ExperimentConfig smoke_config(const std::string& output_dir) {
    ExperimentConfig config = parse_config(R"(
[experiment]
datasets = kinematics-velocity, feynman-I.12.1
regressors = linear, tree, itea
explainers = pe, shap, random
repetitions = 2
explain_points = 4
neighborhood_samples = 8
seed = 99
workers = 2

[explainer]
lime_samples = 100
shap_samples = 64

[generation]
grid_train_target = 400

[grid.tree]
max_depth = 5, 10
max_leaf_nodes = 10

[grid.itea]
popsize = 20
gens = 15
)",
                                           "inline");
    config.output_dir = output_dir;
    return config;
}

}  // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig config = smoke_config("cfg_out");
    CHECK(config.datasets == std::vector<std::string>{"kinematics-velocity", "feynman-I.12.1"});
    CHECK(config.repetitions == 2);
    CHECK(config.seed == 99);
    CHECK(config.explainer.lime_samples == 100);
    CHECK(config.generation.grid_train_target == 400);
    REQUIRE(config.grid_overrides.count("tree") == 1);
    CHECK(config.grid_for("tree").axes.size() == 2);
    CHECK(config.grid_for("tree").cells() == 2);
    CHECK(config.grid_for("itea").cells() == 1);
    CHECK(config.grid_for("lasso").cells() == 5);  // stock grid untouched
    config.validate();

    CHECK_THROWS_AS(parse_config("[experiment]\nbogus_key = 1\n", "inline"), ConfigError);
    CHECK_THROWS_AS(parse_config("[bogus]\nk = 1\n", "inline"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nrepetitions = 0\n", "inline").validate(),
                    ConfigError);
}

TEST_CASE("record serialization round trip") {
    RunRecord record;
    record.dataset = "demo";
    record.regressor = "linear";
    record.hyper_params = {{"alpha", 0.1}};
    record.repetition = 3;
    record.seed = 0xFEEDFACEu;
    record.fit_seconds = 0.25;
    record.test_mae = 1.0 / 3.0;
    record.test_nmse = 0.123456789012345678;
    record.test_r2 = 0.875;
    record.expression_size = 11;
    record.hit = false;
    record.hit_symbolic = false;
    record.hit_numeric = false;

    ExplainerCell cell;
    cell.id = "shap";
    cell.global_status = "ok";
    cell.global_values = {0.5, -0.25};
    cell.global_seconds = 0.01;
    cell.global_cosine = 0.99;
    cell.global_nmse = 0.01;
    cell.local_status = "ok";
    cell.local_points = 2;
    cell.local_values = {{0.1, 0.2}, {0.3, 0.4}};
    cell.local_seconds = 0.02;
    cell.stability_mean = 1e-9;
    cell.infidelity_mean = 2e-8;
    cell.jaccard_mean = 1.0;
    LocalQuality quality;
    quality.cosine_mean = 0.5;
    quality.nmse_mean = 0.25;
    cell.local_quality = quality;
    record.explainers.push_back(cell);

    ExplainerCell skipped;
    skipped.id = "pe";
    skipped.global_status = "skipped";
    skipped.global_reason = "pe requires a symbolic form";
    skipped.local_status = "skipped";
    skipped.local_reason = "pe requires a symbolic form";
    record.explainers.push_back(skipped);

    const RunRecord loaded = RunRecord::from_json(record.to_json());
    CHECK(loaded.to_json() == record.to_json());
    CHECK(loaded.test_nmse == record.test_nmse);  // lossless doubles
    CHECK(loaded.explainers[0].local_values == cell.local_values);
    CHECK(loaded.explainers[1].global_status == "skipped");
}

TEST_CASE("pipeline end to end") {
    const auto root = std::filesystem::temp_directory_path() / "xsr_harness_test";
    std::filesystem::remove_all(root);

    ExperimentConfig config = smoke_config((root / "a").string());

    cmd_generate(config);
    CHECK(std::filesystem::exists(config.data_dir() / "kinematics-velocity.train.csv"));
    CHECK(std::filesystem::exists(config.data_dir() / "feynman-I.12.1.test.csv"));

    cmd_tune(config);
    CHECK(std::filesystem::exists(config.tuning_dir() / "kinematics-velocity__tree.json"));
    const nlohmann::json params = tuned_params(config, "kinematics-velocity", "tree");
    CHECK(params.contains("max_depth"));

    const int failures = cmd_run(config);
    CHECK(failures == 0);

    const auto records = read_records(config.records_path());
    // 2 datasets x (linear 1 + tree 1 + itea 2 reps) = 8 records.
    CHECK(records.size() == 8);
    for (const auto& record : records) {
        CHECK(record.status == "ok");
        REQUIRE(record.explainers.size() == 3);
        for (const auto& cell : record.explainers) {
            if (cell.id == "pe" && record.regressor == "tree") {
                CHECK(cell.local_status == "skipped");  // no symbolic form
            }
            if (cell.id == "shap") {
                CHECK(cell.local_status == "ok");
                CHECK(cell.local_points == 4);
            }
        }
    }

    // Determinism: a rerun into a second directory reproduces the record
    // stream byte for byte, wall-clock timings aside.
    ExperimentConfig second = smoke_config((root / "b").string());
    cmd_tune(second);
    CHECK(cmd_run(second) == 0);
    CHECK(canonical_records(config.records_path()) == canonical_records(second.records_path()));
    CHECK(slurp(config.tuning_dir() / "kinematics-velocity__tree.json") ==
          slurp(second.tuning_dir() / "kinematics-velocity__tree.json"));

    // Aggregate + report.
    const AggregateResult aggregate = cmd_aggregate(config);
    CHECK(aggregate.total_records == 8);
    CHECK(aggregate.failed_records == 0);
    CHECK(std::filesystem::exists(config.tables_dir() / "stability.csv"));
    CHECK(std::filesystem::exists(config.tables_dir() / "accuracy.csv"));
    const std::string report = cmd_report(config);
    CHECK(report.find("stability") != std::string::npos);
    CHECK(report.find('-') != std::string::npos);  // skipped pairs render as dashes

    std::filesystem::remove_all(root);
}

TEST_CASE("failure injection isolates the failing cell") {
    const auto root = std::filesystem::temp_directory_path() / "xsr_harness_fail";
    std::filesystem::remove_all(root);

    ExperimentConfig config = smoke_config((root / "x").string());
    config.inject_failure = "kinematics-velocity:itea:1";
    cmd_tune(config);
    const int failures = cmd_run(config);
    CHECK(failures == 1);

    const auto records = read_records(config.records_path());
    CHECK(records.size() == 8);
    int failed = 0;
    for (const auto& record : records) {
        if (record.status == "failed") {
            ++failed;
            CHECK(record.dataset == "kinematics-velocity");
            CHECK(record.regressor == "itea");
            CHECK(record.repetition == 1);
            CHECK(record.error.find("injected") != std::string::npos);
        }
    }
    CHECK(failed == 1);

    std::filesystem::remove_all(root);
}

TEST_CASE("aggregate requires records") {
    const auto root = std::filesystem::temp_directory_path() / "xsr_harness_empty";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    ExperimentConfig config;
    config.output_dir = root.string();
    std::ofstream(config.records_path()) << "";
    CHECK_THROWS_AS(cmd_aggregate(config), Error);
    std::filesystem::remove_all(root);
}
