#include <cctype>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xsr/harness/aggregate.hpp"
#include "xsr/harness/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string datasets, regressors, explainers, output_dir;
    std::uint64_t seed = 0;
    int workers = 0, repetitions = 0;
    double lambda = 0.0;
    bool seed_set = false, workers_set = false, repetitions_set = false, lambda_set = false;
};

void add_common_flags(CLI::App* cmd, CliOverrides& overrides) {
    cmd->add_option("--config", overrides.config_path, "Configuration file");
    cmd->add_option("--seed", overrides.seed, "Master seed")->each([&](const std::string&) {
        overrides.seed_set = true;
    });
    cmd->add_option("--workers", overrides.workers, "Concurrent cells")->each([&](const std::string&) {
        overrides.workers_set = true;
    });
    cmd->add_option("--repetitions", overrides.repetitions, "Repetitions for stochastic regressors")
        ->each([&](const std::string&) { overrides.repetitions_set = true; });
    cmd->add_option("--lambda", overrides.lambda, "Neighborhood-range factor")
        ->each([&](const std::string&) { overrides.lambda_set = true; });
    cmd->add_option("--output-dir", overrides.output_dir, "Output directory");
    cmd->add_option("--datasets", overrides.datasets, "Comma-separated dataset names");
    cmd->add_option("--regressors", overrides.regressors, "Comma-separated regressor ids");
    cmd->add_option("--explainers", overrides.explainers, "Comma-separated explainer ids");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    for (const char ch : value + ",") {
        if (ch == ',') {
            if (!current.empty()) items.push_back(current);
            current.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            current += ch;
        }
    }
    return items;
}

xsr::harness::ExperimentConfig resolve(const CliOverrides& overrides) {
    xsr::harness::ExperimentConfig config;
    if (!overrides.config_path.empty()) {
        config = xsr::harness::load_config_file(overrides.config_path);
    }
    if (!overrides.datasets.empty()) config.datasets = split_list(overrides.datasets);
    if (!overrides.regressors.empty()) config.regressors = split_list(overrides.regressors);
    if (!overrides.explainers.empty()) config.explainers = split_list(overrides.explainers);
    if (!overrides.output_dir.empty()) config.output_dir = overrides.output_dir;
    if (overrides.seed_set) config.seed = overrides.seed;
    if (overrides.workers_set) config.workers = overrides.workers;
    if (overrides.repetitions_set) config.repetitions = overrides.repetitions;
    if (overrides.lambda_set) config.lambda = overrides.lambda;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explanation-quality benchmark for symbolic and classical regression"};
    app.require_subcommand(1);

    CliOverrides overrides;
    CLI::App* generate = app.add_subcommand("generate", "Write train/test CSVs per dataset");
    CLI::App* tune = app.add_subcommand("tune", "Grid-search every dataset x regressor pair");
    CLI::App* run = app.add_subcommand("run", "Fit, score, and explain every cell");
    CLI::App* aggregate = app.add_subcommand("aggregate", "Summarize the record stream into tables");
    CLI::App* report = app.add_subcommand("report", "Render the aggregate as plain text");
    for (CLI::App* cmd : {generate, tune, run, aggregate, report}) {
        add_common_flags(cmd, overrides);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const xsr::harness::ExperimentConfig config = resolve(overrides);
        if (generate->parsed()) {
            xsr::harness::cmd_generate(config);
            std::cout << "datasets written to " << config.data_dir().string() << '\n';
        } else if (tune->parsed()) {
            xsr::harness::cmd_tune(config);
            std::cout << "tuning tables written to " << config.tuning_dir().string() << '\n';
        } else if (run->parsed()) {
            const int failures = xsr::harness::cmd_run(config);
            std::cout << "records written to " << config.records_path().string() << '\n';
            if (failures > 0) {
                std::cerr << failures << " cell(s) failed\n";
                return 1;
            }
        } else if (aggregate->parsed()) {
            const auto result = xsr::harness::cmd_aggregate(config);
            std::cout << "tables written to " << config.tables_dir().string() << " ("
                      << result.total_records << " records, " << result.failed_records
                      << " failed)\n";
        } else if (report->parsed()) {
            std::cout << xsr::harness::cmd_report(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
