#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xsr/data/dataset.hpp"
#include "xsr/explain/explainers.hpp"
#include "xsr/regress/grid_search.hpp"

namespace xsr::harness {

struct ExperimentConfig {
    std::vector<std::string> datasets;    // empty selects the whole registry
    std::vector<std::string> regressors;  // empty selects every registered regressor
    std::vector<std::string> explainers;  // empty selects every registered explainer

    int repetitions = 30;         // stochastic regressors only; deterministic ones run once
    double lambda = 0.001;        // neighborhood-range factor
    int jaccard_k = 1;
    int neighborhood_samples = 30;
    int explain_points = 30;      // local-explanation budget per cell
    std::uint64_t seed = 42;
    int workers = 1;
    std::string output_dir = "out";
    std::string manifest;         // optional extra equation manifest
    std::string inject_failure;   // "dataset:regressor:repetition" test hook

    explain::ExplainerConfig explainer;
    data::GenerateOptions generation;
    std::map<std::string, regress::HyperGrid> grid_overrides;

    void validate() const;

    // Registry (plus optional manifest) filtered down to the selection.
    std::vector<data::GroundTruth> resolve_datasets() const;
    std::vector<std::string> resolve_regressors() const;
    std::vector<std::string> resolve_explainers() const;

    std::filesystem::path data_dir() const { return std::filesystem::path(output_dir) / "data"; }
    std::filesystem::path tuning_dir() const { return std::filesystem::path(output_dir) / "tuning"; }
    std::filesystem::path tables_dir() const { return std::filesystem::path(output_dir) / "tables"; }
    std::filesystem::path records_path() const {
        return std::filesystem::path(output_dir) / "records.jsonl";
    }

    const regress::HyperGrid& grid_for(const std::string& regressor_id) const;
};

// Key/value configuration with [section] headers; '#' starts a comment.
// Unknown keys are rejected.
ExperimentConfig load_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view text, std::string_view source_name);

}  // namespace xsr::harness
