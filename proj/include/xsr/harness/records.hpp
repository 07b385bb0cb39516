#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace xsr::harness {

// Averaged quality of local explanations against the ground truth.
struct LocalQuality {
    double cosine_mean = 0.0;
    double nmse_mean = 0.0;
    int degenerate_cosine = 0;  // points with a zero-vector comparison
    int degenerate_nmse = 0;    // points with zero-variance truth
};

// One explainer applied to one fitted model, both scopes.
struct ExplainerCell {
    std::string id;
    std::string global_status = "n/a";  // ok | skipped | failed | n/a
    std::string global_reason;
    std::vector<double> global_values;
    double global_seconds = 0.0;
    std::optional<double> global_cosine;
    std::optional<double> global_nmse;
    bool global_cosine_degenerate = false;
    bool global_nmse_degenerate = false;

    std::string local_status = "n/a";
    std::string local_reason;
    int local_points = 0;
    std::vector<std::vector<double>> local_values;  // one vector per explained point
    double local_seconds = 0.0;
    std::optional<double> stability_mean;
    std::optional<double> infidelity_mean;
    std::optional<double> jaccard_mean;
    std::optional<LocalQuality> local_quality;
};

// One (dataset x regressor x repetition) result cell.
struct RunRecord {
    std::string dataset;
    std::string regressor;
    nlohmann::json hyper_params;
    int repetition = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";  // ok | failed
    std::string error;

    double fit_seconds = 0.0;
    double test_mae = 0.0;
    double test_nmse = 0.0;
    double test_r2 = 0.0;
    bool nmse_degenerate = false;
    bool r2_degenerate = false;

    std::optional<int> expression_size;
    std::optional<bool> hit;
    std::optional<bool> hit_symbolic;
    std::optional<bool> hit_numeric;

    std::vector<ExplainerCell> explainers;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& doc);
};

std::vector<RunRecord> read_records(const std::filesystem::path& path);

}  // namespace xsr::harness
