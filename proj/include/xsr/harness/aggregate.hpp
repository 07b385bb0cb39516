#pragma once

#include <map>
#include <string>
#include <vector>

#include "xsr/harness/config.hpp"
#include "xsr/harness/records.hpp"

namespace xsr::harness {

// regressor x explainer table of median +/- IQR cells; absent pairs are "-".
struct MeasureTable {
    std::string measure;
    bool lower_is_better = true;
    std::vector<std::string> regressors;                 // row labels
    std::vector<std::string> explainers;                 // column labels
    std::vector<std::vector<std::string>> cells;         // formatted "m +/- iqr" or "-"
    std::vector<std::vector<bool>> best;                 // best cell per row
};

struct AggregateResult {
    std::vector<MeasureTable> measures;     // robustness + quality heatmap data
    std::vector<MeasureTable> timings;      // per-scope runtime tables
    nlohmann::json accuracy;                // per (dataset x regressor) summaries
    nlohmann::json ranks;                   // average ranks + adjusted p-values
    int total_records = 0;
    int failed_records = 0;
};

// Reads the record stream and writes the summary tables (CSV + JSON) under
// <output_dir>/tables. Throws on an empty record set.
AggregateResult cmd_aggregate(const ExperimentConfig& config);

// Renders the aggregate as aligned plain text and writes report.txt.
std::string cmd_report(const ExperimentConfig& config);

}  // namespace xsr::harness
